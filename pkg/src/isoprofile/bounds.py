"""Certified lower bounds for isoperimetric profiles of M^m x R^n.

Three generic constructions are provided: the large-volume tube bound
(:func:`tube_bound`), the forward power-law extension of a certified pair
(:func:`forward_extension`) and the backward comparison with a model profile
(:func:`backward_extension`). :func:`product_bound` assembles them into the
piecewise bounds for S^2 x R^2, S^3 x R^2 and S^2 x R^3.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Union

import numpy as np

from .profiles import (
    DEFAULT_ETA_GRID,
    QUAD_RTOL,
    ProfileFn,
    SphereGeometry,
    cylinder_profile,
    sphere_profile,
    tube_function,
)
from .special import DomainError, euclidean_constant

__all__ = [
    "Product",
    "CertificationError",
    "TubeBound",
    "PowerLawBound",
    "ScaledReferenceBound",
    "Segment",
    "PiecewiseBound",
    "ImportedInequality",
    "CertifiedPair",
    "tube_bound",
    "forward_extension",
    "backward_extension",
    "combine_pointwise",
    "imported_inequalities",
    "certified_pairs",
    "recertify_pair",
    "product_bound",
    "headline_bound",
    "PRODUCT_CONSTANTS",
    "PAIR_SLACK",
]

# Largest accepted shortfall of a recomputed certificate below the quoted value.
PAIR_SLACK = 0.005


class Product(str, Enum):
    S2xR2 = "s2xr2"
    S2xR3 = "s2xr3"
    S3xR2 = "s3xr2"
    GENERIC = "generic"

    @classmethod
    def parse(cls, value: Union[str, "Product"]) -> "Product":
        try:
            return cls(str(getattr(value, "value", value)).lower())
        except ValueError:
            raise DomainError(
                f"unknown product {value!r}; expected one of s2xr2, s2xr3, s3xr2"
            ) from None

    @property
    def dims(self) -> tuple[int, int]:
        return {"s2xr2": (2, 2), "s2xr3": (2, 3), "s3xr2": (3, 2)}[self.value]


class CertificationError(ArithmeticError):
    """A recomputed certificate fell short of the value it is meant to back."""


@dataclass(frozen=True)
class TubeBound:
    """``alpha^{2-1/n} C_{M,n} v^{(n-1)/n}``, valid for ``v > v0``."""

    alpha: float
    vol_M: float
    n: int
    k: float
    v0: float
    coefficient: float
    provenance: str = "tube bound for large volumes"

    @property
    def exponent(self) -> float:
        return (self.n - 1) / self.n

    @property
    def valid_interval(self) -> tuple[float, float]:
        return (self.v0, math.inf)

    def __call__(self, v):
        return self.evaluate(v)

    def evaluate(self, v):
        arr = np.asarray(v, dtype=float)
        if np.any(arr <= self.v0):
            raise DomainError(f"tube bound holds only for v > v0 = {self.v0!r}")
        out = self.coefficient * arr**self.exponent
        return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class PowerLawBound:
    coefficient: float
    exponent: float
    valid_from: float
    provenance: str = ""

    @property
    def valid_interval(self) -> tuple[float, float]:
        return (self.valid_from, math.inf)

    def __call__(self, v):
        return self.evaluate(v)

    def evaluate(self, v):
        out = self.coefficient * np.asarray(v, dtype=float) ** self.exponent
        return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class ScaledReferenceBound:
    """``lam * reference(v)`` on ``valid_interval``.

    Past the end of a compact reference's domain the bound is the trivial 0.
    """

    lam: float
    reference: ProfileFn
    valid_interval: tuple[float, float]
    provenance: str = ""

    def __call__(self, v):
        return self.evaluate(v)

    def evaluate(self, v):
        arr = np.asarray(v, dtype=float)
        out = np.zeros(np.shape(arr))
        inside = arr <= self.reference.v_max
        if np.any(inside):
            out[inside] = self.lam * self.reference.evaluate(arr[inside])
        return float(out) if out.ndim == 0 else out


Bound = Union[TubeBound, PowerLawBound, ScaledReferenceBound]


@dataclass(frozen=True)
class Segment:
    lo: float
    hi: float
    bound: Bound

    def contains(self, v: np.ndarray) -> np.ndarray:
        above = v > self.lo if self.lo == 0.0 else v >= self.lo
        return above & (v <= self.hi)

    def describe(self) -> dict:
        b = self.bound
        out = {"interval": [self.lo, _json_float(self.hi)], "provenance": b.provenance}
        if isinstance(b, ScaledReferenceBound):
            out.update(kind="scaled-reference", factor=b.lam, reference=b.reference.name)
        elif isinstance(b, PowerLawBound):
            out.update(kind="power-law", coefficient=b.coefficient, exponent=b.exponent)
        else:
            out.update(kind="tube", coefficient=b.coefficient, exponent=b.exponent, v0=b.v0, k=b.k)
        return out


def _json_float(x: float):
    return "inf" if math.isinf(x) else x


@dataclass(frozen=True)
class PiecewiseBound:
    """A certified lower bound assembled from segments.

    Where segments overlap the larger value is used, since each is a lower
    bound on its own. ``statement`` is the single closed-form bound the
    segments jointly establish, when there is one.
    """

    segments: tuple[Segment, ...]
    product_id: Product = Product.GENERIC
    statement: ScaledReferenceBound | None = None

    def __call__(self, v):
        return self.evaluate(v)

    def evaluate(self, v):
        arr = np.asarray(v, dtype=float)
        flat = np.atleast_1d(arr)
        out = np.full(flat.shape, -np.inf)
        for seg in self.segments:
            mask = seg.contains(flat)
            if np.any(mask):
                out[mask] = np.maximum(out[mask], seg.bound.evaluate(flat[mask]))
        if np.any(np.isneginf(out)):
            bad = flat[np.isneginf(out)][0]
            raise DomainError(f"no certified segment covers v = {bad!r}")
        return float(out[0]) if arr.ndim == 0 else out.reshape(arr.shape)

    def active_segment(self, v: float) -> Segment:
        best, value = None, -math.inf
        for seg in self.segments:
            if seg.contains(np.asarray(v)):
                val = float(seg.bound.evaluate(v))
                if val > value:
                    best, value = seg, val
        if best is None:
            raise DomainError(f"no certified segment covers v = {v!r}")
        return best

    def covers(self, lo: float = 0.0, hi: float = math.inf) -> bool:
        """True when the segment intervals leave no gap inside ``(lo, hi)``."""
        reach = lo
        for seg in sorted(self.segments, key=lambda s: s.lo):
            if seg.lo > reach:
                return False
            reach = max(reach, seg.hi)
        return reach >= hi

    def to_dict(self) -> dict:
        out = {
            "product": self.product_id.value,
            "segments": [s.describe() for s in self.segments],
        }
        if self.statement is not None:
            out["statement"] = {
                "factor": self.statement.lam,
                "reference": self.statement.reference.name,
            }
        return out


@dataclass(frozen=True)
class ImportedInequality:
    """``I_lhs(v) >= factor * I_{(S^m x R, scale*(g_0 + dt^2))}(v)`` for all v."""

    factor: float
    lhs_product: Product
    rhs_dim: int
    rhs_scale: float
    source: str

    def reference(self, eta_grid_size: int = DEFAULT_ETA_GRID, rtol: float = QUAD_RTOL) -> ProfileFn:
        return cylinder_profile(self.rhs_dim, self.rhs_scale, eta_grid_size, rtol).times(
            self.factor, name=f"{self.factor:g}*I[S^{self.rhs_dim}xR,{self.rhs_scale:.4g}g]"
        )


# --------------------------------------------------------------------------
# Generic constructions


def tube_bound(vol_M: float, n: int, h: Callable, alpha: float) -> TubeBound:
    """Tube bound for ``M x R^n`` from a concave lower bound ``h`` of I_M.

    ``h`` must vanish at 0 and ``vol_M``; that is the caller's responsibility.
    """
    if not 0.0 < alpha < 1.0:
        raise DomainError(f"alpha must lie in (0, 1), got {alpha}")
    tube = tube_function(vol_M, n)
    h_at = float(h(alpha * vol_M))
    if not h_at > 0.0:
        raise DomainError(f"h(alpha*vol_M) must be positive, got {h_at}")
    k = alpha * vol_M / h_at
    v0 = (tube.coefficient / (k * (1.0 - alpha) ** 2)) ** n
    coefficient = alpha ** (2.0 - 1.0 / n) * tube.coefficient
    return TubeBound(alpha, vol_M, n, k, v0, coefficient)


def forward_extension(x0: float, y0: float, n: int, provenance: str = "") -> PowerLawBound:
    """Power law through the certified pair ``y0 <= I(x0)``, valid for v >= x0."""
    if not (x0 > 0 and y0 > 0):
        raise DomainError(f"certified pair must be positive, got ({x0}, {y0})")
    if n < 2:
        raise DomainError(f"Euclidean factor dimension must be >= 2, got {n}")
    e = (n - 1) / n
    return PowerLawBound(
        coefficient=y0 / x0**e,
        exponent=e,
        valid_from=x0,
        provenance=provenance or f"forward extension of I({x0:g}) >= {y0:g}",
    )


def backward_extension(
    v0: float, k: float, total_dim: int, reference: ProfileFn, provenance: str = ""
) -> ScaledReferenceBound:
    """``(k/gamma_m) * reference`` on ``(0, v0]`` from ``I(v0) > k v0^{(m-1)/m}``.

    Both the target and the reference must have nonnegative Ricci curvature,
    so that ``I/v^{(m-1)/m}`` is nonincreasing for each.
    """
    if not (v0 > 0 and k > 0):
        raise DomainError(f"v0 and k must be positive, got ({v0}, {k})")
    if not reference.renormalized_concave:
        raise DomainError(f"reference {reference.name} is not known to be renormalized-concave")
    if reference.ambient_dim != total_dim:
        raise DomainError(
            f"reference dimension {reference.ambient_dim} differs from {total_dim}"
        )
    g = euclidean_constant(total_dim)
    if k >= g:
        raise DomainError(f"k = {k} is not below the Euclidean constant {g}")
    return ScaledReferenceBound(
        lam=k / g,
        reference=reference,
        valid_interval=(0.0, v0),
        provenance=provenance or f"backward extension of I({v0:g}) > {k:g}*{v0:g}^(({total_dim}-1)/{total_dim})",
    )


def combine_pointwise(
    x0: float, y0: float, m: int, n: int, reference: ProfileFn | None = None
) -> PiecewiseBound:
    """Extend the certified pair ``I(x0) > y0`` of ``S^m x R^n`` both ways.

    Below ``x0`` the bound compares with the unit sphere ``S^{m+n}`` (or the
    given reference); above it, the forward power law applies.
    """
    d = m + n
    if reference is None:
        reference = sphere_profile(SphereGeometry(d))
    k = y0 / x0 ** ((d - 1) / d)
    back = backward_extension(x0, k, d, reference)
    fwd = forward_extension(x0, y0, n)
    return PiecewiseBound(
        segments=(Segment(0.0, x0, back), Segment(x0, math.inf, fwd)),
        product_id=Product.GENERIC,
    )


# --------------------------------------------------------------------------
# The three products


@dataclass(frozen=True)
class ProductConstants:
    """Numbers entering the piecewise bound of one product."""

    factor: float  # proved comparison factor against the sphere model
    sphere_dim: int
    sphere_scale: float
    backward_v0: float
    backward_k: float
    middle: tuple[float, float]
    pair: tuple[float, float]  # quoted certified pair (x0, y0)
    forward_coefficient: float  # quoted, rounded down from y0/x0^e
    continuation_to: float  # right end of the checked power-law interval
    max_location: float  # quoted location of the sphere-model maximum
    headline_factor: float
    headline_scale: float


PRODUCT_CONSTANTS: dict[Product, ProductConstants] = {
    Product.S2xR2: ProductConstants(
        factor=0.886, sphere_dim=4, sphere_scale=4.7,
        backward_v0=4.0, backward_k=5.5, middle=(4.0, 65.0),
        pair=(65.0, 99.4), forward_coefficient=12.32,
        continuation_to=291.0, max_location=290.69,
        headline_factor=0.88, headline_scale=4.7,
    ),
    Product.S3xR2: ProductConstants(
        factor=0.91, sphere_dim=5, sphere_scale=2.77,
        backward_v0=1.0, backward_k=6.5, middle=(1.0, 60.0),
        pair=(60.0, 118.245), forward_coefficient=15.26,
        continuation_to=200.0, max_location=198.4,
        headline_factor=0.91, headline_scale=4.9,
    ),
    Product.S2xR3: ProductConstants(
        factor=0.867, sphere_dim=5, sphere_scale=7.5,
        backward_v0=13.0, backward_k=6.34, middle=(13.0, 140.0),
        pair=(140.0, 277.8), forward_coefficient=10.3,
        continuation_to=2389.0, max_location=2388.21,
        headline_factor=0.86, headline_scale=7.5,
    ),
}


def imported_inequalities() -> list[ImportedInequality]:
    return [
        ImportedInequality(1.0, Product.S2xR2, 3, 2.0,
                           "S^2 x R^2 dominates the cylinder S^3 x R with metric 2(g_0 + dt^2)"),
        ImportedInequality(0.99, Product.S3xR2, 4, 2.0 ** 1.5,
                           "S^3 x R^2 dominates 0.99 times the cylinder S^4 x R with metric 2^(3/2)(g_0 + dt^2)"),
        ImportedInequality(0.99, Product.S2xR3, 4, 2.0 ** (5.0 / 3.0),
                           "S^2 x R^3 dominates 0.99 times the cylinder S^4 x R with metric 2^(5/3)(g_0 + dt^2)"),
    ]


def _import_for(product: Product) -> ImportedInequality:
    for imp in imported_inequalities():
        if imp.lhs_product is product:
            return imp
    raise DomainError(f"no imported inequality for {product.value}")


@dataclass(frozen=True)
class CertifiedPair:
    product: Product
    x0: float
    y0_quoted: float
    y0_computed: float
    exponent: float

    @property
    def coefficient_quoted(self) -> float:
        return self.y0_quoted / self.x0**self.exponent

    @property
    def coefficient_computed(self) -> float:
        return self.y0_computed / self.x0**self.exponent

    @property
    def shortfall(self) -> float:
        """Relative amount by which the computation undercuts the quoted y0 (<= 0 if not)."""
        return (self.y0_quoted - self.y0_computed) / self.y0_quoted


def recertify_pair(
    product: Product | str, eta_grid_size: int = DEFAULT_ETA_GRID, rtol: float = QUAD_RTOL
) -> CertifiedPair:
    """Recompute ``factor * I_cyl(x0)`` for the product's quoted pair.

    Raises :class:`CertificationError` when the computation undercuts the
    quoted ``y0`` by more than ``PAIR_SLACK``.
    """
    product = Product.parse(product)
    const = PRODUCT_CONSTANTS[product]
    x0, y0 = const.pair
    computed = float(_import_for(product).reference(eta_grid_size, rtol)(x0))
    n = product.dims[1]
    pair = CertifiedPair(product, x0, y0, computed, (n - 1) / n)
    if pair.shortfall > PAIR_SLACK:
        raise CertificationError(
            f"{product.value}: recomputed I({x0:g}) = {computed:.6g} undercuts "
            f"the quoted {y0:g} by {100 * pair.shortfall:.3f}%"
        )
    return pair


def certified_pairs(eta_grid_size: int = DEFAULT_ETA_GRID, rtol: float = QUAD_RTOL) -> list[CertifiedPair]:
    return [recertify_pair(p, eta_grid_size, rtol) for p in PRODUCT_CONSTANTS]


def _sphere_model(product: Product, scale: float | None = None) -> ProfileFn:
    const = PRODUCT_CONSTANTS[product]
    return sphere_profile(SphereGeometry(const.sphere_dim, scale or const.sphere_scale))


def product_bound(
    product_id: Product | str,
    recheck: bool = True,
    eta_grid_size: int = DEFAULT_ETA_GRID,
    rtol: float = QUAD_RTOL,
) -> PiecewiseBound:
    """Piecewise certified lower bound of the named product on (0, inf).

    With ``recheck`` the certified pair is recomputed from the cylinder profile
    first (see :func:`recertify_pair`).
    """
    product = Product.parse(product_id)
    if product is Product.GENERIC:
        raise DomainError("generic products have no assembled bound")
    const = PRODUCT_CONSTANTS[product]
    m, n = product.dims
    if recheck:
        recertify_pair(product, eta_grid_size, rtol)
    model = _sphere_model(product)
    imp = _import_for(product)
    via = "" if imp.factor == 1.0 else f"{imp.factor:g}*"
    cert = f"{via}I[S^{imp.rhs_dim}xR,{imp.rhs_scale:.4g}g]"
    lo, hi = const.middle
    x0, y0 = const.pair
    back = backward_extension(
        const.backward_v0,
        const.backward_k,
        m + n,
        model,
        provenance=(
            f"backward extension: {cert}({const.backward_v0:g}) > "
            f"{const.backward_k:g}*{const.backward_v0:g}^({m + n - 1}/{m + n}), "
            f"then the imported cylinder comparison"
        ),
    )
    middle = ScaledReferenceBound(
        lam=const.factor,
        reference=model,
        valid_interval=(lo, hi),
        provenance=f"sampled dominance of {cert} over {const.factor:g}*{model.name} on [{lo:g}, {hi:g}]",
    )
    fwd = PowerLawBound(
        coefficient=const.forward_coefficient,
        exponent=(n - 1) / n,
        valid_from=x0,
        provenance=(
            f"forward extension of the certified pair I({x0:g}) >= {y0:g} "
            f"(coefficient {y0 / x0 ** ((n - 1) / n):.5g}, rounded down)"
        ),
    )
    statement = ScaledReferenceBound(
        lam=const.factor,
        reference=model,
        valid_interval=(0.0, math.inf),
        provenance=(
            f"{const.factor:g}*{model.name} on (0, inf): the three segments, plus the "
            f"power law staying above the model past its maximum at {model.v_max / 2:.6g}"
        ),
    )
    return PiecewiseBound(
        segments=(
            Segment(0.0, const.backward_v0, back),
            Segment(lo, hi, middle),
            Segment(x0, math.inf, fwd),
        ),
        product_id=product,
        statement=statement,
    )


def headline_bound(product_id: Product | str, variant: str = "proof") -> ScaledReferenceBound:
    """The one-line comparison ``factor * I_{(S^{m+n}, scale g_0)}``.

    ``variant="proof"`` uses the constants the piecewise argument certifies;
    ``variant="headline"`` uses the rounded factors and scales as announced,
    which for S^3 x R^2 differ in the scale (4.9 rather than 2.77).
    """
    product = Product.parse(product_id)
    const = PRODUCT_CONSTANTS[product]
    if variant == "proof":
        factor, scale = const.factor, const.sphere_scale
    elif variant == "headline":
        factor, scale = const.headline_factor, const.headline_scale
    else:
        raise DomainError(f"unknown variant {variant!r}; expected 'proof' or 'headline'")
    model = _sphere_model(product, scale)
    return ScaledReferenceBound(factor, model, (0.0, math.inf), provenance=f"{variant} constants")


# Alternate names kept for callers that use them.
TheoremOneBound = TubeBound
theorem1_bound = tube_bound
paper_bound = product_bound
