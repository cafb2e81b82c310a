"""Sampled verification of profile inequalities.

Every check returns a :class:`VerificationReport` rather than raising, so a
failing claim still carries its minimum margin and where it occurred. Checks
are by dense sampling with local refinement, not interval arithmetic.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import asdict, dataclass, field
from typing import Callable

import numpy as np

from .bounds import (
    PRODUCT_CONSTANTS,
    CertificationError,
    PowerLawBound,
    Product,
    _import_for,
    _sphere_model,
    recertify_pair,
)
from .profiles import DEFAULT_ETA_GRID, QUAD_RTOL
from .special import DomainError, euclidean_constant

__all__ = [
    "VerificationReport",
    "dominates",
    "check_monotone",
    "check_renormalized_concavity",
    "FIGURES",
    "figure_curves",
    "figure_data",
    "figure_csv",
    "CLAIMS",
    "run_claim",
    "run_all",
    "DEFAULT_SAMPLES",
    "MONOTONE_SLACK",
    "CONCAVITY_SLACK",
    "JUNCTION_RTOL",
    "MAX_LOCATION_RTOL",
]

DEFAULT_SAMPLES = 2048
MIN_SAMPLES = 256
REFINE_ROUNDS = 3
REFINE_FACTOR = 4
MONOTONE_SLACK = 1e-9
CONCAVITY_SLACK = 1e-6
JUNCTION_RTOL = 0.005
MAX_LOCATION_RTOL = 1e-3


@dataclass
class VerificationReport:
    claim_id: str
    interval: tuple[float, float]
    samples: int
    min_margin: float
    min_margin_location: float
    relative_min_margin: float
    passed: bool
    tolerance_used: float
    detail: str = ""
    error: str | None = None
    parts: list["VerificationReport"] = field(default_factory=list)

    def to_dict(self) -> dict:
        out = asdict(self)
        out["interval"] = list(self.interval)
        out["parts"] = [p.to_dict() for p in self.parts]
        return out

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return (
            f"{status} {self.claim_id} on [{self.interval[0]:g}, {self.interval[1]:g}]: "
            f"min margin {self.min_margin:.6g} at v={self.min_margin_location:.6g} "
            f"(relative {self.relative_min_margin:.4g}, {self.samples} samples)"
        )


def _first_bad_volume(fn: Callable, v: np.ndarray) -> float:
    for x in v:
        try:
            fn(np.array([x]))
        except Exception:
            return float(x)
    return float("nan")


def _failed(claim_id, interval, samples, fn_pair, grid, exc, tol) -> VerificationReport:
    bad = math.nan
    for fn in fn_pair:
        bad = _first_bad_volume(fn, grid)
        if not math.isnan(bad):
            break
    return VerificationReport(
        claim_id, tuple(interval), samples, -math.inf, bad, -math.inf, False, tol,
        error=f"{type(exc).__name__}: {exc} (at v={bad!r})",
    )


def _check_samples(n: int) -> None:
    if n < MIN_SAMPLES:
        raise DomainError(f"need at least {MIN_SAMPLES} samples, got {n}")


def dominates(
    f: Callable,
    g: Callable,
    interval: tuple[float, float],
    base_samples: int = DEFAULT_SAMPLES,
    claim_id: str = "dominance",
) -> VerificationReport:
    """Check ``f > g`` on ``[a, b]``.

    A uniform grid locates the smallest margin ``f - g``; the bracket around
    it is then resampled at four times the local density for three rounds.
    The claim passes only if every sampled margin is strictly positive.
    """
    _check_samples(base_samples)
    a, b = map(float, interval)
    grid = np.linspace(a, b, base_samples)
    try:
        margin = np.asarray(f(grid) - g(grid), dtype=float)
        g_vals = np.asarray(g(grid), dtype=float)
    except Exception as exc:
        return _failed(claim_id, (a, b), base_samples, (f, g), grid, exc, 0.0)
    vs, ms, gs = [grid], [margin], [g_vals]
    i = int(np.argmin(margin))
    lo, hi = grid[max(i - 1, 0)], grid[min(i + 1, len(grid) - 1)]
    for _ in range(REFINE_ROUNDS):
        fine = np.linspace(lo, hi, 2 * REFINE_FACTOR + 1)
        try:
            fm = np.asarray(f(fine) - g(fine), dtype=float)
            fg = np.asarray(g(fine), dtype=float)
        except Exception as exc:
            return _failed(claim_id, (a, b), sum(map(len, vs)), (f, g), fine, exc, 0.0)
        vs.append(fine)
        ms.append(fm)
        gs.append(fg)
        j = int(np.argmin(fm))
        lo, hi = fine[max(j - 1, 0)], fine[min(j + 1, len(fine) - 1)]
    v_all, m_all, g_all = map(np.concatenate, (vs, ms, gs))
    k = int(np.argmin(m_all))
    pos = g_all > 0
    rel = float(np.min(m_all[pos] / g_all[pos])) if np.any(pos) else math.nan
    return VerificationReport(
        claim_id=claim_id,
        interval=(a, b),
        samples=int(v_all.size),
        min_margin=float(m_all[k]),
        min_margin_location=float(v_all[k]),
        relative_min_margin=rel,
        passed=bool(np.all(m_all > 0.0)),
        tolerance_used=0.0,
    )


def check_monotone(
    p: Callable, interval: tuple[float, float], samples: int = DEFAULT_SAMPLES,
    claim_id: str = "monotone",
) -> VerificationReport:
    """Nondecreasing on the grid up to an absolute slack of ``MONOTONE_SLACK``."""
    _check_samples(samples)
    a, b = map(float, interval)
    grid = np.linspace(a, b, samples)
    try:
        vals = np.asarray(p(grid), dtype=float)
    except Exception as exc:
        return _failed(claim_id, (a, b), samples, (p,), grid, exc, MONOTONE_SLACK)
    steps = np.diff(vals)
    k = int(np.argmin(steps))
    scale = np.abs(vals[:-1])
    rel = float(np.min(np.where(scale > 0, steps / np.where(scale > 0, scale, 1.0), steps)))
    return VerificationReport(
        claim_id, (a, b), samples, float(steps[k]), float(grid[k]), rel,
        bool(steps[k] >= -MONOTONE_SLACK), MONOTONE_SLACK,
        detail="min over consecutive increments p(v_{i+1}) - p(v_i)",
    )


def check_renormalized_concavity(
    p: Callable, ambient_dim: int, interval: tuple[float, float],
    samples: int = DEFAULT_SAMPLES, claim_id: str = "renormalized-concavity",
) -> VerificationReport:
    """Concavity of ``J = p^{d/(d-1)}`` by second differences, and the consequence
    that ``p(v) / v^{(d-1)/d}`` is nonincreasing.

    Both are tested up to ``CONCAVITY_SLACK`` times the largest value of the
    quantity on the grid.
    """
    _check_samples(samples)
    d = ambient_dim
    a, b = map(float, interval)
    grid = np.linspace(a, b, samples)
    try:
        vals = np.asarray(p(grid), dtype=float)
    except Exception as exc:
        return _failed(claim_id, (a, b), samples, (p,), grid, exc, CONCAVITY_SLACK)
    J = vals ** (d / (d - 1))
    second = J[:-2] - 2.0 * J[1:-1] + J[2:]
    j_slack = CONCAVITY_SLACK * float(np.max(np.abs(J)))
    ratio = vals / grid ** ((d - 1) / d) if a > 0 else vals[1:] / grid[1:] ** ((d - 1) / d)
    r_steps = np.diff(ratio)
    r_slack = CONCAVITY_SLACK * float(np.max(np.abs(ratio)))
    j_margin = j_slack - second  # >= 0 where concave within slack
    r_margin = r_slack - r_steps
    parts = [
        VerificationReport(
            f"{claim_id}:second-difference", (a, b), samples,
            float(np.min(j_margin)), float(grid[1 + int(np.argmin(j_margin))]),
            float(np.min(j_margin) / max(j_slack, 1e-300)),
            bool(np.all(second <= j_slack)), j_slack,
            detail="slack minus (J[i-1] - 2J[i] + J[i+1])",
        ),
        VerificationReport(
            f"{claim_id}:ratio-nonincreasing", (a, b), samples,
            float(np.min(r_margin)), float(grid[int(np.argmin(r_margin))]),
            float(np.min(r_margin) / max(r_slack, 1e-300)),
            bool(np.all(r_steps <= r_slack)), r_slack,
            detail="slack minus increments of p(v)/v^((d-1)/d)",
        ),
    ]
    worst = min(parts, key=lambda r: r.min_margin)
    return VerificationReport(
        claim_id, (a, b), samples, worst.min_margin, worst.min_margin_location,
        worst.relative_min_margin, all(r.passed for r in parts), CONCAVITY_SLACK,
        detail=f"max second difference {float(np.max(second)):.3e}",
        parts=parts,
    )


# --------------------------------------------------------------------------
# Figures: the six curve comparisons behind the piecewise bounds


@dataclass(frozen=True)
class FigureSpec:
    figure_id: int
    product: Product
    lhs_kind: str  # "cylinder" or "power"
    interval: tuple[float, float]

    @property
    def description(self) -> str:
        const = PRODUCT_CONSTANTS[self.product]
        model = f"{const.factor:g}*I[S^{const.sphere_dim},{const.sphere_scale:g}g0]"
        if self.lhs_kind == "cylinder":
            imp = _import_for(self.product)
            lhs = f"{imp.factor:g}*I[S^{imp.rhs_dim}xR,{imp.rhs_scale:.4g}(g0+dt^2)]"
        else:
            n = self.product.dims[1]
            lhs = f"{const.forward_coefficient:g}*v^({n - 1}/{n})"
        return f"{lhs} vs {model} on [{self.interval[0]:g}, {self.interval[1]:g}]"


FIGURES: dict[int, FigureSpec] = {
    1: FigureSpec(1, Product.S2xR2, "cylinder", (4.0, 65.0)),
    2: FigureSpec(2, Product.S2xR2, "power", (65.0, 291.0)),
    3: FigureSpec(3, Product.S3xR2, "cylinder", (1.0, 60.0)),
    4: FigureSpec(4, Product.S3xR2, "power", (60.0, 200.0)),
    5: FigureSpec(5, Product.S2xR3, "cylinder", (13.0, 140.0)),
    6: FigureSpec(6, Product.S2xR3, "power", (140.0, 2389.0)),
}


def _forward_power(product: Product) -> PowerLawBound:
    const = PRODUCT_CONSTANTS[product]
    n = product.dims[1]
    return PowerLawBound(const.forward_coefficient, (n - 1) / n, const.pair[0])


def figure_curves(figure_id: int, eta_grid_size: int = DEFAULT_ETA_GRID, rtol: float = QUAD_RTOL):
    """(spec, lhs, rhs) callables for one figure."""
    try:
        spec = FIGURES[int(figure_id)]
    except (KeyError, ValueError):
        raise DomainError(f"unknown figure {figure_id!r}; expected 1..6") from None
    const = PRODUCT_CONSTANTS[spec.product]
    rhs = _sphere_model(spec.product).times(const.factor)
    if spec.lhs_kind == "cylinder":
        lhs = _import_for(spec.product).reference(eta_grid_size, rtol)
    else:
        lhs = _forward_power(spec.product)
    return spec, lhs, rhs


def figure_data(
    figure_id: int,
    samples: int = DEFAULT_SAMPLES,
    eta_grid_size: int = DEFAULT_ETA_GRID,
    rtol: float = QUAD_RTOL,
) -> np.ndarray:
    """Rows ``(v, lhs, rhs, margin)`` over the figure's interval, sorted by v."""
    spec, lhs, rhs = figure_curves(figure_id, eta_grid_size, rtol)
    v = np.linspace(*spec.interval, samples)
    left, right = np.asarray(lhs(v)), np.asarray(rhs(v))
    return np.column_stack([v, left, right, left - right])


def _fmt(x: float) -> str:
    return np.format_float_positional(x, precision=12, unique=False, fractional=False, trim="-")


def figure_csv(rows: np.ndarray) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["v", "lhs", "rhs", "margin"])
    for row in rows:
        w.writerow([_fmt(x) for x in row])
    return buf.getvalue()


# --------------------------------------------------------------------------
# Claim registry


def _figure_claim(figure_id: int):
    def run(samples: int, eta_grid_size: int, rtol: float) -> VerificationReport:
        spec, lhs, rhs = figure_curves(figure_id, eta_grid_size, rtol)
        rep = dominates(lhs, rhs, spec.interval, samples, claim_id=f"fig{figure_id}")
        rep.detail = spec.description
        return rep
    return run


def _backward_claim(product: Product):
    """Small volumes: the certificate at v0 exceeds k v0^{(d-1)/d}, k/gamma_d is at
    least the proved factor, and the resulting comparison holds on a sample of (0, v0]."""

    def run(samples: int, eta_grid_size: int, rtol: float) -> VerificationReport:
        const = PRODUCT_CONSTANTS[product]
        d = sum(product.dims)
        v0, k = const.backward_v0, const.backward_k
        cert = _import_for(product).reference(eta_grid_size, rtol)
        model = _sphere_model(product)
        claim = f"{product.value}-backward"
        hyp = float(cert(v0)) - k * v0 ** ((d - 1) / d)
        lam = k / euclidean_constant(d)
        parts = [
            VerificationReport(
                f"{claim}:hypothesis", (v0, v0), 1, hyp, v0,
                hyp / (k * v0 ** ((d - 1) / d)), hyp > 0, 0.0,
                detail=f"{cert.name}({v0:g}) - {k:g}*{v0:g}^({d - 1}/{d})",
            ),
            VerificationReport(
                f"{claim}:factor", (v0, v0), 1, lam - const.factor, v0,
                (lam - const.factor) / const.factor, lam > const.factor, 0.0,
                detail=f"{k:g}/gamma_{d} = {lam:.6f} vs {const.factor:g}",
            ),
            dominates(cert, model.times(lam), (v0 * 1e-3, v0), samples, claim_id=f"{claim}:sampled"),
        ]
        worst = min(parts, key=lambda r: r.relative_min_margin)
        return VerificationReport(
            claim, (0.0, v0), sum(p.samples for p in parts), worst.min_margin,
            worst.min_margin_location, worst.relative_min_margin,
            all(p.passed for p in parts), 0.0, detail=f"lambda = {lam:.6f}", parts=parts,
        )
    return run


def _pair_claim(product: Product):
    """The certified pair, recomputed: the derived power-law coefficient must be
    at least the one used downstream."""

    def run(samples: int, eta_grid_size: int, rtol: float) -> VerificationReport:
        const = PRODUCT_CONSTANTS[product]
        claim = f"{product.value}-pair"
        x0, y0 = const.pair
        try:
            pair = recertify_pair(product, eta_grid_size, rtol)
        except CertificationError as exc:
            return VerificationReport(claim, (x0, x0), 1, -math.inf, x0, -math.inf, False,
                                      0.0, error=str(exc))
        margin = pair.coefficient_computed - const.forward_coefficient
        return VerificationReport(
            claim, (x0, x0), 1, margin, x0, margin / const.forward_coefficient,
            margin > 0, 0.0,
            detail=(
                f"recomputed I({x0:g}) = {pair.y0_computed:.6f} vs quoted {y0:g} "
                f"(shortfall {100 * pair.shortfall:+.4f}%); coefficient "
                f"{pair.coefficient_computed:.6f} vs {const.forward_coefficient:g}"
            ),
        )
    return run


def _continuation_claim(product: Product):
    """Past the checked interval: the model profile peaks at half its total volume
    (at or before the interval's right end) and the power law keeps increasing."""

    def run(samples: int, eta_grid_size: int, rtol: float) -> VerificationReport:
        const = PRODUCT_CONSTANTS[product]
        claim = f"{product.value}-continuation"
        model = _sphere_model(product)
        half = 0.5 * model.v_max
        # locate the maximum on a grid refined around the sampled peak
        grid = np.linspace(0.5 * half, 1.5 * half, samples)
        vals = model(grid)
        for _ in range(REFINE_ROUNDS + 2):
            i = int(np.argmax(vals))
            grid = np.linspace(grid[max(i - 1, 0)], grid[min(i + 1, len(grid) - 1)], 2 * REFINE_FACTOR + 1)
            vals = model(grid)
        peak = float(grid[int(np.argmax(vals))])
        loc_err = abs(peak - half) / half
        quoted_err = abs(half - const.max_location) / const.max_location
        power = _forward_power(product)
        right = const.continuation_to
        parts = [
            VerificationReport(
                f"{claim}:peak", (0.5 * half, 1.5 * half), samples, MAX_LOCATION_RTOL - loc_err,
                peak, (MAX_LOCATION_RTOL - loc_err) / MAX_LOCATION_RTOL,
                loc_err <= MAX_LOCATION_RTOL, MAX_LOCATION_RTOL,
                detail=(f"sampled maximum at {peak:.6g}, half volume {half:.6g}, "
                        f"quoted {const.max_location:g} (off by {100 * quoted_err:.3f}%)"),
            ),
            VerificationReport(
                f"{claim}:peak-inside", (half, right), 1, right - half, half,
                (right - half) / right, half <= right, 0.0,
                detail="maximum lies at or before the end of the checked interval",
            ),
            check_monotone(power, (const.pair[0], 4.0 * right), samples, claim_id=f"{claim}:power-monotone"),
            check_monotone(lambda v: -model(v), (half, model.v_max), samples, claim_id=f"{claim}:model-decreasing"),
        ]
        worst = min(parts, key=lambda r: r.relative_min_margin)
        return VerificationReport(
            claim, (half, math.inf), sum(p.samples for p in parts), worst.min_margin,
            worst.min_margin_location, worst.relative_min_margin,
            all(p.passed for p in parts), MAX_LOCATION_RTOL, parts=parts,
        )
    return run


def _junction_claim(product: Product):
    """At the volume shared by the middle and forward comparisons, both sides
    are evaluated: both margins must be positive and both sides must see the
    same model value to ``JUNCTION_RTOL``."""

    def run(samples: int, eta_grid_size: int, rtol: float) -> VerificationReport:
        const = PRODUCT_CONSTANTS[product]
        claim = f"{product.value}-junction"
        x = const.middle[1]
        mid_fig = next(f for f in FIGURES.values() if f.product is product and f.lhs_kind == "cylinder")
        fwd_fig = next(f for f in FIGURES.values() if f.product is product and f.lhs_kind == "power")
        _, l1, r1 = figure_curves(mid_fig.figure_id, eta_grid_size, rtol)
        _, l2, r2 = figure_curves(fwd_fig.figure_id, eta_grid_size, rtol)
        m1 = float(l1(x)) - float(r1(x))
        m2 = float(l2(x)) - float(r2(x))
        disc = abs(float(r1(x)) - float(r2(x))) / float(r1(x))
        margin = min(m1, m2)
        ok = m1 > 0 and m2 > 0 and disc <= JUNCTION_RTOL
        return VerificationReport(
            claim, (x, x), 2, margin, x, margin / float(r1(x)), ok, JUNCTION_RTOL,
            detail=(f"left margin {m1:.6g}, right margin {m2:.6g}, "
                    f"model discrepancy {disc:.2e}; certificates {float(l1(x)):.6g} | {float(l2(x)):.6g}"),
        )
    return run


CLAIMS: dict[str, Callable[[int, int, float], VerificationReport]] = {
    **{f"fig{i}": _figure_claim(i) for i in FIGURES},
    **{f"{p.value}-backward": _backward_claim(p) for p in PRODUCT_CONSTANTS},
    **{f"{p.value}-pair": _pair_claim(p) for p in PRODUCT_CONSTANTS},
    **{f"{p.value}-junction": _junction_claim(p) for p in PRODUCT_CONSTANTS},
    **{f"{p.value}-continuation": _continuation_claim(p) for p in PRODUCT_CONSTANTS},
}


def run_claim(
    claim_id: str,
    samples: int = DEFAULT_SAMPLES,
    eta_grid_size: int = DEFAULT_ETA_GRID,
    rtol: float = QUAD_RTOL,
) -> VerificationReport:
    try:
        recipe = CLAIMS[claim_id]
    except KeyError:
        raise DomainError(f"unknown claim {claim_id!r}; known: {', '.join(sorted(CLAIMS))}") from None
    return recipe(samples, eta_grid_size, rtol)


def run_all(
    samples: int = DEFAULT_SAMPLES, eta_grid_size: int = DEFAULT_ETA_GRID, rtol: float = QUAD_RTOL
) -> list[VerificationReport]:
    return [run_claim(cid, samples, eta_grid_size, rtol) for cid in sorted(CLAIMS)]
