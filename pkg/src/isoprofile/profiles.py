"""Exact isoperimetric profiles of R^n, S^m and S^m x R, metric scaling, and
the tube-area function of M^m x R^n.

Every profile is a :class:`ProfileFn`: an immutable, vectorized map from
enclosed volume to least boundary area, tagged with the shape facts the rest
of the package relies on (monotonicity, concavity of ``I^{d/(d-1)}``).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from functools import lru_cache
from typing import Callable

import numpy as np
from scipy.interpolate import PchipInterpolator
from scipy.optimize import minimize_scalar

from .quadrature import QuadratureError, tanh_sinh
from .special import (
    DomainError,
    euclidean_constant,
    sin_power_integral,
    sin_power_ratio,
    sphere_volume,
)

__all__ = [
    "ProfileFn",
    "SphereGeometry",
    "CylinderBallFamily",
    "TubeFunction",
    "euclidean_profile",
    "sphere_ball",
    "sphere_profile",
    "cylinder_family",
    "cylinder_profile",
    "scale_profile",
    "tube_function",
    "DEFAULT_ETA_GRID",
    "INVERSION_RTOL",
    "QUAD_RTOL",
]

DEFAULT_ETA_GRID = 512
INVERSION_RTOL = 1e-8
QUAD_RTOL = 1e-9

_GL_X, _GL_W = np.polynomial.legendre.leggauss(12)


@dataclass(frozen=True)
class ProfileFn:
    """A named area-of-volume function on ``(0, v_max]``.

    ``func`` receives a float array of interior volumes and returns areas.
    Evaluating exactly at 0 or at a finite ``v_max`` returns 0 by continuous
    extension.
    """

    name: str
    func: Callable[[np.ndarray], np.ndarray] = field(repr=False, compare=False)
    ambient_dim: int
    v_max: float = math.inf
    monotone_nondecreasing: bool = False
    renormalized_concave: bool = False

    def __call__(self, v):
        return self.evaluate(v)

    def evaluate(self, v):
        arr = np.asarray(v, dtype=float)
        flat = np.atleast_1d(arr)
        outside = ~np.isfinite(flat) | (flat < 0.0) | (flat > self.v_max)
        if np.any(outside):
            raise DomainError(
                f"{self.name}: volume {flat[outside][0]!r} outside [0, {self.v_max!r}]"
            )
        out = np.zeros_like(flat)
        interior = (flat > 0.0) & (flat < self.v_max)
        if np.any(interior):
            out[interior] = self.func(flat[interior])
        return out.reshape(arr.shape) if arr.ndim else float(out[0])

    def times(self, factor: float, name: str | None = None) -> "ProfileFn":
        """The profile multiplied by a positive constant (shape flags kept)."""
        if factor <= 0:
            raise DomainError(f"factor must be positive, got {factor}")
        base = self.func
        return replace(
            self,
            name=name or f"{factor:g}*{self.name}",
            func=lambda v: factor * base(v),
        )


# --------------------------------------------------------------------------
# Euclidean space


def euclidean_profile(n: int) -> ProfileFn:
    g = euclidean_constant(n)
    e = (n - 1) / n
    return ProfileFn(
        name=f"I[R^{n}]",
        func=lambda v: g * v**e,
        ambient_dim=n,
        monotone_nondecreasing=True,
        renormalized_concave=True,
    )


# --------------------------------------------------------------------------
# Round spheres


@dataclass(frozen=True)
class SphereGeometry:
    """The round sphere S^m with metric ``scale * g_0``."""

    dim: int
    scale: float = 1.0

    def __post_init__(self):
        if self.dim < 1:
            raise DomainError(f"sphere dimension must be >= 1, got {self.dim}")
        if not self.scale > 0:
            raise DomainError(f"metric scale must be positive, got {self.scale}")

    @property
    def total_volume(self) -> float:
        return self.scale ** (0.5 * self.dim) * sphere_volume(self.dim)


def sphere_ball(geom: SphereGeometry, r):
    """(volume, boundary area) of the geodesic ball of radius ``r`` in unit S^m.

    ``r`` is measured in the unit round metric; use :func:`scale_profile`
    for other scales.
    """
    m = geom.dim
    r_arr = np.asarray(r, dtype=float)
    if np.any(r_arr < 0.0) or np.any(r_arr > math.pi):
        raise DomainError(f"geodesic radius must lie in [0, pi], got {r!r}")
    c = sphere_volume(m - 1)
    vol = c * sin_power_integral(m - 1, r_arr)
    area = c * np.sin(r_arr) ** (m - 1)
    if m > 1:
        area = np.where(r_arr >= math.pi, 0.0, area)
    if r_arr.ndim == 0:
        return float(vol), float(area)
    return vol, area


def _sphere_radius(m: int, v: np.ndarray) -> np.ndarray:
    """Invert the ball-volume map of unit S^m by bisection on [0, pi]."""
    c = sphere_volume(m - 1)
    target = v / c
    lo = np.zeros_like(v)
    hi = np.full_like(v, math.pi)
    # 60 halvings take pi below 1e-17, past double resolution of r
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        below = sin_power_integral(m - 1, mid) < target
        lo = np.where(below, mid, lo)
        hi = np.where(below, hi, mid)
    return 0.5 * (lo + hi)


def sphere_profile(geom: SphereGeometry) -> ProfileFn:
    m = geom.dim
    c = sphere_volume(m - 1)

    def unit(v):
        r = _sphere_radius(m, v)
        return c * np.sin(r) ** (m - 1)

    base = ProfileFn(
        name=f"I[S^{m}]",
        func=unit,
        ambient_dim=m,
        v_max=sphere_volume(m),
        renormalized_concave=True,
    )
    if geom.scale == 1.0:
        return base
    return replace(
        scale_profile(base, m, geom.scale), name=f"I[S^{m},{geom.scale:g}g0]"
    )


# --------------------------------------------------------------------------
# Spherical cylinders S^m x R: ball-type regions of revolution and slabs


def _cylinder_integrals(m: int, etas: np.ndarray, which: str = "both", rtol: float = QUAD_RTOL):
    """Unit-scale (volume, area) of the ball-type region with contact angle eta.

    The boundary meets the axis of revolution at polar angle ``eta`` on S^m and
    has constant mean curvature; ``u(y) = R(y)/R(eta)`` with
    ``R(y) = int_0^y sin^{m-1} / sin^{m-1}(y)`` is the sine of its slope angle.
    ``1 - u`` is formed as an integral of ``R'`` over ``[y, eta]`` next to the
    endpoint, where direct subtraction would cancel.
    """
    k = m - 1
    etas = np.atleast_1d(np.asarray(etas, dtype=float))
    r_eta = sin_power_ratio(k, etas)[:, None]
    eta_col = etas[:, None]

    def parts(y, dr):
        r_y = sin_power_ratio(k, y)
        gap = r_eta - r_y
        close = dr < 0.1 * np.broadcast_to(eta_col, y.shape)
        if np.any(close):
            yc, dc = y[close], dr[close]
            s = yc[:, None] + 0.5 * dc[:, None] * (_GL_X + 1.0)
            slope = 1.0 - k * np.cos(s) * sin_power_ratio(k, s) / np.sin(s)
            gap[close] = 0.5 * dc * (slope @ _GL_W)
        u = r_y / r_eta
        root = np.sqrt(gap / r_eta * (1.0 + u))
        with np.errstate(under="ignore"):
            sk = np.sin(y) ** k
        return sk, r_y, u, root

    def area_integrand(y, dl, dr):
        sk, _, _, root = parts(y, dr)
        return sk / root

    def volume_integrand(y, dl, dr):
        sk, r_y, u, root = parts(y, dr)
        return r_y * sk * u / root

    c = 2.0 * sphere_volume(k)
    vol = area = None
    if which in ("both", "volume"):
        vol = c * tanh_sinh(volume_integrand, etas, rtol=rtol)
    if which in ("both", "area"):
        area = c * tanh_sinh(area_integrand, etas, rtol=rtol)
    return vol, area


def _chebyshev_grid(a: float, b: float, size: int) -> np.ndarray:
    # Chebyshev points of the first kind: open at both ends, clustered near them
    j = np.arange(size)
    x = np.cos(math.pi * (2 * j + 1) / (2 * size))[::-1]
    return a + 0.5 * (b - a) * (x + 1.0)


@dataclass(frozen=True)
class CylinderBallFamily:
    """Tabulated ball-type regions of ``(S^m x R, scale*(g_0 + dt^2))``.

    The samples run over the increasing branch ``0 < eta <= eta_turn`` of the
    family, where ``eta_turn`` maximizes the enclosed volume. Past it the family
    folds back to thin regions whose area exceeds the slab area, so they never
    enter the profile.
    """

    dim: int
    scale: float
    etas: np.ndarray = field(repr=False)
    volumes: np.ndarray = field(repr=False)
    areas: np.ndarray = field(repr=False)
    eta_turn: float
    slab_area: float
    crossing_volume: float
    rtol: float = QUAD_RTOL

    @property
    def samples(self) -> list[tuple[float, float, float]]:
        return list(zip(self.etas.tolist(), self.volumes.tolist(), self.areas.tolist()))

    @property
    def _vol_factor(self) -> float:
        return self.scale ** (0.5 * (self.dim + 1))

    @property
    def _area_factor(self) -> float:
        return self.scale ** (0.5 * self.dim)

    def eta_for_volume(self, v) -> np.ndarray:
        """Contact angle of the ball-type region of volume ``v`` (ball branch)."""
        w = np.atleast_1d(np.asarray(v, dtype=float)) / self._vol_factor
        unit_vols = self.volumes / self._vol_factor
        if np.any(w <= 0.0) or np.any(w > unit_vols[-1]):
            raise DomainError(
                f"volume outside the ball branch (0, {self.volumes[-1]!r}]"
            )
        return _invert_volume(self.dim, self.etas, unit_vols, w, rtol=10.0 * self.rtol)

    def ball_area(self, v) -> np.ndarray:
        eta = self.eta_for_volume(v)
        _, area = _cylinder_integrals(self.dim, eta, which="area", rtol=self.rtol)
        return self._area_factor * area

    def profile_values(self, v: np.ndarray) -> np.ndarray:
        """min(ball-branch area, slab area) at volumes ``v > 0``."""
        v = np.asarray(v, dtype=float)
        out = np.full(v.shape, self.slab_area)
        ball = v < self.crossing_volume
        if np.any(ball):
            out[ball] = np.minimum(self.ball_area(v[ball]), self.slab_area)
        return out


def _invert_volume(m: int, etas, vols, w, rtol: float = INVERSION_RTOL) -> np.ndarray:
    """Solve vol(eta) = w on the increasing branch.

    The table brackets each target by bisection search; a safeguarded secant
    iteration then re-runs the quadrature at trial angles until the volume
    matches to ``rtol``.
    """
    e_tab = np.concatenate([[0.0], etas])
    v_tab = np.concatenate([[0.0], vols])
    idx = np.clip(np.searchsorted(v_tab, w), 1, len(v_tab) - 1)
    lo, hi = e_tab[idx - 1].copy(), e_tab[idx].copy()
    f_lo, f_hi = v_tab[idx - 1] - w, v_tab[idx] - w
    # Initial guess: V^{1/(m+1)} is close to linear in eta, so PCHIP on it is accurate.
    guess = PchipInterpolator(v_tab ** (1.0 / (m + 1)), e_tab)(w ** (1.0 / (m + 1)))
    eta = np.clip(guess, lo, hi)
    done = np.zeros(w.shape, dtype=bool)
    for it in range(60):
        todo = ~done
        vol, _ = _cylinder_integrals(m, eta[todo], which="volume", rtol=0.1 * rtol)
        resid = vol - w[todo]
        ok = np.abs(resid) <= rtol * w[todo]
        sub = np.flatnonzero(todo)
        done[sub[ok]] = True
        if np.all(done):
            return eta
        keep = ~ok
        sub, resid = sub[keep], resid[keep]
        neg = resid < 0.0
        lo[sub[neg]], f_lo[sub[neg]] = eta[sub[neg]], resid[neg]
        hi[sub[~neg]], f_hi[sub[~neg]] = eta[sub[~neg]], resid[~neg]
        a, b, fa, fb = lo[sub], hi[sub], f_lo[sub], f_hi[sub]
        # Secant through the bracket, falling back to bisection every fourth step
        # or when the secant point lands in the outer tenth of the bracket.
        sec = a - fa * (b - a) / (fb - fa)
        mid = 0.5 * (a + b)
        width = b - a
        safe = (sec > a + 0.1 * width) & (sec < b - 0.1 * width) & (it % 4 != 3)
        eta[sub] = np.where(safe, sec, mid)
    raise QuadratureError(
        "volume inversion did not converge",
        where=float(w[~done][0]),
        residual=float("nan"),
    )


def _turning_angle(m: int, rtol: float) -> float:
    res = minimize_scalar(
        lambda e: -_cylinder_integrals(m, [e], which="volume", rtol=rtol)[0][0],
        bounds=(0.5, 3.0),
        method="bounded",
        options={"xatol": 1e-9},
    )
    return float(res.x)


@lru_cache(maxsize=None)
def _unit_family(m: int, grid: int, rtol: float) -> tuple:
    eta_turn = _turning_angle(m, rtol)
    etas = _chebyshev_grid(0.0, eta_turn, grid - 1)
    etas = np.append(etas, eta_turn)
    vols, areas = _cylinder_integrals(m, etas, rtol=rtol)
    bad = np.flatnonzero(np.diff(vols) <= 0.0)
    if bad.size:
        i = int(bad[0])
        raise QuadratureError(
            f"cylinder family volume not increasing at eta={etas[i + 1]!r}",
            where=float(etas[i + 1]),
            residual=float(vols[i + 1] - vols[i]),
        )
    slab = 2.0 * sphere_volume(m)
    if areas[-1] <= slab:
        # Never observed for m = 2..6; would mean ball regions beat slabs up to
        # the fold and the profile past it is not covered by this family.
        raise QuadratureError(
            f"ball branch stays below the slab area up to the fold (m={m})",
            where=float(eta_turn),
            residual=float(slab - areas[-1]),
        )
    j = int(np.searchsorted(areas, slab))
    a, b = etas[j - 1], etas[j]
    # Crossing of the ball branch with the slab area: bisection on area(eta).
    for _ in range(50):
        mid = 0.5 * (a + b)
        if _cylinder_integrals(m, [mid], which="area", rtol=rtol)[1][0] < slab:
            a = mid
        else:
            b = mid
    crossing = float(_cylinder_integrals(m, [0.5 * (a + b)], which="volume", rtol=rtol)[0][0])
    for arr in (etas, vols, areas):
        arr.setflags(write=False)
    return etas, vols, areas, eta_turn, slab, crossing


def cylinder_family(
    m: int, eta_grid_size: int = DEFAULT_ETA_GRID, scale: float = 1.0, rtol: float = QUAD_RTOL
) -> CylinderBallFamily:
    if m < 2:
        raise DomainError(f"sphere factor dimension must be >= 2, got {m}")
    if eta_grid_size < 64:
        raise DomainError(f"eta grid needs at least 64 points, got {eta_grid_size}")
    if not scale > 0:
        raise DomainError(f"metric scale must be positive, got {scale}")
    if not 0.0 < rtol < 1e-3:
        raise DomainError(f"quadrature tolerance must lie in (0, 1e-3), got {rtol}")
    etas, vols, areas, eta_turn, slab, crossing = _unit_family(m, eta_grid_size, rtol)
    fv = scale ** (0.5 * (m + 1))
    fa = scale ** (0.5 * m)
    return CylinderBallFamily(
        dim=m,
        scale=scale,
        etas=etas,
        volumes=vols * fv,
        areas=areas * fa,
        eta_turn=eta_turn,
        slab_area=slab * fa,
        crossing_volume=crossing * fv,
        rtol=rtol,
    )


def cylinder_profile(
    m: int, scale: float = 1.0, eta_grid_size: int = DEFAULT_ETA_GRID, rtol: float = QUAD_RTOL
) -> ProfileFn:
    """Profile of ``(S^m x R, scale*(g_0 + dt^2))``: ball-type regions up to the
    crossing volume, slabs beyond it."""
    if not scale > 0:
        raise DomainError(f"metric scale must be positive, got {scale}")
    fam = cylinder_family(m, eta_grid_size, rtol=rtol)
    base = ProfileFn(
        name=f"I[S^{m}xR]",
        func=fam.profile_values,
        ambient_dim=m + 1,
        monotone_nondecreasing=True,
        renormalized_concave=True,
    )
    if scale == 1.0:
        return base
    return replace(scale_profile(base, m + 1, scale), name=f"I[S^{m}xR,{scale:g}g]")


# --------------------------------------------------------------------------
# Scaling and tubes


def scale_profile(p: ProfileFn, ambient_dim: int, mu: float) -> ProfileFn:
    """Profile of the metric ``mu*g``: ``mu^{(d-1)/2} I(mu^{-d/2} v)``."""
    if not mu > 0:
        raise DomainError(f"metric scale must be positive, got {mu}")
    d = ambient_dim
    if d < 2:
        raise DomainError(f"ambient dimension must be >= 2, got {d}")
    if mu == 1.0:
        return p
    area_f = mu ** (0.5 * (d - 1))
    vol_f = mu ** (-0.5 * d)
    base = p.func
    return replace(
        p,
        name=f"{p.name}*{mu:g}",
        func=lambda v: area_f * base(vol_f * v),
        ambient_dim=d,
        v_max=p.v_max / vol_f,
    )


@dataclass(frozen=True)
class TubeFunction:
    """Boundary area of ``M x D^n_R`` as a function of its volume."""

    vol_M: float
    n: int
    coefficient: float

    def __call__(self, v):
        return self.evaluate(v)

    def evaluate(self, v):
        out = self.coefficient * np.asarray(v, dtype=float) ** ((self.n - 1) / self.n)
        return out if out.ndim else float(out)


def tube_function(vol_M: float, n: int) -> TubeFunction:
    if not vol_M > 0:
        raise DomainError(f"volume of the compact factor must be positive, got {vol_M}")
    return TubeFunction(vol_M, n, vol_M ** (1.0 / n) * euclidean_constant(n))
