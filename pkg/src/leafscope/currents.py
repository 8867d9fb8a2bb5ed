"""Mass of the pushed-forward Green current of a disk map, and divergence of
the weighted radial energy integral, for explicitly given analytic maps."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .moebius import DiskAutomorphism, DomainError, make_hyperbolic

MASS_RTOL = 1e-3


@dataclass(frozen=True)
class AnalyticMapSpec:
    """A holomorphic map on the unit disk with its derivative.

    ``kind`` is ``identity``, ``annulus_cover`` (params ``a, b``) or
    ``user_series`` (params: polynomial coefficients, lowest degree first).
    ``scale`` multiplies the map.
    """

    kind: str
    params: tuple = ()
    scale: complex = 1.0

    def __post_init__(self):
        if self.kind not in ("identity", "annulus_cover", "user_series"):
            raise ValueError(f"unknown map kind {self.kind!r}")
        if self.kind == "annulus_cover":
            a, b = self.params
            if not 0 < a < b:
                raise DomainError("annulus cover needs 0 < a < b")
        object.__setattr__(self, "params", tuple(self.params))

    def _ab(self):
        a, b = self.params
        L = math.log(b / a)
        return -1j * L / math.pi, 0.5 * math.log(a * b)

    def f(self, z):
        z = np.asarray(z, dtype=complex)
        if self.kind == "identity":
            out = z
        elif self.kind == "annulus_cover":
            c, d = self._ab()
            out = np.exp(c * np.log((1 + z) / (1 - z)) + d)
        else:
            out = np.polynomial.polynomial.polyval(z, np.asarray(self.params, dtype=complex))
        return self.scale * out

    def df(self, z):
        z = np.asarray(z, dtype=complex)
        if self.kind == "identity":
            out = np.ones_like(z)
        elif self.kind == "annulus_cover":
            c, d = self._ab()
            out = np.exp(c * np.log((1 + z) / (1 - z)) + d) * c * 2.0 / (1 - z * z)
        else:
            coef = np.polynomial.polynomial.polyder(np.asarray(self.params, dtype=complex))
            out = np.polynomial.polynomial.polyval(z, coef) * np.ones_like(z)
        return self.scale * out

    def scaled(self, c: complex) -> "AnalyticMapSpec":
        return AnalyticMapSpec(self.kind, self.params, self.scale * c)

    def derivative_check(self, n: int = 100, step: float = 1e-6, seed: int = 0, radius: float = 0.9) -> float:
        """Maximum relative error of a central difference against ``df``."""
        rng = np.random.default_rng(seed)
        z = radius * np.sqrt(rng.random(n)) * np.exp(2j * math.pi * rng.random(n))
        fd = (self.f(z + step) - self.f(z - step)) / (2 * step)
        ex = self.df(z)
        return float(np.max(np.abs(fd - ex) / np.maximum(np.abs(ex), 1e-300)))


def identity_map() -> AnalyticMapSpec:
    return AnalyticMapSpec("identity")


def polynomial_map(coefficients) -> AnalyticMapSpec:
    return AnalyticMapSpec("user_series", tuple(complex(c) for c in coefficients))


def annulus_cover(a: float, b: float) -> AnalyticMapSpec:
    """Universal cover of ``a < |w| < b``: the disk goes to the strip
    ``|Im| < pi/2`` by ``log((1+z)/(1-z))``, then by an affine map onto
    ``log a < Re < log b`` and through ``exp``.  ``f(0)`` lies on the core circle."""
    return AnalyticMapSpec("annulus_cover", (float(a), float(b)))


def deck_generator(a: float, b: float) -> DiskAutomorphism:
    """Generator of the deck group of ``annulus_cover(a, b)``."""
    L = math.log(b / a)
    return make_hyperbolic(math.tanh(math.pi**2 / L))


# ---------------------------------------------------------------------------
# mass of the Green current


def _radial_panels(r: float, nodes: int):
    """Gauss-Legendre nodes/weights on ``[0, r]``, graded toward ``r``."""
    x, w = np.polynomial.legendre.leggauss(nodes)
    edges = [0.0]
    gap = r / 2
    scale = max((1 - r) / 4, r * 1e-9)
    while gap > scale:
        edges.append(r - gap)
        gap /= 2
    edges.append(r)
    s, ws = [], []
    for p, q in zip(edges[:-1], edges[1:]):
        s.append(0.5 * (q - p) * x + 0.5 * (q + p))
        ws.append(0.5 * (q - p) * w)
    return np.concatenate(s), np.concatenate(ws)


def _mass(fmap: AnalyticMapSpec, r: float, nodes: int, theta_factor: float) -> float:
    s, ws = _radial_panels(r, nodes)
    total = []
    for sj, wj in zip(s, ws):
        n_theta = int(min(2**17, max(64, 2 ** math.ceil(math.log2(theta_factor / max(1 - sj, 1e-12))))))
        th = np.arange(n_theta) * (2 * math.pi / n_theta)
        ring = float(np.sum(np.abs(fmap.df(sj * np.exp(1j * th))) ** 2)) * (2 * math.pi / n_theta)
        total.append(wj * math.log(r / sj) * sj * ring)
    return math.fsum(total)


@dataclass(frozen=True)
class MassEstimate:
    r: float
    value: float
    refined: float
    converged: bool

    @property
    def relative_change(self) -> float:
        return abs(self.refined - self.value) / max(abs(self.refined), 1e-300)


def nevanlinna_mass(fmap: AnalyticMapSpec, r: float, nodes: int = 16, theta_factor: float = 32.0) -> MassEstimate:
    """``∫∫_{|z|<r} log(r/|z|) |f'(z)|^2 dA`` on a polar grid.

    Composite Gauss-Legendre in the radius (graded toward ``r``) and the
    periodic trapezoid rule in the angle, with angular resolution scaled to
    the distance from the unit circle.  The grid is then refined 2x; a
    relative change above 1e-3 marks the result as unconverged.
    """
    if not 0 < r < 1:
        raise DomainError("r must lie in (0, 1)")
    base = _mass(fmap, r, nodes, theta_factor)
    fine = _mass(fmap, r, 2 * nodes, 2 * theta_factor)
    conv = abs(fine - base) <= MASS_RTOL * abs(fine)
    return MassEstimate(r, fine, base, conv)


@dataclass(frozen=True)
class MassCurve:
    grid: np.ndarray
    masses: np.ndarray
    converged: bool

    @property
    def nondecreasing(self) -> bool:
        return bool(np.all(np.diff(self.masses) >= 0))


DEFAULT_MASS_GRID = (0.9, 0.99, 0.999, 0.9999)


def mass_curve(fmap: AnalyticMapSpec, grid=DEFAULT_MASS_GRID, **kw) -> MassCurve:
    grid = np.asarray(sorted(grid), dtype=float)
    est = [nevanlinna_mass(fmap, float(r), **kw) for r in grid]
    return MassCurve(grid, np.array([e.value for e in est]), all(e.converged for e in est))


# ---------------------------------------------------------------------------
# radial energy integral


def default_ray_grid(n: int = 400, depth: float = 6.0) -> np.ndarray:
    """Grid in ``(0, 1)`` dense toward 1: ``1 - s`` geometric down to ``10^-depth``."""
    return np.concatenate([np.linspace(0.0, 0.5, 50, endpoint=False), 1 - 0.5 * np.logspace(0, -depth + math.log10(2), n)])


@dataclass(frozen=True)
class RayDivergence:
    theta: float
    grid: np.ndarray
    cumulative: np.ndarray
    slope: float | None
    r_squared: float | None

    @property
    def diverging(self) -> bool | None:
        if self.slope is None:
            return None
        return self.r_squared > 0.99 and self.slope > 0


def ray_divergence(fmap: AnalyticMapSpec, theta: float, s_grid=None, fit_from: float = 0.9) -> RayDivergence:
    """Cumulative trapezoid values of ``∫ (1-s) |f'(s e^{i theta})|^2 ds`` and a
    linear fit of them against ``log(1/(1-s))`` on ``s >= fit_from``."""
    s = default_ray_grid() if s_grid is None else np.asarray(s_grid, dtype=float)
    if np.any(np.diff(s) <= 0) or np.any(s < 0) or np.any(s >= 1):
        raise DomainError("grid must be increasing inside [0, 1)")
    g = (1 - s) * np.abs(fmap.df(s * np.exp(1j * theta))) ** 2
    if len(s) == 1:
        return RayDivergence(theta, s, np.zeros(1), None, None)
    cum = np.concatenate([[0.0], np.cumsum(0.5 * (g[1:] + g[:-1]) * np.diff(s))])
    mask = s >= fit_from
    if mask.sum() < 3:
        return RayDivergence(theta, s, cum, None, None)
    x = -np.log1p(-s[mask])
    y = cum[mask]
    slope, icpt = np.polyfit(x, y, 1)
    resid = y - (slope * x + icpt)
    ss = float(np.sum((y - y.mean()) ** 2))
    r2 = 1.0 - float(np.sum(resid**2)) / ss if ss > 0 else 0.0
    return RayDivergence(theta, s, cum, float(slope), r2)


@dataclass(frozen=True)
class DerivativeProfile:
    c0: float
    cK: float | None
    in_target: int


def derivative_bound_profile(fmap: AnalyticMapSpec, s_grid, theta_grid, target=None) -> DerivativeProfile:
    """Extremes of ``(1-s)|f'(s e^{i theta})|``: the maximum over the grid and
    the minimum over points whose image satisfies the ``target`` predicate."""
    s = np.asarray(s_grid, dtype=float)
    th = np.asarray(theta_grid, dtype=float)
    z = s[:, None] * np.exp(1j * th)[None, :]
    vals = (1 - s)[:, None] * np.abs(fmap.df(z))
    c0 = float(vals.max())
    if target is None:
        return DerivativeProfile(c0, None, 0)
    mask = np.asarray(target(fmap.f(z)), dtype=bool)
    cK = float(vals[mask].min()) if mask.any() else None
    return DerivativeProfile(c0, cK, int(mask.sum()))


def annulus_target(inner: float, outer: float):
    """Predicate for the closed annulus ``inner <= |w| <= outer``."""
    return lambda w: (np.abs(w) >= inner) & (np.abs(w) <= outer)
