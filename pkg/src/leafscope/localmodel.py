"""Local model of a foliation near a hyperbolic singular point: integral curves,
the hyperbolic metric of separatrix annuli, and injectivity of strip
parametrizations of leaves."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.spatial import cKDTree

from .moebius import DomainError

COINCIDENCE_TOL = 1e-9


@dataclass(frozen=True)
class SingularModelSpec:
    """Vector field ``d/dz1 + lam d/dz2`` with integral curves through ``(x0, y0)``."""

    lam: complex
    x0: complex = 1.0
    y0: complex = 1.0

    def __post_init__(self):
        if self.lam == 0:
            raise DomainError("eigenvalue ratio must be nonzero")
        if self.x0 == 0 and self.y0 == 0:
            raise DomainError("base point must not be the singular point")


@dataclass(frozen=True)
class AnnulusSpec:
    inner: float
    outer: float

    def __post_init__(self):
        if not 0 < self.inner < self.outer:
            raise DomainError("need 0 < inner < outer")

    @property
    def modulus(self) -> float:
        return math.log(self.outer / self.inner)

    @property
    def core_radius(self) -> float:
        return math.sqrt(self.inner * self.outer)


@dataclass(frozen=True)
class StripSpec:
    inner: float
    outer: float
    N: int

    def __post_init__(self):
        if not 0 < self.inner < self.outer:
            raise DomainError("need 0 < inner < outer")
        if int(self.N) != self.N or self.N < 1:
            raise DomainError("N must be a positive integer")

    @property
    def re_range(self) -> tuple[float, float]:
        return math.log(self.inner), math.log(self.outer)

    @property
    def im_range(self) -> tuple[float, float]:
        return -2 * math.pi * self.N, 2 * math.pi * self.N

    def contains(self, z) -> np.ndarray:
        z = np.asarray(z, dtype=complex)
        lo, hi = self.re_range
        return (z.real > lo) & (z.real < hi) & (np.abs(z.imag) < 2 * math.pi * self.N)


def flow(spec: SingularModelSpec, z):
    """Integral curve ``(x0 e^z, y0 e^{lam z})``."""
    z = np.asarray(z, dtype=complex)
    first = spec.x0 * np.exp(z)
    second = spec.y0 * np.exp(spec.lam * z)
    if first.ndim == 0:
        return complex(first), complex(second)
    return first, second


def annulus_density(a: float, b: float, z):
    """Complete hyperbolic (curvature -1) density of ``a < |z| < b``."""
    r = np.abs(np.asarray(z, dtype=complex))
    if np.any(r <= a) or np.any(r >= b):
        raise DomainError("point outside the annulus")
    L = math.log(b / a)
    out = (math.pi / L) / (r * np.sin(math.pi * np.log(r / a) / L))
    return float(out) if out.ndim == 0 else out


def curve_length(a: float, b: float, samples) -> float:
    """Trapezoidal hyperbolic length of a polyline inside the annulus."""
    z = np.atleast_1d(np.asarray(samples, dtype=complex))
    if len(z) < 2:
        annulus_density(a, b, z)
        return 0.0
    rho = annulus_density(a, b, z)
    seg = np.abs(np.diff(z))
    return float(np.sum(0.5 * (rho[1:] + rho[:-1]) * seg))


def core_circle_length(a: float, b: float) -> float:
    return 2 * math.pi**2 / math.log(b / a)


def radial_length(a: float, b: float, r0: float, r1: float, nodes: int = 32) -> float:
    """Hyperbolic length of the radial segment between radii ``r0`` and ``r1``.

    Composite Gauss-Legendre in the angular variable ``t = pi log(r/a) / L``,
    on panels graded geometrically toward whichever end is nearer a boundary.
    """
    L = math.log(b / a)
    t0, t1 = sorted(math.pi * math.log(r / a) / L for r in (r0, r1))
    if t0 <= 0 or t1 >= math.pi:
        raise DomainError("radii must lie inside the annulus")
    if t1 - t0 == 0:
        return 0.0
    # integrand 1/sin(t) is symmetric about pi/2; fold onto (0, pi/2]
    def panels(lo, hi):
        edges = [hi]
        while edges[-1] / 2 > lo:
            edges.append(edges[-1] / 2)
        edges.append(lo)
        return list(zip(edges[1:], edges[:-1]))

    x, w = np.polynomial.legendre.leggauss(nodes)

    def integrate(lo, hi):
        total = 0.0
        for p, q in panels(lo, hi):
            t = 0.5 * (q - p) * x + 0.5 * (q + p)
            total += 0.5 * (q - p) * float(np.sum(w / np.sin(t)))
        return total

    half = math.pi / 2
    total = 0.0
    for lo, hi in ((t0, min(t1, half)), (max(t0, half), t1)):
        if hi <= lo:
            continue
        if lo >= half:
            lo, hi = math.pi - hi, math.pi - lo
        total += integrate(lo, hi)
    return total


@dataclass(frozen=True)
class AnnulusChoice:
    inner: float
    outer: float
    x0: float
    N: int
    target: float
    escape_inner_radius: float
    escape_outer_radius: float
    escape_lengths: tuple[float, float]
    winding_length: float

    @property
    def certified(self) -> bool:
        return min(self.escape_lengths) >= self.target and self.winding_length >= self.target

    def reverify(self, nodes: int) -> bool:
        a, b = self.inner, self.outer
        lin = radial_length(a, b, self.x0, self.escape_inner_radius, nodes)
        lout = radial_length(a, b, self.x0, self.escape_outer_radius, nodes)
        return min(lin, lout) >= self.target and self.N * core_circle_length(a, b) >= self.target


def choose_annulus_and_winding(x0: float, M: float, ratio: float = 4.0, nodes: int = 32) -> AnnulusChoice:
    """Annulus ``a < x0 < b`` (``x0`` on the core circle, ``b/a = ratio``) and a
    winding count ``N`` such that escaping to radii outside
    ``[escape_inner_radius, escape_outer_radius]`` or winding ``N`` times
    around 0 both cost hyperbolic length at least ``M``.

    Winding: a curve circling 0 ``N`` times has length at least ``N`` times the
    core circle length, the minimum of ``2 pi r density(r)``.
    """
    if M <= 0 or x0 <= 0 or ratio <= 1:
        raise DomainError("need M > 0, x0 > 0 and ratio > 1")
    a = x0 / math.sqrt(ratio)
    b = x0 * math.sqrt(ratio)
    L = math.log(ratio)
    core = core_circle_length(a, b)
    N = max(1, math.ceil(M / core * (1 + 1e-12)))
    # the radial length from the core to angle t is -log tan(t/2)
    t_star = 2 * math.atan(math.exp(-1.01 * M - 1e-3))
    r_in = a * math.exp(t_star * L / math.pi)
    r_out = a * b / r_in
    if not a < r_in < r_out < b:
        raise DomainError(f"target length {M} puts the escape radii within rounding of the annulus boundary")
    lin = radial_length(a, b, x0, r_in, nodes)
    lout = radial_length(a, b, x0, r_out, nodes)
    return AnnulusChoice(a, b, x0, N, M, r_in, r_out, (lin, lout), N * core)


@dataclass(frozen=True)
class StripVerdict:
    injective: bool
    witness_k: int | None


def strip_injectivity(spec: SingularModelSpec, strip: StripSpec, tol: float = 1e-12) -> StripVerdict:
    """``flow`` is injective on the strip iff ``lam * k`` is never an integer
    for ``0 < |k| < 2N``; coincidences can only differ by ``2 pi i k``."""
    if spec.x0 == 0 or spec.y0 == 0:
        raise DomainError("strip test needs x0 != 0 and y0 != 0")
    for k in range(1, 2 * strip.N):
        v = spec.lam * k
        if abs(v.imag if isinstance(v, complex) else 0.0) <= tol and abs(v.real - round(v.real)) <= tol:
            return StripVerdict(False, k)
    return StripVerdict(True, None)


def strip_grid(strip: StripSpec, n_re: int = 50, n_im: int = 50) -> np.ndarray:
    """Grid whose imaginary spacing divides ``2 pi``, so ``2 pi k`` shifts map grid to grid."""
    lo, hi = strip.re_range
    re = lo + (np.arange(n_re) + 0.5) * (hi - lo) / n_re
    q = max(1, n_im // (2 * strip.N))
    step = 2 * math.pi / q
    im = -2 * math.pi * strip.N + (np.arange(2 * strip.N * q) + 0.5) * step
    return (re[:, None] + 1j * im[None, :]).ravel()


def brute_force_coincidences(spec: SingularModelSpec, strip: StripSpec, tol: float = COINCIDENCE_TOL):
    """Pairs of distinct grid points with equal ``flow`` values (relative ``tol``)."""
    z = strip_grid(strip)
    f1, f2 = flow(spec, z)
    # compare on the log scale so moduli over many orders stay resolvable
    l1 = np.log(f1)
    l2 = np.log(spec.y0) + spec.lam * z
    feats = np.column_stack([l1.real, np.cos(l1.imag), np.sin(l1.imag), l2.real, np.cos(l2.imag), np.sin(l2.imag)])
    pairs = cKDTree(feats).query_pairs(r=tol)
    out = []
    for i, j in sorted(pairs):
        if abs(z[i] - z[j]) > tol:
            out.append((complex(z[i]), complex(z[j])))
    return out


@dataclass(frozen=True)
class DegreeReport:
    degree: int
    fiber_min: int
    fiber_max: int
    confirmed: bool


def fiber_count(strip: StripSpec, w: complex) -> int:
    """Number of ``z`` in the open strip with ``e^z = w``."""
    lo, hi = strip.re_range
    r = math.log(abs(w))
    if not lo < r < hi:
        raise DomainError("point outside the annulus")
    arg = math.atan2(w.imag, w.real)
    bound = 2 * math.pi * strip.N
    kmin = math.ceil((-bound - arg) / (2 * math.pi))
    kmax = math.floor((bound - arg) / (2 * math.pi))
    count = 0
    for k in range(kmin, kmax + 1):
        if abs(arg + 2 * math.pi * k) < bound:
            count += 1
    return count


def covering_projection_degree(strip: StripSpec, samples: int = 100, seed: int = 0) -> DegreeReport:
    """Number of complete sheets of ``exp`` over the annulus from the strip.

    Generic fibers have ``2N`` points and fibers over the positive real ray
    have ``2N - 1``, so ``2N - 1`` sheets cover the annulus completely.
    """
    rng = np.random.default_rng(seed)
    a, b = strip.inner, strip.outer
    rad = np.exp(rng.uniform(math.log(a), math.log(b), samples))
    pts = list(rad * np.exp(1j * rng.uniform(-math.pi, math.pi, samples)))
    pts += list(rad[:8].astype(complex))
    counts = [fiber_count(strip, complex(w)) for w in pts]
    degree = 2 * strip.N - 1
    return DegreeReport(degree, min(counts), max(counts), min(counts) == degree)
