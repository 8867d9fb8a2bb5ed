"""Injectivity of covering maps on horodisks, and the displacement floor
inside smaller horodisks."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction

import numpy as np

from .arcs import BoundaryArcSet
from .group import FuchsianGroupSpec, GroupElement, _image_disks, displacement_terms, word_ball
from .moebius import BoundaryPoint, DomainError, Horocycle, horocycle_contains

SIGMA_RESOLUTION = 1e-4
FLOOR_SLACK = 1e-9


class Verdict(str, Enum):
    INJECTIVE = "injective-at-depth"
    IDENTIFIED = "identified"
    UNKNOWN = "unknown"


class RefusalError(RuntimeError):
    """A precondition certificate failed; carries a diagnostic dictionary."""

    def __init__(self, message: str, diagnostic: dict):
        super().__init__(message)
        self.diagnostic = diagnostic


@dataclass(frozen=True)
class InjectivityCertificate:
    horocycle: Horocycle
    depth: int
    verdict: Verdict
    element: GroupElement | None = None
    witness: tuple[complex, complex] | None = None
    min_gap: float = math.inf

    @property
    def injective(self) -> bool:
        return self.verdict is Verdict.INJECTIVE


def _overlap_gaps(a, b, center: complex, radius: float) -> np.ndarray:
    """``|c' - c| - r' - r`` for every image disk ``g(D)``; negative means overlap."""
    c2, r2, ok = _image_disks(a, b, center, radius)
    gap = np.abs(c2 - center) - r2 - radius
    return np.where(ok, gap, -np.inf)


def _lens_point(c1, r1, c2, r2) -> complex:
    """A point inside both of two overlapping disks."""
    d = abs(c2 - c1)
    if d + r2 <= r1:
        return c2
    if d + r1 <= r2:
        return c1
    x = (d * d + r1 * r1 - r2 * r2) / (2 * d)
    return c1 + (c2 - c1) / d * x


def _witness(h: Horocycle, g) -> tuple[complex, complex] | None:
    """Points ``z`` and ``g(z)`` both strictly inside the horodisk, if found."""
    ginv = g.inverse()
    c, r = h.center, h.radius
    pre_c, pre_r, ok = _image_disks(np.array([ginv.a]), np.array([ginv.b]), c, r)
    if not ok[0]:
        return None
    z = _lens_point(c, r, complex(pre_c[0]), float(pre_r[0]))
    for shrink in (0.0, 1e-6, 1e-3):
        zz = z + shrink * (c - z)
        w = complex(g(zz))
        if horocycle_contains(h, zz) and horocycle_contains(h, w):
            return zz, w
    return None


def horocycle_injectivity(group: FuchsianGroupSpec, depth: int, h: Horocycle, tol: float = 1e-12) -> InjectivityCertificate:
    """Test ``g(D) ∩ D = ∅`` exactly for every ``g`` in the word ball."""
    if group.rank == 0:
        return InjectivityCertificate(h, depth, Verdict.INJECTIVE)
    ball = word_ball(group, depth)
    gaps = _overlap_gaps(ball.a, ball.b, h.center, h.radius)
    bad = np.nonzero(gaps < -tol)[0]
    min_gap = float(gaps.min())
    if len(bad) == 0:
        return InjectivityCertificate(h, depth, Verdict.INJECTIVE, min_gap=min_gap)
    for i in bad[:64]:
        g = ball.automorphism(int(i))
        wit = _witness(h, g)
        if wit is not None:
            return InjectivityCertificate(h, depth, Verdict.IDENTIFIED, ball.element(int(i)), wit, min_gap)
    return InjectivityCertificate(h, depth, Verdict.UNKNOWN, ball.element(int(bad[0])), None, min_gap)


def _injective_fast(ball, zeta: complex, r: float, tol: float = 1e-12) -> bool:
    gaps = _overlap_gaps(ball.a, ball.b, (1 - r) * zeta, r)
    return bool(np.all(gaps >= -tol))


def sigma_estimate(group: FuchsianGroupSpec, depth: int, zeta: BoundaryPoint, resolution: float = SIGMA_RESOLUTION) -> float:
    """Largest grid radius with an injective horodisk at ``zeta`` (depth-limited).

    Horodisks at a fixed base point are nested in the radius, so bisection
    over the grid ``k * resolution`` is exact for the depth-``depth`` test.
    """
    top = int(round(1.0 / resolution)) - 1
    if group.rank == 0:
        return top * resolution
    ball = word_ball(group, depth)
    z = zeta.z
    if not _injective_fast(ball, z, resolution):
        return 0.0
    lo, hi = 1, top + 1
    if _injective_fast(ball, z, top * resolution):
        return top * resolution
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if _injective_fast(ball, z, mid * resolution):
            lo = mid
        else:
            hi = mid
    return lo * resolution


@dataclass(frozen=True)
class DisplacementFloor:
    m: float
    M: float
    ratio: Fraction | float
    M_exact: Fraction | None = None

    def __iter__(self):
        return iter((self.m, self.M))


def displacement_floor(N: int, n: int) -> DisplacementFloor:
    """Guaranteed Poincaré (``m``) and Möbius (``M``) displacement inside the
    radius-``1/n`` horodisk when the radius-``1/N`` horodisk is injective."""
    if not n > N >= 1:
        raise DomainError("need n > N >= 1")
    if isinstance(N, int) and isinstance(n, int):
        ratio = Fraction(2 * n - 1, 2 * N - 1)
        M_exact = (ratio - 1) / (ratio + 1)
        return DisplacementFloor(0.5 * math.log(ratio), float(M_exact), ratio, M_exact)
    ratio = (2 * n - 1) / (2 * N - 1)
    return DisplacementFloor(0.5 * math.log(ratio), (ratio - 1) / (ratio + 1), ratio)


@dataclass(frozen=True)
class FloorReport:
    N: int
    n: int
    samples: int
    floor: float
    min_displacement: float
    violations: int
    ratio: float
    passed: bool
    points: tuple = field(default=(), repr=False)


def sample_horodisk(zeta: BoundaryPoint, radius: float, count: int, rng: np.random.Generator) -> np.ndarray:
    c = (1 - radius) * zeta.z
    rr = radius * np.sqrt(rng.random(count)) * (1 - 1e-12)
    return c + rr * np.exp(2j * math.pi * rng.random(count))


def displacement_floor_empirical(group, depth, zeta: BoundaryPoint, N: int, n: int, samples: int = 100, seed: int = 0) -> FloorReport:
    """Sample the small horodisk and compare the word-ball minimal Poincaré
    displacement with the floor ``m(N, n)``."""
    floor = displacement_floor(N, n).m
    if group.rank == 0:
        return FloorReport(N, n, samples, floor, math.inf, 0, math.inf, True)
    cert = horocycle_injectivity(group, depth, Horocycle(zeta, 1.0 / N))
    if not cert.injective:
        raise RefusalError(
            "horodisk of radius 1/N is not injective at this depth",
            {"zeta": zeta.angle, "N": N, "depth": depth, "verdict": cert.verdict.value},
        )
    ball = word_ball(group, depth)
    pts = sample_horodisk(zeta, 1.0 / n, samples, np.random.default_rng(seed))
    dmin = []
    for z in pts:
        t, u, _ = displacement_terms(ball.a, ball.b, complex(z))
        i = int(np.argmin(t))
        dmin.append(0.5 * math.log((1 + t[i]) ** 2 / u[i]))
    dmin = np.array(dmin)
    viol = int(np.sum(dmin < floor - FLOOR_SLACK))
    low = float(dmin.min())
    return FloorReport(N, n, samples, floor, low, viol, low / floor, viol == 0, tuple(pts))


def horodisk_arc(z: complex, radius: float) -> tuple[float, float] | None:
    """Base angles ``zeta`` whose radius-``radius`` horodisk contains ``z``,
    as ``(center, half_width)``, or ``None``."""
    z = complex(z)
    m = abs(z)
    if m == 0.0:
        return None if radius <= 0.5 else (0.0, math.pi)
    c = (m * m + 1 - 2 * radius) / (2 * (1 - radius))
    if c >= m:
        return None
    if c <= -m:
        return (math.atan2(z.imag, z.real), math.pi)
    return (math.atan2(z.imag, z.real), math.acos(c / m))


def in_U(z, arcs: BoundaryArcSet, N: int, n: int) -> bool:
    """Membership in the union of the central disk of radius ``1 - 1/n`` with
    the radius-``1/n`` horodisks based on ``arcs`` (the set ``E_N`` of bases
    with injective radius-``1/N`` horodisks)."""
    if not n > N >= 1:
        raise DomainError("need n > N >= 1")
    z = complex(z)
    if abs(z) >= 1.0:
        return False
    if abs(z) < 1 - 1.0 / n:
        return True
    hit = horodisk_arc(z, 1.0 / n)
    if hit is None:
        return False
    return not arcs.intersection(BoundaryArcSet.window(*hit)).is_empty()
