"""Disk-likeness functions of a quotient surface, evaluated in the covering
coordinate: minimal displacement ``beta``, the Myrberg product ``alpha``,
lower bounds for the injectivity ratio ``rho`` and the Suita density.
"""

from __future__ import annotations

import logging
import math
import warnings
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .certified import CertifiedValue
from .group import (
    FuchsianGroupSpec,
    OrbitBall,
    angular_gap,
    displacement_detail,
    displacement_terms,
    limit_set_sample,
    tail_bounds,
    word_ball,
)
from .moebius import DiskAutomorphism, DomainError, fixed_points

log = logging.getLogger(__name__)

DEFAULT_ALPHA_TOL = 1e-9
DIRECTION_CLEARANCE = 0.05


class TruncationWarning(UserWarning):
    """A truncated value could not be certified."""


class DirectionError(ValueError):
    """A radial direction points too close to the sampled limit set."""

    def __init__(self, message: str, diagnostic: dict):
        super().__init__(message)
        self.diagnostic = diagnostic


def _check_point(z: complex) -> complex:
    z = complex(z)
    if not abs(z) < 1.0:
        raise DomainError("point must lie in the open unit disk")
    return z


def beta_at(group: FuchsianGroupSpec, depth: int, z: complex) -> CertifiedValue:
    """``min d_M(z, g z)`` over the word ball, with a certificate of globality."""
    return displacement_detail(group, depth, _check_point(z))[0]


def _per_length(values: np.ndarray, lengths: np.ndarray, depth: int) -> np.ndarray:
    out = np.zeros(depth)
    np.add.at(out, lengths.astype(int) - 1, values)
    return out


def _alpha_from_terms(neglog, ball: OrbitBall, depth: int, z: complex, tol: float) -> CertifiedValue:
    per = _per_length(neglog, ball.length, depth)
    partial = float(np.sum(neglog))
    # rounding allowance for the summation of positive terms
    partial_hi = partial * (1 + 4e-16 * math.log2(max(len(neglog), 2)))
    notes = list(ball.warnings)

    est, diverging = 0.0, False
    if depth >= 2 and per[-1] > 0:
        q = per[-1] / per[-2] if per[-2] > 0 else math.inf
        if q < 1.0:
            est = per[-1] * q / (1.0 - q)
        else:
            diverging = True
    elif depth == 1 and per[-1] > 0:
        est = per[-1]

    tb = tail_bounds(ball.group, depth)
    bound = math.inf
    if tb.valid:
        slack = tb.orbit_distance - 2.0 * math.atanh(abs(z))
        if slack > 0:
            t_min = math.tanh(slack)
            grow = ((1 + abs(z)) / (1 - abs(z))) ** 2
            bound = grow * tb.poincare_tail / (2.0 * t_min**2)
    rigorous = math.isfinite(bound)

    if rigorous:
        tail = min(max(est, 0.0), bound)
        upper = math.exp(-partial)
        lower = math.exp(-partial_hi - bound)
        value = min(max(math.exp(-partial - tail), lower), upper)
        certified = upper - lower <= tol
        if not certified:
            notes.append("rigorous tail bound wider than tolerance; increase depth")
    elif diverging:
        value, lower, upper = math.exp(-partial), 0.0, math.exp(-partial)
        certified = False
        notes.append("per-length log-sums are not decaying: divergence suspected")
        warnings.warn("alpha: partial log-sums not decaying; result uncertified", TruncationWarning, stacklevel=3)
    else:
        value = math.exp(-partial - est)
        lower = math.exp(-partial_hi - 2.0 * est)
        upper = math.exp(-partial)
        certified = False
        notes.append(f"heuristic geometric tail only ({tb.reason or 'no ping-pong structure'})")
        warnings.warn("alpha: tail not certified, geometric extrapolation used", TruncationWarning, stacklevel=3)
    return CertifiedValue(value, lower, upper, depth, certified, tuple(notes))


def alpha_at(group: FuchsianGroupSpec, depth: int, z: complex, tol: float = DEFAULT_ALPHA_TOL) -> CertifiedValue:
    """Myrberg product ``prod d_M(z, g z)`` over nontrivial ``g``.

    The partial product over the word ball is an upper bound.  When the group
    has a ping-pong structure the omitted factors are bounded rigorously via
    the Poincaré-series tail; the point value adds a geometric extrapolation
    of the per-length log-sums, clamped to the rigorous bound.
    """
    z = _check_point(z)
    if group.rank == 0:
        return CertifiedValue(1.0, 1.0, 1.0, depth, True, ("trivial group: empty product",))
    ball = word_ball(group, depth)
    _, _, neglog = displacement_terms(ball.a, ball.b, z)
    return _alpha_from_terms(neglog, ball, depth, z, tol)


def rao_term_bound(g: DiskAutomorphism, z: complex) -> float:
    """Upper bound for ``-log d_M(z, g z)`` in terms of ``g(0)`` and the fixed points."""
    z = _check_point(z)
    f1, f2 = fixed_points(g)
    w0 = g.origin_image()
    num = (1 - abs(z) ** 2) ** 2 * (1 - abs(w0) ** 2)
    den = abs(w0) ** 2 * abs(z - f1.z) ** 2 * abs(z - f2.z) ** 2
    return num / den


def injectivity_radius_bound(beta):
    """Radius of the origin-centred disk on which the covering map is injective,
    given the displacement ``beta``: one third of the Poincaré length of ``beta``."""
    beta = float(beta)
    if not 0.0 < beta <= 1.0:
        raise DomainError("beta must lie in (0, 1]")
    if beta == 1.0:
        return 1.0
    return math.tanh(math.atanh(beta) / 3.0)


def _exact_sqrt(q: Fraction) -> Fraction | None:
    if q < 0:
        return None
    n, d = q.numerator, q.denominator
    rn, rd = math.isqrt(n), math.isqrt(d)
    if rn * rn == n and rd * rd == d:
        return Fraction(rn, rd)
    return None


def koebe_disk_radius(lam):
    """Radius of the disk guaranteed inside ``h(D)`` for ``h: D -> D``, ``h(0)=0``,
    ``|h'(0)| = lam``.  Exact for rational input with rational square root."""
    if isinstance(lam, Fraction):
        if not 0 < lam <= 1:
            raise DomainError("lambda must lie in (0, 1]")
        root = _exact_sqrt(1 - lam * lam)
        if root is not None:
            return (lam / (1 + root)) ** 2
        lam = float(lam)
    lam = float(lam)
    if not 0.0 < lam <= 1.0:
        raise DomainError("lambda must lie in (0, 1]")
    return (lam / (1.0 + math.sqrt((1.0 - lam) * (1.0 + lam)))) ** 2


def beta_lower_from_rho(rho):
    """Displacement lower bound implied by an injectivity ratio ``rho``."""
    return koebe_disk_radius(rho)


def rho_lower_at(group: FuchsianGroupSpec, depth: int, z: complex) -> float:
    beta = beta_at(group, depth, z)
    if beta.lower_bound <= 0.0:
        return 0.0
    return injectivity_radius_bound(beta.lower_bound)


def suita_density_at(group: FuchsianGroupSpec, depth: int, z: complex, tol: float = DEFAULT_ALPHA_TOL) -> float:
    """Suita density in the covering coordinate: ``alpha / (1 - |z|^2)``."""
    z = _check_point(z)
    alpha = alpha_at(group, depth, z, tol)
    if not alpha.certified:
        log.warning("suita density from an uncertified alpha at %s", z)
    return alpha.value / (1.0 - abs(z) ** 2)


def displacement_propagation(m_z: float, radius: float) -> float:
    """Lower bound for the minimal Poincaré displacement at points within
    Poincaré distance ``radius`` of a point where it equals ``m_z``."""
    if radius < 0:
        raise DomainError("radius must be nonnegative")
    return max(m_z - 2.0 * radius, 0.0)


@dataclass(frozen=True)
class LeafMetricReport:
    point: complex
    beta: CertifiedValue
    alpha: CertifiedValue
    rho_lower: float
    suita_density: float
    kobayashi_density: float

    def as_dict(self) -> dict:
        return {
            "point": [self.point.real, self.point.imag],
            "beta": self.beta.as_dict(),
            "alpha": self.alpha.as_dict(),
            "rho_lower": self.rho_lower,
            "suita_density": self.suita_density,
            "kobayashi_density": self.kobayashi_density,
        }


def leaf_report(group: FuchsianGroupSpec, depth: int, z: complex, tol: float = DEFAULT_ALPHA_TOL) -> LeafMetricReport:
    """All metric data at one point, sharing a single pass over the ball."""
    z = _check_point(z)
    kob = 1.0 / (1.0 - abs(z) ** 2)
    if group.rank == 0:
        one = CertifiedValue(1.0, 1.0, 1.0, depth, True, ("trivial group",))
        return LeafMetricReport(z, one, one, 1.0, kob, kob)
    ball = word_ball(group, depth)
    terms = displacement_terms(ball.a, ball.b, z)
    neglog = terms[2]
    beta = displacement_detail(group, depth, z, terms)[0]
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", TruncationWarning)
        alpha = _alpha_from_terms(neglog, ball, depth, z, tol)
    rho = injectivity_radius_bound(beta.lower_bound) if beta.lower_bound > 0 else 0.0
    return LeafMetricReport(z, beta, alpha, rho, alpha.value * kob, kob)


@dataclass(frozen=True)
class DecayProfile:
    theta: float
    radii: np.ndarray
    neglog_alpha: np.ndarray
    ratio: np.ndarray
    c_hat: float
    nested_c_hat: np.ndarray
    growing: bool
    certified: bool

    @property
    def spread(self) -> float:
        """max/min of the fitted constant over nested radius ranges."""
        lo = float(np.min(self.nested_c_hat))
        return float(np.max(self.nested_c_hat)) / lo if lo > 0 else math.inf


def alpha_decay_profile(group, depth, theta, r_grid, clearance: float = DIRECTION_CLEARANCE, tol=DEFAULT_ALPHA_TOL):
    """``-log alpha`` along the ray at angle ``theta`` and its ratio to ``1 - r^2``.

    ``c_hat`` is the maximum ratio over the grid; ``nested_c_hat[k]`` is the
    same maximum restricted to the first ``k+1`` radii.  ``growing`` flags a
    ratio that increases towards the boundary.
    """
    radii = np.asarray(sorted(r_grid), dtype=float)
    if group.rank == 0:
        zero = np.zeros_like(radii)
        return DecayProfile(theta, radii, zero, zero, 0.0, zero, False, True)
    samples = limit_set_sample(group, depth)
    gap = angular_gap(samples, theta)
    if gap < clearance:
        raise DirectionError(
            "direction too close to the sampled limit set",
            {"theta": theta, "angular_gap": gap, "clearance": clearance, "samples": len(samples)},
        )
    vals, cert = [], True
    for r in radii:
        a = alpha_at(group, depth, r * complex(math.cos(theta), math.sin(theta)), tol)
        cert &= a.certified
        vals.append(-math.log(a.value))
    vals = np.array(vals)
    ratio = vals / (1.0 - radii**2)
    nested = np.maximum.accumulate(ratio)
    tail = ratio[len(ratio) // 2:]
    growing = bool(len(tail) > 1 and np.all(np.diff(tail) > 0) and tail[-1] > 1.5 * tail[0])
    return DecayProfile(theta, radii, vals, ratio, float(nested[-1]), nested, growing, cert)


# ---------------------------------------------------------------------------
# covered-disk test by the argument principle


def winding_numbers(h, targets, rho: float = 1.0, n_theta: int = 4096) -> np.ndarray:
    """Winding numbers of ``h(rho e^{it}) - w`` around 0 for each target ``w``."""
    t = np.linspace(0.0, 2 * math.pi, n_theta, endpoint=False)
    boundary = np.asarray(h(rho * np.exp(1j * t)))
    targets = np.atleast_1d(np.asarray(targets, dtype=complex))
    out = np.empty(len(targets), dtype=int)
    for s in range(0, len(targets), 256):
        v = boundary[None, :] - targets[s:s + 256, None]
        steps = np.angle(np.roll(v, -1, axis=1) / v)
        out[s:s + 256] = np.rint(steps.sum(axis=1) / (2 * math.pi)).astype(int)
    return out


@dataclass(frozen=True)
class CoveredDiskReport:
    radius: float
    targets: int
    failures: int
    min_winding: int

    @property
    def passed(self) -> bool:
        return self.failures == 0


def covered_disk_check(h, radius: float, n_radial: int = 12, n_angular: int = 48, rho: float = 1.0, n_theta: int = 4096):
    """Check that every grid point of the closed disk of ``radius`` has a
    preimage under ``h`` in ``|z| < rho`` by counting zeros of ``h - w``."""
    rs = np.linspace(0.0, radius, n_radial)
    ang = np.linspace(0.0, 2 * math.pi, n_angular, endpoint=False)
    targets = np.concatenate([[0.0], (rs[1:, None] * np.exp(1j * ang)[None, :]).ravel()])
    wn = winding_numbers(h, targets, rho, n_theta)
    return CoveredDiskReport(radius, len(targets), int(np.sum(wn < 1)), int(wn.min()))


def blaschke_map(scale: complex, zeros):
    """``z -> scale * z * prod (z - a)/(1 - conj(a) z)``."""
    zeros = [complex(a) for a in zeros]

    def h(z):
        z = np.asarray(z, dtype=complex)
        out = scale * z
        for a in zeros:
            out = out * (z - a) / (1 - np.conj(a) * z)
        return out

    lam = abs(scale) * float(np.prod([abs(a) for a in zeros])) if zeros else abs(scale)
    return h, lam
