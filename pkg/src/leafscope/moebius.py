"""Möbius geometry of the unit disk.

Automorphisms are stored as normalized SU(1,1) pairs ``(a, b)`` acting by
``z -> (a z + b) / (conj(b) z + conj(a))`` with ``|a|^2 - |b|^2 = 1``.
Distances follow the convention ``d_P = artanh(d_M)`` so that the Möbius
distance ``d_M`` is the hyperbolic tangent of the Poincaré distance.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

TWO_PI = 2.0 * math.pi

NORM_TOL = 1e-12
EQUAL_TOL = 1e-9
CLASSIFY_TOL = 1e-9


class DomainError(ValueError):
    """Argument outside the domain where an operation is defined."""


class ClassificationError(ValueError):
    """Operation requires a different conjugacy type (e.g. hyperbolic)."""


class Kind(str, Enum):
    IDENTITY = "identity"
    ELLIPTIC = "elliptic"
    PARABOLIC = "parabolic"
    HYPERBOLIC = "hyperbolic"


def _wrap(angle: float) -> float:
    t = math.fmod(angle, TWO_PI)
    if t < 0.0:
        t += TWO_PI
    if t >= TWO_PI:
        t = 0.0
    return t


@dataclass(frozen=True)
class BoundaryPoint:
    angle: float

    def __post_init__(self):
        object.__setattr__(self, "angle", _wrap(float(self.angle)))

    @classmethod
    def from_complex(cls, z: complex) -> "BoundaryPoint":
        return cls(math.atan2(z.imag, z.real))

    @property
    def z(self) -> complex:
        return cmath.exp(1j * self.angle)

    def distance(self, other: "BoundaryPoint") -> float:
        """Angular distance on the circle, in [0, pi]."""
        d = abs(self.angle - other.angle)
        return min(d, TWO_PI - d)


@dataclass(frozen=True)
class Geodesic:
    """A complete geodesic given by its two ideal endpoints."""

    endpoints: tuple[BoundaryPoint, BoundaryPoint]

    def __post_init__(self):
        p, q = self.endpoints
        if p.distance(q) < 1e-14:
            raise DomainError("geodesic endpoints must be distinct")
        if q.angle < p.angle:
            object.__setattr__(self, "endpoints", (q, p))

    @classmethod
    def from_angles(cls, s: float, t: float) -> "Geodesic":
        return cls((BoundaryPoint(s), BoundaryPoint(t)))

    def circle(self) -> tuple[complex, float] | None:
        """Supporting circle ``(center, radius)``; ``None`` for a diameter."""
        p, q = (e.z for e in self.endpoints)
        s = p + q
        if abs(s) < 1e-14:
            return None
        half = 0.5 * self.endpoints[0].distance(self.endpoints[1])
        u = s / abs(s)
        return u / math.cos(half), math.tan(half)

    def real_crossings(self) -> list[float]:
        """Points where the geodesic meets the real diameter."""
        circ = self.circle()
        if circ is None:
            p = self.endpoints[0].z
            return [0.0] if abs(p.imag) > 1e-14 else []
        c, rad = circ
        # |x - c|^2 = rad^2 with x real
        disc = rad * rad - c.imag * c.imag
        if disc < 0:
            return []
        out = [c.real - math.sqrt(disc), c.real + math.sqrt(disc)]
        return sorted(x for x in out if abs(x) < 1.0)

    def contains(self, z: complex, tol: float = 1e-9) -> bool:
        circ = self.circle()
        if circ is None:
            p = self.endpoints[0].z
            return abs((z * p.conjugate()).imag) < tol
        c, rad = circ
        return abs(abs(z - c) - rad) < tol


@dataclass(frozen=True)
class Horocycle:
    """The Euclidean disk ``D_r((1 - r) zeta)`` tangent to the circle at ``base``."""

    base: BoundaryPoint
    radius: float

    def __post_init__(self):
        if not 0.0 < self.radius < 1.0:
            raise DomainError(f"horocycle radius must lie in (0, 1), got {self.radius}")

    @property
    def center(self) -> complex:
        return (1.0 - self.radius) * self.base.z


def horocycle_contains(h: Horocycle, z):
    """Open-disk membership ``|z - (1 - r) zeta| < r``; vectorized over ``z``."""
    return np.abs(np.asarray(z) - h.center) < h.radius


@dataclass(frozen=True)
class DiskAutomorphism:
    a: complex
    b: complex

    def __post_init__(self):
        a, b = complex(self.a), complex(self.b)
        det = abs(a) ** 2 - abs(b) ** 2
        if det <= 0:
            raise DomainError("not a disk automorphism: |a|^2 - |b|^2 <= 0")
        scale = max(1.0, abs(a) ** 2)
        if abs(det - 1.0) > 1e-9 * scale:
            raise DomainError(f"automorphism not normalized: |a|^2-|b|^2 = {det}")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)

    @classmethod
    def normalized(cls, a: complex, b: complex) -> "DiskAutomorphism":
        det = abs(a) ** 2 - abs(b) ** 2
        if det <= 0:
            raise DomainError("not a disk automorphism: |a|^2 - |b|^2 <= 0")
        s = math.sqrt(det)
        return cls(a / s, b / s)

    @classmethod
    def identity(cls) -> "DiskAutomorphism":
        return cls(1.0 + 0j, 0j)

    @classmethod
    def rotation(cls, angle: float) -> "DiskAutomorphism":
        return cls(cmath.exp(0.5j * angle), 0j)

    @classmethod
    def moving_to_origin(cls, p: complex) -> "DiskAutomorphism":
        """The automorphism ``z -> (z - p) / (1 - conj(p) z)``."""
        if abs(p) >= 1.0:
            raise DomainError("point must lie in the open disk")
        s = 1.0 / math.sqrt(1.0 - abs(p) ** 2)
        return cls(s + 0j, -p * s)

    def __call__(self, z):
        a, b = self.a, self.b
        return (a * z + b) / (b.conjugate() * z + a.conjugate())

    def __matmul__(self, other: "DiskAutomorphism") -> "DiskAutomorphism":
        return compose(self, other)

    def inverse(self) -> "DiskAutomorphism":
        return DiskAutomorphism(self.a.conjugate(), -self.b)

    def origin_image(self) -> complex:
        return self.b / self.a.conjugate()

    def derivative(self, z):
        return 1.0 / (self.b.conjugate() * z + self.a.conjugate()) ** 2

    @property
    def half_trace(self) -> float:
        return self.a.real

    def distance(self, other: "DiskAutomorphism") -> float:
        """Projective coefficient distance, relative to the coefficient scale."""
        scale = max(1.0, abs(self.a), abs(other.a))
        d_plus = max(abs(self.a - other.a), abs(self.b - other.b))
        d_minus = max(abs(self.a + other.a), abs(self.b + other.b))
        return min(d_plus, d_minus) / scale

    def equals(self, other: "DiskAutomorphism", tol: float = EQUAL_TOL) -> bool:
        return self.distance(other) < tol

    def is_identity(self, tol: float = EQUAL_TOL) -> bool:
        return self.equals(DiskAutomorphism.identity(), tol)

    def classify(self, tol: float = CLASSIFY_TOL) -> Kind:
        return classify(self, tol)

    def fixed_points(self) -> tuple[BoundaryPoint, BoundaryPoint]:
        return fixed_points(self)


def compose(g: DiskAutomorphism, h: DiskAutomorphism) -> DiskAutomorphism:
    """``g o h``: apply ``h`` first."""
    a = g.a * h.a + g.b * h.b.conjugate()
    b = g.a * h.b + g.b * h.a.conjugate()
    return DiskAutomorphism.normalized(a, b)


def invert(g: DiskAutomorphism) -> DiskAutomorphism:
    return g.inverse()


def conjugate(g: DiskAutomorphism, phi: DiskAutomorphism) -> DiskAutomorphism:
    """``phi o g o phi^-1``."""
    return compose(compose(phi, g), phi.inverse())


def make_hyperbolic(r: float) -> DiskAutomorphism:
    """The translation ``zeta -> (zeta + r) / (1 + r zeta)`` along the real diameter."""
    if not 0.0 < r < 1.0:
        raise DomainError(f"translation parameter must lie in (0, 1), got {r}")
    s = 1.0 / math.sqrt(1.0 - r * r)
    return DiskAutomorphism(s + 0j, r * s + 0j)


def classify(g: DiskAutomorphism, tol: float = CLASSIFY_TOL) -> Kind:
    t = abs(g.a.real)
    if t > 1.0 + tol:
        return Kind.HYPERBOLIC
    if t < 1.0 - tol:
        return Kind.ELLIPTIC
    if abs(g.b) < tol:
        return Kind.IDENTITY
    return Kind.PARABOLIC


def fixed_points(g: DiskAutomorphism) -> tuple[BoundaryPoint, BoundaryPoint]:
    """Repelling and attracting fixed points, in that order."""
    if classify(g) is not Kind.HYPERBOLIC:
        raise ClassificationError(f"fixed_points needs a hyperbolic element, got {classify(g).value}")
    a, b = g.a, g.b
    root = math.sqrt(max(abs(b) ** 2 - a.imag ** 2, 0.0))
    z1 = (1j * a.imag + root) / b.conjugate()
    z2 = (1j * a.imag - root) / b.conjugate()
    p1, p2 = BoundaryPoint.from_complex(z1), BoundaryPoint.from_complex(z2)
    if abs(g.derivative(p1.z)) < 1.0:
        p1, p2 = p2, p1
    return p1, p2


def axis_foot(g: DiskAutomorphism) -> complex:
    """Point of the translation axis of ``g`` nearest to the origin."""
    p, q = fixed_points(g)
    s = p.z + q.z
    if abs(s) < 1e-14:
        return 0j
    half = 0.5 * p.distance(q)
    return (1.0 - math.sin(half)) / math.cos(half) * (s / abs(s))


def translation_length(g: DiskAutomorphism) -> float:
    """Poincaré translation length (``d_P = artanh d_M`` normalization)."""
    t = abs(g.a.real)
    if t <= 1.0:
        return 0.0
    return math.acosh(t)


def _check_inside(*zs) -> None:
    for z in zs:
        if np.any(np.abs(np.asarray(z)) >= 1.0):
            raise DomainError("points must lie in the open unit disk")


def moebius_distance(z, w):
    _check_inside(z, w)
    z = np.asarray(z, dtype=complex)
    w = np.asarray(w, dtype=complex)
    out = np.abs(z - w) / np.abs(1.0 - np.conj(w) * z)
    return float(out) if out.ndim == 0 else out


def poincare_distance(z, w):
    return artanh_distance(moebius_distance(z, w))


def artanh_distance(dm):
    dm = np.asarray(dm, dtype=float)
    out = np.arctanh(np.minimum(dm, 1.0))
    return float(out) if out.ndim == 0 else out


def moebius_from_poincare(dp):
    """Inverse of ``artanh``: ``(e^{2d} - 1) / (e^{2d} + 1)``."""
    dp = np.asarray(dp, dtype=float)
    e = np.exp(2.0 * dp)
    out = (e - 1.0) / (e + 1.0)
    return float(out) if out.ndim == 0 else out


def image_disk(g: DiskAutomorphism, center: complex, radius: float) -> tuple[complex, float]:
    """Exact image of the Euclidean disk ``|z - center| < radius`` under ``g``.

    The pole of ``g`` must lie outside the closed disk; otherwise the image is
    the exterior of a circle and a DomainError is raised.
    """
    a, b = g.a, g.b
    c = b.conjugate()
    if abs(c) < 1e-300:
        k = a / a.conjugate()
        return k * center, abs(k) * radius
    d = a.conjugate()
    pole = -d / c
    delta = abs(center - pole) ** 2 - radius ** 2
    if delta <= 0:
        raise DomainError("pole of the map lies in the closed disk")
    # g(z) = a/c - (1/c^2) / (z - pole)
    lead = a / c
    coef = -1.0 / (c * c)
    inv_center = np.conj(center - pole) / delta
    inv_radius = radius / delta
    return lead + coef * inv_center, abs(coef) * inv_radius


def isometric_cap(g: DiskAutomorphism) -> tuple[complex, float]:
    """Disk ``|conj(b) z - a| < 1``: the Dirichlet half-plane beyond the
    bisector of ``0`` and ``g(0)`` (contains ``g(0)``)."""
    if abs(g.b) < 1e-300:
        raise DomainError("identity-like element has no bisector")
    return g.a / g.b.conjugate(), 1.0 / abs(g.b)


def geodesic_from_circle(center: complex, radius: float) -> Geodesic:
    """Geodesic supported on a circle orthogonal to the unit circle."""
    mod = abs(center)
    half = math.acos(min(1.0, 1.0 / mod))
    base = math.atan2(center.imag, center.real)
    return Geodesic.from_angles(base - half, base + half)


def bisector(w: complex) -> Geodesic:
    """Perpendicular bisector of ``0`` and ``w``."""
    if not 0.0 < abs(w) < 1.0:
        raise DomainError("bisector needs 0 < |w| < 1")
    m = abs(w) / (1.0 + math.sqrt(1.0 - abs(w) ** 2))
    u = w / abs(w)
    return geodesic_from_circle(u * (1.0 + m * m) / (2.0 * m), (1.0 - m * m) / (2.0 * m))


def strip_geodesics(r: float) -> tuple[Geodesic, Geodesic]:
    """Boundary geodesics ``(l_plus, l_minus)`` of the fundamental strip of
    ``make_hyperbolic(r)``; they meet the real axis at
    ``+-(1 - sqrt(1 - r^2)) / r``."""
    if not 0.0 < r < 1.0:
        raise DomainError(f"translation parameter must lie in (0, 1), got {r}")
    t = math.asin(r)
    l_plus = Geodesic.from_angles(0.5 * math.pi - t, t - 0.5 * math.pi)
    l_minus = Geodesic.from_angles(0.5 * math.pi + t, -t - 0.5 * math.pi)
    return l_plus, l_minus


def strip_crossing(r: float) -> float:
    # (1 - sqrt(1 - r^2)) / r without cancellation
    return r / (1.0 + math.sqrt(1.0 - r * r))
