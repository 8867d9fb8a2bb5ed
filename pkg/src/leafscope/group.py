"""Finite truncations of finitely generated Fuchsian groups.

Words are enumerated breadth-first by length and stored in flat numpy arrays
(coefficients, first/last letter, parent prefix).  Letters are coded as
``2*i`` for generator ``i`` and ``2*i + 1`` for its inverse, so ``code ^ 1``
is the inverse letter.

Certificates for the infinite tail rely on a ping-pong (Schottky) structure:
each letter ``g`` has a Euclidean disk ``C_g`` meeting the unit disk in a
half-plane, with ``g`` mapping the complement of ``C_{g^-1}`` onto ``C_g``.
When those disks are pairwise disjoint every reduced word ``w`` sends ``0``
into ``C_{first(w)}``, which yields rigorous lower bounds for the
displacement of omitted words and upper bounds for Poincaré-series tails.
"""

from __future__ import annotations

import functools
import logging
import math
import os
from dataclasses import dataclass, field

import numpy as np
from scipy.spatial import cKDTree

from .certified import CertifiedValue
from .moebius import (
    BoundaryPoint,
    ClassificationError,
    DiskAutomorphism,
    DomainError,
    Geodesic,
    Kind,
    axis_foot,
    classify,
    compose,
    conjugate,
    geodesic_from_circle,
    isometric_cap,
)

log = logging.getLogger(__name__)

DEFAULT_MAX_BALL = 10**6
DEDUP_TOL = 1e-9
LIMIT_EPS = 0.05
_CHUNK = 1 << 21


class ResourceError(RuntimeError):
    """The requested truncation exceeds the configured element cap."""


def max_ball_size() -> int:
    raw = os.environ.get("LEAFSCOPE_MAX_BALL")
    if raw:
        return int(float(raw))
    return DEFAULT_MAX_BALL


@dataclass(frozen=True)
class FuchsianGroupSpec:
    generators: tuple[DiskAutomorphism, ...] = ()
    labels: tuple[str, ...] = ()

    def __post_init__(self):
        gens = tuple(self.generators)
        labels = tuple(self.labels) or tuple(f"g{i + 1}" for i in range(len(gens)))
        if len(labels) != len(gens):
            raise ValueError("one label per generator required")
        for lab, g in zip(labels, gens):
            kind = classify(g)
            if kind is not Kind.HYPERBOLIC:
                raise ClassificationError(f"generator {lab} is {kind.value}, expected hyperbolic")
        object.__setattr__(self, "generators", gens)
        object.__setattr__(self, "labels", labels)

    @property
    def rank(self) -> int:
        return len(self.generators)

    def letter(self, code: int) -> DiskAutomorphism:
        g = self.generators[code >> 1]
        return g.inverse() if code & 1 else g

    def letters(self) -> list[DiskAutomorphism]:
        return [self.letter(c) for c in range(2 * self.rank)]

    def conjugated(self, phi: DiskAutomorphism) -> "FuchsianGroupSpec":
        return FuchsianGroupSpec(tuple(conjugate(g, phi) for g in self.generators), self.labels)

    def extended(self, g: DiskAutomorphism, label: str | None = None) -> "FuchsianGroupSpec":
        label = label or f"g{self.rank + 1}"
        return FuchsianGroupSpec(self.generators + (g,), self.labels + (label,))


def cyclic_group(r: float) -> FuchsianGroupSpec:
    from .moebius import make_hyperbolic

    return FuchsianGroupSpec((make_hyperbolic(r),))


def hyperbolic_along(angle: float, r: float) -> DiskAutomorphism:
    """Translation by ``make_hyperbolic(r)`` along the diameter at ``angle``."""
    from .moebius import make_hyperbolic

    return conjugate(make_hyperbolic(r), DiskAutomorphism.rotation(angle))


@dataclass(frozen=True)
class GroupElement:
    word: tuple[tuple[int, int], ...]
    map: DiskAutomorphism

    def __len__(self):
        return len(self.word)

    def label(self, labels=None) -> str:
        if not self.word:
            return "id"
        parts = []
        for gen, exp in self.word:
            name = labels[gen] if labels else f"g{gen + 1}"
            parts.append(name if exp > 0 else name + "^-1")
        return "*".join(parts)


def _code_to_letter(code: int) -> tuple[int, int]:
    return code >> 1, (-1 if code & 1 else 1)


@dataclass(eq=False)
class OrbitBall:
    """All reduced words of length ``1..depth`` (identity excluded), deduplicated."""

    group: FuchsianGroupSpec
    depth: int
    a: np.ndarray
    b: np.ndarray
    length: np.ndarray
    first: np.ndarray
    last: np.ndarray
    parent: np.ndarray
    warnings: tuple[str, ...] = field(default=())

    def __len__(self) -> int:
        return int(self.a.shape[0])

    @property
    def origin_orbit(self) -> np.ndarray:
        return self.b / np.conj(self.a)

    @property
    def one_minus_orbit_sq(self) -> np.ndarray:
        """``1 - |g(0)|^2 = 1 / |a|^2``, free of cancellation."""
        return 1.0 / np.abs(self.a) ** 2

    @property
    def one_minus_orbit(self) -> np.ndarray:
        u = self.one_minus_orbit_sq
        return u / (1.0 + np.sqrt(1.0 - u))

    def level(self, ell: int) -> slice:
        lo = int(np.searchsorted(self.length, ell, side="left"))
        hi = int(np.searchsorted(self.length, ell, side="right"))
        return slice(lo, hi)

    def codes(self, i: int) -> list[int]:
        out = []
        while i >= 0:
            out.append(int(self.last[i]))
            i = int(self.parent[i])
        return out[::-1]

    def word(self, i: int) -> tuple[tuple[int, int], ...]:
        return tuple(_code_to_letter(c) for c in self.codes(i))

    def automorphism(self, i: int) -> DiskAutomorphism:
        try:
            return DiskAutomorphism(complex(self.a[i]), complex(self.b[i]))
        except DomainError:
            # entries too large for |a|^2 - |b|^2 = 1 to survive rounding; rebuild letter by letter
            g = DiskAutomorphism.identity()
            for c in self.codes(i):
                g = compose(g, self.group.letter(c))
            return g

    def apply_word(self, i: int, z: complex) -> complex:
        """``g_i(z)`` by applying the letters one at a time.

        Slower than the stored matrix but free of the cancellation that long
        products of large matrices suffer.
        """
        for c in reversed(self.codes(i)):
            z = complex(self.group.letter(c)(z))
        return z

    def element(self, i: int) -> GroupElement:
        return GroupElement(self.word(i), self.automorphism(i))

    @property
    def elements(self) -> list[GroupElement]:
        return [self.element(i) for i in range(len(self))]

    def find(self, g: DiskAutomorphism, tol: float = DEDUP_TOL) -> int | None:
        """Index of an element equal to ``g`` (projective tolerance), if present."""
        scale = np.maximum(1.0, np.maximum(np.abs(self.a), abs(g.a)))
        dp = np.maximum(np.abs(self.a - g.a), np.abs(self.b - g.b))
        dm = np.maximum(np.abs(self.a + g.a), np.abs(self.b + g.b))
        d = np.minimum(dp, dm) / scale
        i = int(np.argmin(d)) if len(d) else -1
        if i >= 0 and d[i] < tol:
            return i
        return None


def _features(a: np.ndarray, b: np.ndarray, sign: float = 1.0) -> np.ndarray:
    m = np.abs(a)
    return np.column_stack(
        [np.log(m), sign * a.real / m, sign * a.imag / m, sign * b.real / m, sign * b.imag / m]
    )


def _coincide(a1, b1, a2, b2, tol) -> bool:
    # g1^-1 g2 close to +-identity, allowing for rounding in large entries
    ca = np.conj(a1) * a2 - b1 * np.conj(b2)
    cb = np.conj(a1) * b2 - b1 * np.conj(a2)
    slack = tol + 8e-16 * abs(a1) * abs(a2)
    if slack > 1e-3:
        # rounding swamps the comparison; keeping a duplicate is harmless
        return False
    return abs(cb) < slack and min(abs(ca - 1.0), abs(ca + 1.0)) < slack


def _is_identity(a, b, tol):
    return (np.abs(b) < tol) & (np.minimum(np.abs(a - 1.0), np.abs(a + 1.0)) < tol)


@functools.lru_cache(maxsize=16)
def _word_ball_cached(group: FuchsianGroupSpec, depth: int, cap: int, tol: float) -> OrbitBall:
    k = group.rank
    letters = group.letters()
    la = np.array([g.a for g in letters], dtype=complex)
    lb = np.array([g.b for g in letters], dtype=complex)
    warnings: list[str] = []

    def dedup(na, nb, old_tree, old_a, old_b):
        n = len(na)
        keep = np.ones(n, dtype=bool)
        ident = _is_identity(na, nb, tol)
        if ident.any():
            keep &= ~ident
            warnings.append(f"relation detected: {int(ident.sum())} word(s) reduce to the identity")
        if n == 0:
            return keep
        f_pos = _features(na, nb)
        f_neg = _features(na, nb, -1.0)
        r = tol * 4
        if old_tree is not None:
            for f in (f_pos, f_neg):
                d, j = old_tree.query(f, k=1, distance_upper_bound=r)
                for i in np.nonzero(np.isfinite(d))[0]:
                    if keep[i] and _coincide(old_a[j[i]], old_b[j[i]], na[i], nb[i], tol):
                        keep[i] = False
                        warnings.append("relation detected: word coincides with a shorter element")
        tree = cKDTree(f_pos)
        pairs = set(tree.query_pairs(r=r))
        d, j = tree.query(f_neg, k=1, distance_upper_bound=r)
        for i in np.nonzero(np.isfinite(d))[0]:
            pairs.add((min(i, int(j[i])), max(i, int(j[i]))))
        for i, j in sorted(pairs):
            if keep[i] and keep[j] and _coincide(na[i], nb[i], na[j], nb[j], tol):
                keep[j] = False
                warnings.append("relation detected: two distinct reduced words coincide")
        return keep

    codes = np.arange(2 * k)
    keep = dedup(la, lb, None, None, None)
    a, b = la[keep], lb[keep]
    length = np.ones(len(a), dtype=np.int16)
    first = codes[keep].astype(np.int16)
    last = first.copy()
    parent = np.full(len(a), -1, dtype=np.int64)
    all_a, all_b = [a], [b]
    all_len, all_first, all_last, all_parent = [length], [first], [last], [parent]
    total = len(a)
    offset = 0
    for ell in range(2, depth + 1):
        pa, pb = all_a[-1], all_b[-1]
        plast, pfirst = all_last[-1], all_first[-1]
        expected = len(pa) * max(2 * k - 1, 0)
        if total + expected > cap:
            raise ResourceError(
                f"word ball of depth {depth} would exceed the cap of {cap} elements "
                "(set LEAFSCOPE_MAX_BALL to raise it)"
            )
        chunks = []
        for c in range(2 * k):
            mask = plast != (c ^ 1)
            idx = np.nonzero(mask)[0]
            na = pa[idx] * la[c] + pb[idx] * np.conj(lb[c])
            nb = pa[idx] * lb[c] + pb[idx] * np.conj(la[c])
            chunks.append((na, nb, idx, c))
        na = np.concatenate([x[0] for x in chunks])
        nb = np.concatenate([x[1] for x in chunks])
        nidx = np.concatenate([x[2] for x in chunks])
        ncode = np.concatenate([np.full(len(x[2]), x[3], dtype=np.int16) for x in chunks])
        old_a = np.concatenate(all_a)
        old_b = np.concatenate(all_b)
        old_tree = cKDTree(_features(old_a, old_b))
        keep = dedup(na, nb, old_tree, old_a, old_b)
        prev_offset = offset
        offset = total
        all_a.append(na[keep])
        all_b.append(nb[keep])
        all_len.append(np.full(int(keep.sum()), ell, dtype=np.int16))
        all_first.append(pfirst[nidx[keep]])
        all_last.append(ncode[keep])
        all_parent.append(prev_offset + nidx[keep])
        total += int(keep.sum())
    arrays = [np.concatenate(x) for x in (all_a, all_b, all_len, all_first, all_last, all_parent)]
    for arr in arrays:
        arr.setflags(write=False)
    uniq = tuple(dict.fromkeys(warnings))
    for w in uniq:
        log.warning(w)
    return OrbitBall(group, depth, *arrays, warnings=uniq)


def word_ball(group: FuchsianGroupSpec, depth: int, cap: int | None = None) -> OrbitBall:
    """Enumerate reduced words of length ``1..depth``, deduplicated projectively.

    Numerically coincident words are dropped and reported in ``warnings``
    ("relation detected") instead of being quotiented.
    """
    if depth < 1:
        raise ValueError("word ball depth must be >= 1")
    cap = max_ball_size() if cap is None else cap
    return _word_ball_cached(group, int(depth), int(cap), DEDUP_TOL)


# ---------------------------------------------------------------------------
# displacement terms


def displacement_terms(a, b, z):
    """For elements ``(a, b)`` and a point ``z`` return ``(t, u, neglog)`` with
    ``t = d_M(z, g z)``, ``u = 1 - t^2`` and ``neglog = -log t``.

    ``u`` is assembled from ``1 - |g z|^2 = (1 - |z|^2) / |conj(b) z + conj(a)|^2``
    so the near-boundary regime keeps full relative precision.
    """
    z = complex(z)
    den = np.conj(b) * z + np.conj(a)
    w = (a * z + b) / den
    omz = 1.0 - abs(z) ** 2
    u = omz * omz / (np.abs(den) ** 2 * np.abs(1.0 - z.conjugate() * w) ** 2)
    u = np.minimum(u, 1.0)
    direct = np.abs(z - w) / np.abs(1.0 - np.conj(w) * z)
    near = u < 0.5
    t = np.where(near, np.sqrt(1.0 - u), direct)
    with np.errstate(divide="ignore"):
        neglog = np.where(near, -0.5 * np.log1p(-u), -np.log(direct))
    return t, u, neglog


def _artanh_from_u(u):
    """``artanh(sqrt(1 - u))`` evaluated stably for small ``u``."""
    u = np.asarray(u, dtype=float)
    s = np.sqrt(np.maximum(1.0 - u, 0.0))
    with np.errstate(divide="ignore"):
        return 0.5 * np.log((1.0 + s) ** 2 / u)


# ---------------------------------------------------------------------------
# ping-pong structure and tail certificates


def cap_from_geodesic(geo: Geodesic, inside: complex) -> tuple[complex, float] | None:
    """Euclidean disk bounded by ``geo``'s circle on the side containing ``inside``.

    Returns ``None`` when that side is not a disk (it contains the origin).
    """
    circ = geo.circle()
    if circ is None:
        return None
    c, rad = circ
    if abs(inside - c) < rad:
        return c, rad
    return None


def strip_caps(g: DiskAutomorphism):
    """Complementary half-planes of the canonical fundamental strip of ``g``.

    The strip is the Dirichlet domain of ``<g>`` based at the foot ``p`` of the
    perpendicular from ``0`` to the axis.  Returns ``(cap_g, cap_ginv)`` with
    ``cap_g`` containing ``g(p)``; either may be ``None`` if it contains ``0``.
    """
    p = axis_foot(g)
    psi = DiskAutomorphism.moving_to_origin(p)
    back = psi.inverse()
    gt = conjugate(g, psi)
    out = []
    for h, target in ((gt, g(p)), (gt.inverse(), g.inverse()(p))):
        c, rad = isometric_cap(h)
        geo = geodesic_from_circle(c, rad)
        ends = [back(e.z) for e in geo.endpoints]
        mapped = Geodesic((BoundaryPoint.from_complex(ends[0]), BoundaryPoint.from_complex(ends[1])))
        out.append(cap_from_geodesic(mapped, target))
    return tuple(out)


@dataclass(frozen=True)
class PingPong:
    caps: tuple  # per letter code: (center, radius) or None
    valid: bool
    min_gap: float
    reason: str = ""


@functools.lru_cache(maxsize=64)
def ping_pong(group: FuchsianGroupSpec, margin: float = 1e-12) -> PingPong:
    caps: list = []
    for g in group.generators:
        cg, cinv = strip_caps(g)
        caps.extend([cg, cinv])
    if any(c is None for c in caps):
        return PingPong(tuple(caps), False, -math.inf, "a strip half-plane contains the origin")
    gap = math.inf
    for i in range(len(caps)):
        for j in range(i + 1, len(caps)):
            (ci, ri), (cj, rj) = caps[i], caps[j]
            gap = min(gap, abs(ci - cj) - ri - rj)
    valid = gap > margin
    return PingPong(tuple(caps), valid, gap, "" if valid else "strip half-planes overlap")


def _image_disks(pa, pb, center, radius):
    """Vectorized image of one disk under many automorphisms; returns
    ``(centers, radii, ok)`` with ``ok`` false where the pole is inside."""
    cc = np.conj(pb)
    d = np.conj(pa)
    pole = -d / cc
    delta = np.abs(center - pole) ** 2 - radius**2
    ok = delta > 0
    safe = np.where(ok, delta, 1.0)
    centers = pa / cc - (1.0 / cc**2) * np.conj(center - pole) / safe
    radii = radius / (np.abs(cc) ** 2 * safe)
    return centers, radii, ok


def _sup_derivative(pa, pb, center, radius):
    """``sup |p'(x)|`` over the disk, for each ``p = (pa, pb)``."""
    pole = -np.conj(pa) / np.conj(pb)
    gap = np.abs(center - pole) - radius
    with np.errstate(divide="ignore"):
        return np.where(gap > 0, 1.0 / (np.abs(pb) ** 2 * np.maximum(gap, 0.0) ** 2), np.inf)


@dataclass(frozen=True)
class TailBounds:
    """Rigorous bounds for words longer than the truncation depth.

    ``orbit_distance``: lower bound for ``d_P(0, w(0))`` over omitted ``w``.
    ``poincare_tail``: upper bound for the sum of ``1 - |w(0)|^2`` over omitted ``w``.
    """

    valid: bool
    orbit_distance: float
    poincare_tail: float
    spectral_radius: float
    reason: str = ""

    @property
    def orbit_valid(self) -> bool:
        """``orbit_distance`` only needs the ping-pong structure."""
        return self.orbit_distance > 0.0


@functools.lru_cache(maxsize=16)
def tail_bounds(group: FuchsianGroupSpec, depth: int) -> TailBounds:
    if group.rank == 0:
        return TailBounds(True, math.inf, 0.0, 0.0)
    pp = ping_pong(group)
    if not pp.valid:
        return TailBounds(False, 0.0, math.inf, math.inf, pp.reason)
    ball = word_ball(group, depth)
    n_letters = 2 * group.rank
    sl = ball.level(depth)
    pa, pb = ball.a[sl], ball.b[sl]
    pfirst, plast = ball.first[sl].astype(int), ball.last[sl].astype(int)
    # Kp[i, h] = sup over C_h of |p_i'|, zero where h cancels the last letter
    Kp = np.zeros((len(pa), n_letters))
    u_max = 0.0
    for h in range(n_letters):
        c, rad = pp.caps[h]
        col = _sup_derivative(pa, pb, c, rad)
        col = np.where(plast == (h ^ 1), 0.0, col)
        Kp[:, h] = col
        far = 1.0 - (abs(c) - rad) ** 2
        u_max = max(u_max, float(np.max(col, initial=0.0)) * far)
    if not np.all(np.isfinite(Kp)):
        return TailBounds(False, 0.0, math.inf, math.inf, "pole inside a ping-pong disk")
    K = np.zeros((n_letters, n_letters))
    for h in range(n_letters):
        K[h] = Kp[pfirst == h].sum(axis=0)
    rho = float(np.max(np.abs(np.linalg.eigvals(K)))) if K.size else 0.0
    if rho >= 1.0:
        return TailBounds(False, float(_artanh_from_u(u_max)), math.inf, rho,
                          "tail contraction not established at this depth")
    A = np.zeros(n_letters)
    np.add.at(A, ball.first.astype(int), ball.one_minus_orbit_sq)
    T = np.linalg.solve(np.eye(n_letters) - K, A)
    T = np.maximum(T, 0.0) * (1.0 + 1e-9)
    tail = float((Kp @ T).sum()) * (1.0 + 1e-9)
    dist = float(_artanh_from_u(u_max)) if u_max > 0 else math.inf
    return TailBounds(True, dist * (1.0 - 1e-12), tail, rho)


# ---------------------------------------------------------------------------
# queries


def displacement_detail(group: FuchsianGroupSpec, depth: int, z: complex, terms=None):
    """``(CertifiedValue, index)`` of the minimal Möbius displacement at ``z``.

    ``terms`` may carry precomputed ``displacement_terms`` for the ball.
    """
    z = complex(z)
    if abs(z) >= 1.0:
        raise DomainError("point must lie in the open unit disk")
    if group.rank == 0:
        return CertifiedValue(1.0, 1.0, 1.0, depth, True, ("trivial group: disk convention",)), None
    ball = word_ball(group, depth)
    if terms is None:
        terms = displacement_terms(ball.a, ball.b, z)
    t = terms[0]
    i = int(np.argmin(t))
    m = float(t[i])
    tb = tail_bounds(group, depth)
    notes = list(ball.warnings)
    if tb.orbit_valid:
        slack = tb.orbit_distance - 2.0 * math.atanh(abs(z))
        t_tail = math.tanh(slack) if slack > 0 else 0.0
        certified = t_tail >= m
        lower = m if certified else t_tail
        if not certified:
            notes.append("omitted words may be shorter at this point; increase depth")
    else:
        certified, lower = False, 0.0
        notes.append(f"no ping-pong certificate: {tb.reason}")
    return CertifiedValue(m, lower, m, depth, certified, tuple(notes)), i


def displacement(group: FuchsianGroupSpec, depth: int, z: complex) -> CertifiedValue:
    """Minimal Möbius displacement ``min d_M(z, g z)`` over nontrivial ``g``."""
    return displacement_detail(group, depth, z)[0]


@dataclass(frozen=True)
class DomainConstraint:
    element: GroupElement
    cap_center: complex
    cap_radius: float

    @property
    def geodesic(self) -> Geodesic:
        return geodesic_from_circle(self.cap_center, self.cap_radius)


@dataclass(frozen=True)
class DirichletDomain:
    """Finite-depth Dirichlet domain centred at the origin.

    A point is inside iff ``d_M(z, 0) < d_M(z, g(0))`` for every constraint,
    equivalently ``|conj(b) z - a| > 1``.
    """

    depth: int
    constraints: tuple[DomainConstraint, ...]

    def _coeffs(self):
        a = np.array([c.element.map.a for c in self.constraints], dtype=complex)
        b = np.array([c.element.map.b for c in self.constraints], dtype=complex)
        return a, b

    def contains(self, z, closed: bool = False, tol: float = 1e-12):
        z = np.asarray(z, dtype=complex)
        flat = z.reshape(-1)
        inside = np.abs(flat) < 1.0
        if self.constraints:
            a, b = self._coeffs()
            for start in range(0, len(flat), 4096):
                zz = flat[start:start + 4096]
                val = np.abs(np.conj(b)[None, :] * zz[:, None] - a[None, :]) - 1.0
                ok = (val >= -tol) if closed else (val > tol)
                inside[start:start + 4096] &= ok.all(axis=1)
        out = inside.reshape(z.shape)
        return bool(out) if out.ndim == 0 else out

    @property
    def geodesics(self) -> list[Geodesic]:
        return [c.geodesic for c in self.constraints]


def _prune_caps(centers: np.ndarray, radii: np.ndarray, order: np.ndarray) -> np.ndarray:
    """Indices of caps not contained in another cap (exact disk containment)."""
    n = len(centers)
    keep = np.ones(n, dtype=bool)
    short = order[: min(n, 64)]
    for j in short:
        contained = np.abs(centers - centers[j]) + radii <= radii[j] * (1 + 1e-12)
        contained[j] = False
        keep &= ~(contained & keep[j])
    idx = np.nonzero(keep)[0]
    if len(idx) <= 4000:
        c, r = centers[idx], radii[idx]
        inside = np.abs(c[:, None] - c[None, :]) + r[:, None] <= r[None, :] * (1 + 1e-12)
        np.fill_diagonal(inside, False)
        # among identical caps keep the first
        same = inside & inside.T
        inside &= ~(same & (np.arange(len(idx))[:, None] < np.arange(len(idx))[None, :]))
        idx = idx[~inside.any(axis=1)]
    return idx


def dirichlet_domain(group: FuchsianGroupSpec, depth: int) -> DirichletDomain:
    if group.rank == 0:
        return DirichletDomain(depth, ())
    ball = word_ball(group, depth)
    centers = ball.a / np.conj(ball.b)
    radii = 1.0 / np.abs(ball.b)
    order = np.argsort(-radii)
    idx = _prune_caps(centers, radii, order)
    idx = idx[np.argsort(np.angle(centers[idx]))]
    cons = tuple(DomainConstraint(ball.element(int(i)), complex(centers[i]), float(radii[i])) for i in idx)
    return DirichletDomain(depth, cons)


@dataclass(frozen=True)
class Violation:
    sample_index: int
    z: complex
    image: complex
    element: GroupElement


@dataclass
class ViolationReport:
    pairs: list[Violation]
    warnings: tuple[str, ...] = ()
    checked: int = 0

    def __len__(self):
        return len(self.pairs)

    def __iter__(self):
        return iter(self.pairs)

    def __bool__(self):
        return bool(self.pairs)

    @property
    def clean(self) -> bool:
        return not self.pairs and not self.warnings


def fundamental_domain_violations(group, depth, samples, domain=None, margin: float = 1e-9):
    """Pairs ``(z, g z)`` with both points inside the domain, ``g`` in the ball.

    ``domain`` is any object with a vectorized ``contains``; defaults to the
    depth-``depth`` Dirichlet domain.  Samples outside the domain are skipped.
    """
    samples = np.asarray(samples, dtype=complex).reshape(-1)
    if domain is None:
        domain = dirichlet_domain(group, depth)
    if group.rank == 0:
        return ViolationReport([], (), 0)
    ball = word_ball(group, depth)
    inside_idx = np.nonzero(domain.contains(samples))[0]
    zs = samples[inside_idx]
    pairs: list[Violation] = []
    step = max(1, _CHUNK // max(len(zs), 1))
    for start in range(0, len(ball), step):
        a = ball.a[start:start + step]
        b = ball.b[start:start + step]
        w = (a[:, None] * zs[None, :] + b[:, None]) / (np.conj(b)[:, None] * zs[None, :] + np.conj(a)[:, None])
        flat = w.reshape(-1)
        cand = np.abs(flat) < 1.0 - margin
        hit = np.zeros(flat.shape, dtype=bool)
        if cand.any():
            hit[cand] = domain.contains(flat[cand])
        for e, s in zip(*np.nonzero(hit.reshape(w.shape))):
            # confirm with the letter-by-letter image before reporting
            img = ball.apply_word(start + int(e), complex(zs[s]))
            if abs(img - zs[s]) < margin or not (abs(img) < 1.0 - margin and domain.contains(img)):
                continue
            pairs.append(Violation(int(inside_idx[s]), complex(zs[s]), img, ball.element(start + int(e))))
    return ViolationReport(pairs, ball.warnings, len(zs))


@dataclass(frozen=True)
class LimitPoint:
    point: BoundaryPoint
    modulus: float


def limit_set_sample(group: FuchsianGroupSpec, depth: int, eps: float = LIMIT_EPS) -> list[LimitPoint]:
    """Radial projections of orbit points ``g(0)`` with ``|g(0)| > 1 - eps``."""
    if group.rank == 0:
        return []
    ball = word_ball(group, depth)
    w = ball.origin_orbit
    keep = ball.one_minus_orbit > 0 if eps >= 1 else ball.one_minus_orbit < eps
    ang = np.angle(w[keep])
    mods = 1.0 - ball.one_minus_orbit[keep]
    return [LimitPoint(BoundaryPoint(float(t)), float(m)) for t, m in zip(ang, mods)]


def angular_gap(points: list[LimitPoint], theta: float) -> float:
    """Angular distance from ``theta`` to the nearest sampled limit point."""
    if not points:
        return math.pi
    ang = np.array([p.point.angle for p in points])
    d = np.abs(np.mod(ang - theta + math.pi, 2 * math.pi) - math.pi)
    return float(d.min())


def convergence_sum(group: FuchsianGroupSpec, depth: int) -> np.ndarray:
    """Partial sums of ``sum (1 - |g(0)|)`` over words of length ``<= l``, ``l = 1..depth``."""
    if group.rank == 0:
        return np.zeros(depth)
    ball = word_ball(group, depth)
    per = np.zeros(depth)
    np.add.at(per, ball.length.astype(int) - 1, ball.one_minus_orbit)
    return np.cumsum(per)


def fixed_point_angles(a: np.ndarray, b: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Vectorized boundary fixed points (angles) of hyperbolic elements."""
    root = np.sqrt(np.maximum(np.abs(b) ** 2 - a.imag**2, 0.0))
    z1 = (1j * a.imag + root) / np.conj(b)
    z2 = (1j * a.imag - root) / np.conj(b)
    return np.angle(z1), np.angle(z2)


@dataclass(frozen=True)
class StabilizerReport:
    point: BoundaryPoint
    elements: tuple[GroupElement, ...]
    shortest: GroupElement | None
    cyclic_chain: bool


def boundary_stabilizer(group: FuchsianGroupSpec, depth: int, s: BoundaryPoint, tol: float = 1e-7) -> StabilizerReport:
    """Elements with a fixed point within ``tol`` of ``s``; checks they are
    all powers of the shortest one."""
    if group.rank == 0:
        return StabilizerReport(s, (), None, True)
    ball = word_ball(group, depth)
    hyper = np.abs(ball.a.real) > 1.0 + 1e-12
    t1, t2 = fixed_point_angles(ball.a, ball.b)

    def close(t):
        return np.abs(np.mod(t - s.angle + math.pi, 2 * math.pi) - math.pi) < tol

    idx = np.nonzero(hyper & (close(t1) | close(t2)))[0]
    if len(idx) == 0:
        return StabilizerReport(s, (), None, True)
    elems = tuple(ball.element(int(i)) for i in idx)
    order = np.argsort(ball.length[idx], kind="stable")
    shortest = elems[int(order[0])]
    powers = []
    g = shortest.map
    acc = DiskAutomorphism.identity()
    for _ in range(depth):
        acc = compose(acc, g)
        powers.append(acc)
    powers += [p.inverse() for p in powers]
    chain = all(any(e.map.equals(p) for p in powers) for e in elems)
    return StabilizerReport(s, elems, shortest, chain)
