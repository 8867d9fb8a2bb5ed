"""Inductive construction of infinitely generated Schottky-type Fuchsian groups
and of a group with injective horocycles on boundary sets of almost full
measure.

Each generator comes with its canonical strip: the Dirichlet domain of the
cyclic group it generates, based at the foot of its axis.  The two
complementary half-planes ("caps") are Euclidean disks orthogonal to the
unit circle.  New generators are placed with both caps inside a small
Euclidean disk around a point of a free boundary arc, so all caps stay
pairwise disjoint and the complement of their union is a fundamental domain.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass, field, replace

import numpy as np

from .arcs import TWO_PI, BoundaryArcSet
from .group import (
    FuchsianGroupSpec,
    dirichlet_domain,
    fundamental_domain_violations,
    ping_pong,
    strip_caps,
    word_ball,
)
from .moebius import DiskAutomorphism, Kind, classify, conjugate, image_disk, make_hyperbolic

DEFAULT_DEPTH = 3
DEFAULT_BASE_R = 0.6
DEFAULT_MARGIN = 1e-3
DEFAULT_DELTA_BUDGET = 1.0
MAX_HALVINGS = 40


class ConstraintViolation(ValueError):
    """A placement disk meets existing caps; ``offending`` lists them."""

    def __init__(self, message: str, offending: list):
        super().__init__(message)
        self.offending = offending


class ConstructionError(RuntimeError):
    """An inductive stage could not be completed."""


def default_deltas(stages: int) -> list[float]:
    """``delta_j = 2^(-j-2)`` for stages ``j = 2..stages``."""
    return [2.0 ** (-j - 2) for j in range(2, stages + 1)]


# ---------------------------------------------------------------------------
# cap geometry


def cap_shadow(center: complex, radius: float) -> tuple[float, float]:
    """``(center angle, half width)`` of the boundary arc inside an orthogonal disk."""
    return math.atan2(center.imag, center.real), math.atan(radius)


def _arc_max_distance(C: complex, rho: float, t0: float, t1: float, p: complex) -> float:
    """Max of ``|z - p|`` for ``z = C + rho e^{it}``, ``t`` in ``[t0, t1]``."""
    best = max(abs(C + rho * np.exp(1j * t) - p) for t in (t0, t1))
    d = C - p
    if abs(d) > 0:
        t_far = math.atan2(d.imag, d.real)
        k = math.ceil((t0 - t_far) / TWO_PI)
        if t_far + k * TWO_PI <= t1:
            best = max(best, abs(d) + rho)
    return best


def cap_region_max_distance(center: complex, radius: float, p: complex) -> float:
    """Max distance from ``p`` to the part of the cap disk inside the closed unit disk."""
    mid, half = cap_shadow(center, radius)
    # unit-circle part: the shadow arc
    d_shadow = _arc_max_distance(0j, 1.0, mid - half, mid + half, p)
    # cap-circle part inside the disk: around the direction of -center
    e1, e2 = np.exp(1j * (mid - half)), np.exp(1j * (mid + half))
    phi1 = math.atan2((e1 - center).imag, (e1 - center).real)
    phi2 = math.atan2((e2 - center).imag, (e2 - center).real)
    inner = math.atan2(-center.imag, -center.real)
    lo, hi = sorted((phi1, phi2))
    if not lo <= inner <= hi:
        lo, hi = hi, lo + TWO_PI
    d_arc = _arc_max_distance(center, radius, lo, hi, p)
    return max(d_shadow, d_arc)


def _disk_gap(c1, r1, c2, r2) -> float:
    return abs(c1 - c2) - r1 - r2


@dataclass(frozen=True)
class SchottkyDomain:
    """Complement in the unit disk of all caps of a ping-pong generating set."""

    caps: tuple

    def contains(self, z, closed: bool = False, tol: float = 1e-12):
        z = np.asarray(z, dtype=complex)
        inside = np.abs(z) < 1.0
        for c, r in self.caps:
            d = np.abs(z - c) - r
            inside &= (d >= -tol) if closed else (d > tol)
        return bool(inside) if inside.ndim == 0 else inside


def schottky_domain(group: FuchsianGroupSpec) -> SchottkyDomain:
    pp = ping_pong(group)
    if not pp.valid:
        raise ConstructionError(f"no ping-pong structure: {pp.reason}")
    return SchottkyDomain(tuple(pp.caps))


def free_arcs(group: FuchsianGroupSpec) -> BoundaryArcSet:
    """Boundary arcs of the Schottky domain (outside every cap shadow)."""
    covered = BoundaryArcSet.empty()
    for g in group.generators:
        for cap in strip_caps(g):
            covered = covered.union(BoundaryArcSet.window(*cap_shadow(*cap)))
    return covered.complement()


# ---------------------------------------------------------------------------
# state


@dataclass(frozen=True)
class Level:
    index: int
    arcs: BoundaryArcSet
    radius: float
    created_measure: float
    removed: tuple[float, ...] = ()

    @property
    def measure(self) -> float:
        return self.arcs.measure


@dataclass(frozen=True)
class ConstructionState:
    group: FuchsianGroupSpec = field(default_factory=FuchsianGroupSpec)
    levels: tuple[Level, ...] = ()
    deltas: tuple[float, ...] = ()
    epsilons: tuple[float, ...] = ()
    anchors: tuple[float, ...] = ()
    depth: int = DEFAULT_DEPTH

    @property
    def caps(self) -> list:
        out = []
        for g in self.group.generators:
            out.extend(strip_caps(g))
        return out

    @property
    def domain_geodesics(self):
        from .moebius import geodesic_from_circle

        return [tuple(geodesic_from_circle(*c) for c in strip_caps(g)) for g in self.group.generators]

    def to_extensions(self) -> dict:
        return {
            "kind": "fullmeasure",
            "depth": self.depth,
            "deltas": list(self.deltas),
            "epsilons": list(self.epsilons),
            "anchors": list(self.anchors),
            "levels": [
                {
                    "index": lv.index,
                    "arcs": lv.arcs.as_pairs(),
                    "measure": lv.measure,
                    "radius": lv.radius,
                    "created_measure": lv.created_measure,
                    "removed": list(lv.removed),
                }
                for lv in self.levels
            ],
        }

    @classmethod
    def from_extensions(cls, group: FuchsianGroupSpec, ext: dict) -> "ConstructionState":
        levels = tuple(
            Level(
                int(lv["index"]),
                BoundaryArcSet.from_arcs([tuple(p) for p in lv["arcs"]]),
                float(lv["radius"]),
                float(lv["created_measure"]),
                tuple(float(x) for x in lv.get("removed", ())),
            )
            for lv in ext.get("levels", ())
        )
        return cls(
            group,
            levels,
            tuple(ext.get("deltas", ())),
            tuple(ext.get("epsilons", ())),
            tuple(ext.get("anchors", ())),
            int(ext.get("depth", DEFAULT_DEPTH)),
        )


# ---------------------------------------------------------------------------
# placing a new generator


def _vertical(rho: float) -> DiskAutomorphism:
    return conjugate(make_hyperbolic(rho), DiskAutomorphism.rotation(math.pi / 2))


def _push(t: float) -> DiskAutomorphism:
    return DiskAutomorphism.normalized(1.0, t)


def next_generator(state: ConstructionState, a: float, eps: float, rho: float = DEFAULT_BASE_R) -> DiskAutomorphism:
    """Hyperbolic element whose two strip caps lie in the Euclidean disk ``D_eps(e^{ia})``.

    The element is ``make_hyperbolic(rho)`` turned to a vertical axis, pushed
    toward ``1`` along the real diameter until both caps fit, then rotated to ``a``.
    """
    if eps <= 0:
        raise ValueError("eps must be positive")
    anchor = complex(math.cos(a), math.sin(a))
    offending = []
    for k, (c, r) in enumerate(state.caps):
        if abs(c - anchor) - r - eps <= 0:
            offending.append({"generator": state.group.labels[k // 2], "cap": k % 2, "center": [c.real, c.imag], "radius": r})
    if offending:
        raise ConstraintViolation("placement disk meets existing strip caps", offending)
    base = _vertical(rho)
    rot = DiskAutomorphism.rotation(a)
    for k in range(1, 46):
        t = 1.0 - 2.0 ** (-k)
        g = conjugate(base, _push(t))
        caps = strip_caps(g)
        if any(c is None for c in caps):
            continue
        if all(cap_region_max_distance(c, r, 1.0) < eps for c, r in caps):
            g = conjugate(g, rot)
            if classify(g) is not Kind.HYPERBOLIC:
                raise ConstructionError("placed element is not hyperbolic")
            return g
    raise ConstructionError("could not fit the strip caps inside the placement disk")


@dataclass(frozen=True)
class LimitgroupReport:
    disks_inside: bool
    gap: float
    margin: float
    offending: tuple = ()

    @property
    def passed(self) -> bool:
        return self.disks_inside and self.gap > self.margin


def limitgroup_hypotheses(group: FuchsianGroupSpec, new: DiskAutomorphism, depth: int, margin: float = DEFAULT_MARGIN) -> LimitgroupReport:
    """Check that both caps of ``new`` lie in the depth-``depth`` Dirichlet domain
    of ``group`` with their boundaries a Euclidean distance ``> margin`` from
    its boundary geodesics."""
    caps = strip_caps(new)
    if any(c is None for c in caps):
        return LimitgroupReport(False, -math.inf, margin, ("new strip cap contains the origin",))
    if group.rank == 0:
        return LimitgroupReport(True, math.inf, margin)
    dom = dirichlet_domain(group, depth)
    gap = math.inf
    offending = []
    for c, r in caps:
        for con in dom.constraints:
            g = _disk_gap(c, r, con.cap_center, con.cap_radius)
            if g <= 0:
                offending.append(con.element.label(group.labels))
            gap = min(gap, g)
    return LimitgroupReport(not offending, gap, margin, tuple(dict.fromkeys(offending)))


def coverage_check(group: FuchsianGroupSpec, depth: int, samples, domain=None) -> float:
    """Fraction of samples moved into the closed domain by the identity or a
    word-ball element."""
    samples = np.asarray(samples, dtype=complex).reshape(-1)
    if domain is None:
        domain = dirichlet_domain(group, depth)
    hit = np.asarray(domain.contains(samples, closed=True), dtype=bool)
    if group.rank == 0 or hit.all():
        return float(hit.mean()) if len(hit) else 1.0
    ball = word_ball(group, depth)
    todo = np.nonzero(~hit)[0]
    for s in todo:
        z = samples[s]
        w = (ball.a * z + ball.b) / (np.conj(ball.b) * z + np.conj(ball.a))
        if np.any(domain.contains(w, closed=True)):
            hit[s] = True
    return float(hit.mean())


# ---------------------------------------------------------------------------
# limit-set covers and horocycle certificates


def limit_set_cover(group: FuchsianGroupSpec, budget: float, max_nodes: int = 256) -> BoundaryArcSet:
    """Arcs covering the limit set with total measure at most ``budget``.

    Starts from the cap shadows and repeatedly replaces the widest disk
    ``p(C_h)`` by its children ``p h (C_h')``, ``h' != h^-1``, which it contains.
    """
    pp = ping_pong(group)
    if not pp.valid:
        raise ConstructionError(f"no ping-pong structure: {pp.reason}")
    letters = group.letters()
    heap = []
    for h, (c, r) in enumerate(pp.caps):
        heap.append((-math.atan(r), h, h, DiskAutomorphism.identity(), c, r))
    heapq.heapify(heap)
    counter = len(heap)

    def total():
        return 2.0 * sum(-x[0] for x in heap)

    while total() > budget:
        if len(heap) > max_nodes:
            raise ConstructionError("limit-set cover needs more arcs than allowed")
        neg, _, h, p, c, r = heapq.heappop(heap)
        ph = p @ letters[h]
        for h2 in range(len(letters)):
            if h2 == h ^ 1:
                continue
            cc, rr = image_disk(ph, *pp.caps[h2])
            counter += 1
            heapq.heappush(heap, (-math.atan(rr), counter, h2, ph, cc, rr))
    out = BoundaryArcSet.empty()
    for neg, _, _, _, c, r in heap:
        out = out.union(BoundaryArcSet.window(math.atan2(c.imag, c.real), -neg))
    return out


def _expand_to_measure(cover: BoundaryArcSet, target: float) -> BoundaryArcSet:
    """Uniform expansion of ``cover`` with measure equal to ``target`` (bisection)."""
    if cover.measure > target:
        raise ConstructionError("cover already exceeds the target measure")
    lo, hi = 0.0, target
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if cover.expanded(mid).measure > target:
            hi = mid
        else:
            lo = mid
        if hi - lo < 1e-17:
            break
    return cover.expanded(lo)


def _initial_pairs(arcs: BoundaryArcSet, n_elements: int, max_width: float):
    mids, halves = [], []
    for s, e in arcs.arcs:
        k = max(1, math.ceil((e - s) / max_width))
        edges = np.linspace(s, e, k + 1)
        mids.append(0.5 * (edges[1:] + edges[:-1]))
        halves.append(0.5 * np.diff(edges))
    mids, halves = np.concatenate(mids), np.concatenate(halves)
    ii = np.repeat(np.arange(len(mids)), n_elements)
    jj = np.tile(np.arange(n_elements), len(mids))
    return mids[ii], halves[ii], jj


def boundary_displacement_bound(group: FuchsianGroupSpec, depth: int, arcs: BoundaryArcSet, threshold: float | None = None,
                                rel: float = 1e-3, max_width: float = 0.05, min_width: float = 1e-13) -> tuple[float, float]:
    """Certified lower bound and sampled upper bound for
    ``min |conj(b) z^2 + (conj(a) - a) z - b|`` over ``z`` on ``arcs`` and ball elements.

    The horodisk of radius ``r`` at ``z`` is disjoint from its image under
    ``g = (a, b)`` exactly when this quantity is at least ``2r / (1 - r)``.
    Branch and bound on the angle: an interval of half width ``h`` around
    ``z0`` is settled once ``|P(z0)| - h (2|b| + |a - conj(a)|)`` clears the
    target, which is ``threshold`` if given, else ``(1 - rel)`` times the best
    value seen.  With a threshold the search stops at the first sampled value
    below it.
    """
    if arcs.is_empty() or group.rank == 0:
        return math.inf, math.inf
    ball = word_ball(group, depth)
    A, B = ball.a, ball.b
    lip = 2 * np.abs(B) + np.abs(A - np.conj(A))
    mid, half, el = _initial_pairs(arcs, len(ball), max_width)
    upper, lower = math.inf, math.inf
    while len(mid):
        z = np.exp(1j * mid)
        a, b = A[el], B[el]
        val = np.abs(np.conj(b) * z * z + (np.conj(a) - a) * z - b)
        upper = min(upper, float(val.min()))
        if threshold is not None and upper < threshold:
            return min(lower, upper), upper
        target = threshold if threshold is not None else (1 - rel) * upper
        low = val - half * lip[el]
        done = low >= target
        if done.any():
            lower = min(lower, float(low[done].min()))
        keep = ~done
        mid, half, el = mid[keep], half[keep], el[keep]
        if len(mid) and half.max() < min_width:
            lower = min(lower, max(0.0, float((val[keep] - half * lip[el]).min())))
            break
        half = half / 2
        mid = np.concatenate([mid - half, mid + half])
        half = np.concatenate([half, half])
        el = np.concatenate([el, el])
    return min(lower, upper), upper


def horocycle_arc_certificate(group: FuchsianGroupSpec, depth: int, arcs: BoundaryArcSet, radius: float) -> tuple[bool, float]:
    """Certify that every radius-``radius`` horodisk based on ``arcs`` is
    disjoint from its images under the word ball.  Returns ``(passed, margin)``
    where ``margin`` is the certified bound minus the required ``2r / (1 - r)``."""
    need = 2 * radius / (1 - radius)
    low, up = boundary_displacement_bound(group, depth, arcs, threshold=need)
    return bool(low >= need), low - need


def certify_radius(group: FuchsianGroupSpec, depth: int, arcs: BoundaryArcSet, r_max: float = 0.5, rel: float = 1e-3) -> float:
    """Largest horodisk radius (at most ``r_max``) certified injective on every base point of ``arcs``."""
    low, _ = boundary_displacement_bound(group, depth, arcs, rel=rel)
    if low <= 0:
        raise ConstructionError("no certifiable horocycle radius on this arc set")
    q = 0.5 * low
    return min(r_max, q / (1 + q) * (1 - 1e-12))


def _orbit_windows(group: FuchsianGroupSpec, depth: int, a: float, width: float) -> BoundaryArcSet:
    """Union of the images of the window of ``width`` at ``a`` under the
    identity and the word ball."""
    out = BoundaryArcSet.window(a, width / 2)
    if group.rank == 0:
        return out
    ball = word_ball(group, depth)
    pts = np.exp(1j * np.array([a - width / 2, a, a + width / 2]))[:, None]
    img = (ball.a * pts + ball.b) / (np.conj(ball.b) * pts + np.conj(ball.a))
    # orientation is preserved: the image arc runs counterclockwise through the
    # image of the midpoint; rounding can turn a tiny step into a full turn
    steps = np.mod(np.angle(img[1:] / img[:-1]), TWO_PI)
    steps = np.where(steps > TWO_PI - 1e-9, 0.0, steps)
    s2 = np.angle(img[0])
    return out.union(BoundaryArcSet.from_arcs(zip(s2.tolist(), (s2 + steps.sum(axis=0)).tolist())))


# ---------------------------------------------------------------------------
# the full pipeline


def _pick_anchor(group: FuchsianGroupSpec, stage: int) -> float:
    arcs = free_arcs(group).largest_arcs()
    if not arcs:
        raise ConstructionError("no free boundary arc left for a new generator")
    top = arcs[0][1] - arcs[0][0]
    ties = sorted([se for se in arcs if se[1] - se[0] >= top * (1 - 1e-9)])
    s, e = ties[stage % len(ties)]
    return math.remainder(0.5 * (s + e), TWO_PI)


def _new_level(group, index, depth) -> Level:
    cover = limit_set_cover(group, 0.5 / index)
    removed = _expand_to_measure(cover, 1.0 / index)
    arcs = removed.complement()
    radius = certify_radius(group, depth, arcs)
    return Level(index, arcs, radius, arcs.measure)


def fullmeasure_construct(stages: int, delta_schedule=None, depth: int = DEFAULT_DEPTH, base_r: float = DEFAULT_BASE_R,
                          delta_budget: float = DEFAULT_DELTA_BUDGET,
                          eps0: float = 0.25, margin: float = DEFAULT_MARGIN) -> ConstructionState:
    """Run the inductive construction for ``stages`` generators.

    Stage 1 uses ``make_hyperbolic(base_r)`` and creates level 1 with measure
    ``2 pi - 1``.  Stage ``m`` places a generator at the midpoint of the
    largest free boundary arc, removes from each older level the orbit (under
    the previous word ball) of a window of width at most ``delta_m`` around
    the anchor, re-certifies the older radii, and creates level ``m`` with
    measure ``2 pi - 1/m`` avoiding a cover of the limit set.  The placement
    radius ``eps`` is halved until every check passes.
    """
    if stages < 1:
        raise ValueError("need at least one stage")
    deltas = list(default_deltas(stages) if delta_schedule is None else delta_schedule)
    if len(deltas) < stages - 1:
        raise ValueError(f"need {stages - 1} deltas for {stages} stages")
    deltas = [float(d) for d in deltas[: stages - 1]]
    if any(d <= 0 for d in deltas) or sum(deltas) >= delta_budget:
        raise ValueError("deltas must be positive with sum below the budget")
    if 1.0 + sum(deltas) >= TWO_PI:
        raise ConstructionError("schedule would leave level 1 with negative measure")

    group = FuchsianGroupSpec((make_hyperbolic(base_r),), ("g1",))
    state = ConstructionState(group, (_new_level(group, 1, depth),), (), (), (), depth)

    for m in range(2, stages + 1):
        delta = deltas[m - 2]
        a = _pick_anchor(state.group, m)
        anchor = complex(math.cos(a), math.sin(a))
        room = min(abs(c - anchor) - r for c, r in state.caps)
        eps = min(eps0, 0.5 * room)

        # window orbit: shrink the window until its orbit fits in delta
        width = delta
        while _orbit_windows(state.group, depth, a, width).measure > delta:
            width /= 2
        window = _orbit_windows(state.group, depth, a, width)

        for _ in range(MAX_HALVINGS):
            try:
                g = next_generator(state, a, eps, base_r)
            except ConstructionError:
                eps /= 2
                continue
            report = limitgroup_hypotheses(state.group, g, depth, margin)
            new_group = state.group.extended(g, f"g{m}")
            if not report.passed or not ping_pong(new_group).valid:
                eps /= 2
                continue
            levels = []
            ok = True
            for lv in state.levels:
                arcs = lv.arcs.difference(window)
                removed = lv.measure - arcs.measure
                if removed > delta * (1 + 1e-12):
                    raise ConstructionError("window orbit removed more than delta")
                if not horocycle_arc_certificate(new_group, depth, arcs, lv.radius)[0]:
                    ok = False
                    break
                levels.append(replace(lv, arcs=arcs, removed=lv.removed + (removed,)))
            if ok:
                break
            eps /= 2
        else:
            raise ConstructionError(f"stage {m}: no placement radius passed all checks")

        levels.append(_new_level(new_group, m, depth))
        state = ConstructionState(
            new_group,
            tuple(levels),
            state.deltas + (delta,),
            state.epsilons + (eps,),
            state.anchors + (a,),
            depth,
        )
    return state


def level_measure_identity(state: ConstructionState, level: Level) -> float:
    """``2 pi - 1/i - sum(removed)``, the bookkeeping value of a level's measure."""
    return TWO_PI - 1.0 / level.index - math.fsum(level.removed)


@dataclass(frozen=True)
class StageCheck:
    measures_ok: bool
    radii_ok: bool
    violations: int
    details: dict


def verify_state(state: ConstructionState, depth: int | None = None, samples: int = 1000, seed: int = 0) -> StageCheck:
    """Re-check bookkeeping, horocycle certificates (optionally deeper) and
    fundamental-domain violations on random samples."""
    depth = state.depth if depth is None else depth
    measures_ok, radii_ok = True, True
    detail = {"levels": []}
    for lv in state.levels:
        book = level_measure_identity(state, lv)
        stage_deltas = state.deltas[lv.index - 1:]
        floor = TWO_PI - 1.0 / lv.index - math.fsum(stage_deltas)
        m_ok = abs(lv.measure - book) <= 1e-12 * max(1, len(lv.removed)) + 1e-13 and lv.measure >= floor - 1e-12
        r_ok = lv.radius > 0 and horocycle_arc_certificate(state.group, depth, lv.arcs, lv.radius)[0]
        measures_ok &= m_ok
        radii_ok &= r_ok
        detail["levels"].append({"index": lv.index, "measure": lv.measure, "bookkeeping": book, "floor": floor,
                                 "radius": lv.radius, "measure_ok": m_ok, "radius_ok": r_ok})
    rng = np.random.default_rng(seed)
    pts = 0.99 * np.sqrt(rng.random(samples)) * np.exp(2j * math.pi * rng.random(samples))
    rep = fundamental_domain_violations(state.group, depth, pts, domain=schottky_domain(state.group))
    detail["checked_samples"] = rep.checked
    return StageCheck(measures_ok, radii_ok, len(rep), detail)
