import math

import numpy as np
import pytest

from leafscope.arcs import TWO_PI, BoundaryArcSet
from leafscope.constructor import (
    ConstraintViolation,
    ConstructionError,
    ConstructionState,
    Level,
    cap_region_max_distance,
    certify_radius,
    coverage_check,
    default_deltas,
    free_arcs,
    fullmeasure_construct,
    horocycle_arc_certificate,
    level_measure_identity,
    limit_set_cover,
    limitgroup_hypotheses,
    next_generator,
    schottky_domain,
    verify_state,
)
from leafscope.group import FuchsianGroupSpec, cyclic_group, dirichlet_domain, fundamental_domain_violations, limit_set_sample, strip_caps
from leafscope.horocycles import horocycle_injectivity
from leafscope.moebius import BoundaryPoint, Horocycle, Kind, classify


def _samples(n, seed=0, rmax=0.99):
    rng = np.random.default_rng(seed)
    return rmax * np.sqrt(rng.random(n)) * np.exp(2j * math.pi * rng.random(n))


@pytest.fixture(scope="module")
def three_stage():
    return fullmeasure_construct(3)


def test_next_generator_fits_placement_disk():
    g = next_generator(ConstructionState(), 0.0, 0.1)
    assert classify(g) is Kind.HYPERBOLIC
    for c, r in strip_caps(g):
        # the whole cap region, including both geodesic endpoints, is inside D_0.1(1)
        assert cap_region_max_distance(c, r, 1.0) < 0.1
        assert abs(c - 1) + r < 0.1 + 1 + 1e-12


def test_second_generator_gives_discrete_pair():
    g1 = next_generator(ConstructionState(), 0.0, 0.1)
    state = ConstructionState(FuchsianGroupSpec((g1,), ("g1",)))
    g2 = next_generator(state, math.pi, 0.1)
    pair = state.group.extended(g2, "g2")
    assert not fundamental_domain_violations(pair, 6, _samples(1000))


def test_next_generator_rejects_large_eps():
    g1 = next_generator(ConstructionState(), 0.0, 0.1)
    state = ConstructionState(FuchsianGroupSpec((g1,), ("g1",)))
    with pytest.raises(ConstraintViolation) as exc:
        next_generator(state, 0.05, 0.1)
    assert exc.value.offending
    with pytest.raises(ValueError):
        next_generator(state, math.pi, -1.0)


def test_limitgroup_examples():
    base = cyclic_group(0.5)
    new = next_generator(ConstructionState(base), math.pi / 2, 0.05)
    rep = limitgroup_hypotheses(base, new, 6)
    assert rep.passed and rep.gap > 1e-3
    assert not limitgroup_hypotheses(base, base.generators[0], 6).passed
    both = base.extended(new, "h")
    assert not fundamental_domain_violations(both, 6, _samples(500, 4))


def test_coverage_examples():
    assert coverage_check(FuchsianGroupSpec(), 3, _samples(100)) == 1.0
    assert coverage_check(cyclic_group(0.6), 12, _samples(1000)) >= 0.99


def test_coverage_is_monotone_in_depth(pingpong):
    pts = _samples(400, 5)
    dom = dirichlet_domain(pingpong, 6)
    vals = [coverage_check(pingpong, L, pts, domain=dom) for L in (1, 2, 4, 6, 8)]
    assert np.all(np.diff(vals) >= 0)
    assert vals[-1] > 0.95


def test_default_deltas():
    assert default_deltas(3) == [2.0**-4, 2.0**-5]
    assert default_deltas(1) == []


def test_limit_set_cover_contains_samples(pingpong):
    cover = limit_set_cover(pingpong, 0.5)
    assert cover.measure <= 0.5 + 1e-12
    angles = [p.point.angle for p in limit_set_sample(pingpong, 6)]
    assert np.all(cover.contains(np.array(angles)))
    assert free_arcs(pingpong).intersection(cover).measure < 1e-12


def test_radius_certificate_agrees_with_pointwise_test(cyclic06):
    arcs = BoundaryArcSet.window(math.pi / 2, 0.4)
    r = certify_radius(cyclic06, 6, arcs)
    assert r > 0 and horocycle_arc_certificate(cyclic06, 6, arcs, r)[0]
    for t in np.linspace(math.pi / 2 - 0.4, math.pi / 2 + 0.4, 33):
        assert horocycle_injectivity(cyclic06, 6, Horocycle(BoundaryPoint(t), r)).injective
    # an arc through a fixed point admits no radius
    assert not horocycle_arc_certificate(cyclic06, 6, BoundaryArcSet.window(0.0, 0.1), 0.01)[0]


def test_single_stage():
    st = fullmeasure_construct(1)
    (lv,) = st.levels
    assert lv.measure == pytest.approx(TWO_PI - 1, abs=1e-12)
    assert lv.radius > 0
    assert st.group.rank == 1


def test_three_stage_bookkeeping(three_stage):
    st = three_stage
    assert st.group.rank == 3 and len(st.levels) == 3
    d = st.deltas
    assert d == (2.0**-4, 2.0**-5)
    floors = [TWO_PI - 1 - d[0] - d[1], TWO_PI - 0.5 - d[1], TWO_PI - 1 / 3]
    for lv, floor in zip(st.levels, floors):
        assert lv.measure >= floor - 1e-12
        assert abs(lv.measure - level_measure_identity(st, lv)) < 1e-12
        assert lv.radius > 0
    assert list(st.epsilons) == sorted(st.epsilons, reverse=True)


def test_three_stage_verifies_deeper(three_stage):
    chk = verify_state(three_stage, depth=three_stage.depth + 2, samples=1000)
    assert chk.measures_ok and chk.radii_ok and chk.violations == 0


def test_schottky_domain_is_a_fundamental_domain(three_stage):
    dom = schottky_domain(three_stage.group)
    assert coverage_check(three_stage.group, 6, _samples(300, 7, 0.9), domain=dom) == 1.0


def test_extensions_round_trip(three_stage):
    back = ConstructionState.from_extensions(three_stage.group, three_stage.to_extensions())
    for a, b in zip(back.levels, three_stage.levels):
        assert a.index == b.index and a.radius == b.radius
        assert abs(a.measure - b.measure) < 1e-12
    assert back.deltas == three_stage.deltas


@pytest.mark.parametrize("kwargs,exc", [
    ({"stages": 0}, ValueError),
    ({"stages": 3, "delta_schedule": [0.1]}, ValueError),
    ({"stages": 3, "delta_schedule": [0.6, 0.6]}, ValueError),
    ({"stages": 2, "delta_schedule": [5.5], "delta_budget": 10.0}, ConstructionError),
])
def test_construct_contract(kwargs, exc):
    with pytest.raises(exc):
        fullmeasure_construct(**kwargs)


def test_level_dataclass_measure():
    lv = Level(1, BoundaryArcSet.window(0.0, 1.0), 0.1, 2.0)
    assert lv.measure == 2.0
