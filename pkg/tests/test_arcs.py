import math

import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st

from leafscope.arcs import TWO_PI, BoundaryArcSet

arc = st.tuples(st.floats(0, TWO_PI), st.floats(0, 3.0))
arc_sets = st.lists(arc, max_size=6).map(lambda xs: BoundaryArcSet.from_arcs([(s, s + w) for s, w in xs]))
probe = np.linspace(0, TWO_PI, 2001, endpoint=False) + 1e-4


def test_basic_measures():
    assert BoundaryArcSet.full().measure == TWO_PI
    assert BoundaryArcSet.empty().is_empty
    w = BoundaryArcSet.window(0.0, 0.5)
    assert w.measure == 1.0 and len(w.arcs) == 1
    assert w.contains(TWO_PI - 0.1) and not w.contains(math.pi)


@settings(max_examples=100)
@given(arc_sets, arc_sets)
def test_set_algebra_matches_membership(x, y):
    for op, ref in ((x.union(y), np.logical_or), (x.intersection(y), np.logical_and), (x.difference(y), lambda p, q: p & ~q)):
        expected = ref(x.contains(probe), y.contains(probe))
        mismatch = op.contains(probe) != expected
        # disagreements may only happen at arc endpoints
        if mismatch.any():
            ends = np.array([e for a in (x.pieces + y.pieces) for e in a])
            assert np.all(np.min(np.abs(probe[mismatch][:, None] - ends[None, :]), axis=1) < 1e-9)


@settings(max_examples=100)
@given(arc_sets, arc_sets)
def test_measure_identities(x, y):
    assert abs(x.measure + x.complement().measure - TWO_PI) < 1e-12
    assert abs(x.union(y).measure + x.intersection(y).measure - x.measure - y.measure) < 1e-12
    assert 0 <= x.measure <= TWO_PI + 1e-12


@given(arc_sets)
def test_pairs_round_trip(x):
    back = BoundaryArcSet.from_arcs(x.as_pairs())
    assert abs(back.measure - x.measure) < 1e-12
