import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from leafscope.moebius import (
    BoundaryPoint,
    ClassificationError,
    DiskAutomorphism,
    DomainError,
    Geodesic,
    Horocycle,
    Kind,
    classify,
    compose,
    conjugate,
    fixed_points,
    horocycle_contains,
    invert,
    make_hyperbolic,
    moebius_distance,
    moebius_from_poincare,
    poincare_distance,
    strip_crossing,
    strip_geodesics,
)

radii = st.floats(0.0, 0.95)
angles = st.floats(0.0, 2 * math.pi)
points = st.builds(lambda r, t: r * cmath.exp(1j * t), radii, angles)
autos = st.builds(
    lambda r, t, s: compose(DiskAutomorphism.rotation(s), DiskAutomorphism.moving_to_origin(r * cmath.exp(1j * t))),
    st.floats(0.0, 0.95), angles, angles,
)


def as_matrix(g):
    return np.array([[g.a, g.b], [np.conj(g.b), np.conj(g.a)]])


def apply_matrix(m, z):
    return (m[0, 0] * z + m[0, 1]) / (m[1, 0] * z + m[1, 1])


def test_make_hyperbolic_origin_and_normalization():
    g = make_hyperbolic(0.6)
    assert g(0) == pytest.approx(0.6, abs=1e-15)
    assert (g.a, g.b) == (pytest.approx(1.25), pytest.approx(0.75))
    h = make_hyperbolic(0.9)
    assert abs(abs(h.a) ** 2 - abs(h.b) ** 2 - 1) < 1e-12


@pytest.mark.parametrize("r", [0.0, 1.0, -0.2, 1.5])
def test_make_hyperbolic_rejects_bad_parameter(r):
    with pytest.raises(DomainError):
        make_hyperbolic(r)


def test_fixed_points_of_translation():
    for r in (0.1, 0.6, 0.99):
        pts = sorted(p.angle for p in fixed_points(make_hyperbolic(r)))
        assert pts == [pytest.approx(0.0, abs=1e-12), pytest.approx(math.pi)]


def test_fixed_points_after_rotation():
    g = conjugate(make_hyperbolic(0.5), DiskAutomorphism.rotation(math.pi / 2))
    zs = sorted((p.z for p in fixed_points(g)), key=lambda z: z.imag)
    assert abs(zs[0] + 1j) < 1e-12 and abs(zs[1] - 1j) < 1e-12


def test_fixed_points_rejects_parabolic():
    parabolic = DiskAutomorphism(1 + 0.5j, 0.5j)
    assert classify(parabolic) is Kind.PARABOLIC
    with pytest.raises(ClassificationError):
        fixed_points(parabolic)


def test_compose_examples():
    g = make_hyperbolic(0.6)
    assert compose(g, invert(g)).is_identity()
    assert compose(g, g)(0) == pytest.approx(1.2 / 1.36, abs=1e-14)
    neg = DiskAutomorphism(-g.a, -g.b)
    assert compose(neg, g).equals(compose(g, g))


def test_classify_examples():
    assert classify(make_hyperbolic(0.6)) is Kind.HYPERBOLIC
    assert classify(DiskAutomorphism.identity()) is Kind.IDENTITY
    assert classify(DiskAutomorphism.rotation(math.pi / 3)) is Kind.ELLIPTIC


def test_distance_examples():
    assert moebius_distance(0, 0.37) == pytest.approx(0.37)
    assert poincare_distance(0, 0.5) == pytest.approx(0.5 * math.log(3), rel=1e-14)
    for N, n in [(2, 4), (3, 7), (5, 6)]:
        expected = 0.5 * math.log(n * (2 - 1 / n) / (N * (2 - 1 / N)))
        assert poincare_distance(1 - 1 / N, 1 - 1 / n) == pytest.approx(expected, rel=1e-12)
    with pytest.raises(DomainError):
        moebius_distance(1.0, 0)


def test_strip_geodesics_crossings_and_identification():
    assert strip_crossing(0.6) == pytest.approx(1 / 3)
    lp, lm = strip_geodesics(0.6)
    assert lp.real_crossings() == [pytest.approx(1 / 3)]
    assert lm.real_crossings() == [pytest.approx(-1 / 3)]
    assert strip_crossing(1e-8) < 1e-8
    g = make_hyperbolic(0.6)
    image = {round(BoundaryPoint.from_complex(g(e.z)).angle, 10) for e in lm.endpoints}
    assert image == {round(e.angle, 10) for e in lp.endpoints}


def test_horocycle_contains_examples():
    h = Horocycle(BoundaryPoint(0.0), 0.5)
    assert horocycle_contains(h, 0.75)
    assert not horocycle_contains(h, 0.0)
    h2 = Horocycle(BoundaryPoint(0.0), 0.25)
    assert not horocycle_contains(h2, 0.5)
    assert horocycle_contains(h2, 0.5 + 1e-12)


def test_geodesic_canonical_order():
    g = Geodesic.from_angles(2.0, 1.0)
    assert g.endpoints[0].angle < g.endpoints[1].angle
    with pytest.raises(DomainError):
        Geodesic.from_angles(1.0, 1.0)


@given(autos, autos, points)
def test_compose_matches_matrix_product(g, h, z):
    oracle = apply_matrix(as_matrix(g) @ as_matrix(h), z)
    assert abs(compose(g, h)(z) - oracle) < 1e-9
    assert abs(compose(g, h)(z) - g(h(z))) < 1e-9


def test_normalization_survives_many_compositions():
    rng = np.random.default_rng(0)
    p = 0.9 * np.sqrt(rng.random((10_000, 2))) * np.exp(2j * np.pi * rng.random((10_000, 2)))
    worst = 0.0
    g = make_hyperbolic(0.7)
    for k in range(10_000):
        x = DiskAutomorphism.moving_to_origin(p[k, 0])
        y = invert(DiskAutomorphism.moving_to_origin(p[k, 1]))
        h = compose(x, y)
        # a bounded chain: conjugating keeps the translation length fixed
        g = conjugate(g, DiskAutomorphism.rotation(p[k, 0].real))
        for e in (h, g, invert(h)):
            worst = max(worst, abs(abs(e.a) ** 2 - abs(e.b) ** 2 - 1))
    assert worst < 1e-11


@given(autos, st.lists(points, min_size=1, max_size=20))
def test_automorphisms_keep_the_disk(g, zs):
    assert all(abs(g(z)) < 1 for z in zs)


@given(points, points, points)
def test_triangle_inequality(z, w, u):
    assert poincare_distance(z, u) <= poincare_distance(z, w) + poincare_distance(w, u) + 1e-10


@given(autos, points, points)
def test_distances_are_invariant(g, z, w):
    assert abs(moebius_distance(g(z), g(w)) - moebius_distance(z, w)) < 1e-10
    assert abs(poincare_distance(g(z), g(w)) - poincare_distance(z, w)) < 1e-8 * (1 + poincare_distance(z, w))


@given(points, points)
def test_moebius_poincare_identity(z, w):
    assert moebius_from_poincare(poincare_distance(z, w)) == pytest.approx(moebius_distance(z, w), abs=1e-12)


@settings(max_examples=50)
@given(st.floats(0.05, 0.95), autos)
def test_classification_is_conjugation_invariant(r, phi):
    for g in (make_hyperbolic(r), DiskAutomorphism.rotation(r), DiskAutomorphism.identity()):
        assert classify(conjugate(g, phi)) is classify(g)
