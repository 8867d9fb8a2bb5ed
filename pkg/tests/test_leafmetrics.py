import math
import warnings
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import brute_force_ball
from leafscope.group import FuchsianGroupSpec, cyclic_group
from leafscope.leafmetrics import (
    DirectionError,
    TruncationWarning,
    alpha_at,
    alpha_decay_profile,
    beta_at,
    beta_lower_from_rho,
    blaschke_map,
    covered_disk_check,
    displacement_propagation,
    injectivity_radius_bound,
    koebe_disk_radius,
    leaf_report,
    rho_lower_at,
    suita_density_at,
    winding_numbers,
)
from leafscope.moebius import DiskAutomorphism, DomainError, conjugate, moebius_distance, poincare_distance


def orbit_product(r, terms=64):
    """Direct product over the powers of a translation, evaluated at 0."""
    t = math.atanh(r)
    return math.prod(math.tanh(n * t) ** 2 for n in range(1, terms + 1))


def cube_root_formula(beta):
    p, q = (1 + beta) ** (1 / 3), (1 - beta) ** (1 / 3)
    return (p - q) / (p + q)


def test_beta_examples(cyclic06):
    for r in (0.3, 0.6):
        assert beta_at(cyclic_group(r), 6, 0).value == pytest.approx(r, abs=1e-15)
    assert beta_at(FuchsianGroupSpec(), 4, 0.2).value == 1.0
    z = 0.5j
    brute = min(moebius_distance(z, (m[0, 0] * z + m[0, 1]) / (m[1, 0] * z + m[1, 1]))
                for _, m in brute_force_ball(cyclic06.generators, 12))
    assert beta_at(cyclic06, 12, z).value == pytest.approx(brute, abs=1e-14)
    with pytest.raises(DomainError):
        beta_at(cyclic06, 4, 1.0)


@pytest.mark.parametrize("r", [0.5, 0.7, 0.9])
def test_alpha_matches_orbit_product(r):
    a = alpha_at(cyclic_group(r), 20, 0)
    assert a.certified
    assert a.lower_bound <= a.value <= a.upper_bound
    assert a.value == pytest.approx(orbit_product(r), abs=1e-10)


def test_alpha_trivial_and_below_beta(pingpong):
    assert alpha_at(FuchsianGroupSpec(), 3, 0.4).value == 1.0
    for z in (0, 0.3j, -0.2 + 0.1j):
        a, b = alpha_at(pingpong, 8, z), beta_at(pingpong, 8, z)
        assert a.upper_bound <= b.value + 1e-9


def test_alpha_uncertified_for_non_pingpong_group_warns():
    g = cyclic_group(0.6).generators[0]
    h = conjugate(g, DiskAutomorphism.rotation(0.3))
    with warnings.catch_warnings(record=True) as rec:
        warnings.simplefilter("always")
        a = alpha_at(FuchsianGroupSpec((g, h)), 3, 0)
    assert not a.certified
    assert any(issubclass(w.category, TruncationWarning) for w in rec)


def test_injectivity_radius_examples():
    assert injectivity_radius_bound(1.0) == 1.0
    assert injectivity_radius_bound(0.9) == pytest.approx(cube_root_formula(0.9), abs=1e-14)
    assert injectivity_radius_bound(0.9) == pytest.approx(0.4548, abs=1e-4)
    assert injectivity_radius_bound(1e-6) == pytest.approx(1e-6 / 3, rel=1e-9)
    for bad in (0.0, -0.1, 1.1):
        with pytest.raises(DomainError):
            injectivity_radius_bound(bad)


def test_injectivity_radius_is_increasing_and_below_beta():
    grid = np.linspace(1e-4, 1.0, 2000)
    vals = np.array([injectivity_radius_bound(b) for b in grid])
    assert np.all(np.diff(vals) > 0)
    assert np.all(vals <= grid)
    assert all(beta_lower_from_rho(v) <= b for v, b in zip(vals, grid))


def test_koebe_radius_examples():
    assert koebe_disk_radius(1.0) == 1.0
    assert koebe_disk_radius(Fraction(3, 5)) == Fraction(1, 9)
    assert koebe_disk_radius(0.6) == pytest.approx(1 / 9, rel=1e-15)
    assert koebe_disk_radius(1e-4) == pytest.approx(1e-8 / 4, rel=1e-6)
    assert beta_lower_from_rho(0.6) == pytest.approx(1 / 9)
    with pytest.raises(DomainError):
        koebe_disk_radius(0.0)


def test_rho_lower_examples(cyclic06):
    assert rho_lower_at(FuchsianGroupSpec(), 3, 0) == 1.0
    assert rho_lower_at(cyclic06, 6, 0) == pytest.approx(injectivity_radius_bound(0.6))
    assert rho_lower_at(cyclic_group(0.8), 6, 0) > rho_lower_at(cyclic06, 6, 0)
    for r in (0.2, 0.5, 0.9):
        g = cyclic_group(r)
        assert beta_lower_from_rho(rho_lower_at(g, 6, 0)) <= beta_at(g, 6, 0).lower_bound


def test_suita_density_examples():
    assert suita_density_at(FuchsianGroupSpec(), 3, 0) == 1.0
    assert suita_density_at(FuchsianGroupSpec(), 3, 0.5) == pytest.approx(4 / 3)
    assert suita_density_at(cyclic_group(0.9), 12, 0) == pytest.approx(orbit_product(0.9), abs=1e-10)


def test_leaf_report_matches_parts(pingpong):
    rep = leaf_report(pingpong, 6, 0.1 + 0.2j)
    assert rep.beta.value == beta_at(pingpong, 6, 0.1 + 0.2j).value
    assert rep.alpha.value == pytest.approx(alpha_at(pingpong, 6, 0.1 + 0.2j).value, rel=1e-14)
    assert 0 <= rep.rho_lower <= 1
    assert rep.alpha.value <= rep.beta.value
    d = rep.as_dict()
    assert set(d) == {"point", "beta", "alpha", "rho_lower", "suita_density", "kobayashi_density"}


def test_displacement_propagation_examples():
    assert displacement_propagation(3, 1) == 1
    assert displacement_propagation(2.5, 0) == 2.5
    assert displacement_propagation(1, 2) == 0
    with pytest.raises(DomainError):
        displacement_propagation(1, -1)


def test_displacement_propagation_sampled():
    g = cyclic_group(0.9)
    ball = brute_force_ball(g.generators, 6)
    rng = np.random.default_rng(0)

    def min_disp(z):
        return min(poincare_distance(z, (m[0, 0] * z + m[0, 1]) / (m[1, 0] * z + m[1, 1])) for _, m in ball)

    base = 0.2 + 0.1j
    m0 = min_disp(base)
    for _ in range(200):
        R = rng.uniform(0, 1.5)
        # a point at Poincaré distance R from base
        w = math.tanh(R) * np.exp(2j * math.pi * rng.random())
        y = DiskAutomorphism.moving_to_origin(base).inverse()(w)
        assert min_disp(y) >= displacement_propagation(m0, R) - 1e-12


def test_decay_profile():
    radii = [0.5, 0.6, 0.7, 0.8, 0.9, 0.95, 0.99]
    prof = alpha_decay_profile(cyclic_group(0.6), 12, math.pi / 2, radii)
    assert not prof.growing and prof.spread < 3
    assert np.all(prof.neglog_alpha > 0)
    trivial = alpha_decay_profile(FuchsianGroupSpec(), 4, 0.0, radii)
    assert not trivial.neglog_alpha.any()
    with pytest.raises(DirectionError) as exc:
        alpha_decay_profile(cyclic_group(0.6), 12, 0.0, radii)
    assert exc.value.diagnostic["angular_gap"] < 0.05


def test_winding_numbers_of_identity():
    wn = winding_numbers(lambda z: z, [0, 0.5, 1.5, 0.99j])
    assert list(wn) == [1, 1, 0, 1]


def test_covered_disk_exact_case():
    h, lam = blaschke_map(1.0, [0.6])
    assert lam == pytest.approx(0.6)
    assert covered_disk_check(h, koebe_disk_radius(lam) * (1 - 1e-6)).passed
    # a disk much larger than the guaranteed one misses the image
    h2, _ = blaschke_map(0.2, [])
    assert not covered_disk_check(h2, 0.5).passed


@settings(max_examples=20, deadline=None)
@given(st.floats(0.1, 0.9), st.floats(0, 2 * math.pi), st.floats(0, 0.8), st.floats(0, 2 * math.pi))
def test_metrics_are_conjugation_invariant(r, t, s, u):
    g = cyclic_group(r)
    phi = DiskAutomorphism.moving_to_origin(s * complex(math.cos(u), math.sin(u)))
    phi = conjugate(phi, DiskAutomorphism.rotation(t))
    z = 0.2 + 0.1j
    moved = g.conjugated(phi)
    # the conjugated group acts at phi(z) as the original acts at z
    assert beta_at(moved, 10, phi(z)).value == pytest.approx(beta_at(g, 10, z).value, abs=1e-9)
    a0, a1 = alpha_at(g, 10, z), alpha_at(moved, 10, phi(z))
    assert abs(a0.value - a1.value) <= 1e-8 + (a0.upper_bound - a0.lower_bound) + (a1.upper_bound - a1.lower_bound)
