from __future__ import annotations

import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from schemelab.blaschke import (
    BlaschkeProduct,
    CenteringViolation,
    DiskAutomorphism,
    ModelMap,
    NoInteriorFixedPoint,
    PoleHit,
    Radii,
    barycenter_residual,
    boundary_fixed_points,
    center_map,
    choose_radii,
    circle_itinerary,
    circle_winding,
    conformal_barycenter,
    critical_points,
    enumerate_boundary_markings,
    fixed_point_center,
    identity_product,
    interior_fixed_point,
    itinerary_value,
    marking_residual,
    model_dimension,
    model_validate,
    power_map,
    random_model_map,
    solve_value,
    verify_radii,
    zeros_center,
)
from schemelab.census import enumerate_all
from schemelab.scheme import BITRANSITIVE, CAPTURE, MappingScheme, fixed_vertex
from schemelab.symmetry import gamma_order


def disk_points(rng, k, r=0.9):
    return r * np.sqrt(rng.random(k)) * np.exp(2j * np.pi * rng.random(k))


def random_centered(rng, d):
    return BlaschkeProduct(1, (0j,) + tuple(disk_points(rng, d - 1, 0.85)))


def mobius(a, z):
    return (1 - np.conj(a)) / (1 - a) * (z - a) / (1 - np.conj(a) * z)


def test_single_factor():
    assert BlaschkeProduct(1, (0j,))(0.3 + 0.2j) == pytest.approx(0.3 + 0.2j)
    a = 0.3 + 0.4j
    assert abs(BlaschkeProduct(1, (a,))(1) - 1) < 1e-14
    assert abs(BlaschkeProduct(1, (a,))(a)) < 1e-15


def test_unimodular_on_circle():
    B = BlaschkeProduct(1, (0j, 0.5))
    z = np.exp(2j * np.pi * np.arange(256) / 256)
    assert np.max(np.abs(np.abs(B(z)) - 1)) < 1e-12
    assert np.allclose(B(z), z * mobius(0.5, z))


def test_pole():
    with pytest.raises(PoleHit):
        BlaschkeProduct(1, (0.5,))(2.0)


def test_inversion_symmetry():
    rng = np.random.default_rng(2)
    B = random_centered(rng, 3)
    z = disk_points(rng, 20, 0.95)
    assert np.allclose(B(1 / np.conj(z)), 1 / np.conj(B(z)))


def test_power_map_structure():
    for d in range(2, 6):
        B = power_map(d)
        crit = critical_points(B)
        assert len(crit) == d - 1 and max(abs(c) for c in crit) < 1e-6
        bfp = boundary_fixed_points(B)
        expected = sorted(np.exp(2j * np.pi * k / (d - 1)) for k in range(d - 1))
        assert len(bfp) == d - 1
        for z in bfp:
            assert min(abs(z - e) for e in expected) < 1e-10
        assert circle_winding(B) == d


def test_degree_two_with_zero_at_point_four():
    B = BlaschkeProduct(1, (0j, 0.4))
    (c,) = critical_points(B)
    assert abs(B.derivative(c)) < 1e-10 and abs(c) < 1
    (q,) = boundary_fixed_points(B)
    assert abs(B(q) - q) < 1e-10 and abs(abs(q) - 1) < 1e-12
    assert circle_winding(B) == 2


def test_critical_points_against_numpy_roots():
    rng = np.random.default_rng(5)
    for _ in range(30):
        B = random_centered(rng, int(rng.integers(2, 6)))
        num, den = B.rational()
        P = np.polynomial.polynomial
        deriv = P.polysub(P.polymul(P.polyder(num), den), P.polymul(num, P.polyder(den)))
        ref = sorted((r for r in P.polyroots(deriv) if abs(r) < 1), key=abs)
        ours = sorted(critical_points(B), key=abs)
        assert len(ours) == len(ref) == B.degree - 1
        for r in ref:
            assert min(abs(r - c) for c in ours) < 1e-7


def test_winding_by_argument_principle():
    rng = np.random.default_rng(6)
    n = 20000
    z = np.exp(2j * np.pi * np.arange(n) / n)
    for _ in range(10):
        B = random_centered(rng, int(rng.integers(2, 6)))
        # (1 / 2 pi i) contour integral of B'/B, trapezoid rule
        integral = np.sum(B.derivative(z) / B(z) * 1j * z) * (2 * np.pi / n) / (2j * np.pi)
        assert round(integral.real) == B.degree == circle_winding(B)


def test_no_interior_fixed_point():
    # a hyperbolic automorphism has both fixed points on the circle
    B = BlaschkeProduct(1, (0.5,))
    with pytest.raises(NoInteriorFixedPoint):
        interior_fixed_point(B)


def test_itinerary_of_doubling():
    B = power_map(2)
    z = np.exp(2j * np.pi / 3)
    assert circle_itinerary(B, z, 4, base=1 + 0j) == [0, 1, 0, 1]
    assert itinerary_value([0, 1, 0, 1], 2) == Fraction(5, 16)
    assert circle_itinerary(B, 1 + 0j, 6, base=1 + 0j) == [0] * 6


def test_itinerary_shift():
    rng = np.random.default_rng(8)
    B = random_centered(rng, 3)
    base = boundary_fixed_points(B)[0]
    z = np.exp(2j * np.pi * rng.random())
    digits = circle_itinerary(B, z, 21, base)
    w = complex(B(z))
    assert circle_itinerary(B, w / abs(w), 20, base) == digits[1:]


def test_barycenter_examples():
    assert abs(conformal_barycenter([0.4 + 0.1j, -0.4 - 0.1j])) < 1e-15
    assert conformal_barycenter([0.3 - 0.2j]) == 0.3 - 0.2j
    pts = [0.9, 0.9, -0.3]
    w = conformal_barycenter(pts)
    assert barycenter_residual(pts, w) < 1e-12
    h = DiskAutomorphism(0.2 - 0.5j, np.exp(0.7j))
    assert abs(conformal_barycenter(h(np.array(pts))) - h(w)) < 1e-10


@settings(max_examples=100, deadline=None)
@given(st.integers(1, 6), st.integers(0, 2 ** 32 - 1))
def test_barycenter_naturality(k, seed):
    rng = np.random.default_rng(seed)
    pts = disk_points(rng, k, 0.95)
    w = conformal_barycenter(pts)
    assert barycenter_residual(pts, w) < 1e-12
    h = DiskAutomorphism(complex(disk_points(rng, 1, 0.7)[0]), np.exp(2j * np.pi * rng.random()))
    assert abs(conformal_barycenter(h(pts)) - h(w)) < 1e-10


def test_fixed_point_center():
    for d in (2, 3, 4):
        out = fixed_point_center(power_map(d))
        assert len(out) == d - 1
        for C in out:
            assert np.allclose(C.zeros, 0, atol=1e-12)
    B = BlaschkeProduct(np.exp(0.4j), (0.3 + 0.1j, -0.2j))
    p = interior_fixed_point(B)
    assert abs(p) > 0.01
    (C,) = fixed_point_center(B)
    assert abs(C(0)) < 1e-12 and abs(C(1) - 1) < 1e-12
    # C is conjugate to B, so the multiplier at the fixed point agrees
    assert abs(C.derivative(0) - B.derivative(p)) < 1e-10


def test_zeros_center():
    B = BlaschkeProduct(np.exp(0.4j), (0.3 + 0.1j, -0.2j))
    out = zeros_center(B)
    assert len(out) == 2
    (v,) = [B(c) for c in critical_points(B)]
    for C in out:
        assert abs(sum(C.zeros)) < 1e-12 and abs(C(1) - 1) < 1e-12
        # precomposing with a disk automorphism keeps the critical values
        (vc,) = [C(c) for c in critical_points(C)]
        assert abs(vc - v) < 1e-10


def test_schwarz_contraction():
    rng = np.random.default_rng(9)
    for d in (2, 3, 4, 5):
        B = random_centered(rng, d)
        z = disk_points(rng, 1000, 0.999)
        z = z[np.abs(z) > 0]
        assert np.all(np.abs(B(z)) < np.abs(z))


def test_factorization_round_trip():
    rng = np.random.default_rng(10)
    for _ in range(20):
        zs = disk_points(rng, int(rng.integers(1, 6)))
        B = BlaschkeProduct(np.exp(2j * np.pi * rng.random()), tuple(zs))
        found = solve_value(B, 0)
        for a in zs:
            assert min(abs(a - r) for r in found) < 1e-10


def test_model_maps():
    M = center_map(BITRANSITIVE)
    assert model_validate(M)
    assert model_dimension(CAPTURE) == 4
    bad = ModelMap(CAPTURE, (BlaschkeProduct(1, (0.3, 0.1)), power_map(2)))
    with pytest.raises(CenteringViolation) as err:
        model_validate(bad)
    assert err.value.vertex == 0
    assert model_validate(ModelMap(MappingScheme((1, 0), (1, 0)), (power_map(2), identity_product())))


@pytest.mark.parametrize("S,count", [(fixed_vertex(2), 2), (CAPTURE, 2), (BITRANSITIVE, 3)])
def test_center_markings(S, count):
    M = center_map(S)
    marks = enumerate_boundary_markings(M)
    assert len(marks) == count == gamma_order(S)
    assert all(marking_residual(M, q) < 1e-12 for q in marks)


def test_markings_of_random_model_maps():
    rng = np.random.default_rng(11)
    for S in enumerate_all(1) + enumerate_all(2) + enumerate_all(3):
        M = random_model_map(S, rng)
        model_validate(M)
        marks = enumerate_boundary_markings(M)
        assert len(marks) == gamma_order(S)
        assert all(marking_residual(M, q) < 1e-10 for q in marks)


def test_center_radii():
    for S in [fixed_vertex(1), CAPTURE, BITRANSITIVE]:
        M = center_map(S)
        fixed = Radii((0.5,) * S.n, (0.6,) * S.n, 0.0)
        assert verify_radii(M, fixed) > 0
        assert verify_radii(M, choose_radii(M)) > 0


def test_radii_with_far_zero():
    M = ModelMap(fixed_vertex(1), (BlaschkeProduct(1, (0j, 0.7)),))
    radii = choose_radii(M)
    assert radii.margin >= 1e-3 or verify_radii(M, radii) >= 1e-6
    r, R = radii.inner[0], radii.outer[0]
    assert 0 < r < R < 1


def test_radii_on_a_chain():
    S = MappingScheme((1, 1, 1), (1, 2, 2))
    M = random_model_map(S, np.random.default_rng(12))
    radii = choose_radii(M)
    assert verify_radii(M, radii, samples=720) > 0


def test_radius_checks_are_sampled_consistently():
    # sanity check of the sample count used for the mapping condition
    assert math.isclose(np.abs(power_map(2)(0.6 * np.exp(2j * np.pi * np.arange(720) / 720))).max(), 0.36)
