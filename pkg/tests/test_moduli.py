from __future__ import annotations

import cmath

import numpy as np
import pytest
import sympy
from hypothesis import given, settings, strategies as st

from schemelab.moduli import (
    BetaZero,
    CrashedFixedPoints,
    CrossRatioPole,
    DegenerateMultiplier,
    FixedPointOnPoleSet,
    OffVariety,
    cross_ratios,
    cubic_relation_residual,
    from_fixed_point_data,
    index_sum,
    lambdas_from_x,
    multiplier_relation,
    normal_form,
    normal_form_critical_points,
    third_fixed_point,
    third_multiplier,
    variety_residual,
    x_from_lambdas,
)


def on_variety(rng):
    """Random point with x1 + x2 + x3 + x1 x2 x3 = 0, solved for x3."""
    while True:
        x1, x2 = rng.normal(size=2) + 1j * rng.normal(size=2)
        if abs(1 + x1 * x2) > 0.1:
            return x1, x2, -(x1 + x2) / (1 + x1 * x2)


def test_multiplier_relation_examples():
    assert multiplier_relation(1, 1, 1) == 0
    assert lambdas_from_x((0, 0, 0)) == (1, 1, 1)
    t = 0.7 - 0.2j
    lam = lambdas_from_x((t, -t, 0))
    assert np.allclose(lam, (1, 1, 1 - t * t))


def test_index_sum_degenerate():
    with pytest.raises(DegenerateMultiplier):
        index_sum((1, 0.5, 0.2))


def test_off_variety():
    with pytest.raises(OffVariety):
        lambdas_from_x((1, 1, 1))
    with pytest.raises(OffVariety):
        x_from_lambdas((0.5, 0.5, 0.5))


def test_identities_on_random_samples():
    rng = np.random.default_rng(0)
    for _ in range(2000):
        x = on_variety(rng)
        assert abs(variety_residual(x)) < 1e-12 * (1 + max(map(abs, x))) ** 3
        lam = lambdas_from_x(x)
        scale = (1 + max(map(abs, lam))) ** 3
        assert abs(multiplier_relation(*lam)) < 1e-11 * scale
        for h, (j, k) in enumerate([(1, 2), (0, 2), (0, 1)]):
            assert abs(x[h] ** 2 - (1 - lam[j] * lam[k])) < 1e-11 * scale
        sols = x_from_lambdas(lam)
        assert any(np.allclose(s, x, atol=1e-9) for s in sols)
        assert any(np.allclose(s, [-v for v in x], atol=1e-9) for s in sols)
        for s in sols:
            assert np.allclose(lambdas_from_x(s), lam, atol=1e-9)


def test_relation_factors_through_the_index_sum():
    a, b, c = sympy.symbols("a b c")
    lhs = a * b * c - a - b - c + 2
    rhs = (1 - a) * (1 - b) * (1 - c) * (1 / (1 - a) + 1 / (1 - b) + 1 / (1 - c) - 1)
    assert sympy.simplify(lhs - rhs) == 0
    rng = np.random.default_rng(1)
    for _ in range(1000):
        x = on_variety(rng)
        lam = lambdas_from_x(x)
        if min(abs(v - 1) for v in lam) < 1e-3:
            continue
        assert abs(index_sum(lam) - 1) < 1e-8 * max(1, max(abs(1 / (1 - v)) for v in lam))


def test_cubic_relation():
    assert cubic_relation_residual(1, 1, 1) == 0
    rng = np.random.default_rng(5)
    P = np.polynomial.polynomial
    for _ in range(200):
        # finite fixed points of z^3 + a z + b; infinity carries index one
        a, b = rng.normal(size=2) + 1j * rng.normal(size=2)
        fixed = P.polyroots((b, a - 1, 0, 1))
        lam = [3 * p * p + a for p in fixed]
        assert abs(cubic_relation_residual(*lam)) < 1e-9 * (1 + max(map(abs, lam))) ** 2
        if min(abs(v - 1) for v in lam) > 1e-3:
            assert abs(index_sum(lam)) < 1e-8 * max(abs(1 / (1 - v)) for v in lam)


def test_sign_flip_and_permutation_equivariance():
    rng = np.random.default_rng(2)
    x = on_variety(rng)
    lam = lambdas_from_x(x)
    assert np.allclose(lambdas_from_x([-v for v in x]), lam)
    cyc = (x[1], x[2], x[0])
    assert np.allclose(lambdas_from_x(cyc), (lam[1], lam[2], lam[0]))


def test_cross_ratios():
    assert cross_ratios((0, 0, 0)) == (1, 1, 1)
    rng = np.random.default_rng(3)
    for _ in range(1000):
        x = on_variety(rng)
        if min(abs(v + 1) for v in x) < 1e-3:
            continue
        r = cross_ratios(x)
        assert abs(r[0] * r[1] * r[2] - 1) < 1e-12 * max(1, max(map(abs, r))) ** 3
    with pytest.raises(CrossRatioPole):
        cross_ratios((-1, 1, 0))


def test_normal_form():
    f = normal_form(0, 0)
    assert f(0.5) == 0.25
    with pytest.raises(CrashedFixedPoints):
        normal_form(2, 0.5)
    with pytest.raises(BetaZero):
        normal_form_critical_points(0.3, 0)


def test_normal_form_multipliers_and_critical_points():
    z = sympy.symbols("z")
    rng = np.random.default_rng(4)
    for _ in range(50):
        alpha, beta = rng.normal(size=2) + 1j * rng.normal(size=2)
        f = normal_form(alpha, beta)
        assert abs(f.derivative(0) - alpha) < 1e-12
        # multiplier at infinity: derivative of 1/f(1/w) at w = 0
        w = 1e-7
        assert abs((1 / f(1 / w)) / w - beta) < 1e-5
        p = third_fixed_point(alpha, beta)
        assert abs(f(p) - p) < 1e-10 * (1 + abs(p))
        fz = z * (z + complex(alpha)) / (complex(beta) * z + 1)
        exact = complex(sympy.diff(fz, z).subs(z, p))
        assert abs(exact - third_multiplier(alpha, beta)) < 1e-9 * (1 + abs(exact))
        assert abs(multiplier_relation(alpha, beta, third_multiplier(alpha, beta))) < 1e-9
        for c in normal_form_critical_points(alpha, beta):
            assert abs(f.derivative(c)) < 1e-10 * (1 + abs(f.derivative(c + 1e-3)) * 1e3)


def test_from_fixed_point_data():
    f = from_fixed_point_data((1, 0, 1), (0, 1, -1))
    assert np.allclose(f.num, (0, 2, 0))
    for z in (0, 1, -1):
        assert abs(f(z) - z) < 1e-14
    with pytest.raises(FixedPointOnPoleSet):
        from_fixed_point_data((1, 0, 1), (1j, 1, -1))


@settings(max_examples=50, deadline=None)
@given(st.integers(1, 4), st.integers(0, 2 ** 32 - 1))
def test_from_fixed_point_data_identity(d, seed):
    rng = np.random.default_rng(seed)
    q = np.append(rng.normal(size=d) + 1j * rng.normal(size=d), 1)
    fixed = rng.normal(size=d + 1) + 1j * rng.normal(size=d + 1)
    if min(abs(np.polynomial.polynomial.polyval(z, q)) for z in fixed) < 1e-3:
        return
    f = from_fixed_point_data(q, fixed)
    P = np.polynomial.polynomial
    for z in np.exp(2j * np.pi * np.arange(64) / 64) * 1.3:
        lhs = z * P.polyval(z, q) - P.polyval(z, np.array(f.num))
        rhs = np.prod([z - zj for zj in fixed])
        assert abs(lhs - rhs) < 1e-10 * (1 + abs(rhs))
    for zj in fixed:
        assert cmath.isclose(f(zj), zj, rel_tol=1e-8, abs_tol=1e-8)
