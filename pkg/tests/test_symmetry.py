from __future__ import annotations

from fractions import Fraction

import numpy as np
import pytest
import sympy
from hypothesis import given, settings, strategies as st

from schemelab.census import enumerate_all
from schemelab.dynamics import GenPolyMap
from schemelab.scheme import BITRANSITIVE, CAPTURE, MappingScheme, fixed_vertex, reduce
from schemelab.symmetry import (
    SymmetryElement,
    act_antilinear,
    act_on_map,
    automorphisms,
    enumerate_antilinear,
    enumerate_gamma,
    extended_group,
    gamma0,
    gamma_bruteforce,
    gamma_order,
    real_form_classes,
    real_form_dimension,
    root,
    satisfies_rotation_law,
    sign_normalize,
)

SMALL = [S for w in range(1, 5) for S in enumerate_all(w)]


def random_map(S, rng):
    return GenPolyMap(S, tuple(
        tuple(complex(*rng.normal(size=2)) for _ in range(S.degree(s) - 1)) for s in range(S.n)))


def maps_close(f, g, tol=1e-12):
    return all(np.allclose(a, b, atol=tol) for a, b in zip(f.coeffs, g.coeffs))


def test_gamma_orders_of_small_schemes():
    assert gamma_order(BITRANSITIVE) == 3
    assert gamma_order(CAPTURE) == 2
    for d in range(2, 7):
        assert gamma_order(fixed_vertex(d - 1)) == d - 1


def test_capture_and_bitransitive_groups():
    assert len(enumerate_gamma(CAPTURE)) == 2 and len(gamma0(CAPTURE)) == 2
    assert len(enumerate_gamma(BITRANSITIVE)) == 3 and len(gamma0(BITRANSITIVE)) == 1


@pytest.mark.parametrize("S", SMALL, ids=lambda S: "".join(map(str, S.weights + S.images)))
def test_gamma_enumeration_matches_formula_and_brute_force(S):
    gam = enumerate_gamma(S)
    assert len(gam) == gamma_order(S)
    assert {g.rho for g in gam} == {g.rho for g in gamma_bruteforce(S)}
    assert any(g.is_identity for g in gam)
    rhos = {g.rho for g in gam}
    for a in gam:
        for b in gam:
            c = a.compose(b)
            assert satisfies_rotation_law(S, c.rho) and c.rho in rhos
            assert c == b.compose(a)
    n_free2 = sum(1 for s in range(S.n) if S.degree(s) == 2 and s not in S.images)
    assert len(gamma0(S)) == 2 ** n_free2


@pytest.mark.parametrize("S", [
    MappingScheme((1, 0, 1), (1, 2, 2)),
    MappingScheme((1, 0), (1, 0)),
    MappingScheme((2, 0, 1, 0), (1, 2, 3, 0)),
])
def test_gamma_order_survives_reduction(S):
    assert gamma_order(S) == gamma_order(reduce(S)) == len(enumerate_gamma(S))


def test_automorphism_counts():
    assert len(automorphisms(MappingScheme((1, 1), (0, 1)))) == 2
    assert len(automorphisms(BITRANSITIVE)) == 2
    assert len(automorphisms(CAPTURE)) == 1
    for S in SMALL:
        assert len(extended_group(S)) == len(automorphisms(S)) * gamma_order(S)


def test_act_on_map_against_symbolic_expansion():
    z = sympy.symbols("z")
    rng = np.random.default_rng(4)
    for S in [fixed_vertex(2), BITRANSITIVE, CAPTURE, MappingScheme((3, 1), (1, 1))]:
        f = random_map(S, rng)
        for g in enumerate_gamma(S):
            fg = act_on_map(g, f)
            for s in range(S.n):
                d = S.degree(s)
                rs = sympy.exp(2 * sympy.pi * sympy.I * sympy.Rational(g.rho[s]))
                rf = sympy.exp(2 * sympy.pi * sympy.I * sympy.Rational(g.rho[S.images[s]]))
                lower = sum(complex(a) * (rs * z) ** j for j, a in enumerate(f.coeffs[s]))
                expr = ((rs * z) ** d + lower) / rf
                poly = sympy.Poly(sympy.expand(expr), z)
                coeffs = [complex(poly.coeff_monomial(z ** j)) for j in range(d + 1)]
                assert abs(coeffs[d] - 1) < 1e-12 and abs(coeffs[d - 1]) < 1e-12
                assert np.allclose(coeffs[:d - 1], fg.coeffs[s], atol=1e-12)


def test_quadratic_sign_at_free_vertex_leaves_map_alone():
    f = GenPolyMap(CAPTURE, ((0.3 + 0.1j,), (-0.5j,)))
    for g in gamma0(CAPTURE):
        assert maps_close(act_on_map(g, f), f)


def test_identity_action():
    f = random_map(BITRANSITIVE, np.random.default_rng(1))
    assert maps_close(act_on_map(SymmetryElement((Fraction(0),) * 2), f), f)


@settings(max_examples=40, deadline=None)
@given(st.sampled_from(SMALL), st.integers(0, 2 ** 32 - 1))
def test_action_is_a_group_action(S, seed):
    rng = np.random.default_rng(seed)
    f = random_map(S, rng)
    gam = enumerate_gamma(S)
    g = gam[rng.integers(len(gam))]
    h = gam[rng.integers(len(gam))]
    assert maps_close(act_on_map(g, act_on_map(h, f)), act_on_map(g.compose(h), f), 1e-10)
    for g0 in gamma0(S):
        assert maps_close(act_on_map(g0, f), f, 1e-12)


@pytest.mark.parametrize("S", SMALL[:30], ids=lambda S: "".join(map(str, S.weights + S.images)))
def test_antilinear_involutions(S):
    rng = np.random.default_rng(7)
    base = GenPolyMap.base(S)
    f = random_map(S, rng)
    invs = enumerate_antilinear(S)
    assert invs
    for inv in invs:
        assert maps_close(act_antilinear(inv, base), base)
        for s in range(S.n):
            z = complex(*rng.normal(size=2))
            t, w = inv.apply(*inv.apply(s, z))
            assert t == s and abs(w - z) < 1e-12
            # f^inv = inv o f o inv, checked pointwise
            s1, z1 = inv.apply(s, z)
            s2, z2 = f(s1, z1)
            lhs = inv.apply(s2, z2)
            rhs = act_antilinear(inv, f)(s, z)
            assert lhs[0] == rhs[0] and abs(lhs[1] - rhs[1]) < 1e-10 * (1 + abs(rhs[1]))


@pytest.mark.parametrize("w", [1, 2, 3, 4, 5])
def test_real_forms_of_single_vertex(w):
    d = w + 1
    classes = real_form_classes(fixed_vertex(w))
    signs = sorted(sign_normalize(c[0], fixed_vertex(w)).sigma[0] for c in classes)
    assert signs == ([1] if d % 2 == 0 else [-1, 1])


def test_bitransitive_real_forms():
    classes = real_form_classes(BITRANSITIVE)
    reps = sorted(c[0].vertex_involution for c in classes)
    assert reps == [(0, 1), (1, 0)]
    assert all(c[0].alpha == (0, 0) for c in classes)


def test_real_form_dimension_is_total_weight():
    for S in SMALL:
        for inv in enumerate_antilinear(S)[:4]:
            assert real_form_dimension(S, inv) == S.total_weight


def test_root_is_exact_at_quarter_turns():
    assert root(Fraction(1, 2)) == -1 and root(Fraction(1, 4)) == 1j and root(Fraction(3)) == 1
