"""Fixed-point multipliers of quadratic rational maps and their marked moduli.

Three fixed-point multipliers ``(a, b, c)`` of a quadratic rational map satisfy
``abc - a - b - c + 2 = 0``.  Totally marked points are triples ``x`` with
``x1 + x2 + x3 + x1 x2 x3 = 0``; the multiplier ``lambda_k`` is ``1 + x_h x_j``.
"""
from __future__ import annotations

import cmath
from dataclasses import dataclass
from typing import Sequence

import numpy as np


class DegenerateMultiplier(ValueError):
    pass


class OffVariety(ValueError):
    pass


class CrashedFixedPoints(ValueError):
    pass


class BetaZero(ValueError):
    pass


class CrossRatioPole(ZeroDivisionError):
    pass


class FixedPointOnPoleSet(ValueError):
    pass


def multiplier_relation(a: complex, b: complex, c: complex) -> complex:
    """Residual of the relation between the three fixed-point multipliers."""
    return a * b * c - a - b - c + 2


def cubic_relation_residual(a: complex, b: complex, c: complex) -> complex:
    """Residual of ``3 - 2(a+b+c) + (ab+ac+bc)``, which vanishes exactly when
    the three index terms ``1/(1 - lambda)`` sum to zero, as they do for the
    finite fixed points of a cubic polynomial."""
    return 3 - 2 * (a + b + c) + (a * b + a * c + b * c)


def index_sum(lams: Sequence[complex]) -> complex:
    out = 0j
    for lam in lams:
        if lam == 1:
            raise DegenerateMultiplier("multiplier 1 has no finite index")
        out += 1 / (1 - lam)
    return out


def variety_residual(x: Sequence[complex]) -> complex:
    x1, x2, x3 = x
    return x1 + x2 + x3 + x1 * x2 * x3


def lambdas_from_x(x: Sequence[complex], tol: float = 1e-9) -> tuple[complex, complex, complex]:
    x1, x2, x3 = (complex(v) for v in x)
    scale = 1 + abs(x1) + abs(x2) + abs(x3)
    if abs(variety_residual((x1, x2, x3))) > tol * scale ** 3:
        raise OffVariety("x1 + x2 + x3 + x1 x2 x3 != 0")
    return 1 + x2 * x3, 1 + x1 * x3, 1 + x1 * x2


def x_from_lambdas(lams: Sequence[complex], tol: float = 1e-9) -> list[tuple[complex, complex, complex]]:
    """Both preimages ``{x, -x}`` of a multiplier triple on the relation
    (one when ``x = 0``)."""
    l1, l2, l3 = (complex(v) for v in lams)
    scale = 1 + abs(l1) + abs(l2) + abs(l3)
    if abs(multiplier_relation(l1, l2, l3)) > tol * scale ** 3:
        raise OffVariety("multipliers violate the fixed-point relation")
    sq = [1 - l2 * l3, 1 - l1 * l3, 1 - l1 * l2]
    prods = {(0, 1): l3 - 1, (0, 2): l2 - 1, (1, 2): l1 - 1}
    h = max(range(3), key=lambda i: abs(sq[i]))
    if abs(sq[h]) == 0:
        return [(0j, 0j, 0j)]
    x = [0j, 0j, 0j]
    x[h] = cmath.sqrt(sq[h])
    for j in range(3):
        if j != h:
            x[j] = prods[tuple(sorted((h, j)))] / x[h]
    x = tuple(x)
    return [x, tuple(-v for v in x)]


def cross_ratios(x: Sequence[complex]) -> tuple[complex, complex, complex]:
    out = []
    for v in x:
        if v == -1:
            raise CrossRatioPole("x = -1 gives an infinite cross-ratio")
        out.append((1 - v) / (1 + v))
    return tuple(out)


# ---------------------------------------------------------------------------
# normal forms


@dataclass(frozen=True)
class RationalMap:
    """``p(z) / q(z)`` with coefficient arrays lowest degree first."""

    num: tuple[complex, ...]
    den: tuple[complex, ...]

    def __call__(self, z):
        pv = np.polynomial.polynomial.polyval
        return pv(z, np.array(self.num)) / pv(z, np.array(self.den))

    def derivative(self, z):
        P = np.polynomial.polynomial
        p, q = np.array(self.num), np.array(self.den)
        qz = P.polyval(z, q)
        return (P.polyval(z, P.polyder(p)) * qz - P.polyval(z, p) * P.polyval(z, P.polyder(q))) / qz ** 2


def normal_form(alpha: complex, beta: complex) -> RationalMap:
    """``z (z + alpha) / (beta z + 1)``: fixed points 0 and infinity with
    multipliers ``alpha`` and ``beta``."""
    if abs(alpha * beta - 1) < 1e-14:
        raise CrashedFixedPoints("alpha * beta = 1 collapses two fixed points")
    return RationalMap((0j, complex(alpha), 1 + 0j), (1 + 0j, complex(beta)))


def third_fixed_point(alpha: complex, beta: complex) -> complex:
    if beta == 1:
        return complex("inf")
    return (1 - alpha) / (1 - beta)


def third_multiplier(alpha: complex, beta: complex) -> complex:
    """Multiplier forced by the fixed-point relation."""
    if abs(alpha * beta - 1) < 1e-14:
        raise CrashedFixedPoints("alpha * beta = 1")
    return (alpha + beta - 2) / (alpha * beta - 1)


def normal_form_critical_points(alpha: complex, beta: complex) -> tuple[complex, complex]:
    """Roots of ``beta z^2 + 2 z + alpha``."""
    if beta == 0:
        raise BetaZero("beta = 0 is the polynomial limit; one critical point is infinity")
    if abs(alpha * beta - 1) < 1e-14:
        raise CrashedFixedPoints("alpha * beta = 1")
    x = cmath.sqrt(1 - alpha * beta)
    return (-1 + x) / beta, (-1 - x) / beta


def from_fixed_point_data(q: Sequence[complex], fixed: Sequence[complex]) -> RationalMap:
    """The map ``p/q`` whose fixed points are ``fixed`` (``deg q + 1`` of them),
    with ``p(z) = z q(z) - prod (z - z_j)``; ``q`` is monic, lowest degree first."""
    q = np.array(q, dtype=complex)
    if abs(q[-1] - 1) > 1e-14:
        raise ValueError("q must be monic")
    if len(fixed) != q.size:
        raise ValueError(f"need {q.size} fixed points for deg q = {q.size - 1}")
    P = np.polynomial.polynomial
    for z in fixed:
        if abs(P.polyval(z, q)) < 1e-12:
            raise FixedPointOnPoleSet(f"q vanishes at the fixed point {z}")
    prod = np.array([1], dtype=complex)
    for z in fixed:
        prod = np.convolve(prod, [-z, 1])
    p = np.convolve(q, [0, 1]) - prod
    p = p[:-1]  # the z^{d+1} terms cancel
    return RationalMap(tuple(complex(v) for v in p), tuple(complex(v) for v in q))
