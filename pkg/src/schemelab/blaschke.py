"""Finite Blaschke products, their circle dynamics, and the Blaschke model space
of a mapping scheme.

A product is stored as ``rotation * prod mu_a(z)`` with the 1-anchored factor
``mu_a(z) = k (z - a) / (1 - conj(a) z)``, ``k = (1 - conj(a)) / (1 - a)``, so
that ``mu_a(1) = 1`` and ``rotation`` equals the value at ``z = 1``.
"""
from __future__ import annotations

import bisect
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np

from . import polyroots
from .polyroots import RootFindFailure
from .scheme import MappingScheme, cycle_decomposition

TWO_PI = 2 * math.pi


class PoleHit(ArithmeticError):
    pass


class NoInteriorFixedPoint(ValueError):
    pass


class BoundaryFixedPointMissing(ArithmeticError):
    pass


class NoConvergence(ArithmeticError):
    pass


class NoValidRadii(ValueError):
    pass


class CenteringViolation(ValueError):
    def __init__(self, vertex: int, condition: str):
        super().__init__(f"vertex {vertex}: {condition}")
        self.vertex = vertex
        self.condition = condition


def _scalar_or_array(x, like):
    return complex(x) if np.ndim(like) == 0 else x


@dataclass(frozen=True)
class BlaschkeProduct:
    rotation: complex
    zeros: tuple[complex, ...]

    def __post_init__(self):
        object.__setattr__(self, "rotation", complex(self.rotation))
        object.__setattr__(self, "zeros", tuple(complex(a) for a in self.zeros))
        if abs(abs(self.rotation) - 1) > 1e-9:
            raise ValueError("rotation must have modulus one")
        if any(abs(a) >= 1 for a in self.zeros):
            raise ValueError("zeros must lie in the open unit disk")

    @property
    def degree(self) -> int:
        return len(self.zeros)

    def __call__(self, z):
        zz = np.asarray(z, dtype=complex)
        out = np.full(zz.shape, self.rotation, dtype=complex)
        for a in self.zeros:
            den = 1 - np.conj(a) * zz
            if np.any(np.abs(den) < 1e-14):
                raise PoleHit(f"evaluation at the pole 1/conj({a})")
            out = out * ((1 - np.conj(a)) / (1 - a)) * (zz - a) / den
        return _scalar_or_array(out, z)

    def circle_speed_bound(self) -> float:
        """Upper bound for d(arg B)/d(theta) on the unit circle."""
        return sum((1 + abs(a)) / (1 - abs(a)) for a in self.zeros) if self.zeros else 0.0

    def circle_speed(self, z):
        """``z B'(z) / B(z)``, real and positive on the unit circle."""
        zz = np.asarray(z, dtype=complex)
        out = np.zeros(zz.shape, dtype=complex)
        for a in self.zeros:
            out = out + zz * (1 - abs(a) ** 2) / ((zz - a) * (1 - np.conj(a) * zz))
        return _scalar_or_array(out, z)

    def rational(self) -> tuple[np.ndarray, np.ndarray]:
        """Numerator and denominator coefficient arrays, lowest degree first."""
        num = np.array([self.rotation], dtype=complex)
        den = np.array([1], dtype=complex)
        for a in self.zeros:
            k = (1 - np.conj(a)) / (1 - a)
            num = np.convolve(num, [-a * k, k])
            den = np.convolve(den, [1, -np.conj(a)])
        return num, den

    def derivative(self, z):
        num, den = self.rational()
        dn = np.polynomial.polynomial.polyder(num)
        dd = np.polynomial.polynomial.polyder(den) if den.size > 1 else np.zeros(1)
        pv = np.polynomial.polynomial.polyval
        zz = np.asarray(z, dtype=complex)
        D = pv(zz, den)
        out = (pv(zz, dn) * D - pv(zz, num) * pv(zz, dd)) / D ** 2
        return _scalar_or_array(out, z)


def identity_product() -> BlaschkeProduct:
    return BlaschkeProduct(1, (0j,))


def power_map(d: int) -> BlaschkeProduct:
    return BlaschkeProduct(1, (0j,) * d)


def _sub(p, q):
    n = max(p.size, q.size)
    return np.pad(p, (0, n - p.size)) - np.pad(q, (0, n - q.size))


def critical_points(B: BlaschkeProduct) -> list[complex]:
    """Critical points inside the unit disk (with multiplicity)."""
    if B.degree < 2:
        return []
    num, den = B.rational()
    P = polyroots.trim(_sub(
        np.convolve(np.polynomial.polynomial.polyder(num), den),
        np.convolve(num, np.polynomial.polynomial.polyder(den) if den.size > 1 else [0]),
    ), rel=1e-13)
    rs = polyroots.roots(P)
    inside = sorted((complex(r) for r in rs if abs(r) < 1), key=lambda r: (abs(r), r.real))
    if len(inside) != B.degree - 1:
        raise RootFindFailure(f"found {len(inside)} interior critical points, expected {B.degree - 1}")
    return inside


def solve_value(B: BlaschkeProduct, w: complex) -> list[complex]:
    """All solutions of ``B(z) = w`` for ``|w| < 1`` (they lie in the disk)."""
    num, den = B.rational()
    return [complex(r) for r in polyroots.roots(_sub(num, w * den))]


def fixed_points(B: BlaschkeProduct) -> list[complex]:
    num, den = B.rational()
    return [complex(r) for r in polyroots.roots(_sub(num, np.convolve(den, [0, 1])))]


def interior_fixed_point(B: BlaschkeProduct, tol: float = 1e-9) -> complex:
    if B.degree >= 1 and abs(B(0)) < 1e-15:
        return 0j
    inside = [z for z in fixed_points(B) if abs(z) < 1 - tol]
    if not inside:
        raise NoInteriorFixedPoint("all fixed points lie on or outside the unit circle")
    return min(inside, key=abs)


# ---------------------------------------------------------------------------
# disk automorphisms


@dataclass(frozen=True)
class DiskAutomorphism:
    """``h(z) = lam (z + w) / (1 + conj(w) z)``; ``h(0) = lam w``."""

    w: complex
    lam: complex = 1 + 0j

    @classmethod
    def sending(cls, zero_to: complex, one_to: complex) -> "DiskAutomorphism":
        # with w = zero_to / lam, h(1) = (lam + zero_to) / (1 + conj(zero_to) lam)
        lam = (one_to - zero_to) / (1 - np.conj(zero_to) * one_to)
        return cls(complex(zero_to / lam), complex(lam))

    def __call__(self, z):
        zz = np.asarray(z, dtype=complex)
        out = self.lam * (zz + self.w) / (1 + np.conj(self.w) * zz)
        return _scalar_or_array(out, z)

    def inverse(self, u):
        uu = np.asarray(u, dtype=complex) / self.lam
        out = (uu - self.w) / (1 - np.conj(self.w) * uu)
        return _scalar_or_array(out, u)

    def speed_bound(self) -> float:
        r = abs(self.w)
        return (1 + r) / (1 - r)


# ---------------------------------------------------------------------------
# circle equations solved by monotone bisection


def _lift_increments(x):
    return np.mod(x + 0.25, 1.0) - 0.25


def circle_roots(fn: Callable, speed_bound: float, degree: int, slope: int, target: float,
                 min_samples: int = 4096) -> list[float]:
    """Angles ``theta`` in ``[0, 1)`` with ``arg fn(e^{2 pi i theta}) / 2 pi - slope *
    theta = target (mod 1)``.

    ``fn`` must map the circle to itself as a degree-``degree`` covering with
    angular speed above ``slope`` and below ``speed_bound``.  The lift is
    sampled finely enough that each step advances by at most a quarter turn,
    then each crossing is bisected.
    """
    n = max(min_samples, int(math.ceil(4 * max(speed_bound, degree))) + 1)
    if n > 1 << 23:
        raise RootFindFailure(f"circle map too steep (speed bound {speed_bound:.3g})")
    theta = np.arange(n + 1) / n
    raw = np.angle(fn(np.exp(TWO_PI * 1j * theta))) / TWO_PI
    inc = _lift_increments(np.diff(raw))
    if np.any(inc < 0):
        raise RootFindFailure("argument is not increasing along the circle")
    phi = raw[0] + np.concatenate([[0.0], np.cumsum(inc)])
    if abs(phi[-1] - phi[0] - degree) > 1e-6:
        raise RootFindFailure(f"winding {phi[-1] - phi[0]:.6f} differs from degree {degree}")
    H = phi - slope * theta - target
    fl = np.floor(H)
    fl[-1] = fl[0] + (degree - slope)  # the endpoint repeats the start, one turn up
    out = []
    for i in np.nonzero(fl[1:] > fl[:-1])[0]:
        for level in range(int(fl[i]) + 1, int(fl[i + 1]) + 1):
            out.append(_bisect(fn, theta[i], theta[i + 1], phi[i], slope, target + level))
    if len(out) != degree - slope:
        raise RootFindFailure(f"found {len(out)} crossings, expected {degree - slope}")
    return sorted(t % 1.0 for t in out)


def _bisect(fn, lo, hi, phi_lo, slope, level):
    def g(t):
        raw = float(np.angle(fn(np.exp(TWO_PI * 1j * t)))) / TWO_PI
        return phi_lo + _lift_increments(raw - phi_lo) - slope * t - level

    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        if g(mid) >= 0:
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)


def _angle(z: complex) -> float:
    return (math.atan2(z.imag, z.real) / TWO_PI) % 1.0


def boundary_fixed_points(B: BlaschkeProduct) -> list[complex]:
    """The ``d - 1`` fixed points on the unit circle, sorted by angle.  Requires
    an attracting interior fixed point."""
    if B.degree < 2:
        return []
    p = interior_fixed_point(B)
    if p == 0:
        fn, bound = B, B.circle_speed_bound()

        def back(z):
            return z
    else:
        h = DiskAutomorphism(p)
        fn = lambda z: h.inverse(B(h(z)))  # noqa: E731
        bound = B.circle_speed_bound() * h.speed_bound() ** 2
        back = h
    try:
        thetas = circle_roots(fn, bound, B.degree, 1, 0.0)
    except RootFindFailure as exc:
        raise BoundaryFixedPointMissing(str(exc)) from None
    pts = [complex(back(np.exp(TWO_PI * 1j * t))) for t in thetas]
    pts = [z / abs(z) for z in pts]
    return sorted(pts, key=_angle)


def circle_preimages(B: BlaschkeProduct, w: complex) -> list[complex]:
    """The ``d`` solutions of ``B(z) = w`` for ``|w| = 1``, sorted by angle."""
    thetas = circle_roots(B, B.circle_speed_bound(), B.degree, 0, _angle(w))
    return [complex(np.exp(TWO_PI * 1j * t)) for t in thetas]


def circle_winding(B: BlaschkeProduct) -> int:
    """Winding number of ``B`` restricted to the unit circle, by summing
    argument increments over a fine sample."""
    n = max(4096, int(math.ceil(4 * B.circle_speed_bound())) + 1)
    theta = np.arange(n + 1) / n
    raw = np.angle(B(np.exp(TWO_PI * 1j * theta))) / TWO_PI
    total = float(np.sum(_lift_increments(np.diff(raw))))
    w = round(total)
    if abs(total - w) > 1e-6:
        raise RootFindFailure(f"winding sum {total} is not an integer")
    return w


def circle_itinerary(B: BlaschkeProduct, z: complex, n: int, base: complex | None = None) -> list[int]:
    """Base-``d`` digits of ``z``: the k-th digit is the index of the arc,
    between consecutive preimages of the boundary fixed point ``base``
    counted counterclockwise from ``base``, that contains ``B^k(z)``."""
    if base is None:
        base = boundary_fixed_points(B)[0]
    t0 = _angle(base)
    pre = circle_preimages(B, base)
    rel = sorted(((_angle(p) - t0) % 1.0) for p in pre)
    rel = [0.0 if r > 1 - 1e-9 else r for r in rel]
    rel.sort()
    digits = []
    for _ in range(n):
        r = (_angle(z) - t0) % 1.0
        digits.append(bisect.bisect_right(rel, r) - 1)
        z = complex(B(z))
        z /= abs(z)
    return digits


def itinerary_value(digits: Sequence[int], d: int) -> Fraction:
    return sum((Fraction(a, d ** (k + 1)) for k, a in enumerate(digits)), Fraction(0))


# ---------------------------------------------------------------------------
# conformal barycenter and normalizations


def barycenter_residual(points, w: complex) -> float:
    z = np.asarray(points, dtype=complex)
    return float(abs(np.sum((z - w) / (1 - np.conj(w) * z))))


def conformal_barycenter(points, tol: float = 1e-14, max_steps: int = 100) -> complex:
    """The point ``w`` with ``sum (z_j - w) / (1 - conj(w) z_j) = 0``, by damped
    Newton iteration from the Euclidean mean."""
    z = np.asarray(points, dtype=complex)
    if z.size == 0:
        raise ValueError("no points")
    if np.any(np.abs(z) >= 1):
        raise ValueError("points must lie in the open unit disk")
    if z.size == 1:
        return complex(z[0])

    def G(w):
        return np.sum((z - w) / (1 - np.conj(w) * z))

    w = complex(np.mean(z))
    g = G(w)
    for _ in range(max_steps):
        if abs(g) < tol:
            return w
        den = 1 - np.conj(w) * z
        A = np.sum(-1 / den)
        Bc = np.sum((z - w) * z / den ** 2)
        M = np.array([[A.real + Bc.real, -A.imag + Bc.imag],
                      [A.imag + Bc.imag, A.real - Bc.real]])
        x, y = np.linalg.solve(M, [-g.real, -g.imag])
        step = complex(x, y)
        t = 1.0
        for _ in range(60):
            cand = w + t * step
            if abs(cand) < 1:
                gc = G(cand)
                if abs(gc) < abs(g):
                    break
            t *= 0.5
        else:
            break
        w, g = cand, gc
    if abs(g) < 1e-12:
        return w
    raise NoConvergence(f"barycenter residual {abs(g):.3g} after {max_steps} steps")


def fixed_point_center(B: BlaschkeProduct) -> list[BlaschkeProduct]:
    """The ``d - 1`` conjugates ``h^-1 B h`` with ``h(0)`` the interior fixed
    point and ``h(1)`` a boundary fixed point; each is 1-anchored and fixes 0."""
    p = interior_fixed_point(B)
    pre = solve_value(B, p)
    out = []
    for q in boundary_fixed_points(B):
        h = DiskAutomorphism.sending(p, q)
        zs = [complex(h.inverse(a)) for a in pre]
        k = min(range(len(zs)), key=lambda i: abs(zs[i]))
        zs[k] = 0j
        out.append(BlaschkeProduct(1, tuple(zs)))
    return out


def zeros_center(B: BlaschkeProduct) -> list[BlaschkeProduct]:
    """The ``d`` precompositions ``B o h`` that are 1-anchored with zeros
    summing to zero."""
    a = conformal_barycenter(B.zeros)
    out = []
    for z1 in circle_preimages(B, 1 + 0j):
        h = DiskAutomorphism.sending(a, z1)
        zs = tuple(complex(h.inverse(x)) for x in B.zeros)
        out.append(BlaschkeProduct(1, zs))
    return out


# ---------------------------------------------------------------------------
# model maps over a scheme


@dataclass(frozen=True)
class ModelMap:
    scheme: MappingScheme
    products: tuple[BlaschkeProduct, ...]

    def __call__(self, s: int, z):
        return self.scheme.images[s], self.products[s](z)


def model_dimension(S: MappingScheme) -> int:
    return 2 * S.total_weight


def center_map(S: MappingScheme) -> ModelMap:
    return ModelMap(S, tuple(power_map(S.degree(s)) for s in range(S.n)))


def model_validate(M: ModelMap, tol: float = 1e-10) -> bool:
    S = M.scheme
    if len(M.products) != S.n:
        raise ValueError("one product per vertex is required")
    periodic = cycle_decomposition(S).periodic
    for s, B in enumerate(M.products):
        if B.degree != S.degree(s):
            raise CenteringViolation(s, f"degree {B.degree} differs from {S.degree(s)}")
        if abs(B.rotation - 1) > tol:
            raise CenteringViolation(s, "not 1-anchored")
        if s in periodic:
            if abs(B(0)) > tol:
                raise CenteringViolation(s, "periodic vertex must fix 0")
        elif abs(sum(B.zeros)) > tol:
            raise CenteringViolation(s, "zeros of an aperiodic vertex must sum to 0")
    return True


def random_model_map(S: MappingScheme, rng: np.random.Generator, radius: float = 0.45) -> ModelMap:
    periodic = cycle_decomposition(S).periodic

    def disk(k, r):
        rr = r * np.sqrt(rng.random(k))
        return rr * np.exp(TWO_PI * 1j * rng.random(k))

    out = []
    for s in range(S.n):
        d = S.degree(s)
        if d == 1:
            out.append(identity_product())
        elif s in periodic:
            out.append(BlaschkeProduct(1, (0j,) + tuple(disk(d - 1, 2 * radius))))
        else:
            z = disk(d, radius)
            out.append(BlaschkeProduct(1, tuple(z - z.mean())))
    return ModelMap(S, tuple(out))


@dataclass(frozen=True)
class BoundaryMarking:
    points: tuple[complex, ...]


def marking_residual(M: ModelMap, q: BoundaryMarking) -> float:
    S = M.scheme
    return max(abs(q.points[S.images[s]] - M.products[s](q.points[s])) for s in range(S.n))


def _compose(products):
    def fn(z):
        for B in products:
            z = B(z)
        return z
    return fn


def enumerate_boundary_markings(M: ModelMap) -> list[BoundaryMarking]:
    """All choices of circle points with ``q(F(s)) = B_s(q(s))``: fixed points
    of the first-return map on each cycle, then preimages along the trees."""
    S = M.scheme
    dec = cycle_decomposition(S)
    periodic = dec.periodic
    partial: list[dict[int, complex]] = [{}]
    for cyc in dec.cycles:
        prods = [M.products[v] for v in cyc]
        D = math.prod(B.degree for B in prods)
        bound = math.prod(max(B.circle_speed_bound(), 1.0) for B in prods)
        fn = _compose(prods)
        thetas = circle_roots(fn, bound, D, 1, 0.0)
        starts = [complex(np.exp(TWO_PI * 1j * t)) for t in thetas]
        new = []
        for a in partial:
            for z in starts:
                b = dict(a)
                for v in cyc:
                    b[v] = z
                    z = complex(M.products[v](z))
                    z /= abs(z)
                new.append(b)
        partial = new
    order = sorted((s for s in range(S.n) if s not in periodic), key=lambda s: dec.tail_depth[s])
    for s in order:
        B = M.products[s]
        new = []
        for a in partial:
            for z in circle_preimages(B, a[S.images[s]]):
                b = dict(a)
                b[s] = z
                new.append(b)
        partial = new
    return [BoundaryMarking(tuple(a[s] for s in range(S.n))) for a in partial]


# ---------------------------------------------------------------------------
# radii


@dataclass(frozen=True)
class Radii:
    inner: tuple[float, ...]
    outer: tuple[float, ...]
    margin: float


def _max_modulus(B: BlaschkeProduct, r: float, samples: int) -> float:
    z = r * np.exp(TWO_PI * 1j * np.arange(samples) / samples)
    return float(np.max(np.abs(B(z))))


def _critical_radius(B: BlaschkeProduct) -> float:
    return max((abs(c) for c in critical_points(B)), default=0.0)


def verify_radii(M: ModelMap, radii: Radii, samples: int = 720) -> float:
    """Smallest slack in the radius conditions (positive when they hold)."""
    S = M.scheme
    slack = math.inf
    for s, B in enumerate(M.products):
        r, R = radii.inner[s], radii.outer[s]
        slack = min(slack, r - _critical_radius(B), R - r, 1 - R,
                    radii.inner[S.images[s]] - _max_modulus(B, R, samples))
    return slack


def choose_radii(M: ModelMap, samples: int = 1440, min_margin: float = 1e-6) -> Radii:
    """Radii ``0 < r(s) < R(s) < 1`` such that every critical point of ``B_s``
    has modulus below ``r(s)`` and ``B_s`` maps the closed ``R(s)``-disk into
    the open ``r(F(s))``-disk."""
    S = M.scheme
    dec = cycle_decomposition(S)
    periodic = dec.periodic
    crit = [_critical_radius(B) for B in M.products]
    mm = lambda s, r: _max_modulus(M.products[s], r, samples)  # noqa: E731
    tail = sorted((s for s in range(S.n) if s not in periodic), key=lambda s: -dec.tail_depth[s])
    for delta in (0.05, 0.02, 0.005, 1e-3, 2e-4):
        bump = lambda x: x + delta * (1 - x)  # noqa: E731
        lower = [c + 1e-9 for c in crit]
        r = [0.0] * S.n
        R = [0.0] * S.n
        for s in tail:
            r[s] = bump(lower[s])
            R[s] = bump(r[s])
            t = S.images[s]
            lower[t] = max(lower[t], mm(s, R[s]))
        ok = True
        for cyc in dec.cycles:
            x = bump(lower[cyc[0]])
            for _ in range(200):
                r[cyc[0]] = x
                for i, v in enumerate(cyc):
                    R[v] = bump(r[v])
                    nxt = cyc[(i + 1) % len(cyc)]
                    if nxt != cyc[0]:
                        r[nxt] = bump(max(lower[nxt], mm(v, R[v])))
                need = mm(cyc[-1], R[cyc[-1]])
                if need + min_margin < x and x >= lower[cyc[0]]:
                    break
                x = bump(max(lower[cyc[0]], need))
                if x >= 1:
                    break
            else:
                ok = False
            if not ok or x >= 1 or max(R[v] for v in cyc) >= 1:
                ok = False
                break
        if not ok:
            continue
        radii = Radii(tuple(r), tuple(R), 0.0)
        slack = verify_radii(M, radii, samples)
        if slack >= min_margin:
            return Radii(tuple(r), tuple(R), slack)
    raise NoValidRadii("no admissible radii found")
