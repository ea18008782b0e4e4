"""Generalized polynomial maps over a mapping scheme, and their critical dynamics.

A map assigns to each vertex ``s`` a monic centered polynomial of degree
``d(s)``.  The pair ``(s, z)`` is sent to ``(F(s), f_s(z))``.  Coefficients are
stored as ``a_0 .. a_{d-2}``; the ``z^{d-1}`` coefficient is zero.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import polyroots
from .scheme import MappingScheme, fixed_vertex

OVERFLOW = 1e150
BRENT_TOL = 1e-9


class Overflow(ArithmeticError):
    pass


class SuperattractingCycle(ValueError):
    pass


class NotInBasin(ValueError):
    pass


class MapFormatError(ValueError):
    def __init__(self, line: int, message: str):
        super().__init__(f"line {line}: {message}")
        self.line = line


@dataclass(frozen=True)
class GenPolyMap:
    scheme: MappingScheme
    coeffs: tuple[tuple[complex, ...], ...]

    def __post_init__(self):
        co = tuple(tuple(complex(a) for a in c) for c in self.coeffs)
        object.__setattr__(self, "coeffs", co)
        if len(co) != self.scheme.n:
            raise ValueError("one coefficient list per vertex is required")
        for s, c in enumerate(co):
            if len(c) != self.scheme.degree(s) - 1:
                raise ValueError(
                    f"vertex {s} has degree {self.scheme.degree(s)} and needs "
                    f"{self.scheme.degree(s) - 1} coefficients, got {len(c)}")

    @classmethod
    def base(cls, S: MappingScheme) -> "GenPolyMap":
        """The center map ``z -> z^d(s)`` at every vertex."""
        return cls(S, tuple((0j,) * (S.degree(s) - 1) for s in range(S.n)))

    @classmethod
    def polynomial(cls, coeffs: Sequence[complex]) -> "GenPolyMap":
        """Single-vertex map ``z^d + a_{d-2} z^{d-2} + ... + a_0``."""
        return cls(fixed_vertex(len(coeffs)), (tuple(coeffs),))

    def poly(self, s: int) -> np.ndarray:
        """Full coefficient array of ``f_s``, lowest degree first."""
        if self.scheme.degree(s) == 1:
            return np.array([0, 1], dtype=complex)
        return np.array(list(self.coeffs[s]) + [0, 1], dtype=complex)

    def __call__(self, s: int, z: complex) -> tuple[int, complex]:
        return self.scheme.images[s], self.value(s, z)

    def value(self, s: int, z: complex) -> complex:
        if abs(z) > OVERFLOW:
            raise Overflow(f"|z| = {abs(z):.3g} exceeds {OVERFLOW:g}")
        acc = z  # leading 1, and the z^{d-1} coefficient is zero
        for a in reversed(self.coeffs[s]):
            acc = acc * z + a
        return acc

    def derivative(self, s: int, z: complex) -> complex:
        d = self.scheme.degree(s)
        c = self.coeffs[s]
        acc = d + 0j
        acc = acc * z
        for j in range(d - 2, 0, -1):
            acc = acc * z + j * c[j]
        return acc if d > 1 else 1 + 0j

    def orbit(self, s: int, z: complex, n: int) -> list[tuple[int, complex]]:
        out = [(s, z)]
        for _ in range(n):
            s, z = self(s, z)
            out.append((s, z))
        return out


def escape_radius(f: GenPolyMap) -> float:
    """Radius beyond which every orbit escapes to infinity."""
    a = max((sum(abs(x) for x in c) for c in f.coeffs), default=0.0)
    return max(2.0, 2.0 * (1.0 + a))


# ---------------------------------------------------------------------------
# critical points


@dataclass(frozen=True)
class CriticalPoint:
    vertex: int
    point: complex
    multiplicity: int


def _cluster(rs: np.ndarray, tol: float) -> list[tuple[complex, int]]:
    out: list[list] = []
    for r in sorted(rs, key=lambda x: (x.real, x.imag)):
        for grp in out:
            if abs(grp[0] / grp[1] - r) < tol:
                grp[0] += r
                grp[1] += 1
                break
        else:
            out.append([r, 1])
    return [(g[0] / g[1], g[1]) for g in out]


def critical_points(f: GenPolyMap, cluster_tol: float = 1e-5) -> list[CriticalPoint]:
    """Critical points of every vertex polynomial, with multiplicity."""
    out = []
    for s in range(f.scheme.n):
        d = f.scheme.degree(s)
        if d < 2:
            continue
        p = f.poly(s)
        dp = np.array([k * p[k] for k in range(1, d + 1)])
        for c, m in _cluster(polyroots.roots(dp), cluster_tol):
            out.append(CriticalPoint(s, complex(c), m))
    return out


# ---------------------------------------------------------------------------
# orbit classification


@dataclass(frozen=True)
class AttractingCycle:
    id: int
    points: tuple[tuple[int, complex], ...]
    multiplier: complex

    @property
    def period(self) -> int:
        return len(self.points)

    def contains(self, s: int, z: complex, tol: float = 1e-7) -> int | None:
        for k, (v, w) in enumerate(self.points):
            if v == s and abs(w - z) < tol * (1 + abs(w)):
                return k
        return None


@dataclass(frozen=True)
class Escaped:
    step: int


@dataclass(frozen=True)
class Attracted:
    cycle: AttractingCycle


@dataclass(frozen=True)
class Undecided:
    reason: str


@dataclass(frozen=True)
class CriticalFate:
    vertex: int
    point: complex
    multiplicity: int
    fate: Escaped | Attracted | Undecided


def _close(a, b, tol):
    return a[0] == b[0] and abs(a[1] - b[1]) <= tol * (1 + abs(a[1]))


def _brent(f: GenPolyMap, x0, limit: int, tol: float):
    """Cycle length of an orbit under a proximity test, or None."""
    power = lam = 1
    tortoise = x0
    hare = f(*x0)
    steps = 0
    while not _close(tortoise, hare, tol):
        if power == lam:
            tortoise = hare
            power *= 2
            lam = 0
        hare = f(*hare)
        lam += 1
        steps += 1
        if steps > limit:
            return None, hare
    return lam, hare


def _return_map(f: GenPolyMap, s: int, z: complex, p: int):
    """Value and derivative of the p-fold iterate started at (s, z)."""
    der = 1 + 0j
    v = s
    for _ in range(p):
        der *= f.derivative(v, z)
        v, z = f(v, z)
    return v, z, der


def refine_cycle(f: GenPolyMap, s: int, z: complex, p: int, steps: int = 30):
    """Newton refinement of a period-p point and reduction to minimal period."""
    for _ in range(steps):
        v, w, der = _return_map(f, s, z, p)
        if der == 1:
            break
        dz = (w - z) / (der - 1)
        z -= dz
        if abs(dz) < 1e-15 * (1 + abs(z)):
            break
    for q in range(1, p):
        if p % q == 0:
            v, w, _ = _return_map(f, s, z, q)
            if v == s and abs(w - z) < 1e-9 * (1 + abs(z)):
                p = q
                break
    pts = []
    v, w = s, z
    mult = 1 + 0j
    for _ in range(p):
        pts.append((v, w))
        mult *= f.derivative(v, w)
        v, w = f(v, w)
    return tuple(pts), mult


def classify(f: GenPolyMap, max_iter: int = 1000, escape_r: float | None = None,
             tol: float = BRENT_TOL, warmup: int | None = None) -> list[CriticalFate]:
    """Fate of every critical orbit: escape, attraction to a cycle, or undecided."""
    R = escape_radius(f) if escape_r is None else escape_r
    warm = 10 * max_iter if warmup is None else warmup
    cycles: list[AttractingCycle] = []
    out = []
    for cp in critical_points(f):
        x = (cp.vertex, cp.point)
        fate = None
        try:
            for n in range(warm):
                if abs(x[1]) > R:
                    fate = Escaped(n)
                    break
                x = f(*x)
        except Overflow:
            fate = Escaped(n)
        if fate is None:
            lam, x = _brent(f, x, max_iter, tol)
            if lam is None:
                fate = Undecided("no cycle found within the iteration budget")
            else:
                pts, mult = refine_cycle(f, x[0], x[1], lam)
                if abs(mult) >= 1 - 1e-9:
                    fate = Undecided(f"cycle multiplier |{mult:.6g}| is not attracting")
                else:
                    for cyc in cycles:
                        if cyc.contains(*pts[0]) is not None:
                            fate = Attracted(cyc)
                            break
                    else:
                        k = min(range(len(pts)), key=lambda i: (pts[i][0], pts[i][1].real, pts[i][1].imag))
                        pts = pts[k:] + pts[:k]
                        cyc = AttractingCycle(len(cycles), pts, mult)
                        cycles.append(cyc)
                        fate = Attracted(cyc)
        out.append(CriticalFate(cp.vertex, cp.point, cp.multiplicity, fate))
    return out


def is_hyperbolic_bounded(f: GenPolyMap, max_iter: int = 1000) -> bool:
    return all(isinstance(c.fate, Attracted) for c in classify(f, max_iter))


# ---------------------------------------------------------------------------
# Koenigs linearizing coordinate


def _series_mul(a, b, K):
    return np.convolve(a, b)[: K + 1]


def _taylor_shift(p: np.ndarray, z0: complex) -> np.ndarray:
    """Coefficients of u -> p(z0 + u)."""
    out = np.zeros(1, dtype=complex)
    for a in p[::-1]:
        out = np.convolve(out, [z0, 1])
        out[0] += a
    return out


def _compose(outer: np.ndarray, inner: np.ndarray, K: int) -> np.ndarray:
    """Truncated series of outer(inner(u)); both have zero constant term."""
    res = np.zeros(K + 1, dtype=complex)
    for a in outer[:0:-1]:
        res[0] += a
        res = _series_mul(res, inner, K)
    return np.pad(res, (0, K + 1 - res.size))


class KoenigsCoordinate:
    """Linearizing coordinate on the basin of an attracting cycle of period m,
    satisfying ``kappa(f(x)) = mu * kappa(x)`` with ``mu`` the principal m-th
    root of the cycle multiplier.

    Values are computed by iterating into a small disk around the first cycle
    point and evaluating the local Schroeder series there.
    """

    ORDER = 24

    def __init__(self, f: GenPolyMap, cycle: AttractingCycle, escape_r: float | None = None):
        lam = cycle.multiplier
        if abs(lam) < 1e-12:
            raise SuperattractingCycle("multiplier is zero; no linearizing coordinate")
        if abs(lam) >= 1:
            raise ValueError("cycle is not attracting")
        self.f = f
        self.cycle = cycle
        self.lam = lam
        self.mu = cmath.exp(cmath.log(lam) / cycle.period)
        self.R = escape_radius(f) if escape_r is None else escape_r
        K = self.ORDER
        series = np.zeros(K + 1, dtype=complex)
        series[1] = 1
        pts = cycle.points
        for i, (v, w) in enumerate(pts):
            local = _taylor_shift(f.poly(v), w)
            local[0] = 0
            series = _compose(local, series, K)
        # Schroeder coefficients for the first-return map at pts[0]
        b = np.zeros(K + 1, dtype=complex)
        b[1] = 1
        powers = [None, series.copy()]
        for j in range(2, K + 1):
            powers.append(_series_mul(powers[-1], series, K))
        for n in range(2, K + 1):
            acc = sum(b[j] * powers[j][n] for j in range(1, n))
            b[n] = acc / (lam - lam ** n)
        self.coeffs = b
        growth = max([abs(b[n]) ** (1.0 / (n - 1)) for n in range(2, K + 1) if b[n] != 0] or [0.0])
        rho = 0.25 / growth if growth > 0 else 0.25
        sep = [abs(w - pts[0][1]) for v, w in pts[1:] if v == pts[0][0]]
        if sep:
            rho = min(rho, 0.25 * min(sep))
        self.rho = min(rho, 0.25)
        self.scale = 1 + 0j

    def _local(self, u: complex) -> complex:
        acc = 0j
        for c in self.coeffs[:0:-1]:
            acc = (acc + c) * u
        return acc

    def landing(self, s: int, z: complex, limit: int = 100000) -> tuple[int, complex]:
        """(step count, local coordinate) when the orbit first enters the
        linearization disk around the first cycle point."""
        v0, z0 = self.cycle.points[0]
        for n in range(limit):
            if s == v0 and abs(z - z0) < self.rho:
                return n, self._local(z - z0)
            if abs(z) > self.R:
                raise NotInBasin("orbit escapes")
            s, z = self.f(s, z)
        raise NotInBasin("orbit did not approach the cycle")

    def raw(self, s: int, z: complex) -> complex:
        n, val = self.landing(s, z)
        return val * self.mu ** (-n)

    def __call__(self, s: int, z: complex) -> complex:
        return self.raw(s, z) / self.scale

    def normalize_at(self, s: int, z: complex) -> None:
        val = self.raw(s, z)
        if val == 0:
            raise ValueError("cannot normalize at a point of value zero")
        self.scale = val


def koenigs(f: GenPolyMap, cycle: AttractingCycle, s: int, z: complex,
            fates: list[CriticalFate] | None = None) -> complex:
    """Linearizing coordinate at ``(s, z)``, normalized to 1 at the first
    critical point attracted to ``cycle``."""
    k = KoenigsCoordinate(f, cycle)
    fates = classify(f) if fates is None else fates
    for cf in fates:
        if isinstance(cf.fate, Attracted) and cf.fate.cycle.id == cycle.id:
            k.normalize_at(cf.vertex, cf.point)
            break
    return k(s, z)


@dataclass(frozen=True)
class LocalCoordinates:
    cycle: AttractingCycle
    mu: complex
    critical_values: tuple[tuple[int, complex], ...]  # (index into fates, kappa)


def local_coordinates(f: GenPolyMap, fates: list[CriticalFate] | None = None) -> list[LocalCoordinates]:
    """Normalized linearizing coordinates of the critical points, per cycle."""
    fates = classify(f) if fates is None else fates
    groups: dict[int, list[int]] = {}
    cycles = {}
    for i, cf in enumerate(fates):
        if isinstance(cf.fate, Attracted):
            groups.setdefault(cf.fate.cycle.id, []).append(i)
            cycles[cf.fate.cycle.id] = cf.fate.cycle
    out = []
    for cid in sorted(groups):
        k = KoenigsCoordinate(f, cycles[cid])
        first = fates[groups[cid][0]]
        k.normalize_at(first.vertex, first.point)
        vals = tuple((i, k(fates[i].vertex, fates[i].point)) for i in groups[cid])
        out.append(LocalCoordinates(cycles[cid], k.mu, vals))
    return out


@dataclass(frozen=True)
class OrbitRelation:
    found: bool
    kind: int | None = None  # 1 repeated, 2 intersecting orbits, 3 (pre)periodic
    detail: str = ""


def critical_orbit_relation(f: GenPolyMap, max_iter: int = 1000, tol: float = 1e-7) -> OrbitRelation:
    """Detect a critical orbit relation of a hyperbolic map with bounded
    critical orbits: repeated critical points, intersecting critical orbits,
    or a critical point that is eventually periodic."""
    for cp in critical_points(f):
        if cp.multiplicity > 1:
            return OrbitRelation(True, 1, f"critical point {cp.point:.6g} at vertex {cp.vertex} "
                                          f"has multiplicity {cp.multiplicity}")
    fates = classify(f, max_iter)
    if not all(isinstance(cf.fate, Attracted) for cf in fates):
        raise ValueError("map is not hyperbolic with bounded critical orbits")
    by_cycle: dict[int, list] = {}
    for i, cf in enumerate(fates):
        cyc = cf.fate.cycle
        if abs(cyc.multiplier) < 1e-12:
            return OrbitRelation(True, 3, f"cycle {cyc.id} is superattracting")
        by_cycle.setdefault(cyc.id, []).append((i, cf, cyc))
    for cid, items in by_cycle.items():
        k = KoenigsCoordinate(f, items[0][2])
        m = items[0][2].period
        data = []
        for i, cf, _ in items:
            n, val = k.landing(cf.vertex, cf.point)
            if abs(val) < tol * k.rho:
                return OrbitRelation(True, 3, f"critical orbit {i} lands on the cycle")
            data.append((i, n, val * k.mu ** (-n)))
        logmu = math.log(abs(k.mu))
        for a in range(len(data)):
            for b in range(a + 1, len(data)):
                i, ni, ki = data[a]
                j, nj, kj = data[b]
                t = math.log(abs(ki / kj)) / logmu
                T = round(t)
                if abs(t - T) > 1e-6:
                    continue
                if (T - (nj - ni)) % m:
                    continue
                if abs(ki - k.mu ** T * kj) < tol * abs(ki):
                    return OrbitRelation(True, 2, f"critical orbits {i} and {j} meet")
    return OrbitRelation(False)


# ---------------------------------------------------------------------------
# map file format:  "id [-> image] : c0 c1 ... c_{d-2}"


def parse_complex(tok: str) -> complex:
    t = tok.strip().replace("i", "j").replace("I", "j")
    return complex(t)


def parse_map(text: str) -> GenPolyMap:
    """Parse a map file.  Each line gives a vertex id, optionally ``-> image``
    (default: the vertex maps to itself), a colon, and the coefficients
    ``a_0 .. a_{d-2}`` as complex literals such as ``0.5-1.2i``."""
    from .scheme import validate

    rows = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        body = line.split("#", 1)[0].strip()
        if not body:
            continue
        if ":" not in body:
            raise MapFormatError(lineno, "missing ':'")
        head, tail = body.split(":", 1)
        try:
            if "->" in head:
                a, b = head.split("->")
                vid, img = int(a), int(b)
            else:
                vid = img = int(head)
            coeffs = [parse_complex(t) for t in tail.split()]
        except ValueError as exc:
            raise MapFormatError(lineno, str(exc)) from None
        rows.append((vid, img, coeffs))
    if not rows:
        raise MapFormatError(0, "no vertices")
    S = validate([(vid, len(c), img) for vid, img, c in rows])
    order = sorted(r[0] for r in rows)
    byid = {r[0]: r[2] for r in rows}
    return GenPolyMap(S, tuple(tuple(byid[v]) for v in order))


def _fmt_complex(z: complex) -> str:
    return f"{z.real:.17g}{z.imag:+.17g}i"


def format_map(f: GenPolyMap) -> str:
    lines = []
    for s in range(f.scheme.n):
        co = " ".join(_fmt_complex(a) for a in f.coeffs[s])
        lines.append(f"{s} -> {f.scheme.images[s]} : {co}".rstrip())
    return "\n".join(lines) + "\n"
