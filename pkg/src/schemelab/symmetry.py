"""Symmetries of a mapping scheme and antiholomorphic involutions.

Roots of unity are stored exactly as angles in ``Q/Z`` (``Fraction`` in
``[0, 1)``); ``e^{2 pi i t}`` is the corresponding complex number.  An element
of the rotation group assigns an angle ``rho(s)`` to every vertex subject to
``d(s) * rho(s) = rho(F(s))``.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import product

import numpy as np

from .dynamics import GenPolyMap
from .scheme import MappingScheme, component_vertex_sets, cycle_decomposition, preimages

HALF = Fraction(1, 2)


def _mod1(x: Fraction) -> Fraction:
    return x - math.floor(x)


def root(t: Fraction) -> complex:
    """``e^{2 pi i t}`` with exact values at multiples of 1/4."""
    t = _mod1(t)
    exact = {Fraction(0): 1 + 0j, Fraction(1, 4): 1j, HALF: -1 + 0j, Fraction(3, 4): -1j}
    return exact.get(t, cmath.exp(2j * math.pi * float(t)))


@dataclass(frozen=True)
class SymmetryElement:
    rho: tuple[Fraction, ...]

    def compose(self, other: "SymmetryElement") -> "SymmetryElement":
        return SymmetryElement(tuple(_mod1(a + b) for a, b in zip(self.rho, other.rho)))

    def inverse(self) -> "SymmetryElement":
        return SymmetryElement(tuple(_mod1(-a) for a in self.rho))

    @property
    def is_identity(self) -> bool:
        return all(a == 0 for a in self.rho)

    def roots(self) -> list[complex]:
        return [root(a) for a in self.rho]


def satisfies_rotation_law(S: MappingScheme, rho) -> bool:
    return all(_mod1(S.degree(s) * rho[s] - rho[S.images[s]]) == 0 for s in range(S.n))


def gamma_order(S: MappingScheme) -> int:
    """Order of the rotation group from the closed formula: per component,
    (product of cycle degrees - 1) times the product of aperiodic degrees."""
    dec = cycle_decomposition(S)
    periodic = dec.periodic
    total = 1
    for cyc in dec.cycles:
        total *= math.prod(S.degree(v) for v in cyc) - 1
    for s in range(S.n):
        if s not in periodic:
            total *= S.degree(s)
    return total


def enumerate_gamma(S: MappingScheme) -> list[SymmetryElement]:
    """All rotation symmetries, built cycle by cycle and then outward along
    the trees."""
    dec = cycle_decomposition(S)
    pre = preimages(S)
    periodic = dec.periodic
    per_component = []
    for cyc in dec.cycles:
        D = math.prod(S.degree(v) for v in cyc)
        partial = []
        for j in range(D - 1):
            assign = {cyc[0]: Fraction(j, D - 1)}
            t = assign[cyc[0]]
            for v in cyc[:-1]:
                t = _mod1(S.degree(v) * t)
                assign[S.images[v]] = t
            partial.append(assign)
        # extend outward through the hanging trees
        frontier = [u for v in cyc for u in pre[v] if u not in periodic]
        while frontier:
            nxt = []
            for u in frontier:
                d = S.degree(u)
                grown = []
                for a in partial:
                    base = a[S.images[u]]
                    for k in range(d):
                        b = dict(a)
                        b[u] = _mod1((base + k) / d)
                        grown.append(b)
                partial = grown
                nxt.extend(pre[u])
            frontier = nxt
        per_component.append(partial)
    out = []
    for combo in product(*per_component):
        rho = [Fraction(0)] * S.n
        for a in combo:
            for v, t in a.items():
                rho[v] = t
        out.append(SymmetryElement(tuple(rho)))
    out.sort(key=lambda g: g.rho)
    return out


def gamma_bruteforce(S: MappingScheme) -> list[SymmetryElement]:
    """Rotation symmetries found by testing every assignment of N-th roots of
    unity, where N bounds the order of any solution of the rotation law.

    For a vertex whose orbit reaches a cycle of degree product D after a path
    with degree product P, any solution satisfies rho^(P (D-1)) = 1; N is the
    lcm of these exponents.
    """
    dec = cycle_decomposition(S)
    cycprod = {}
    for cyc in dec.cycles:
        D = math.prod(S.degree(v) for v in cyc)
        for v in cyc:
            cycprod[v] = D
    N = 1
    for s in range(S.n):
        P = 1
        v = s
        while v not in cycprod:
            P *= S.degree(v)
            v = S.images[v]
        N = math.lcm(N, P * (cycprod[v] - 1))
    grid = [Fraction(k, N) for k in range(N)]
    return sorted(
        (SymmetryElement(rho) for rho in product(grid, repeat=S.n) if satisfies_rotation_law(S, rho)),
        key=lambda g: g.rho,
    )


def free_quadratic_vertices(S: MappingScheme) -> list[int]:
    dec = cycle_decomposition(S)
    return sorted(s for s in dec.free if S.degree(s) == 2)


def gamma0(S: MappingScheme) -> list[SymmetryElement]:
    """Rotations that act trivially on maps: a sign at each free vertex of
    degree two and the identity elsewhere."""
    free2 = free_quadratic_vertices(S)
    out = []
    for signs in product((Fraction(0), HALF), repeat=len(free2)):
        rho = [Fraction(0)] * S.n
        for v, t in zip(free2, signs):
            rho[v] = t
        out.append(SymmetryElement(tuple(rho)))
    out.sort(key=lambda g: g.rho)
    return out


def act_on_map(g: SymmetryElement, f: GenPolyMap) -> GenPolyMap:
    """Conjugate ``f`` by the rotation ``g``: the coefficient ``a_j`` at vertex
    ``s`` becomes ``a_j rho_s^j / rho_F(s)``."""
    S = f.scheme
    out = []
    for s in range(S.n):
        t = g.rho[S.images[s]]
        out.append(tuple(a * root(j * g.rho[s] - t) for j, a in enumerate(f.coeffs[s])))
    return GenPolyMap(S, tuple(out))


# ---------------------------------------------------------------------------
# automorphisms


def automorphisms(S: MappingScheme) -> list[tuple[int, ...]]:
    """Weight-preserving permutations commuting with F, by backtracking."""
    n = S.n
    out = []
    phi = [-1] * n
    used = [False] * n

    def assign(v, u, trail):
        # set phi(v)=u and propagate along forward orbits
        while True:
            if phi[v] >= 0:
                return phi[v] == u
            if used[u] or S.weights[v] != S.weights[u]:
                return False
            phi[v] = u
            used[u] = True
            trail.append(v)
            v, u = S.images[v], S.images[u]

    def undo(trail):
        for v in trail:
            used[phi[v]] = False
            phi[v] = -1

    def rec(v):
        while v < n and phi[v] >= 0:
            v += 1
        if v == n:
            out.append(tuple(phi))
            return
        for u in range(n):
            trail: list[int] = []
            if assign(v, u, trail):
                rec(v + 1)
            undo(trail)

    rec(0)
    out.sort()
    return out


@dataclass(frozen=True)
class ExtendedElement:
    """The map ``(s, z) -> (perm[s], rho(s) z)``."""

    perm: tuple[int, ...]
    rotation: SymmetryElement

    def compose(self, other: "ExtendedElement") -> "ExtendedElement":
        """``self`` after ``other``."""
        perm = tuple(self.perm[other.perm[s]] for s in range(len(self.perm)))
        rho = tuple(_mod1(self.rotation.rho[other.perm[s]] + other.rotation.rho[s])
                    for s in range(len(self.perm)))
        return ExtendedElement(perm, SymmetryElement(rho))


def extended_group(S: MappingScheme) -> list[ExtendedElement]:
    gam = enumerate_gamma(S)
    return [ExtendedElement(p, g) for p in automorphisms(S) for g in gam]


# ---------------------------------------------------------------------------
# antiholomorphic involutions  (s, z) -> (iota(s), alpha(s) conj(z))


@dataclass(frozen=True)
class AntilinearInvolution:
    vertex_involution: tuple[int, ...]
    alpha: tuple[Fraction, ...]

    def apply(self, s: int, z: complex) -> tuple[int, complex]:
        return self.vertex_involution[s], root(self.alpha[s]) * z.conjugate()


def enumerate_antilinear(S: MappingScheme) -> list[AntilinearInvolution]:
    """All antiholomorphic involutions commuting with the center map."""
    gam = enumerate_gamma(S)
    out = []
    for iota in automorphisms(S):
        if any(iota[iota[s]] != s for s in range(S.n)):
            continue
        for g in gam:
            if all(g.rho[iota[s]] == g.rho[s] for s in range(S.n)):
                out.append(AntilinearInvolution(iota, g.rho))
    return out


def act_antilinear(inv: AntilinearInvolution, f: GenPolyMap) -> GenPolyMap:
    """Conjugate ``f`` by the involution: the coefficient at ``(s, j)`` becomes
    ``alpha(F s) conj(alpha(s))^j conj(a_{s', j})``."""
    S = f.scheme
    out = []
    for s in range(S.n):
        sp = inv.vertex_involution[s]
        t = inv.alpha[S.images[s]]
        out.append(tuple(root(t - j * inv.alpha[s]) * a.conjugate() for j, a in enumerate(f.coeffs[sp])))
    return GenPolyMap(S, tuple(out))


def conjugate_involution(inv: AntilinearInvolution, eta: ExtendedElement) -> AntilinearInvolution:
    """``eta^{-1} o inv o eta``."""
    n = len(eta.perm)
    phi = eta.perm
    phinv = [0] * n
    for s, t in enumerate(phi):
        phinv[t] = s
    iota = tuple(phinv[inv.vertex_involution[phi[s]]] for s in range(n))
    rho = eta.rotation.rho
    alpha = tuple(_mod1(inv.alpha[phi[s]] - rho[s] - rho[iota[s]]) for s in range(n))
    return AntilinearInvolution(iota, alpha)


def same_real_form(a: AntilinearInvolution, b: AntilinearInvolution, S: MappingScheme) -> bool:
    """True when ``a o b`` acts trivially on maps."""
    if a.vertex_involution != b.vertex_involution:
        return False
    g0 = {g.rho for g in gamma0(S)}
    return tuple(_mod1(x - y) for x, y in zip(a.alpha, b.alpha)) in g0


def real_form_classes(S: MappingScheme) -> list[list[AntilinearInvolution]]:
    """Partition the involutions into classes that give isomorphic real forms:
    compose with trivially acting rotations, or conjugate by the extended group.
    Each class is sorted so that its first entry is a canonical representative."""
    invs = enumerate_antilinear(S)
    key = {inv: i for i, inv in enumerate(invs)}
    parent = list(range(len(invs)))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(a, b):
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[max(ra, rb)] = min(ra, rb)

    g0 = gamma0(S)
    ext = extended_group(S)
    for inv in invs:
        i = key[inv]
        for g in g0:
            other = AntilinearInvolution(inv.vertex_involution,
                                         tuple(_mod1(a + b) for a, b in zip(inv.alpha, g.rho)))
            union(i, key[other])
        for eta in ext:
            union(i, key[conjugate_involution(inv, eta)])
    groups: dict[int, list[AntilinearInvolution]] = {}
    for inv in invs:
        groups.setdefault(find(key[inv]), []).append(inv)

    def rank(inv):
        moved = sum(1 for s, t in enumerate(inv.vertex_involution) if s != t)
        return (moved, inv.vertex_involution, inv.alpha)

    classes = [sorted(g, key=rank) for g in groups.values()]
    classes.sort(key=lambda c: rank(c[0]))
    return classes


@dataclass(frozen=True)
class SignedSchemeForm:
    """Real form presented as ``(s, x) -> (iota(s), sigma(s) x^d + ...)`` with
    ``sigma(s) = +-1``."""

    sigma: tuple[int, ...]
    vertex_involution: tuple[int, ...]
    half_alpha: tuple[Fraction, ...]


def sign_normalize(inv: AntilinearInvolution, S: MappingScheme) -> SignedSchemeForm:
    """Choose square roots b(s) of alpha(s), equal on swapped pairs, and
    return the signs ``sigma(s) = b(s)^d(s) / b(F(s))``."""
    b = tuple(a / 2 for a in inv.alpha)  # alpha in [0,1) so a/2 in [0,1/2)
    sigma = []
    for s in range(S.n):
        t = _mod1(S.degree(s) * b[s] - b[S.images[s]])
        if t == 0:
            sigma.append(1)
        elif t == HALF:
            sigma.append(-1)
        else:
            raise ArithmeticError(f"sign at vertex {s} is not real: angle {t}")
    return SignedSchemeForm(tuple(sigma), inv.vertex_involution, b)


def real_form_dimension(S: MappingScheme, inv: AntilinearInvolution | None = None) -> int:
    """Real dimension of the maps fixed by an involution, from the rank of the
    induced real-linear map on coefficients."""
    if inv is None:
        inv = AntilinearInvolution(tuple(range(S.n)), (Fraction(0),) * S.n)
    slots = [(s, j) for s in range(S.n) for j in range(S.degree(s) - 1)]
    index = {sl: k for k, sl in enumerate(slots)}
    N = len(slots)
    if N == 0:
        return 0
    M = np.zeros((2 * N, 2 * N))
    for (s, j), k in index.items():
        sp = inv.vertex_involution[s]
        c = root(inv.alpha[S.images[s]] - j * inv.alpha[s])
        src = index[(sp, j)]
        # new_k = c * conj(old_src); write old = x + i y
        M[2 * k, 2 * src] = c.real
        M[2 * k, 2 * src + 1] = c.imag
        M[2 * k + 1, 2 * src] = c.imag
        M[2 * k + 1, 2 * src + 1] = -c.real
    sv = np.linalg.svd(M - np.eye(2 * N), compute_uv=False)
    return int(np.sum(sv < 1e-9))
