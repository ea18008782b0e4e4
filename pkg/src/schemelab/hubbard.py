"""Angled trees with dynamics, their admissibility checks, and the tree built
from a reduced mapping scheme.

An angled tree has a self-map ``f`` on vertices, a local degree ``d(v)`` at
each vertex, and at every vertex ``v`` an angle ``angle(v, e, e')`` in ``Q/Z``
between incident edges.  Edges are unordered pairs stored as sorted tuples.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations

from .scheme import MappingScheme, cycle_decomposition

Edge = tuple[int, int]


class NoCriticalVertex(ValueError):
    pass


def _mod1(x: Fraction) -> Fraction:
    return x - (x.numerator // x.denominator)


def edge(a: int, b: int) -> Edge:
    return (a, b) if a < b else (b, a)


@dataclass
class AngledTree:
    n: int
    edges: list[Edge]
    f: list[int]
    degree: list[int]
    angles: dict[tuple[int, Edge, Edge], Fraction] = field(default_factory=dict)
    labels: list[str] = field(default_factory=list)

    @classmethod
    def from_positions(cls, n, edges, f, degree, positions: dict[int, dict[Edge, Fraction]], labels=None):
        """Build the angle table from a cyclic position of each edge around
        each vertex; the angle from ``e`` to ``e'`` is the position difference."""
        angles = {}
        for v, pos in positions.items():
            for e1, p1 in pos.items():
                for e2, p2 in pos.items():
                    angles[(v, e1, e2)] = _mod1(Fraction(p2) - Fraction(p1))
        return cls(n, [edge(*e) for e in edges], list(f), list(degree), angles, list(labels or []))

    def incident(self, v: int) -> list[Edge]:
        return [e for e in self.edges if v in e]

    def neighbours(self, v: int) -> list[int]:
        return [e[0] if e[1] == v else e[1] for e in self.incident(v)]

    def angle(self, v: int, e1: Edge, e2: Edge) -> Fraction:
        if e1 == e2:
            return Fraction(0)
        return self.angles[(v, e1, e2)]

    def path(self, a: int, b: int) -> list[int]:
        prev = {a: None}
        q = deque([a])
        while q:
            v = q.popleft()
            if v == b:
                break
            for u in self.neighbours(v):
                if u not in prev:
                    prev[u] = v
                    q.append(u)
        out = [b]
        while out[-1] != a:
            out.append(prev[out[-1]])
        return out[::-1]

    def distance(self, a: int, b: int) -> int:
        return len(self.path(a, b)) - 1

    def edge_image(self, e: Edge) -> list[int]:
        """Vertices of the path from ``f(a)`` to ``f(b)`` for the edge ``(a, b)``."""
        a, b = e
        return self.path(self.f[a], self.f[b])

    def image_germ(self, v: int, e: Edge) -> Edge:
        """First edge at ``f(v)`` of the image of the incident edge ``e``."""
        other = e[0] if e[1] == v else e[1]
        p = self.path(self.f[v], self.f[other])
        return edge(p[0], p[1])

    @property
    def total_degree(self) -> int:
        return 1 + sum(d - 1 for d in self.degree)

    def critical_cycles(self) -> set[int]:
        """Vertices on periodic orbits that contain a vertex of degree > 1."""
        out = set()
        for v in range(self.n):
            orbit = [v]
            w = self.f[v]
            while w not in orbit:
                orbit.append(w)
                w = self.f[w]
            if w == v and any(self.degree[u] > 1 for u in orbit):
                out.update(orbit)
        return out

    def fatou(self) -> list[bool]:
        crit = self.critical_cycles()
        out = []
        for v in range(self.n):
            seen = set()
            w = v
            while w not in seen and w not in crit:
                seen.add(w)
                w = self.f[w]
            out.append(w in crit)
        return out

    def is_periodic(self, v: int) -> bool:
        w = self.f[v]
        for _ in range(self.n):
            if w == v:
                return True
            w = self.f[w]
        return False


@dataclass(frozen=True)
class AxiomReport:
    failures: tuple[str, ...]

    @property
    def ok(self) -> bool:
        return not self.failures


def check_axioms(T: AngledTree) -> AxiomReport:
    fails = []
    # tree structure
    if len(T.edges) != T.n - 1 or len(set(T.edges)) != len(T.edges):
        fails.append("edge count is not vertices - 1")
    seen = {0}
    q = deque([0])
    while q:
        v = q.popleft()
        for u in T.neighbours(v):
            if u not in seen:
                seen.add(u)
                q.append(u)
    if len(seen) != T.n:
        fails.append("tree is not connected")
    if fails:
        return AxiomReport(tuple(fails))
    # angle laws
    for v in range(T.n):
        inc = T.incident(v)
        for e1 in inc:
            for e2 in inc:
                a = T.angle(v, e1, e2)
                if (a == 0) != (e1 == e2):
                    fails.append(f"angle law: zero angle between distinct edges at {v}")
                if _mod1(a + T.angle(v, e2, e1)) != 0:
                    fails.append(f"angle law: not skew-symmetric at {v}")
                for e3 in inc:
                    if _mod1(T.angle(v, e1, e2) + T.angle(v, e2, e3) - T.angle(v, e1, e3)) != 0:
                        fails.append(f"angle law: not additive at {v}")
    # dynamics
    if T.total_degree < 2:
        fails.append("total degree below 2")
    for a, b in T.edges:
        if T.f[a] == T.f[b]:
            fails.append(f"edge ({a},{b}) collapses")
    if fails:
        return AxiomReport(tuple(dict.fromkeys(fails)))
    for v in range(T.n):
        inc = T.incident(v)
        for e1, e2 in combinations(inc, 2):
            lhs = T.angle(T.f[v], T.image_germ(v, e1), T.image_germ(v, e2))
            if lhs != _mod1(T.degree[v] * T.angle(v, e1, e2)):
                fails.append(f"angle compatibility fails at {v}")
    fat = T.fatou()
    for v in range(T.n):
        if not fat[v] and T.is_periodic(v):
            m = len(T.incident(v))
            for e1 in T.incident(v):
                for e2 in T.incident(v):
                    if (T.angle(v, e1, e2) * m).denominator != 1:
                        fails.append(f"not normalized at Julia vertex {v}")
    for a, b in T.edges:
        if fat[a] or fat[b]:
            continue
        x, y = a, b
        for _ in range(T.n * T.n):
            x, y = T.f[x], T.f[y]
            if T.distance(x, y) > 1:
                break
        else:
            fails.append(f"Julia edge ({a},{b}) does not expand")
    return AxiomReport(tuple(dict.fromkeys(fails)))


def rotation_number(T: AngledTree, v: int) -> Fraction:
    """Angle by which the fixed vertex ``v`` turns its edges, in ``(0, 1]``."""
    if T.f[v] != v:
        raise ValueError("vertex is not fixed")
    inc = T.incident(v)
    if not inc:
        return Fraction(1)
    e = inc[0]
    r = T.angle(v, e, T.image_germ(v, e))
    return r if r != 0 else Fraction(1)


# ---------------------------------------------------------------------------
# scheme <-> tree


def double_scheme(S: MappingScheme) -> MappingScheme:
    """Insert a weight-zero vertex after every vertex: ``s -> s# -> F(s)``.
    Vertex ``s#`` is numbered ``n + s``."""
    n = S.n
    return MappingScheme(S.weights + (0,) * n, tuple(n + s for s in range(n)) + S.images)


def build_tree(S: MappingScheme) -> AngledTree:
    """Angled tree realizing a reduced scheme: a star around a new fixed
    vertex for each cycle of the doubled scheme, a segment from each
    non-periodic vertex to its successor, and one edge from each chosen
    critical vertex to a central fixed vertex."""
    if not S.is_reduced:
        raise ValueError("scheme must be reduced")
    n = S.n
    dec = cycle_decomposition(S)
    periodic = dec.periodic
    f = [0] * (2 * n)
    for s in range(n):
        f[s] = n + s
        f[n + s] = S.images[s]
    degree = [S.degree(s) for s in range(n)] + [1] * n
    labels = [f"s{s}" for s in range(n)] + [f"s{s}#" for s in range(n)]
    edges: list[Edge] = []
    positions: dict[int, dict[Edge, Fraction]] = {}
    reps = []  # (critical vertex, segment)
    for cyc in dec.cycles:  # each cycle starts at its smallest vertex
        p = len(f)
        f.append(p)
        degree.append(1)
        labels.append(f"p{len(reps)}")
        ring = []
        for v in cyc:
            ring += [v, n + v]
        positions[p] = {}
        for k, v in enumerate(ring):
            e = edge(p, v)
            edges.append(e)
            positions[p][e] = Fraction(k, len(ring))
        reps.append((cyc[0], edge(p, cyc[0])))
    for s in range(n):
        if s not in periodic:
            e = edge(s, n + s)
            edges.append(e)
            reps.append((s, e))
    q = len(f)
    f.append(q)
    degree.append(1)
    labels.append("q")
    positions[q] = {}
    k = len(reps)
    for i, (c, seg) in enumerate(reps):
        e = edge(c, q)
        edges.append(e)
        positions[q][e] = Fraction(i, k)
        positions[c] = {seg: Fraction(0), e: Fraction(1, degree[c])}
    return AngledTree.from_positions(len(f), edges, f, degree, positions, labels)


def scheme_of_tree(T: AngledTree) -> MappingScheme:
    """Critical vertices, each sent to the first critical vertex on its orbit."""
    crit = [v for v in range(T.n) if T.degree[v] > 1]
    if not crit:
        raise NoCriticalVertex("tree has no vertex of degree above one")
    index = {v: i for i, v in enumerate(crit)}
    images = []
    for v in crit:
        w = T.f[v]
        for _ in range(T.n + 1):
            if w in index:
                break
            w = T.f[w]
        else:
            raise NoCriticalVertex(f"orbit of {v} never meets a critical vertex")
        images.append(index[w])
    return MappingScheme(tuple(T.degree[v] - 1 for v in crit), tuple(images))


def tree_to_dot(T: AngledTree) -> str:
    fat = T.fatou()
    lines = ["graph hubbard {"]
    for v in range(T.n):
        label = T.labels[v] if v < len(T.labels) else str(v)
        shape = "box" if fat[v] else "circle"
        lines.append(f'  t{v} [label="{label}", shape={shape}];')
    for a, b in T.edges:
        lines.append(f"  t{a} -- t{b};")
    lines.append("}")
    return "\n".join(lines) + "\n"
