"""Weighted mapping schemes: validation, reduction, structure and canonical forms.

A mapping scheme is a finite set of vertices with a self-map ``F`` and a
non-negative integer weight on every vertex.  The degree of a vertex is its
weight plus one.  Vertices are numbered ``0 .. n-1``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence


class SchemeError(ValueError):
    """Base class for invalid mapping schemes."""


class BadIndex(SchemeError):
    pass


class EmptyScheme(SchemeError):
    pass


class OrphanZeroVertex(SchemeError):
    def __init__(self, vertex: int):
        super().__init__(f"weight-zero vertex {vertex} is not a forward image of a positive-weight vertex")
        self.vertex = vertex


class AllZeroCycle(SchemeError):
    def __init__(self, cycle: Sequence[int]):
        super().__init__(f"cycle {list(cycle)} carries no positive weight")
        self.cycle = tuple(cycle)


class ParseError(SchemeError):
    def __init__(self, line: int, message: str):
        super().__init__(f"line {line}: {message}")
        self.line = line


@dataclass(frozen=True)
class MappingScheme:
    """A validated weighted mapping scheme.

    ``weights[s]`` is the weight of vertex ``s`` and ``images[s]`` is ``F(s)``.
    Construction raises a :class:`SchemeError` subclass when the data does not
    describe a valid scheme.
    """

    weights: tuple[int, ...]
    images: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "weights", tuple(int(w) for w in self.weights))
        object.__setattr__(self, "images", tuple(int(t) for t in self.images))
        _check(self.weights, self.images)

    def __len__(self) -> int:
        return len(self.weights)

    @property
    def n(self) -> int:
        return len(self.weights)

    def degree(self, s: int) -> int:
        return self.weights[s] + 1

    @property
    def degrees(self) -> tuple[int, ...]:
        return tuple(w + 1 for w in self.weights)

    @property
    def total_weight(self) -> int:
        return sum(self.weights)

    @property
    def is_reduced(self) -> bool:
        return all(w >= 1 for w in self.weights)

    def orbit(self, s: int, steps: int) -> list[int]:
        out = [s]
        for _ in range(steps):
            s = self.images[s]
            out.append(s)
        return out


def _find_cycles(images: Sequence[int]) -> list[list[int]]:
    """Cycles of a self-map, each listed in F-order from its smallest vertex."""
    n = len(images)
    state = [0] * n  # 0 unseen, 1 on current path, 2 done
    cycles = []
    for start in range(n):
        if state[start]:
            continue
        path = []
        v = start
        while state[v] == 0:
            state[v] = 1
            path.append(v)
            v = images[v]
        if state[v] == 1:
            cyc = path[path.index(v):]
            k = cyc.index(min(cyc))
            cycles.append(cyc[k:] + cyc[:k])
        for u in path:
            state[u] = 2
    cycles.sort(key=lambda c: c[0])
    return cycles


def _check(weights: Sequence[int], images: Sequence[int]) -> None:
    n = len(weights)
    if n == 0:
        raise EmptyScheme("a mapping scheme needs at least one vertex")
    if len(images) != n:
        raise BadIndex("weights and images have different lengths")
    for s, (w, t) in enumerate(zip(weights, images)):
        if w < 0:
            raise SchemeError(f"vertex {s} has negative weight {w}")
        if not 0 <= t < n:
            raise BadIndex(f"vertex {s} maps to {t}, outside 0..{n - 1}")
    for cyc in _find_cycles(images):
        if all(weights[v] == 0 for v in cyc):
            raise AllZeroCycle(cyc)
    reached = [False] * n
    for s in range(n):
        if weights[s] > 0:
            v = images[s]
            while not reached[v]:
                reached[v] = True
                v = images[v]
    for s in range(n):
        if weights[s] == 0 and not reached[s]:
            raise OrphanZeroVertex(s)


def validate(raw: Iterable[Sequence[int]]) -> MappingScheme:
    """Build a scheme from ``(id, weight, image_id)`` records.

    Ids must be distinct non-negative integers; they are compacted to
    ``0 .. n-1`` in increasing order.
    """
    records = [tuple(int(x) for x in r) for r in raw]
    ids = [r[0] for r in records]
    if len(set(ids)) != len(ids):
        raise BadIndex("duplicate vertex id")
    if any(i < 0 for i in ids):
        raise BadIndex("negative vertex id")
    index = {v: k for k, v in enumerate(sorted(ids))}
    weights = [0] * len(records)
    images = [0] * len(records)
    for vid, w, img in records:
        if img not in index:
            raise BadIndex(f"vertex {vid} maps to unknown id {img}")
        weights[index[vid]] = w
        images[index[vid]] = index[img]
    return MappingScheme(tuple(weights), tuple(images))


def reduce(S: MappingScheme) -> MappingScheme:
    """Drop weight-zero vertices; each kept vertex maps to the first positive
    vertex on the forward orbit of its image."""
    keep = [s for s in range(S.n) if S.weights[s] > 0]
    new = {s: k for k, s in enumerate(keep)}
    images = []
    for s in keep:
        t = S.images[s]
        while S.weights[t] == 0:
            t = S.images[t]
        images.append(new[t])
    return MappingScheme(tuple(S.weights[s] for s in keep), tuple(images))


@dataclass(frozen=True)
class CycleDecomposition:
    cycles: tuple[tuple[int, ...], ...]
    tail_depth: tuple[int, ...]
    free: frozenset[int]

    @property
    def periodic(self) -> frozenset[int]:
        return frozenset(v for c in self.cycles for v in c)


def cycle_decomposition(S: MappingScheme) -> CycleDecomposition:
    cycles = _find_cycles(S.images)
    depth = [-1] * S.n
    for c in cycles:
        for v in c:
            depth[v] = 0
    for s in range(S.n):
        path = []
        v = s
        while depth[v] < 0:
            path.append(v)
            v = S.images[v]
        d = depth[v]
        for u in reversed(path):
            d += 1
            depth[u] = d
    hit = set(S.images)
    free = frozenset(s for s in range(S.n) if s not in hit)
    return CycleDecomposition(tuple(tuple(c) for c in cycles), tuple(depth), free)


def preimages(S: MappingScheme) -> list[list[int]]:
    pre: list[list[int]] = [[] for _ in range(S.n)]
    for s, t in enumerate(S.images):
        pre[t].append(s)
    return pre


def subscheme(S: MappingScheme, vertices: Sequence[int]) -> MappingScheme:
    """Restriction to a forward-invariant vertex set (order preserved)."""
    vs = sorted(vertices)
    new = {v: k for k, v in enumerate(vs)}
    return MappingScheme(tuple(S.weights[v] for v in vs), tuple(new[S.images[v]] for v in vs))


def component_vertex_sets(S: MappingScheme) -> list[list[int]]:
    parent = list(range(S.n))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for s, t in enumerate(S.images):
        a, b = find(s), find(t)
        if a != b:
            parent[max(a, b)] = min(a, b)
    groups: dict[int, list[int]] = {}
    for s in range(S.n):
        groups.setdefault(find(s), []).append(s)
    return [groups[k] for k in sorted(groups)]


def connected_components(S: MappingScheme) -> list[MappingScheme]:
    return [subscheme(S, vs) for vs in component_vertex_sets(S)]


def disjoint_sum(A: MappingScheme, B: MappingScheme) -> MappingScheme:
    off = A.n
    return MappingScheme(A.weights + B.weights, A.images + tuple(t + off for t in B.images))


# ---------------------------------------------------------------------------
# text formats


def serialize(S: MappingScheme) -> str:
    return "".join(f"{s} {S.weights[s]} {S.images[s]}\n" for s in range(S.n))


def parse(text: str) -> MappingScheme:
    """Parse the ``id weight image-id`` line format (``#`` starts a comment)."""
    records = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        body = line.split("#", 1)[0].strip()
        if not body:
            continue
        parts = body.split()
        if len(parts) != 3:
            raise ParseError(lineno, f"expected 3 fields, got {len(parts)}")
        try:
            records.append(tuple(int(p) for p in parts))
        except ValueError:
            raise ParseError(lineno, f"non-integer field in {body!r}") from None
    if not records:
        raise ParseError(0, "no vertices")
    return validate(records)


def to_dot(S: MappingScheme, name: str = "scheme") -> str:
    """Graphviz export; positive-weight vertices are drawn heavy."""
    lines = [f"digraph {name} {{"]
    for s in range(S.n):
        if S.weights[s] > 0:
            lines.append(f'  v{s} [label="{s}", shape=circle, style=bold, penwidth=3];')
        else:
            lines.append(f'  v{s} [label="{s}", shape=circle, style=solid];')
    for s in range(S.n):
        lines.append(f'  v{s} -> v{S.images[s]} [label="{S.degree(s)}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# canonical form
#
# A functional graph is a disjoint union of cycles with rooted trees hanging
# off them, so an exact canonical form comes from canonical codes of the
# hanging trees plus the least rotation of each cycle's code sequence.


@dataclass(frozen=True)
class CanonicalForm:
    bytes: bytes
    relabeling: tuple[int, ...] = field(compare=False)  # old vertex -> new vertex
    scheme: MappingScheme = field(compare=False)


def _tree_codes(S: MappingScheme, dec: CycleDecomposition, pre):
    periodic = dec.periodic
    order = sorted(range(S.n), key=lambda v: -dec.tail_depth[v])
    code: list = [None] * S.n
    kids: list[list[int]] = [[] for _ in range(S.n)]
    for v in order:
        ch = [u for u in pre[v] if u not in periodic]
        ch.sort(key=lambda u: code[u])
        kids[v] = ch
        code[v] = (S.weights[v], tuple(code[u] for u in ch))
    return code, kids


def _least_rotation(seq: list) -> int:
    best = 0
    for i in range(1, len(seq)):
        if seq[i:] + seq[:i] < seq[best:] + seq[:best]:
            best = i
    return best


def canonical_form(S: MappingScheme) -> CanonicalForm:
    dec = cycle_decomposition(S)
    pre = preimages(S)
    code, kids = _tree_codes(S, dec, pre)
    comps = []
    for cyc in dec.cycles:
        seq = [code[v] for v in cyc]
        r = _least_rotation(seq)
        rot = list(cyc[r:] + cyc[:r])
        comps.append((tuple(code[v] for v in rot), rot))
    comps.sort(key=lambda c: c[0])

    emitted: list[int] = []
    for _, rot in comps:
        emitted.extend(rot)
        # preorder over hanging trees, children in code order
        for v in rot:
            todo = list(reversed(kids[v]))
            while todo:
                u = todo.pop()
                emitted.append(u)
                todo.extend(reversed(kids[u]))
    relabel = [0] * S.n
    for new, old in enumerate(emitted):
        relabel[old] = new
    weights = [0] * S.n
    images = [0] * S.n
    for old in range(S.n):
        weights[relabel[old]] = S.weights[old]
        images[relabel[old]] = relabel[S.images[old]]
    canon = MappingScheme(tuple(weights), tuple(images))
    return CanonicalForm(serialize(canon).encode("ascii"), tuple(relabel), canon)


def is_isomorphic(A: MappingScheme, B: MappingScheme) -> bool:
    if A.n != B.n or sorted(A.weights) != sorted(B.weights):
        return False
    return canonical_form(A).bytes == canonical_form(B).bytes


# a few named schemes that come up repeatedly
def fixed_vertex(weight: int) -> MappingScheme:
    return MappingScheme((weight,), (0,))


def cycle_scheme(weights: Sequence[int]) -> MappingScheme:
    k = len(weights)
    return MappingScheme(tuple(weights), tuple((i + 1) % k for i in range(k)))


BITRANSITIVE = cycle_scheme((1, 1))
CAPTURE = MappingScheme((1, 1), (1, 1))
