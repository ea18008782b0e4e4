"""Enumeration and counting of weighted trees and reduced mapping schemes.

Trees are rooted at a weight-zero root; every other node has positive weight.
A one-trunk tree is a tree whose root has exactly one child.  Connected
reduced schemes are built from a necklace of cycle weights with a tree hung
at every cycle vertex, then deduplicated by canonical form.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import product
from math import comb
from typing import Callable

from .scheme import MappingScheme, canonical_form, disjoint_sum

DEFAULT_CAP = 8


class CapExceeded(ValueError):
    pass


def _check_weight(w: int, cap: int, lo: int = 0) -> None:
    if w < lo:
        raise ValueError(f"weight must be >= {lo}, got {w}")
    if w > cap:
        raise CapExceeded(f"weight {w} exceeds the enumeration cap {cap}")


# ---------------------------------------------------------------------------
# closed-form counts


def multiset_count(w: int, count: Callable[[int], int]) -> int:
    """Number of multisets of weighted objects with total weight ``w``, where
    ``count(n)`` objects of weight ``n`` are available."""
    # ways[v] = multisets of total v using objects of weight <= n so far
    ways = [1] + [0] * w
    for n in range(1, w + 1):
        c = count(n)
        if c == 0:
            continue
        new = [0] * (w + 1)
        for v in range(w + 1):
            if ways[v] == 0:
                continue
            k = 0
            while v + k * n <= w:
                new[v + k * n] += ways[v] * comb(c + k - 1, k)
                k += 1
        ways = new
    return ways[w]


@lru_cache(maxsize=None)
def count_trees(w: int) -> int:
    if w < 0:
        raise ValueError("negative weight")
    if w == 0:
        return 1
    return multiset_count(w, count_one_trunk)


@lru_cache(maxsize=None)
def count_one_trunk(w: int) -> int:
    return sum(count_trees(j) for j in range(w))


def count_all_from_connected(w: int, connected_counts: Callable[[int], int]) -> int:
    return multiset_count(w, connected_counts)


# ---------------------------------------------------------------------------
# trees
#
# A tree is a sorted tuple of branches; a branch (k, T) is a child of weight k
# carrying the subtree T.


@lru_cache(maxsize=None)
def _branches(w: int) -> tuple:
    return tuple((k, t) for k in range(1, w + 1) for t in _trees(w - k))


@lru_cache(maxsize=None)
def _trees(w: int) -> tuple:
    if w == 0:
        return ((),)
    pool = [b for n in range(1, w + 1) for b in _branches(n)]
    out = []

    def rec(start, remaining, chosen):
        if remaining == 0:
            out.append(tuple(chosen))
            return
        for i in range(start, len(pool)):
            b = pool[i]
            wb = b[0] + _tree_weight(b[1])
            if wb <= remaining:
                chosen.append(b)
                rec(i, remaining - wb, chosen)
                chosen.pop()

    rec(0, w, [])
    return tuple(sorted(out))


@lru_cache(maxsize=None)
def _tree_weight(t: tuple) -> int:
    return sum(k + _tree_weight(sub) for k, sub in t)


@dataclass(frozen=True)
class WeightedTree:
    """Rooted tree; node 0 is the root (weight 0), ``parents[0]`` is -1."""

    weights: tuple[int, ...]
    parents: tuple[int, ...]

    @property
    def total_weight(self) -> int:
        return sum(self.weights)

    def root_degree(self) -> int:
        return sum(1 for p in self.parents if p == 0)


def _to_weighted(t: tuple) -> WeightedTree:
    weights = [0]
    parents = [-1]

    def add(node, branches):
        for k, sub in branches:
            weights.append(k)
            parents.append(node)
            add(len(weights) - 1, sub)

    add(0, t)
    return WeightedTree(tuple(weights), tuple(parents))


def enumerate_trees(w: int, cap: int = DEFAULT_CAP) -> list[WeightedTree]:
    _check_weight(w, cap)
    return [_to_weighted(t) for t in _trees(w)]


def enumerate_one_trunk(w: int, cap: int = DEFAULT_CAP) -> list[WeightedTree]:
    _check_weight(w, cap)
    return [_to_weighted(t) for t in _trees(w) if len(t) == 1]


# ---------------------------------------------------------------------------
# necklaces and connected schemes


def compositions(n: int, parts: int | None = None, minimum: int = 1):
    """Ordered tuples of integers >= ``minimum`` summing to ``n``."""
    if parts is None:
        if minimum < 1:
            raise ValueError("unbounded part count needs a positive minimum")
        for k in range(1, n // minimum + 1):
            yield from compositions(n, k, minimum)
        return
    if parts == 0:
        if n == 0:
            yield ()
        return
    for first in range(minimum, n - minimum * (parts - 1) + 1):
        for rest in compositions(n - first, parts - 1, minimum):
            yield (first,) + rest


def necklaces(w: int) -> list[tuple[int, ...]]:
    """Cyclic compositions of ``w``, each as its lexicographically least rotation."""
    out = set()
    for c in compositions(w):
        out.add(min(c[i:] + c[:i] for i in range(len(c))))
    return sorted(out)


def _scheme_from_cycle(cycle_weights, trees) -> MappingScheme:
    k = len(cycle_weights)
    weights = list(cycle_weights)
    images = [(i + 1) % k for i in range(k)]
    for i, t in enumerate(trees):
        base = len(weights)
        for node in range(1, len(t.weights)):
            weights.append(t.weights[node])
            p = t.parents[node]
            images.append(i if p == 0 else base + p - 1)
    return MappingScheme(tuple(weights), tuple(images))


@lru_cache(maxsize=None)
def _connected_cell(cycle_weight: int, tree_weight: int) -> tuple:
    found = {}
    for neck in necklaces(cycle_weight):
        k = len(neck)
        for split in compositions(tree_weight, k, minimum=0):
            choices = [[_to_weighted(t) for t in _trees(x)] for x in split]
            for trees in product(*choices):
                S = _scheme_from_cycle(neck, trees)
                cf = canonical_form(S)
                found.setdefault(cf.bytes, cf.scheme)
    return tuple(found[b] for b in sorted(found))


def connected_cell_count(cycle_weight: int, tree_weight: int, cap: int = DEFAULT_CAP) -> int:
    """Connected reduced schemes with the given cycle weight and tree weight."""
    _check_weight(cycle_weight + tree_weight, cap, lo=1)
    if cycle_weight < 1 or tree_weight < 0:
        raise ValueError("cycle weight must be >= 1 and tree weight >= 0")
    return len(_connected_cell(cycle_weight, tree_weight))


def enumerate_connected(w: int, cap: int = DEFAULT_CAP) -> list[MappingScheme]:
    _check_weight(w, cap, lo=1)
    out = [S for wc in range(1, w + 1) for S in _connected_cell(wc, w - wc)]
    out.sort(key=lambda S: canonical_form(S).bytes)
    return out


@lru_cache(maxsize=None)
def _all(w: int) -> tuple:
    pool = []  # (weight, scheme) in a fixed order
    for n in range(1, w + 1):
        pool.extend((n, S) for S in enumerate_connected(n, cap=max(w, DEFAULT_CAP)))
    out = {}

    def rec(start, remaining, acc):
        if remaining == 0:
            cf = canonical_form(acc)
            out[cf.bytes] = cf.scheme
            return
        for i in range(start, len(pool)):
            n, S = pool[i]
            if n <= remaining:
                rec(i, remaining - n, S if acc is None else disjoint_sum(acc, S))

    rec(0, w, None)
    return tuple(out[b] for b in sorted(out))


def enumerate_all(w: int, cap: int = DEFAULT_CAP) -> list[MappingScheme]:
    """All reduced schemes of total weight ``w``, up to isomorphism, sorted by
    canonical bytes."""
    _check_weight(w, cap, lo=1)
    return list(_all(w))


@dataclass(frozen=True)
class CensusRow:
    w: int
    n_trees: int
    n1_trees: int
    n_connected: int
    n_total: int

    def line(self) -> str:
        return f"{self.w} {self.n_trees} {self.n1_trees} {self.n_connected} {self.n_total}"


def census_table(max_w: int, cap: int = DEFAULT_CAP) -> list[CensusRow]:
    _check_weight(max_w, cap, lo=1)
    rows = []
    for w in range(1, max_w + 1):
        trees = _trees(w)
        rows.append(CensusRow(
            w,
            len(trees),
            sum(1 for t in trees if len(t) == 1),
            len(enumerate_connected(w, cap)),
            len(enumerate_all(w, cap)),
        ))
    return rows
