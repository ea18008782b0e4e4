"""Rasterized Fatou-basin labelling and recovery of the mapping scheme of a
hyperbolic generalized polynomial map.

Every vertex gets its own square pixel grid.  Each pixel is iterated until it
escapes or lands very close to a point of an attracting cycle; the pixel is
tagged with the cycle and the phase at which it arrives.  Connected regions
of equal tag are the Fatou components seen at this resolution.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dynamics import Attracted, AttractingCycle, GenPolyMap, classify, escape_radius
from .scheme import MappingScheme, reduce

DEFAULT_RESOLUTION = 1024
GUARD = 2  # pixels


class ResolutionTooCoarse(ValueError):
    pass


class WindowTooSmall(ValueError):
    pass


class NotHyperbolic(ValueError):
    pass


Window = tuple[float, float, float, float]


def pixel_centers(window: Window, width: int, height: int) -> np.ndarray:
    """Complex pixel centers; row 0 is the top (largest imaginary part)."""
    x0, x1, y0, y1 = window
    xs = x0 + (np.arange(width) + 0.5) * (x1 - x0) / width
    ys = y1 - (np.arange(height) + 0.5) * (y1 - y0) / height
    return xs[None, :] + 1j * ys[:, None]


def pixel_of(window: Window, width: int, height: int, z: complex) -> tuple[int, int] | None:
    x0, x1, y0, y1 = window
    i = int(np.floor((z.real - x0) / (x1 - x0) * width))
    j = int(np.floor((y1 - z.imag) / (y1 - y0) * height))
    if 0 <= i < width and 0 <= j < height:
        return j, i
    return None


# ---------------------------------------------------------------------------
# connected components by union-find with vectorized hooking


def label_components(tags: np.ndarray) -> np.ndarray:
    """4-connected components of equal non-negative tags.

    Returns component ids ``0 .. K-1`` numbered in raster order of first
    appearance, and ``-1`` where the tag is negative.
    """
    H, W = tags.shape
    N = H * W
    lab = tags.ravel()
    idx = np.arange(N)
    horiz = idx[:-1][(lab[:-1] == lab[1:]) & (lab[:-1] >= 0) & ((idx[:-1] + 1) % W != 0)]
    vert = idx[:-W][(lab[:-W] == lab[W:]) & (lab[:-W] >= 0)] if H > 1 else idx[:0]
    a = np.concatenate([horiz, vert])
    b = np.concatenate([horiz + 1, vert + W])
    parent = idx.copy()
    while True:
        ra, rb = parent[a], parent[b]
        diff = ra != rb
        if not diff.any():
            break
        lo = np.minimum(ra, rb)[diff]
        hi = np.maximum(ra, rb)[diff]
        np.minimum.at(parent, hi, lo)  # union: hang the larger root under the smaller
        while True:  # path compression to full depth
            pp = parent[parent]
            if np.array_equal(pp, parent):
                break
            parent = pp
    out = np.full(N, -1, dtype=np.int64)
    valid = lab >= 0
    roots = parent[valid]
    _, first, inverse = np.unique(roots, return_index=True, return_inverse=True)
    rank = np.empty(first.size, dtype=np.int64)
    rank[np.argsort(first, kind="stable")] = np.arange(first.size)
    out[valid] = rank[inverse]
    return out.reshape(H, W)


# ---------------------------------------------------------------------------


@dataclass
class BasinLabels:
    window: tuple[Window, ...]  # one window per vertex
    resolution: int
    tags: np.ndarray  # (vertices, H, W): attractor tag, -1 escaped/undecided
    components: np.ndarray  # (vertices, H, W): component id per vertex, -1 none
    attractors: list[tuple[int, int]]  # tag -> (cycle id, phase)
    cycles: list[AttractingCycle]

    def component_at(self, s: int, z: complex) -> int | None:
        pix = pixel_of(self.window[s], self.resolution, self.resolution, z)
        if pix is None:
            return None
        return int(self.components[s][pix])

    def component_sizes(self, s: int) -> np.ndarray:
        c = self.components[s]
        return np.bincount(c[c >= 0].ravel())


def default_window(f: GenPolyMap) -> Window:
    R = escape_radius(f)
    return (-R, R, -R, R)


def label_basins(f: GenPolyMap, window: Window | None = None, resolution: int = DEFAULT_RESOLUTION,
                 max_iter: int = 1000, fates=None) -> BasinLabels:
    fates = classify(f, max_iter) if fates is None else fates
    cycles: dict[int, AttractingCycle] = {}
    for cf in fates:
        if isinstance(cf.fate, Attracted):
            cycles[cf.fate.cycle.id] = cf.fate.cycle
    cyc_list = [cycles[k] for k in sorted(cycles)]
    S = f.scheme
    win = tuple(window if window is not None else default_window(f) for _ in range(S.n))
    R = escape_radius(f)
    N = resolution
    grids = [pixel_centers(win[s], N, N).ravel() for s in range(S.n)]
    z = np.concatenate(grids)
    v = np.repeat(np.arange(S.n), N * N)
    pix = np.arange(S.n * N * N)
    result = np.full(S.n * N * N, -1, dtype=np.int64)
    attractors: list[tuple[int, int]] = []
    tag_of: dict[tuple[int, int], int] = {}
    targets = []  # (vertex, point, cycle id, position, period, radius)
    for cyc in cyc_list:
        for k, (u, w) in enumerate(cyc.points):
            targets.append((u, w, cyc.id, k, cyc.period, 1e-6 * (1 + abs(w))))
    polys = [f.poly(s) for s in range(S.n)]
    images = np.array(S.images)
    step = 0
    block = 8
    while step < max_iter and z.size:
        for _ in range(block):
            for s in range(S.n):
                m = v == s
                if not m.any():
                    continue
                zz = z[m]
                acc = np.full(zz.shape, polys[s][-1])
                with np.errstate(over="ignore", invalid="ignore"):
                    for c in polys[s][-2::-1]:
                        acc = acc * zz + c
                z[m] = acc
            v = images[v]
            step += 1
        with np.errstate(invalid="ignore", over="ignore"):
            gone = ~(np.abs(z) <= R)
        done = gone.copy()
        for u, w, cid, k, period, rad in targets:
            hit = (v == u) & (np.abs(z - w) < rad) & ~done
            if hit.any():
                key = (cid, (k - step) % period)
                if key not in tag_of:
                    tag_of[key] = len(attractors)
                    attractors.append(key)
                result[pix[hit]] = tag_of[key]
                done |= hit
        keep = ~done
        z, v, pix = z[keep], v[keep], pix[keep]
    # make tag numbering independent of arrival order
    order = sorted(range(len(attractors)), key=lambda t: attractors[t])
    remap = np.full(len(attractors) + 1, -1, dtype=np.int64)
    for new, old in enumerate(order):
        remap[old] = new
    tags = np.where(result >= 0, remap[result], -1).reshape(S.n, N, N)
    attractors = [attractors[t] for t in order]
    comps = np.stack([label_components(tags[s]) for s in range(S.n)])
    return BasinLabels(win, N, tags, comps, attractors, cyc_list)


@dataclass(frozen=True)
class ExtractedSchemes:
    full: MappingScheme
    reduced: MappingScheme
    nodes: tuple[tuple[int, int], ...]  # (vertex, component id) for each scheme vertex


def _guarded_component(labels: BasinLabels, s: int, z: complex) -> int:
    N = labels.resolution
    p = pixel_of(labels.window[s], N, N, z)
    if p is None:
        raise WindowTooSmall(f"point {z:.6g} at vertex {s} lies outside the window")
    j, i = p
    if j < GUARD or i < GUARD or j >= N - GUARD or i >= N - GUARD:
        raise WindowTooSmall(f"point {z:.6g} at vertex {s} is too close to the window edge")
    patch = labels.components[s][j - GUARD:j + GUARD + 1, i - GUARD:i + GUARD + 1]
    c = int(labels.components[s][j, i])
    if c < 0 or np.any(patch != c):
        raise ResolutionTooCoarse(f"point {z:.6g} at vertex {s} is within {GUARD} pixels of a component boundary")
    return c


def extract_schemes(f: GenPolyMap, labels: BasinLabels, fates=None, max_iter: int = 1000) -> ExtractedSchemes:
    """Scheme of Fatou components met by critical orbits, and its reduction."""
    fates = classify(f, max_iter) if fates is None else fates
    if not all(isinstance(cf.fate, Attracted) for cf in fates):
        raise NotHyperbolic("every critical orbit must converge to an attracting cycle")
    index: dict[tuple[int, int], int] = {}
    weights: list[int] = []
    succ: dict[int, int] = {}
    for cf in fates:
        s, z = cf.vertex, cf.point
        node = (s, _guarded_component(labels, s, z))
        if node not in index:
            index[node] = len(weights)
            weights.append(0)
        weights[index[node]] += cf.multiplicity
        seen = set()
        cur = index[node]
        while cur not in seen:
            seen.add(cur)
            s, z = f(s, z)
            nxt_node = (s, _guarded_component(labels, s, z))
            if nxt_node not in index:
                index[nxt_node] = len(weights)
                weights.append(0)
            nxt = index[nxt_node]
            if succ.setdefault(cur, nxt) != nxt:
                raise ResolutionTooCoarse("a component appears to map to two different components")
            cur = nxt
    full = MappingScheme(tuple(weights), tuple(succ[k] for k in range(len(weights))))
    nodes = tuple(sorted(index, key=index.get))
    return ExtractedSchemes(full, reduce(full), nodes)
