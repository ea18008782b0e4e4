"""Parameter-plane and dynamical-plane rendering of polynomial map families.

Parameter-plane pixels are classified by how many critical orbits escape:

* ``ALL_BOUNDED`` (black): no critical orbit escapes within ``max_iter``
* ``SOME_ESCAPE`` (light grey): some but not all escape
* ``ALL_ESCAPE`` (white): every critical orbit escapes

The escape test is the one used by :func:`schemelab.dynamics.classify`: the
orbit leaves the disk of radius ``max(2, 2 (1 + max_s sum |a_j|))``.
"""
from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .basins import pixel_centers
from .dynamics import GenPolyMap, escape_radius
from .scheme import BITRANSITIVE, CAPTURE, MappingScheme, fixed_vertex

ALL_BOUNDED, SOME_ESCAPE, ALL_ESCAPE, EXCLUDED, CAPTURED, NOT_CAPTURED = range(6)

PALETTE = np.array([
    (0, 0, 0),
    (200, 200, 200),
    (255, 255, 255),
    (255, 0, 0),
    (255, 255, 255),
    (0, 0, 0),
], dtype=np.uint8)


class BadWindow(ValueError):
    pass


def check_window(window) -> tuple[float, float, float, float]:
    if len(window) != 4:
        raise BadWindow("window needs four numbers x0,x1,y0,y1")
    x0, x1, y0, y1 = (float(v) for v in window)
    if not all(np.isfinite([x0, x1, y0, y1])) or not (x0 < x1 and y0 < y1):
        raise BadWindow(f"degenerate window {window}")
    return x0, x1, y0, y1


def thread_count() -> int:
    n = os.cpu_count() or 1
    env = os.environ.get("SCHEMELAB_THREADS")
    if env:
        try:
            n = min(n, max(1, int(env)))
        except ValueError:
            pass
    return max(1, n)


# ---------------------------------------------------------------------------
# families


@dataclass(frozen=True)
class VectorFamily:
    """Vertex polynomials with per-pixel coefficients.

    ``coeffs[s]`` lists ``a_0 .. a_{d-2}`` as arrays; ``signs[s]`` is the
    leading coefficient (+1 or -1); ``critical`` lists ``(vertex, points)``.
    """

    scheme: MappingScheme
    coeffs: tuple[tuple[np.ndarray, ...], ...]
    signs: tuple[int, ...]
    critical: tuple[tuple[int, np.ndarray], ...]


@dataclass(frozen=True)
class FamilySpec:
    name: str
    description: str
    default_window: tuple[float, float, float, float]
    real_parameters: bool
    vectorize: Callable[[np.ndarray], VectorFamily] | None
    map_at: Callable[[complex], GenPolyMap] | None


def _const(p, value):
    return np.full(p.shape, value, dtype=complex)


def _tricorn(p):
    zero = _const(p, 0)
    return VectorFamily(BITRANSITIVE, ((p,), (np.conj(p),)), (1, 1), ((0, zero), (1, zero)))


def _two_quadratics(S):
    def build(p):
        zero = _const(p, 0)
        c1, c2 = p.real.astype(complex), p.imag.astype(complex)
        return VectorFamily(S, ((c1,), (c2,)), (1, 1), ((0, zero), (1, zero)))
    return build


def _cubic_slice(p):
    c = _const(p, 2 ** -0.5)
    return VectorFamily(fixed_vertex(2), ((p, _const(p, -1.5)),), (1,), ((0, c), (0, -c)))


def _real_cubic(sign):
    def build(p):
        A, b = p.real.astype(complex), p.imag.astype(complex)
        # critical points solve 3 sign z^2 = 3 A, i.e. z^2 = sign * A
        c = np.sqrt(sign * A)
        return VectorFamily(fixed_vertex(2), ((b, -3 * A),), (sign,), ((0, c), (0, -c)))
    return build


PRODUCT = MappingScheme((1, 1), (0, 1))

FAMILIES: dict[str, FamilySpec] = {
    "tricorn": FamilySpec(
        "tricorn", "(s1,z) -> (s2, z^2 + c), (s2,w) -> (s1, w^2 + conj c)",
        (-2.0, 2.0, -2.0, 2.0), False, _tricorn,
        lambda c: GenPolyMap(BITRANSITIVE, ((c,), (complex(c).conjugate(),)))),
    "top": FamilySpec(
        "top", "real c1, c2 on the two-cycle: z^2 + c1 then w^2 + c2",
        (-2.5, 1.0, -2.5, 1.0), True, _two_quadratics(BITRANSITIVE),
        lambda p: GenPolyMap(BITRANSITIVE, ((p.real,), (p.imag,)))),
    "product": FamilySpec(
        "product", "two independent real quadratics z^2 + c1, w^2 + c2",
        (-2.5, 0.75, -2.5, 0.75), True, _two_quadratics(PRODUCT),
        lambda p: GenPolyMap(PRODUCT, ((p.real,), (p.imag,)))),
    "capture": FamilySpec(
        "capture", "(s1,z) -> (s2, z^2 + c1), (s2,w) -> (s2, w^2 + c2), real c1, c2",
        (-3.0, 2.0, -2.5, 0.75), True, _two_quadratics(CAPTURE),
        lambda p: GenPolyMap(CAPTURE, ((p.real,), (p.imag,)))),
    "cubic_slice": FamilySpec(
        "cubic_slice", "z^3 - 1.5 z + b, complex b",
        (-1.5, 1.5, -1.2, 1.2), False, _cubic_slice,
        lambda b: GenPolyMap.polynomial((b, -1.5))),
    "real_cubic_plus": FamilySpec(
        "real_cubic_plus", "x^3 - 3 A x + b with real (A, b)",
        (-1.5, 1.5, -2.0, 2.0), True, _real_cubic(1),
        lambda p: GenPolyMap.polynomial((p.imag, -3 * p.real))),
    "real_cubic_minus": FamilySpec(
        "real_cubic_minus", "-x^3 - 3 A x + b with real (A, b)",
        (-1.5, 1.5, -2.0, 2.0), True, _real_cubic(-1),
        # conjugating by z = i u gives the monic u^3 - 3 A u - i b
        lambda p: GenPolyMap.polynomial((-1j * p.imag, -3 * p.real))),
    "rational_a": FamilySpec(
        "rational_a", "(a - 1) / (z (a - z)); a = 1 excluded",
        (-3.0, 3.0, -3.0, 3.0), False, None, None),
}


def family_params(spec: FamilySpec, window, width: int, height: int) -> np.ndarray:
    return pixel_centers(window, width, height)


# ---------------------------------------------------------------------------
# vectorized escape classification


def _escape_counts(fam: VectorFamily, max_iter: int) -> tuple[np.ndarray, int]:
    S = fam.scheme
    shape = fam.critical[0][1].shape
    A = np.zeros(shape)
    for co in fam.coeffs:
        A = np.maximum(A, sum((np.abs(a) for a in co), np.zeros(shape)))
    R = np.maximum(2.0, 2.0 * (1.0 + A)).ravel()
    flat = [tuple(a.ravel() for a in co) for co in fam.coeffs]
    escaped = np.zeros(R.size, dtype=np.int64)
    for vertex, pts in fam.critical:
        z = pts.ravel().astype(complex)
        idx = np.arange(R.size)
        v = vertex
        rad = R.copy()
        co = [list(c) for c in flat]
        for n in range(max_iter):
            d = S.degree(v)
            acc = fam.signs[v] * z  # leading term, then the zero z^{d-1} coefficient
            with np.errstate(over="ignore", invalid="ignore"):
                for a in reversed(co[v]):
                    acc = acc * z + a
                if d == 1:
                    acc = z
            z = acc
            v = S.images[v]
            if n % 4 == 3 or n == max_iter - 1:
                with np.errstate(invalid="ignore"):
                    out = ~(np.abs(z) <= rad)
                if out.any():
                    escaped[idx[out]] += 1
                    keep = ~out
                    z, idx, rad = z[keep], idx[keep], rad[keep]
                    co = [[a[keep] for a in c] for c in co]
                    if z.size == 0:
                        break
    return escaped.reshape(shape), len(fam.critical)


def classify_parameters(spec: FamilySpec, params: np.ndarray, max_iter: int) -> np.ndarray:
    """Class code for every parameter in ``params`` (any array shape)."""
    params = np.asarray(params, dtype=complex)
    if spec.name == "rational_a":
        return _rational_classes(params, max_iter)
    escaped, total = _escape_counts(spec.vectorize(params), max_iter)
    out = np.where(escaped == 0, ALL_BOUNDED, np.where(escaped == total, ALL_ESCAPE, SOME_ESCAPE))
    return out.astype(np.uint8)


def _rational_classes(a: np.ndarray, max_iter: int) -> np.ndarray:
    """Whether the free critical point ``a/2`` is attracted to the
    superattracting two-cycle ``0 <-> infinity``."""
    shape = a.shape
    a = a.ravel()
    out = np.full(a.size, NOT_CAPTURED, dtype=np.uint8)
    excluded = np.abs(a - 1) < 1e-12
    out[excluded] = EXCLUDED
    live = np.nonzero(~excluded)[0]
    av = a[live]
    # near 0 the second iterate behaves like -a^2 z^2 / (a - 1)
    eps = np.minimum(1e-3, 0.01 * np.abs(av - 1) / np.maximum(1.0, np.abs(av)) ** 2)
    z = av / 2
    for _ in range(max_iter):
        near0 = np.abs(z) < eps
        if near0.any():
            out[live[near0]] = CAPTURED
            keep = ~near0
            live, av, eps, z = live[keep], av[keep], eps[keep], z[keep]
            if z.size == 0:
                break
        with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
            z = (av - 1) / (z * (av - z))
        z = np.where(np.isfinite(z), z, 1e300)
        # one more step from (near) infinity lands near 0
        with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
            big = np.abs(z) > 1e150
            z = np.where(big, 0j, z)
    return out.reshape(shape)


@dataclass
class RasterImage:
    classes: np.ndarray  # (height, width) uint8 class codes

    @property
    def height(self) -> int:
        return self.classes.shape[0]

    @property
    def width(self) -> int:
        return self.classes.shape[1]

    def rgb(self) -> np.ndarray:
        return PALETTE[self.classes]


def _row_blocks(height: int, threads: int) -> list[tuple[int, int]]:
    k = max(1, min(height, threads * 4))
    edges = np.linspace(0, height, k + 1).astype(int)
    return [(int(a), int(b)) for a, b in zip(edges[:-1], edges[1:]) if b > a]


def render(family: str, window=None, res: tuple[int, int] = (512, 512), max_iter: int = 1000,
           threads: int | None = None) -> RasterImage:
    if family not in FAMILIES:
        raise KeyError(f"unknown family {family!r}; choose from {', '.join(FAMILIES)}")
    spec = FAMILIES[family]
    window = check_window(window if window is not None else spec.default_window)
    width, height = res
    if width < 1 or height < 1:
        raise BadWindow("resolution must be positive")
    params = pixel_centers(window, width, height)
    threads = thread_count() if threads is None else threads
    blocks = _row_blocks(height, threads)
    out = np.zeros((height, width), dtype=np.uint8)

    def work(block):
        a, b = block
        return block, classify_parameters(spec, params[a:b], max_iter)

    if threads == 1:
        results = map(work, blocks)
    else:
        pool = ThreadPoolExecutor(max_workers=threads)
        results = pool.map(work, blocks)
    for (a, b), cls in results:
        out[a:b] = cls
    if threads != 1:
        pool.shutdown()
    return RasterImage(out)


def render_dynamical_plane(f: GenPolyMap, vertex: int, window, res: tuple[int, int] = (512, 512),
                           max_iter: int = 1000) -> RasterImage:
    """Filled Julia set at one vertex: black pixels have bounded orbits."""
    window = check_window(window)
    width, height = res
    z = pixel_centers(window, width, height).ravel()
    R = escape_radius(f)
    idx = np.arange(z.size)
    bounded = np.ones(z.size, dtype=bool)
    v = vertex
    polys = [f.poly(s) for s in range(f.scheme.n)]
    for n in range(max_iter):
        acc = np.full(z.shape, polys[v][-1])
        with np.errstate(over="ignore", invalid="ignore"):
            for c in polys[v][-2::-1]:
                acc = acc * z + c
        z = acc
        v = f.scheme.images[v]
        with np.errstate(invalid="ignore"):
            out = ~(np.abs(z) <= R)
        if out.any():
            bounded[idx[out]] = False
            keep = ~out
            z, idx = z[keep], idx[keep]
            if z.size == 0:
                break
    classes = np.where(bounded, ALL_BOUNDED, ALL_ESCAPE).astype(np.uint8)
    return RasterImage(classes.reshape(height, width))
