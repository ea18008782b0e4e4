"""Command-line front end.

Exit status: 0 on success, 1 on usage or input errors, 2 on numeric failures
(root finding, cycle detection, resolution or window problems).
"""
from __future__ import annotations

import argparse
import sys

from . import basins, blaschke, census, hubbard, moduli, render, symmetry
from .dynamics import MapFormatError, parse_complex, parse_map
from .polyroots import RootFindFailure
from .ppm import IoError, write_ppm
from .scheme import SchemeError, canonical_form, is_isomorphic, parse, reduce, serialize, to_dot

NUMERIC_ERRORS = (
    ArithmeticError,
    RootFindFailure,
    basins.ResolutionTooCoarse,
    basins.WindowTooSmall,
    basins.NotHyperbolic,
    blaschke.NoValidRadii,
)


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _floats(text: str, count: int | None = None) -> list[float]:
    try:
        vals = [float(v) for v in text.split(",")]
    except ValueError:
        raise UsageError(f"bad number list {text!r}") from None
    if count is not None and len(vals) != count:
        raise UsageError(f"expected {count} comma-separated numbers, got {text!r}")
    return vals


def _resolution(text: str) -> tuple[int, int]:
    try:
        w, h = (int(v) for v in text.lower().split("x"))
    except ValueError:
        raise UsageError(f"resolution must look like 512x512, got {text!r}") from None
    if w < 1 or h < 1:
        raise UsageError("resolution must be positive")
    return w, h


def _complex(text: str) -> complex:
    try:
        return parse_complex(text)
    except ValueError:
        raise UsageError(f"bad complex number {text!r}") from None


def _read(path: str) -> str:
    try:
        with open(path) as fh:
            return fh.read()
    except OSError as exc:
        raise IoError(f"cannot read {path}: {exc}") from exc


def _fmt(z: complex) -> str:
    z = complex(z.real + 0.0, z.imag + 0.0)  # drop negative zeros
    return f"{z.real:.12g}{z.imag:+.12g}i"


# ---------------------------------------------------------------------------
# subcommands


def cmd_render(args) -> None:
    window = _floats(args.window, 4) if args.window else None
    image = render.render(args.family, window, _resolution(args.res), args.max_iter, args.threads)
    write_ppm(image.rgb(), args.output)


def cmd_julia(args) -> None:
    f = parse_map(_read(args.map))
    if not 0 <= args.vertex < f.scheme.n:
        raise UsageError(f"vertex {args.vertex} out of range")
    window = _floats(args.window, 4) if args.window else basins.default_window(f)
    image = render.render_dynamical_plane(f, args.vertex, window, _resolution(args.res), args.max_iter)
    write_ppm(image.rgb(), args.output)


def cmd_census(args) -> None:
    if args.list:
        for S in census.enumerate_all(args.max_weight):
            print(serialize(S))
        return
    if args.table:
        print("# w N_tree N1 N_c N")
    for row in census.census_table(args.max_weight):
        print(row.line())


def cmd_scheme(args) -> None:
    S = parse(_read(args.file))
    if args.action == "validate":
        print(f"ok: {S.n} vertices, total weight {S.total_weight}")
    elif args.action == "reduce":
        sys.stdout.write(serialize(reduce(S)))
    elif args.action == "dot":
        sys.stdout.write(to_dot(S))
    elif args.action == "iso":
        if not args.other:
            raise UsageError("scheme iso needs two files")
        T = parse(_read(args.other))
        print("isomorphic" if is_isomorphic(S, T) else "not isomorphic")
    elif args.action == "canonical":
        sys.stdout.write(canonical_form(S).bytes.decode())


def cmd_symmetry(args) -> None:
    S = parse(_read(args.file))
    print(f"|Gamma| {len(symmetry.enumerate_gamma(S))}")
    print(f"|Gamma0| {len(symmetry.gamma0(S))}")
    print(f"|Aut| {len(symmetry.automorphisms(S))}")
    print(f"antilinear involutions {len(symmetry.enumerate_antilinear(S))}")
    print(f"real forms {len(symmetry.real_form_classes(S))}")


def cmd_model(args) -> None:
    S = parse(_read(args.file))
    M = blaschke.center_map(S)
    for s, B in enumerate(M.products):
        print(f"vertex {s} -> {S.images[s]}: z^{B.degree}")
    marks = blaschke.enumerate_boundary_markings(M)
    print(f"boundary markings {len(marks)}")
    for q in marks:
        print(" ".join(_fmt(z) for z in q.points))


def cmd_hubbard(args) -> None:
    S = parse(_read(args.file))
    T = hubbard.build_tree(S)
    if args.dot:
        sys.stdout.write(hubbard.tree_to_dot(T))
        return
    report = hubbard.check_axioms(T)
    fat = T.fatou()
    for v in range(T.n):
        kind = "fatou" if fat[v] else "julia"
        print(f"{T.labels[v]} -> {T.labels[T.f[v]]} degree {T.degree[v]} {kind}")
    for a, b in T.edges:
        print(f"edge {T.labels[a]} {T.labels[b]}")
    print("axioms ok" if report.ok else "axioms FAIL: " + "; ".join(report.failures))


def cmd_moduli(args) -> None:
    if args.action == "check":
        a, b, c = _complex(args.alpha), _complex(args.beta), _complex(args.gamma)
        print(f"fixed-point relation residual {abs(moduli.multiplier_relation(a, b, c)):.3e}")
        try:
            print(f"index sum {_fmt(moduli.index_sum((a, b, c)))}")
        except moduli.DegenerateMultiplier as exc:
            print(f"index sum undefined: {exc}")
    elif args.action == "x2l":
        x = [_complex(v) for v in args.values]
        print(" ".join(_fmt(v) for v in moduli.lambdas_from_x(x)))
    elif args.action == "l2x":
        lams = [_complex(v) for v in args.values]
        for x in moduli.x_from_lambdas(lams):
            print(" ".join(_fmt(v) for v in x))


def cmd_extract(args) -> None:
    f = parse_map(_read(args.map))
    window = _floats(args.window, 4) if args.window else None
    labels = basins.label_basins(f, window, args.res, args.max_iter)
    out = basins.extract_schemes(f, labels, max_iter=args.max_iter)
    print("# full")
    sys.stdout.write(serialize(out.full))
    print("# reduced")
    sys.stdout.write(serialize(out.reduced))


def build_parser() -> argparse.ArgumentParser:
    palette = ", ".join([
        "black: every critical orbit bounded",
        "light grey: some critical orbit escapes",
        "white: every critical orbit escapes",
        "red: excluded parameter (a = 1 in rational_a)",
        "rational_a: white when the free critical point is captured by 0 <-> infinity, black otherwise",
    ])
    p = _Parser(prog="schemelab", description="Mapping schemes, their model spaces and parameter pictures.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    r = sub.add_parser("render", help="render a parameter plane to PPM", description=f"Colours: {palette}.")
    r.add_argument("family", choices=sorted(render.FAMILIES))
    r.add_argument("--window", help="x0,x1,y0,y1 (default: per family)")
    r.add_argument("--res", default="512x512")
    r.add_argument("--max-iter", type=int, default=1000)
    r.add_argument("--threads", type=int, default=None)
    r.add_argument("-o", "--output", required=True)
    r.set_defaults(fn=cmd_render)

    j = sub.add_parser("julia", help="render a filled Julia set (black = bounded orbit)")
    j.add_argument("--map", required=True)
    j.add_argument("--vertex", type=int, default=0)
    j.add_argument("--window")
    j.add_argument("--res", default="512x512")
    j.add_argument("--max-iter", type=int, default=1000)
    j.add_argument("-o", "--output", required=True)
    j.set_defaults(fn=cmd_julia)

    c = sub.add_parser("census", help="count mapping schemes by total weight")
    c.add_argument("--max-weight", type=int, required=True)
    c.add_argument("--list", action="store_true", help="print every scheme of exactly this weight")
    c.add_argument("--table", action="store_true", help="print a header line before the rows")
    c.set_defaults(fn=cmd_census)

    s = sub.add_parser("scheme", help="validate, reduce, export or compare schemes")
    s.add_argument("action", choices=["validate", "reduce", "dot", "iso", "canonical"])
    s.add_argument("file")
    s.add_argument("other", nargs="?")
    s.set_defaults(fn=cmd_scheme)

    y = sub.add_parser("symmetry", help="symmetry group orders of a scheme")
    y.add_argument("file")
    y.set_defaults(fn=cmd_symmetry)

    m = sub.add_parser("model", help="center map and boundary markings")
    m.add_argument("action", choices=["center"])
    m.add_argument("file")
    m.set_defaults(fn=cmd_model)

    h = sub.add_parser("hubbard", help="angled tree of a reduced scheme")
    h.add_argument("action", choices=["build"])
    h.add_argument("file")
    h.add_argument("--dot", action="store_true")
    h.set_defaults(fn=cmd_hubbard)

    q = sub.add_parser("moduli", help="fixed-point multiplier algebra")
    q.add_argument("action", choices=["check", "x2l", "l2x"])
    q.add_argument("values", nargs="*", help="three complex numbers for x2l / l2x")
    q.add_argument("--alpha", default="0")
    q.add_argument("--beta", default="0")
    q.add_argument("--gamma", default="0")
    q.set_defaults(fn=cmd_moduli)

    e = sub.add_parser("extract-scheme", help="recover full and reduced schemes from basin pictures")
    e.add_argument("--map", required=True)
    e.add_argument("--res", type=int, default=basins.DEFAULT_RESOLUTION)
    e.add_argument("--window")
    e.add_argument("--max-iter", type=int, default=1000)
    e.set_defaults(fn=cmd_extract)
    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "moduli" and args.action in ("x2l", "l2x") and len(args.values) != 3:
        parser.error(f"moduli {args.action} needs three values")
    try:
        args.fn(args)
    except NUMERIC_ERRORS as exc:
        print(f"schemelab: numeric failure: {exc}", file=sys.stderr)
        return 2
    except (UsageError, IoError, SchemeError, MapFormatError, render.BadWindow, KeyError,
            census.CapExceeded, moduli.OffVariety, ValueError) as exc:
        print(f"schemelab: error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
