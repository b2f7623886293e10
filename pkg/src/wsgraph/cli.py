"""Command-line front end.

Exit status: 0 on success, 1 on usage errors (bad flags, missing files),
2 when a computation or input validation fails.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path
from typing import Sequence

import numpy as np

from . import __version__
from . import io as wio
from .errors import WsgError
from .generators import make_antitree, make_sym_tree
from .graph import WeightedGraph, curvature, detect_weak_symmetry, layer
from .profile import GrowthRule, SymmetricProfile, reduced_operator, validate_profile
from .semigroup import decompose, heat_kernel, restrict
from .spectral import comparison_report, li_estimate, spectrum_report
from .stochastic import classify, mass_deficit, sc_transfer

GENERATOR_HELP = (
    "antitree:BETA, regular-tree:K, poly-tree:D[:C] (k(r) = round(C (r+1)^D)) or half-line"
)


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


# ---------------------------------------------------------------------------
# argument helpers
# ---------------------------------------------------------------------------


def parse_t_grid(spec: str, log: bool = False) -> np.ndarray:
    """``a:b:n`` -> n points from a to b inclusive, linear or logarithmic."""
    parts = spec.split(":")
    if len(parts) != 3:
        raise UsageError(f"time grid {spec!r} must look like a:b:n")
    try:
        a, b, n = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError:
        raise UsageError(f"time grid {spec!r} must look like a:b:n") from None
    if n < 1 or a < 0 or b < a or (n == 1 and a != b):
        raise UsageError(f"time grid {spec!r} needs 0 <= a <= b and n >= 1")
    if log:
        if a <= 0:
            raise UsageError("a logarithmic time grid needs a > 0")
        return np.geomspace(a, b, n)
    return np.linspace(a, b, n)


def rule_from_spec(spec: str) -> GrowthRule:
    kind, _, rest = spec.partition(":")
    args = rest.split(":") if rest else []
    try:
        if kind == "antitree" and len(args) == 1:
            return GrowthRule.antitree(float(args[0]))
        if kind == "regular-tree" and len(args) == 1:
            return GrowthRule.regular_tree(int(args[0]))
        if kind == "poly-tree" and len(args) in (1, 2):
            coeff = float(args[1]) if len(args) == 2 else 1.0
            return GrowthRule.tree(float(args[0]), coeff)
        if kind == "half-line" and not args:
            return GrowthRule.tree(0.0, 1.0)
    except ValueError:
        pass
    raise UsageError(f"unknown source {spec!r}; expected a .wg/.wsp file or {GENERATOR_HELP}")


def load_source(spec: str, radius: int) -> WeightedGraph | SymmetricProfile:
    path = Path(spec)
    if path.suffix in (".wg", ".wsp"):
        if not path.is_file():
            raise UsageError(f"no such file: {spec}")
        return wio.read_graph(path) if path.suffix == ".wg" else wio.read_profile(path)
    return SymmetricProfile.from_rule(rule_from_spec(spec), radius)


def _emit(lines: Sequence[str]) -> None:
    sys.stdout.write("".join(line + "\n" for line in lines))


def _out_stem(out: str) -> Path:
    p = Path(out)
    return p.with_suffix("") if p.suffix in (".wg", ".wsp", ".csv") else p


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------


def cmd_generate(args) -> None:
    if args.antitree_beta is not None:
        graph, profile = make_antitree(args.antitree_beta, args.radius)
    else:
        spec = args.tree
        if spec is None:
            raise UsageError("generate needs --antitree-beta or --tree")
        if "," in spec:
            try:
                k = [int(x) for x in spec.split(",")]
            except ValueError:
                raise UsageError(f"bad branching list {spec!r}") from None
            graph, profile = make_sym_tree(lambda r: k[min(r, len(k) - 1)], args.radius)
        else:
            rule = rule_from_spec(spec)
            if rule.kind != "tree":
                raise UsageError("--tree needs a tree generator")
            graph, profile = make_sym_tree(rule, args.radius)
    stem = _out_stem(args.out)
    wio.write_graph(graph, stem.with_suffix(".wg"))
    wio.write_profile(profile, stem.with_suffix(".wsp"))
    sizes = layer(graph).sphere_sizes()
    _emit([
        f"vertices: {graph.n}",
        f"edges: {graph.num_edges}",
        f"sphere sizes: {','.join(map(str, sizes))}",
        f"wrote: {stem.with_suffix('.wg')}",
        f"wrote: {stem.with_suffix('.wsp')}",
    ])


def cmd_analyze(args) -> None:
    path = Path(args.graph)
    if not path.is_file():
        raise UsageError(f"no such file: {args.graph}")
    graph = wio.read_graph(path)
    root = graph.root if args.root is None else args.root
    lay = layer(graph, root)
    cur = curvature(graph, lay)
    q = graph.potential / graph.measure
    rows = [
        (x, int(lay.radius_of[x]), float(cur.kappa_plus[x]), float(cur.kappa_minus[x]), float(q[x]))
        for r in range(lay.R + 1) for x in lay.spheres[r].tolist()
    ]
    if args.out:
        wio.write_csv(args.out, ["x", "r", "kappa_plus", "kappa_minus", "q"], rows)
    verdict, profile = detect_weak_symmetry(graph, root, args.tol)
    lines = [
        f"vertices: {graph.n}",
        f"edges: {graph.num_edges}",
        f"root: {root}",
        f"radius: {lay.R}",
        f"sphere sizes: {','.join(map(str, lay.sphere_sizes()))}",
        "x,r,kappa_plus,kappa_minus,q",
    ]
    lines += [f"{x},{r},{wio.fmt(kp)},{wio.fmt(km)},{wio.fmt(qq)}" for x, r, kp, km, qq in rows]
    lines.append(f"weakly spherically symmetric: {verdict.outcome.value}")
    for name, val in verdict.evidence["max_spread"].items():
        lines.append(f"max sphere spread of {name}: {val:.6g}")
    if profile is not None:
        bal = validate_profile(profile)
        lines.append(f"balance check: {bal.outcome.value} "
                     f"(max relative defect {bal.evidence['max_balance_defect']:.3g})")
    else:
        for name, radii in verdict.evidence["violating_radii"].items():
            if radii:
                lines.append(f"{name} varies on radii: {','.join(map(str, radii))}")
    if args.out:
        lines.append(f"wrote: {args.out}")
    _emit(lines)


def cmd_heat(args) -> None:
    src = load_source(args.src, max(args.radius, 1))
    ts = parse_t_grid(args.t_grid_log or args.t_grid, bool(args.t_grid_log))
    if isinstance(src, SymmetricProfile):
        d = decompose(reduced_operator(src, args.radius))
        x = 0 if args.x is None else args.x
    else:
        lay = layer(src)
        d = decompose(restrict(src, lay, args.radius))
        x = src.root if args.x is None else args.x
    ys = [int(v) for v in d.labels] if args.y is None else [args.y]
    rows = [(float(t), x, y, heat_kernel(d, float(t), x, y)) for t in ts for y in ys]
    wio.write_csv(args.out, ["t", "x", "y", "value"], rows)
    _emit([
        f"ball radius: {args.radius}",
        f"dimension: {d.size}",
        f"lambda0: {d.eigenvalues[0]:.6g}",
        f"rows: {len(rows)}",
        f"wrote: {args.out}",
    ])


def cmd_spectrum(args) -> None:
    src = load_source(args.src, max(args.r_max or 60, 1))
    rep = spectrum_report(src, args.tol, args.r_max)
    lines = rep.lines()
    if args.out:
        stem = _out_stem(args.out)
        f = stem.with_name(stem.name + "_lambda0.csv")
        wio.write_csv(f, ["i", "lambda0_dirichlet"], rep.exhaustion.trace)
        lines.append(f"wrote: {f}")
        if rep.probe is not None:
            f = stem.with_name(stem.name + "_exterior.csv")
            wio.write_csv(f, ["i", "lambda0_exterior"], rep.probe.exterior_trace)
            lines.append(f"wrote: {f}")
        if args.t_grid or args.t_grid_log:
            ts = parse_t_grid(args.t_grid_log or args.t_grid, bool(args.t_grid_log))
            i = int(rep.exhaustion.radii[-1])
            if isinstance(src, SymmetricProfile):
                        d, x = decompose(reduced_operator(src, i)), 0
            else:
                d, x = decompose(restrict(src, layer(src), i)), src.root
            f = stem.with_name(stem.name + "_li.csv")
            wio.write_csv(f, ["t", "li_value"], zip(ts.tolist(), li_estimate(d, x, x, ts).tolist()))
            lines.append(f"wrote: {f}")
    _emit(lines)


def cmd_stochastic(args) -> None:
    src = load_source(args.src, 60)
    if isinstance(src, SymmetricProfile):
        rep = classify(src, args.alpha, args.t, args.r_max)
        lines = rep.lines()
        trace = rep.mass.trace if rep.mass is not None else []
    else:
        res = mass_deficit(src, args.t, r_max=args.r_max)
        lines = [
            "verdict: Undetermined",
            "reason: explicit finite graph; only numerical mass evidence is available",
            f"t: {args.t:g}",
            f"mass deficit estimate: {res.deficit:.6g}",
            f"mass trace converged: {'yes' if res.converged else 'no'}",
        ]
        trace = res.trace.trace
    if args.out:
        wio.write_csv(args.out, ["radius", "mass_value"], trace)
        lines.append(f"wrote: {args.out}")
    _emit(lines)


def cmd_compare(args) -> None:
    path = Path(args.graph)
    if not path.is_file():
        raise UsageError(f"no such file: {args.graph}")
    graph = wio.read_graph(path)
    profile = load_source(args.profile, max(args.radius + 1, layer(graph).R))
    if not isinstance(profile, SymmetricProfile):
        raise UsageError("the second argument must be a profile (.wsp or generator)")
    ts = parse_t_grid(args.t_grid_log or args.t_grid, bool(args.t_grid_log))
    rep = comparison_report(graph, profile, ts.tolist(), args.radius)
    lines = rep.lines()
    lines += sc_transfer(graph, profile).lines()
    _emit(lines)


# ---------------------------------------------------------------------------
# entry point
# ---------------------------------------------------------------------------


def _add_grid(p, required: bool) -> None:
    g = p.add_mutually_exclusive_group(required=required)
    g.add_argument("--t-grid", metavar="A:B:N", help="N linearly spaced times from A to B")
    g.add_argument("--t-grid-log", metavar="A:B:N", help="N log-spaced times from A to B")


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="wsgraph", description="Heat kernels, spectra and stochastic completeness of weighted graphs.")
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    g = sub.add_parser("generate", help="write a generated graph (.wg) and its profile (.wsp)")
    kind = g.add_mutually_exclusive_group(required=True)
    kind.add_argument("--antitree-beta", type=float, metavar="B")
    kind.add_argument("--tree", metavar="SPEC", help="regular-tree:K, poly-tree:D[:C], half-line or k0,k1,...")
    g.add_argument("--radius", type=int, required=True)
    g.add_argument("--out", required=True, help="output stem; .wg and .wsp are appended")
    g.set_defaults(func=cmd_generate)

    a = sub.add_parser("analyze", help="curvatures, symmetry verdict and balance check")
    a.add_argument("graph")
    a.add_argument("--root", type=int)
    a.add_argument("--tol", type=float, default=1e-9)
    a.add_argument("--out", help="CSV file for per-vertex curvatures")
    a.set_defaults(func=cmd_analyze)

    h = sub.add_parser("heat", help="restricted heat kernel on a ball")
    h.add_argument("src", help=f".wg, .wsp or {GENERATOR_HELP}")
    _add_grid(h, True)
    h.add_argument("--radius", type=int, required=True)
    h.add_argument("--x", type=int)
    h.add_argument("--y", type=int)
    h.add_argument("--out", required=True)
    h.set_defaults(func=cmd_heat)

    s = sub.add_parser("spectrum", help="bottom of the spectrum")
    s.add_argument("src")
    s.add_argument("--tol", type=float, default=1e-8)
    s.add_argument("--r-max", type=int)
    s.add_argument("--out", help="stem for trace CSV files")
    _add_grid(s, False)
    s.set_defaults(func=cmd_spectrum)

    st = sub.add_parser("stochastic", help="stochastic completeness at infinity")
    st.add_argument("src")
    st.add_argument("--t", type=float, default=1.0)
    st.add_argument("--alpha", type=float, default=1.0)
    st.add_argument("--r-max", type=int, default=200)
    st.add_argument("--out", help="CSV file for the mass trace")
    st.set_defaults(func=cmd_stochastic)

    c = sub.add_parser("compare", help="heat kernel and ground state comparison against a profile")
    c.add_argument("graph")
    c.add_argument("profile")
    _add_grid(c, True)
    c.add_argument("--radius", type=int, required=True)
    c.set_defaults(func=cmd_compare)
    return ap


def _validate(args) -> None:
    for name in ("radius", "r_max"):
        v = getattr(args, name, None)
        if v is not None and v < (1 if name == "r_max" else 0):
            raise UsageError(f"--{name.replace('_', '-')} must be non-negative")
    for name in ("tol", "t", "alpha"):
        v = getattr(args, name, None)
        if v is not None and not v > 0:
            raise UsageError(f"--{name} must be positive")


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    try:
        _validate(args)
        args.func(args)
    except UsageError as e:
        parser.print_usage(sys.stderr)
        sys.stderr.write(f"wsgraph: error: {e}\n")
        return 1
    except WsgError as e:
        sys.stderr.write(f"wsgraph: {e}\n")
        return 2
    except (ValueError, OSError) as e:
        sys.stderr.write(f"wsgraph: {type(e).__name__}: {e}\n")
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
