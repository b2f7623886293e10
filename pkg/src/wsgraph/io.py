"""Text formats: ``.wg`` graphs, ``.wsp`` profile tables and CSV traces.

All floats are written with 17 significant digits, which round-trips IEEE
doubles exactly.
"""

from __future__ import annotations

import csv
import io
import math
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .errors import BalanceViolation, GraphValidationError, ParseError
from .graph import WeightedGraph, build_graph
from .profile import SymmetricProfile, validate_profile

PROFILE_HEADER = ["r", "sphere_measure", "kappa_plus", "kappa_minus", "q"]


def fmt(x: float) -> str:
    return format(float(x), ".17g")


# ---------------------------------------------------------------------------
# graphs
# ---------------------------------------------------------------------------


def _number(tok: str, line: int, what: str) -> float:
    try:
        val = float(tok)
    except ValueError:
        raise ParseError(f"{what} {tok!r} is not a number", line) from None
    if not math.isfinite(val):
        raise ParseError(f"{what} {tok!r} is not finite", line)
    return val


def _integer(tok: str, line: int, what: str) -> int:
    try:
        return int(tok)
    except ValueError:
        raise ParseError(f"{what} {tok!r} is not an integer", line) from None


def parse_graph(text: str) -> WeightedGraph:
    """Parse ``vertex <id> <m> <c>``, ``edge <u> <v> <b>`` and ``root <id>`` lines.

    ``#`` starts a comment.  Per-line problems raise :class:`ParseError`
    with the line number; whole-graph problems (connectivity, ids) raise
    the matching validation error.  The root defaults to vertex 0.
    """
    vertices: list[tuple[int, float, float]] = []
    edges: list[tuple[int, int, float]] = []
    vertex_line: dict[int, int] = {}
    edge_line: dict[tuple[int, int], int] = {}
    root = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tok = line.split()
        kind = tok[0]
        if kind == "vertex":
            if len(tok) != 4:
                raise ParseError("expected 'vertex <id> <m> <c>'", lineno)
            vid = _integer(tok[1], lineno, "vertex id")
            m = _number(tok[2], lineno, "measure")
            c = _number(tok[3], lineno, "potential")
            if vid in vertex_line:
                raise ParseError(f"vertex {vid} already declared on line {vertex_line[vid]}", lineno)
            if m <= 0:
                raise ParseError(f"measure of vertex {vid} must be positive", lineno)
            if c < 0:
                raise ParseError(f"potential of vertex {vid} must be non-negative", lineno)
            vertex_line[vid] = lineno
            vertices.append((vid, m, c))
        elif kind == "edge":
            if len(tok) != 4:
                raise ParseError("expected 'edge <u> <v> <b>'", lineno)
            u = _integer(tok[1], lineno, "edge endpoint")
            v = _integer(tok[2], lineno, "edge endpoint")
            b = _number(tok[3], lineno, "edge weight")
            if u == v:
                raise ParseError(f"self-loop at vertex {u}", lineno)
            if b <= 0:
                raise ParseError(f"edge weight {b} must be positive", lineno)
            key = (min(u, v), max(u, v))
            if key in edge_line:
                raise ParseError(f"edge {key} already declared on line {edge_line[key]}", lineno)
            edge_line[key] = lineno
            edges.append((u, v, b))
        elif kind == "root":
            if len(tok) != 2:
                raise ParseError("expected 'root <id>'", lineno)
            if root is not None:
                raise ParseError("root declared twice", lineno)
            root = _integer(tok[1], lineno, "root")
        else:
            raise ParseError(f"unknown record {kind!r}", lineno)
    for (u, v), lineno in edge_line.items():
        for w in (u, v):
            if w not in vertex_line:
                raise ParseError(f"edge uses undeclared vertex {w}", lineno)
    if not vertices:
        raise ParseError("no vertices declared")
    return build_graph(vertices, edges, root)


def read_graph(path: str | Path) -> WeightedGraph:
    return parse_graph(Path(path).read_text(encoding="utf-8"))


def format_graph(graph: WeightedGraph) -> str:
    out = io.StringIO()
    out.write(f"# weighted graph: {graph.n} vertices, {graph.num_edges} edges\n")
    out.write(f"root {graph.root}\n")
    for x in range(graph.n):
        out.write(f"vertex {x} {fmt(graph.measure[x])} {fmt(graph.potential[x])}\n")
    for u, v, w in zip(graph.edge_u.tolist(), graph.edge_v.tolist(), graph.edge_w.tolist()):
        out.write(f"edge {u} {v} {fmt(w)}\n")
    return out.getvalue()


def write_graph(graph: WeightedGraph, path: str | Path) -> None:
    Path(path).write_text(format_graph(graph), encoding="utf-8")


# ---------------------------------------------------------------------------
# profiles
# ---------------------------------------------------------------------------


def parse_profile(text: str, tol: float = 1e-9) -> SymmetricProfile:
    """Parse a ``.wsp`` table; the result carries no growth rule."""
    rows = list(csv.reader(io.StringIO(text)))
    rows = [(i, r) for i, r in enumerate(rows, start=1) if any(c.strip() for c in r)]
    if not rows:
        raise ParseError("empty profile file")
    lineno, header = rows[0]
    if [h.strip() for h in header] != PROFILE_HEADER:
        raise ParseError(f"header must be {','.join(PROFILE_HEADER)}", lineno)
    cols: list[list[float]] = [[], [], [], []]
    body = rows[1:]
    if not body:
        raise ParseError("profile has no rows")
    for k, (lineno, row) in enumerate(body):
        if len(row) != 5:
            raise ParseError(f"expected 5 fields, got {len(row)}", lineno)
        if _integer(row[0].strip(), lineno, "radius") != k:
            raise ParseError(f"radii must run 0, 1, 2, ... (expected {k})", lineno)
        last = k == len(body) - 1
        for j, name in enumerate(PROFILE_HEADER[1:], start=1):
            tok = row[j].strip()
            if tok == "" and name == "kappa_plus" and last:
                cols[j - 1].append(math.nan)
            elif tok == "":
                raise ParseError(f"missing {name}", lineno)
            else:
                cols[j - 1].append(_number(tok, lineno, name))
    m, kp, km, q = (np.array(c) for c in cols)
    if km[0] != 0:
        raise BalanceViolation(f"kappa_minus(0) must be 0, got {fmt(km[0])}")
    p = SymmetricProfile(m, kp, km, q)
    check = validate_profile(p, tol)
    if not check.positive:
        problems = check.evidence["problems"]
        if any("balance" in s for s in problems):
            raise BalanceViolation("; ".join(problems))
        raise GraphValidationError("; ".join(problems))
    return p


def read_profile(path: str | Path) -> SymmetricProfile:
    return parse_profile(Path(path).read_text(encoding="utf-8"))


def format_profile(p: SymmetricProfile) -> str:
    out = io.StringIO()
    out.write(",".join(PROFILE_HEADER) + "\n")
    for r in range(p.R + 1):
        kp = "" if math.isnan(p.kappa_plus[r]) else fmt(p.kappa_plus[r])
        out.write(f"{r},{fmt(p.sphere_measure[r])},{kp},{fmt(p.kappa_minus[r])},{fmt(p.q[r])}\n")
    return out.getvalue()


def write_profile(p: SymmetricProfile, path: str | Path) -> None:
    Path(path).write_text(format_profile(p), encoding="utf-8")


# ---------------------------------------------------------------------------
# CSV traces
# ---------------------------------------------------------------------------


def format_csv(header: Sequence[str], rows: Iterable[Sequence]) -> str:
    out = io.StringIO()
    out.write(",".join(header) + "\n")
    for row in rows:
        out.write(",".join(fmt(v) if isinstance(v, (float, np.floating)) else str(v) for v in row))
        out.write("\n")
    return out.getvalue()


def write_csv(path: str | Path, header: Sequence[str], rows: Iterable[Sequence]) -> None:
    Path(path).write_text(format_csv(header, rows), encoding="utf-8")
