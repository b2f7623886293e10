"""Explicit graph generators: antitrees, trees, half-lines and decorations.

Vertices are numbered sphere by sphere, so ids increase with the distance
to the root (vertex 0).  All generated graphs are unweighted (b ≡ 1), with
m ≡ 1 and c ≡ 0.
"""

from __future__ import annotations

from typing import Callable, Sequence

import numpy as np

from .errors import SizeOverflow
from .graph import WeightedGraph, layer
from .profile import GrowthRule, SymmetricProfile

DEFAULT_MAX_VERTICES = 200_000
DEFAULT_MAX_EDGES = 10_000_000


def _unweighted(n: int, u: np.ndarray, v: np.ndarray) -> WeightedGraph:
    return WeightedGraph(n, u, v, np.ones(u.size), np.ones(n), np.zeros(n), 0)


def _check_size(n: int, edges: int, max_vertices: int, max_edges: int) -> None:
    if n > max_vertices:
        raise SizeOverflow(f"{n} vertices exceed the cap of {max_vertices}")
    if edges > max_edges:
        raise SizeOverflow(f"{edges} edges exceed the cap of {max_edges}")


def antitree_from_sizes(
    sizes: Sequence[int],
    max_vertices: int = DEFAULT_MAX_VERTICES,
    max_edges: int = DEFAULT_MAX_EDGES,
) -> WeightedGraph:
    """Join every vertex of S_r to every vertex of S_{r+1}."""
    sizes = [int(s) for s in sizes]
    if not sizes or sizes[0] != 1 or min(sizes) < 1:
        raise ValueError("sphere sizes must start with 1 and be positive")
    n = sum(sizes)
    n_edges = sum(a * b for a, b in zip(sizes, sizes[1:]))
    _check_size(n, n_edges, max_vertices, max_edges)
    start = np.concatenate([[0], np.cumsum(sizes)])
    us, vs = [], []
    for r in range(len(sizes) - 1):
        inner = np.arange(start[r], start[r + 1])
        outer = np.arange(start[r + 1], start[r + 2])
        uu, vv = np.meshgrid(inner, outer, indexing="ij")
        us.append(uu.ravel())
        vs.append(vv.ravel())
    if us:
        u, v = np.concatenate(us), np.concatenate(vs)
    else:
        u = v = np.zeros(0, dtype=np.int64)
    return _unweighted(n, u, v)


def make_antitree(
    beta: float | None = None,
    R: int = 1,
    sizes: Sequence[int] | None = None,
    max_vertices: int = DEFAULT_MAX_VERTICES,
) -> tuple[WeightedGraph, SymmetricProfile]:
    """Antitree with |S_r| = max(1, round(r**beta)) or with explicit sphere sizes.

    With ``beta`` the profile carries the growth rule and κ+(R) from it; with
    ``sizes`` the profile is tabulated and κ+(R) is left open.
    """
    if (beta is None) == (sizes is None):
        raise ValueError("give exactly one of beta or sizes")
    if sizes is not None:
        sizes = [int(s) for s in sizes]
        R = len(sizes) - 1
    if R < 1:
        raise ValueError("R must be at least 1")
    if beta is not None:
        rule = GrowthRule.antitree(beta)
        profile = SymmetricProfile.from_rule(rule, R)
        sizes = [int(s) for s in rule.antitree_sizes(R + 1)]
    else:
        s = np.asarray(sizes, dtype=float)
        profile = SymmetricProfile(
            s, np.concatenate([s[1:], [np.nan]]), np.concatenate([[0.0], s[:-1]]), np.zeros(s.size)
        )
    return antitree_from_sizes(sizes, max_vertices), profile


def make_tree(
    children: Callable[[int, int], int],
    R: int,
    max_vertices: int = DEFAULT_MAX_VERTICES,
) -> WeightedGraph:
    """Tree to depth R in which vertex number ``j`` of S_r gets ``children(r, j)`` children."""
    parents = []
    frontier = 1
    n = 1
    for r in range(R):
        counts = [int(children(r, j)) for j in range(frontier)]
        if min(counts) < 1:
            raise ValueError("every vertex below depth R needs at least one child")
        total = sum(counts)
        if n + total > max_vertices:
            raise SizeOverflow(f"more than {max_vertices} vertices by radius {r + 1}")
        first = n - frontier
        parents.append(np.repeat(np.arange(first, first + frontier), counts))
        n += total
        frontier = total
    u = np.concatenate(parents) if parents else np.zeros(0, dtype=np.int64)
    v = np.arange(1, n)
    return _unweighted(n, u, v)


def make_sym_tree(
    branching: Callable[[int], int] | Sequence[int] | GrowthRule,
    R: int,
    max_vertices: int = DEFAULT_MAX_VERTICES,
) -> tuple[WeightedGraph, SymmetricProfile]:
    """Spherically symmetric tree in which every vertex of S_r has k(r) children.

    ``branching`` may be a function r -> k(r), a sequence k(0), ..., k(R-1)
    (k(R) then stays open) or a tree :class:`GrowthRule`.
    """
    if R < 1:
        raise ValueError("R must be at least 1")
    rule = None
    if isinstance(branching, GrowthRule):
        if branching.kind != "tree":
            raise ValueError("make_sym_tree needs a tree growth rule")
        rule = branching
        k = [int(x) for x in rule.branching(R + 1)]
    elif callable(branching):
        k = [int(branching(r)) for r in range(R + 1)]
    else:
        k = [int(x) for x in branching]
        if len(k) < R:
            raise ValueError("need k(r) for r = 0..R-1")
        k = k[: R + 1]
    graph = make_tree(lambda r, j: k[r], R, max_vertices)
    if rule is not None:
        profile = SymmetricProfile.from_rule(rule, R)
    else:
        kp = np.array(k + [np.nan] * (R + 1 - len(k)), dtype=float)
        m = np.concatenate([[1.0], np.cumprod(kp[:R])])
        km = np.ones(R + 1)
        km[0] = 0.0
        profile = SymmetricProfile(m, kp, km, np.zeros(R + 1))
    return graph, profile


def half_line(R: int) -> tuple[WeightedGraph, SymmetricProfile]:
    """Path 0-1-...-R rooted at 0, profile of the infinite half-line."""
    return make_sym_tree(GrowthRule.tree(0.0, 1.0), R)


def sphere_cliques(graph: WeightedGraph, radii: Sequence[int] | None = None) -> WeightedGraph:
    """Add every missing edge (weight 1) between vertices of the same sphere."""
    lay = layer(graph)
    radii = range(lay.R + 1) if radii is None else radii
    n = graph.n
    existing = graph.edge_u * n + graph.edge_v
    us, vs = [], []
    for r in radii:
        s = np.sort(lay.spheres[r])
        a, b = np.triu_indices(s.size, k=1)
        u, v = s[a], s[b]
        keep = ~np.isin(u * n + v, existing)
        us.append(u[keep])
        vs.append(v[keep])
    if not us:
        return graph
    u, v = np.concatenate(us), np.concatenate(vs)
    if u.size == 0:
        return graph
    return WeightedGraph(
        n,
        np.concatenate([graph.edge_u, u]),
        np.concatenate([graph.edge_v, v]),
        np.concatenate([graph.edge_w, np.ones(u.size)]),
        graph.measure,
        graph.potential,
        graph.root,
    )
