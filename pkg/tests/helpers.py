"""Shared fixtures and independent oracles for the test suite."""

from __future__ import annotations

import numpy as np
import scipy.linalg

from wsgraph import (
    GrowthRule,
    WeightedGraph,
    apply_formal_laplacian,
    make_antitree,
    make_sym_tree,
    make_tree,
    sphere_cliques,
)
from wsgraph.generators import half_line


def path3() -> WeightedGraph:
    return WeightedGraph(3, [0, 1], [1, 2], [1.0, 1.0], np.ones(3), np.zeros(3))


def random_graph(rng: np.random.Generator, n: int, extra: int | None = None,
                 potential: bool = True) -> WeightedGraph:
    """Random connected graph: a random spanning tree plus ``extra`` chords."""
    parents = [int(rng.integers(0, k)) for k in range(1, n)]
    edges = {(p, k) for k, p in zip(range(1, n), parents)}
    if extra is None:
        extra = int(rng.integers(0, 2 * n))
    for _ in range(extra):
        a, b = (int(x) for x in rng.integers(0, n, size=2))
        if a != b:
            edges.add((min(a, b), max(a, b)))
    edges = sorted(edges)
    u = np.array([e[0] for e in edges], dtype=np.int64)
    v = np.array([e[1] for e in edges], dtype=np.int64)
    w = rng.uniform(0.2, 3.0, size=u.size)
    m = rng.uniform(0.3, 2.5, size=n)
    c = rng.uniform(0.0, 1.0, size=n) * (rng.random(n) < 0.5) if potential else np.zeros(n)
    return WeightedGraph(n, u, v, w, m, c, 0)


def lopsided_tree() -> WeightedGraph:
    """3-regular tree to radius 3 with one extra leaf on the first vertex of S_2."""
    return make_tree(lambda r, j: 3 if r == 0 or (r == 2 and j == 0) else 2, 3)


def mixed_tree(R: int = 9) -> WeightedGraph:
    """Tree whose vertex j of S_r has 3 children when (r + j) % 3 == 0 and 2 otherwise."""
    return make_tree(lambda r, j: 3 if (r + j) % 3 == 0 else 2, R)


def antitree_with_chords(beta: float = 2, R: int = 5) -> WeightedGraph:
    """Antitree with a ring of intra-sphere edges on every sphere of size >= 3."""
    g, _ = make_antitree(beta, R)
    from wsgraph import layer

    lay = layer(g)
    extra = []
    for s in lay.spheres:
        s = s.tolist()
        if len(s) >= 3:
            extra += [(s[k], s[(k + 1) % len(s)], 0.5) for k in range(len(s))]
    return g.with_extra_edges(extra)


def symmetric_fixtures() -> list[tuple[str, WeightedGraph]]:
    """Weakly spherically symmetric explicit graphs used throughout."""
    return [
        ("path", half_line(12)[0]),
        ("3-regular tree", make_sym_tree(GrowthRule.regular_tree(3), 6)[0]),
        ("binary tree", make_sym_tree(GrowthRule.tree(0, 2), 6)[0]),
        ("antitree beta=1", make_antitree(1, 8)[0]),
        ("antitree beta=2", make_antitree(2, 6)[0]),
        ("antitree beta=3", make_antitree(3, 5)[0]),
        ("antitree beta=2 with chords", antitree_with_chords(2, 5)),
        ("3-regular tree with sphere cliques", sphere_cliques(make_sym_tree(GrowthRule.regular_tree(3), 5)[0])),
    ]


def generated_profiles():
    """Rule-based profiles covering both generator families."""
    from wsgraph import SymmetricProfile

    out = []
    for beta in (0.5, 1, 1.5, 2, 2.5, 3, 4):
        out.append((f"antitree beta={beta}", SymmetricProfile.from_rule(GrowthRule.antitree(beta), 40)))
    for rule in (GrowthRule.regular_tree(3), GrowthRule.tree(0, 1), GrowthRule.tree(1, 1),
                 GrowthRule.tree(2, 1), GrowthRule.tree(1.5, 2)):
        out.append((rule.describe(), SymmetricProfile.from_rule(rule, 25)))
    return out


def laplacian_matrix(graph: WeightedGraph) -> np.ndarray:
    """Dense matrix of the formal Laplacian, assembled column by column."""
    n = graph.n
    L = np.empty((n, n))
    for k in range(n):
        e = np.zeros(n)
        e[k] = 1.0
        L[:, k] = apply_formal_laplacian(graph, e)
    return L


def rk4_heat(graph: WeightedGraph, f: np.ndarray, t: float, h: float = 1e-4) -> np.ndarray:
    """Classical fourth-order Runge-Kutta for du/dt = -L u on the whole graph."""
    L = laplacian_matrix(graph)
    steps = int(round(t / h))
    h = t / steps
    u = np.asarray(f, dtype=float).copy()
    for _ in range(steps):
        k1 = -L @ u
        k2 = -L @ (u + 0.5 * h * k1)
        k3 = -L @ (u + 0.5 * h * k2)
        k4 = -L @ (u + h * k3)
        u = u + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
    return u


def dirichlet_generator(graph: WeightedGraph, ball: np.ndarray) -> np.ndarray:
    """Non-symmetric matrix of the Dirichlet restriction, assembled from the formal Laplacian."""
    L = laplacian_matrix(graph)
    return L[np.ix_(ball, ball)]


def expm_heat(generator: np.ndarray, t: float, f: np.ndarray) -> np.ndarray:
    return scipy.linalg.expm(-t * generator) @ f
