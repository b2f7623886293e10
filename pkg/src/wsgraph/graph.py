"""Explicit weighted graphs (V, b, c, m) and their radial structure.

A :class:`WeightedGraph` is a finite, connected, rooted graph standing in for
(a truncation of) an infinite locally finite graph.  Spheres around the root,
outer/inner curvatures, the formal Laplacian, the energy form and the sphere
averaging operator live here, along with detection of weak spherical
symmetry.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np
import scipy.sparse as sp
from scipy.sparse import csgraph

from . import verdict as vd
from .errors import (
    Disconnected,
    DuplicateEdge,
    GraphValidationError,
    InvalidRoot,
    MismatchedLayering,
    NegativePotential,
    NonPositiveMeasure,
    NonPositiveWeight,
    SelfLoop,
    SparseIds,
)
from .profile import SymmetricProfile

DEFAULT_SYMMETRY_TOL = 1e-9


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.ascontiguousarray(a)
    a.flags.writeable = False
    return a


class WeightedGraph:
    """Finite connected weighted graph with edge weights b, potential c and measure m.

    Edges are stored once each as ``(u, v, w)`` with ``u < v``, sorted.  The
    instance is immutable; all arrays are read-only.
    """

    def __init__(
        self,
        n: int,
        edge_u: np.ndarray,
        edge_v: np.ndarray,
        edge_w: np.ndarray,
        measure: np.ndarray,
        potential: np.ndarray,
        root: int = 0,
    ):
        u = np.asarray(edge_u, dtype=np.int64)
        v = np.asarray(edge_v, dtype=np.int64)
        w = np.asarray(edge_w, dtype=float)
        m = np.asarray(measure, dtype=float)
        c = np.asarray(potential, dtype=float)
        if n < 1:
            raise GraphValidationError("graph needs at least one vertex")
        if m.shape != (n,) or c.shape != (n,):
            raise GraphValidationError("measure and potential must have one entry per vertex")
        if not (u.shape == v.shape == w.shape) or u.ndim != 1:
            raise GraphValidationError("edge arrays must be 1-d and of equal length")
        if not np.all(m > 0) or not np.all(np.isfinite(m)):
            x = int(np.flatnonzero(~(m > 0) | ~np.isfinite(m))[0])
            raise NonPositiveMeasure(f"vertex {x} has measure {m[x]!r}")
        if not np.all(c >= 0) or not np.all(np.isfinite(c)):
            x = int(np.flatnonzero(~(c >= 0) | ~np.isfinite(c))[0])
            raise NegativePotential(f"vertex {x} has potential {c[x]!r}")
        if u.size:
            if u.min() < 0 or v.min() < 0 or u.max() >= n or v.max() >= n:
                raise SparseIds(f"edge endpoint outside 0..{n - 1}")
            loops = np.flatnonzero(u == v)
            if loops.size:
                raise SelfLoop(f"edge ({u[loops[0]]}, {u[loops[0]]})")
            bad = np.flatnonzero(~(w > 0) | ~np.isfinite(w))
            if bad.size:
                k = bad[0]
                raise NonPositiveWeight(f"edge ({u[k]}, {v[k]}) has weight {w[k]!r}")
        lo = np.minimum(u, v)
        hi = np.maximum(u, v)
        order = np.lexsort((hi, lo))
        lo, hi, w = lo[order], hi[order], w[order]
        if lo.size > 1:
            dup = np.flatnonzero((lo[1:] == lo[:-1]) & (hi[1:] == hi[:-1]))
            if dup.size:
                k = dup[0]
                raise DuplicateEdge(f"edge ({lo[k]}, {hi[k]}) given more than once")
        if not 0 <= root < n:
            raise InvalidRoot(f"root {root} outside 0..{n - 1}")

        self.n = int(n)
        self.edge_u = _frozen(lo)
        self.edge_v = _frozen(hi)
        self.edge_w = _frozen(w)
        self.measure = _frozen(m.copy())
        self.potential = _frozen(c.copy())
        self.root = int(root)

        adj = sp.coo_matrix(
            (np.concatenate([w, w]), (np.concatenate([lo, hi]), np.concatenate([hi, lo]))),
            shape=(n, n),
        ).tocsr()
        adj.sum_duplicates()
        self._adj = adj
        self.degree = _frozen(np.asarray(adj.sum(axis=1)).ravel())

        if n > 1:
            ncomp, _ = csgraph.connected_components(adj, directed=False)
            if ncomp != 1:
                raise Disconnected(f"graph has {ncomp} connected components")

    # -- accessors -------------------------------------------------------
    @property
    def num_edges(self) -> int:
        return int(self.edge_u.size)

    @property
    def adjacency(self) -> sp.csr_matrix:
        """Symmetric sparse matrix of edge weights b(x, y) (a copy)."""
        return self._adj.copy()

    def weight(self, x: int, y: int) -> float:
        return float(self._adj[x, y])

    def neighbors(self, x: int) -> np.ndarray:
        start, stop = self._adj.indptr[x], self._adj.indptr[x + 1]
        return self._adj.indices[start:stop]

    def with_root(self, root: int) -> "WeightedGraph":
        return WeightedGraph(
            self.n, self.edge_u, self.edge_v, self.edge_w, self.measure, self.potential, root
        )

    def with_extra_edges(self, edges: Iterable[tuple[int, int, float]]) -> "WeightedGraph":
        extra = list(edges)
        if not extra:
            return self
        eu, ev, ew = (np.array(col) for col in zip(*extra))
        return WeightedGraph(
            self.n,
            np.concatenate([self.edge_u, eu]),
            np.concatenate([self.edge_v, ev]),
            np.concatenate([self.edge_w, ew]),
            self.measure,
            self.potential,
            self.root,
        )

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, WeightedGraph):
            return NotImplemented
        return (
            self.n == other.n
            and self.root == other.root
            and np.array_equal(self.edge_u, other.edge_u)
            and np.array_equal(self.edge_v, other.edge_v)
            and np.array_equal(self.edge_w, other.edge_w)
            and np.array_equal(self.measure, other.measure)
            and np.array_equal(self.potential, other.potential)
        )

    __hash__ = None  # type: ignore[assignment]

    def __repr__(self) -> str:
        return f"WeightedGraph(n={self.n}, edges={self.num_edges}, root={self.root})"


def build_graph(
    vertex_records: Sequence[tuple[int, float, float]],
    edge_records: Sequence[tuple[int, int, float]],
    root: int | None = None,
) -> WeightedGraph:
    """Validate vertex records ``(id, m, c)`` and edge records ``(u, v, b)``.

    Ids must be exactly ``0..n-1`` (in any order).  The root defaults to 0.
    """
    n = len(vertex_records)
    m = np.empty(n)
    c = np.empty(n)
    seen = np.zeros(n, dtype=bool)
    for vid, mv, cv in vertex_records:
        vid = int(vid)
        if not 0 <= vid < n or seen[vid]:
            raise SparseIds(f"vertex ids must be exactly 0..{n - 1}; got {vid}")
        seen[vid] = True
        m[vid] = mv
        c[vid] = cv
    if edge_records:
        u, v, w = (np.asarray(col) for col in zip(*edge_records))
    else:
        u = v = np.zeros(0, dtype=np.int64)
        w = np.zeros(0)
    if u.size and (np.any(u != np.floor(u)) or np.any(v != np.floor(v))):
        raise SparseIds("edge endpoints must be integers")
    return WeightedGraph(n, u, v, w, m, c, 0 if root is None else int(root))


@dataclass(frozen=True)
class Layering:
    """Breadth-first spheres S_0, ..., S_R around a root."""

    root: int
    radius_of: np.ndarray
    spheres: tuple[np.ndarray, ...]

    @property
    def R(self) -> int:
        return len(self.spheres) - 1

    def sphere_sizes(self) -> list[int]:
        return [int(s.size) for s in self.spheres]

    def ball(self, i: int) -> np.ndarray:
        """Vertices of B_i ordered by (radius, id)."""
        return np.concatenate(self.spheres[: i + 1])


def layer(graph: WeightedGraph, root: int | None = None) -> Layering:
    root = graph.root if root is None else int(root)
    if not 0 <= root < graph.n:
        raise InvalidRoot(f"root {root} outside 0..{graph.n - 1}")
    dist = csgraph.shortest_path(graph._adj, directed=False, unweighted=True, indices=root)
    radius = dist.astype(np.int64)
    R = int(radius.max())
    order = np.lexsort((np.arange(graph.n), radius))
    counts = np.bincount(radius, minlength=R + 1)
    bounds = np.concatenate([[0], np.cumsum(counts)])
    spheres = tuple(_frozen(order[bounds[r] : bounds[r + 1]]) for r in range(R + 1))
    return Layering(root, _frozen(radius), spheres)


@dataclass(frozen=True)
class VertexCurvature:
    kappa_plus: np.ndarray
    kappa_minus: np.ndarray
    q: np.ndarray


def _check_layering(graph: WeightedGraph, layering: Layering) -> None:
    r = layering.radius_of
    if r.shape != (graph.n,) or r[layering.root] != 0:
        raise MismatchedLayering("layering does not belong to this graph")
    if graph.num_edges and np.any(np.abs(r[graph.edge_u] - r[graph.edge_v]) > 1):
        raise MismatchedLayering("an edge joins spheres more than one apart")


def boundary_flux(graph: WeightedGraph, layering: Layering) -> tuple[np.ndarray, np.ndarray]:
    """Per-vertex total edge weight into the next outer and next inner sphere."""
    r = layering.radius_of
    u, v, w = graph.edge_u, graph.edge_v, graph.edge_w
    out_u = r[v] == r[u] + 1
    out_v = r[u] == r[v] + 1
    k_plus = np.bincount(u[out_u], w[out_u], graph.n) + np.bincount(v[out_v], w[out_v], graph.n)
    k_minus = np.bincount(v[out_u], w[out_u], graph.n) + np.bincount(u[out_v], w[out_v], graph.n)
    return k_plus, k_minus


def curvature(graph: WeightedGraph, layering: Layering) -> VertexCurvature:
    _check_layering(graph, layering)
    k_plus, k_minus = boundary_flux(graph, layering)
    m = graph.measure
    return VertexCurvature(
        _frozen(k_plus / m), _frozen(k_minus / m), _frozen(graph.potential / m)
    )


def apply_formal_laplacian(graph: WeightedGraph, f: np.ndarray) -> np.ndarray:
    f = np.asarray(f, dtype=float)
    return ((graph.degree + graph.potential) * f - graph._adj @ f) / graph.measure


def quadratic_form(graph: WeightedGraph, f: np.ndarray) -> float:
    """Energy ½ Σ b(x,y)(f(x)-f(y))² + Σ c(x) f(x)²."""
    f = np.asarray(f, dtype=float)
    diff = f[graph.edge_u] - f[graph.edge_v]
    return float(np.dot(graph.edge_w, diff * diff) + np.dot(graph.potential, f * f))


def inner(measure: np.ndarray, f: np.ndarray, g: np.ndarray) -> float:
    return float(np.sum(np.asarray(f) * np.asarray(g) * measure))


def average(layering: Layering, measure: np.ndarray, f: np.ndarray) -> np.ndarray:
    """Replace f on each sphere by its measure-weighted mean."""
    r = layering.radius_of
    f = np.asarray(f, dtype=float)
    nr = layering.R + 1
    mass = np.bincount(r, measure, nr)
    tot = np.bincount(r, f * measure, nr)
    return (tot / mass)[r]


def sphere_means(layering: Layering, measure: np.ndarray, values: np.ndarray) -> np.ndarray:
    nr = layering.R + 1
    return np.bincount(layering.radius_of, values * measure, nr) / np.bincount(
        layering.radius_of, measure, nr
    )


def sphere_spread(layering: Layering, values: np.ndarray) -> np.ndarray:
    """max - min of ``values`` on each sphere."""
    nr = layering.R + 1
    hi = np.full(nr, -np.inf)
    lo = np.full(nr, np.inf)
    np.maximum.at(hi, layering.radius_of, values)
    np.minimum.at(lo, layering.radius_of, values)
    return hi - lo


def extract_profile(graph: WeightedGraph, layering: Layering) -> SymmetricProfile:
    """Per-sphere measure-weighted means of κ±, q; the outermost κ+ is 0.

    For a weakly spherically symmetric graph the means coincide with the
    common per-vertex values.
    """
    k_plus, k_minus = boundary_flux(graph, layering)
    nr = layering.R + 1
    ms = np.bincount(layering.radius_of, graph.measure, nr)
    return SymmetricProfile(
        sphere_measure=ms,
        kappa_plus=np.bincount(layering.radius_of, k_plus, nr) / ms,
        kappa_minus=np.bincount(layering.radius_of, k_minus, nr) / ms,
        q=np.bincount(layering.radius_of, graph.potential, nr) / ms,
    )


def detect_weak_symmetry(
    graph: WeightedGraph, root: int | None = None, tol: float = DEFAULT_SYMMETRY_TOL
) -> tuple[vd.Verdict, SymmetricProfile | None]:
    """Check whether κ+, κ- and q are constant (within ``tol``) on every sphere.

    Intra-sphere edges never enter κ±, so they do not affect the outcome.
    On success the sphere profile is returned alongside the verdict.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    lay = layer(graph, root)
    cur = curvature(graph, lay)
    spreads = {
        "kappa_plus": sphere_spread(lay, cur.kappa_plus),
        "kappa_minus": sphere_spread(lay, cur.kappa_minus),
        "q": sphere_spread(lay, cur.q),
    }
    worst = {name: float(s.max()) for name, s in spreads.items()}
    bad = {
        name: [int(r) for r in np.flatnonzero(s > tol)] for name, s in spreads.items()
    }
    evidence = {"root": lay.root, "max_spread": worst, "violating_radii": bad}
    if any(bad.values()):
        return vd.negative(**evidence), None
    return vd.positive(**evidence), extract_profile(graph, lay)
