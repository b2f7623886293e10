"""Heat semigroups of Dirichlet restrictions to balls.

The restriction of the Laplacian to B_i with Dirichlet boundary conditions
keeps the *full* weighted degree of every vertex on its diagonal, including
edges that leave the ball.  Dropping those edges gives the Neumann-type
operator of the finite subgraph instead, which is a different object.

All spectral computations use the symmetrized matrix D_m^{-1/2} K D_m^{-1/2}
and a dense (or tridiagonal) symmetric eigensolver.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Union

import numpy as np
import scipy.linalg as sla

from .errors import (
    ConvergenceFailure,
    DimensionMismatch,
    IndexOutOfRange,
    NonPositiveKernel,
    RadiusOutOfRange,
    SizeCapExceeded,
    SizeOverflow,
)
from .graph import Layering, WeightedGraph, layer
from .profile import ReducedOperator, SymmetricProfile, reduced_operator

DEFAULT_SIZE_CAP = 4000
EIGEN_CLAMP = 1e-10


@dataclass(frozen=True, eq=False)
class DirichletBall:
    """Dirichlet restriction of L to B_i, in symmetrized coordinates."""

    graph: WeightedGraph
    radius: int
    vertices: np.ndarray
    sphere_of: np.ndarray
    matrix: np.ndarray
    measure: np.ndarray
    potential: np.ndarray

    @property
    def size(self) -> int:
        return self.vertices.size


def restrict(
    graph: WeightedGraph, layering: Layering, i: int, cap: int = DEFAULT_SIZE_CAP
) -> DirichletBall:
    if not 0 <= i <= layering.R:
        raise RadiusOutOfRange(f"radius {i} outside 0..{layering.R}")
    verts = layering.ball(i)
    if verts.size > cap:
        raise SizeCapExceeded(f"ball of radius {i} has {verts.size} vertices (cap {cap})")
    adj = graph._adj[verts][:, verts].toarray()
    m = graph.measure[verts]
    K = -adj
    K[np.diag_indices_from(K)] = graph.degree[verts] + graph.potential[verts]
    s = 1.0 / np.sqrt(m)
    S = K * s[:, None] * s[None, :]
    S = 0.5 * (S + S.T)
    return DirichletBall(
        graph, i, verts, layering.radius_of[verts], S, m, graph.potential[verts] / m
    )


@dataclass(frozen=True, eq=False)
class SpectralDecomposition:
    """Eigenpairs of a symmetrized operator plus the data to undo the symmetrization.

    ``labels`` are vertex ids (balls) or radii (reduced operators); ``sphere_of``
    gives each index's distance to the root.
    """

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    weights: np.ndarray
    potential: np.ndarray
    labels: np.ndarray
    sphere_of: np.ndarray
    _index: dict = field(init=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "_index", {int(x): k for k, x in enumerate(self.labels)})

    @property
    def size(self) -> int:
        return self.eigenvalues.size

    def index(self, label: int) -> int:
        try:
            return self._index[int(label)]
        except KeyError:
            raise IndexOutOfRange(f"{label} is not in the decomposed index set") from None


Decomposable = Union[DirichletBall, ReducedOperator]


def _operator_data(obj: Decomposable):
    if isinstance(obj, DirichletBall):
        return obj.measure, obj.potential, obj.vertices, obj.sphere_of
    return obj.radius_weights, obj.potential, obj.radii, obj.radii


def _clamp(lam: np.ndarray) -> np.ndarray:
    if lam[0] < -EIGEN_CLAMP:
        raise ConvergenceFailure(f"negative eigenvalue {lam[0]:.3e} for a non-negative operator")
    return np.where((lam < 0) & (lam >= -EIGEN_CLAMP), 0.0, lam)


def decompose(obj: Decomposable, cap: int = DEFAULT_SIZE_CAP, check: bool = True) -> SpectralDecomposition:
    """Full symmetric eigendecomposition, ascending eigenvalues."""
    weights, q, labels, spheres = _operator_data(obj)
    try:
        if isinstance(obj, DirichletBall):
            if obj.size > cap:
                raise SizeCapExceeded(f"dimension {obj.size} exceeds cap {cap}")
            lam, phi = sla.eigh(obj.matrix)
            apply = lambda X: obj.matrix @ X  # noqa: E731
        else:
            if obj.size == 1:
                lam, phi = obj.diagonal.copy(), np.ones((1, 1))
            else:
                lam, phi = sla.eigh_tridiagonal(obj.diagonal, obj.offdiag)
            apply = lambda X: _tridiag_matmul(obj.diagonal, obj.offdiag, X)  # noqa: E731
    except (np.linalg.LinAlgError, ValueError) as exc:
        raise ConvergenceFailure(str(exc)) from exc
    if check:
        scale = max(1.0, float(np.max(np.abs(lam))))
        resid = np.max(np.abs(apply(phi) - phi * lam[None, :]))
        if resid > 1e-8 * scale:
            raise ConvergenceFailure(f"eigen-residual {resid:.3e}")
        ortho = np.max(np.abs(phi.T @ phi - np.eye(lam.size)))
        if ortho > 1e-8:
            raise ConvergenceFailure(f"eigenvectors not orthonormal ({ortho:.3e})")
    return SpectralDecomposition(_clamp(lam), phi, weights, q, labels, spheres)


def _tridiag_matmul(diag: np.ndarray, off: np.ndarray, X: np.ndarray) -> np.ndarray:
    Y = diag[:, None] * X
    Y[:-1] += off[:, None] * X[1:]
    Y[1:] += off[:, None] * X[:-1]
    return Y


def lowest_eigenvalue(obj: Decomposable, cap: int = DEFAULT_SIZE_CAP) -> float:
    """Smallest eigenvalue only (cheaper than a full decomposition)."""
    try:
        if isinstance(obj, DirichletBall):
            if obj.size > cap:
                raise SizeCapExceeded(f"dimension {obj.size} exceeds cap {cap}")
            lam = sla.eigh(obj.matrix, eigvals_only=True, subset_by_index=[0, 0])
        elif obj.size == 1:
            lam = obj.diagonal.copy()
        else:
            lam = sla.eigh_tridiagonal(
                obj.diagonal, obj.offdiag, eigvals_only=True, select="i", select_range=(0, 0)
            )
    except (np.linalg.LinAlgError, ValueError) as exc:
        raise ConvergenceFailure(str(exc)) from exc
    return float(_clamp(np.asarray(lam))[0])


# ---------------------------------------------------------------------------
# kernels and semigroup action
# ---------------------------------------------------------------------------


def _decay(d: SpectralDecomposition, t: float) -> tuple[np.ndarray, float]:
    """e^{-t(λ_k - λ_0)} and the factored-out exponent -tλ_0."""
    if t < 0:
        raise ValueError("t must be non-negative")
    lam0 = d.eigenvalues[0]
    return np.exp(-t * (d.eigenvalues - lam0)), -t * lam0


def heat_kernel(d: SpectralDecomposition, t: float, x: int, y: int) -> float:
    """p_t(x, y) = Σ_k e^{-tλ_k} φ_k(x) φ_k(y) / sqrt(m(x) m(y)); x, y are labels."""
    a, b = d.index(x), d.index(y)
    w, shift = _decay(d, t)
    s = float(np.dot(w, d.eigenvectors[a] * d.eigenvectors[b]))
    return s * math.exp(shift) / math.sqrt(d.weights[a] * d.weights[b])


def log_heat_kernel(d: SpectralDecomposition, t: float, x: int, y: int) -> float:
    """ln p_t(x, y) evaluated without forming e^{-tλ_0}, so it survives underflow."""
    a, b = d.index(x), d.index(y)
    w, shift = _decay(d, t)
    s = float(np.dot(w, d.eigenvectors[a] * d.eigenvectors[b]))
    if not s > 0:
        raise NonPositiveKernel(f"p_t({x},{y}) is not positive at t={t}")
    return shift + math.log(s) - 0.5 * math.log(d.weights[a] * d.weights[b])


def heat_kernel_row(d: SpectralDecomposition, t: float, x: int) -> np.ndarray:
    """p_t(x, ·) over the decomposition's index order."""
    a = d.index(x)
    w, shift = _decay(d, t)
    row = d.eigenvectors @ (w * d.eigenvectors[a])
    return row * math.exp(shift) / np.sqrt(d.weights[a] * d.weights)


def heat_operator(d: SpectralDecomposition, t: float) -> np.ndarray:
    """Matrix of e^{-tL} acting on functions (index order of ``d``)."""
    w, shift = _decay(d, t)
    phi = d.eigenvectors
    sq = np.sqrt(d.weights)
    E = (phi * (w * math.exp(shift))[None, :]) @ phi.T
    return E / sq[:, None] * sq[None, :]


def heat_apply(d: SpectralDecomposition, t: float, f: np.ndarray) -> np.ndarray:
    """e^{-tL} f by spectral summation."""
    f = np.asarray(f, dtype=float)
    if f.shape != (d.size,):
        raise DimensionMismatch(f"expected {d.size} values, got shape {f.shape}")
    if t == 0:
        return f.copy()
    w, shift = _decay(d, t)
    sq = np.sqrt(d.weights)
    coef = d.eigenvectors.T @ (sq * f)
    return (d.eigenvectors @ (w * math.exp(shift) * coef)) / sq


def _integrated_decay(lam: np.ndarray, t: float) -> np.ndarray:
    """∫_0^t e^{-sλ} ds = (1 - e^{-tλ})/λ, or t for λ ≈ 0."""
    out = np.full(lam.shape, float(t))
    big = lam > 1e-12
    out[big] = -np.expm1(-t * lam[big]) / lam[big]
    return out


def mass_function(d: SpectralDecomposition, t: float, x: int | None = None):
    """M_t = e^{-tL} 1 + ∫_0^t e^{-sL} q ds, at label ``x`` or as a full vector."""
    if t < 0:
        raise ValueError("t must be non-negative")
    sq = np.sqrt(d.weights)
    phi = d.eigenvectors
    c_one = phi.T @ sq
    c_q = phi.T @ (sq * d.potential)
    spec = np.exp(-t * d.eigenvalues) * c_one + _integrated_decay(d.eigenvalues, t) * c_q
    if x is None:
        return (phi @ spec) / sq
    a = d.index(x)
    return float(np.dot(phi[a], spec) / sq[a])


def averaging_matrix(sphere_of: np.ndarray, weights: np.ndarray) -> np.ndarray:
    """A[x, y] = m(y)/m(S_r) when x, y lie in the same sphere S_r, else 0."""
    same = sphere_of[:, None] == sphere_of[None, :]
    mass = np.bincount(sphere_of, weights)
    return same * (weights[None, :] / mass[sphere_of][:, None])


def commutation_defect(
    d: SpectralDecomposition, t: float, sphere_of: np.ndarray | None = None
) -> float:
    """max |A e^{-tL} - e^{-tL} A| with A the sphere-averaging projection on the ball."""
    spheres = d.sphere_of if sphere_of is None else np.asarray(sphere_of)
    if spheres.shape != (d.size,):
        raise DimensionMismatch("sphere labels must match the decomposition size")
    if t == 0:
        return 0.0
    A = averaging_matrix(spheres, d.weights)
    E = heat_operator(d, t)
    return float(np.max(np.abs(A @ E - E @ A)))


# ---------------------------------------------------------------------------
# exhaustion by balls
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class HeatKernelAt:
    t: float
    x: int
    y: int


@dataclass(frozen=True)
class MassAt:
    t: float
    x: int


@dataclass(frozen=True)
class Lambda0:
    pass


Observable = Union[HeatKernelAt, MassAt, Lambda0]
Source = Union[WeightedGraph, SymmetricProfile, Callable[[int], WeightedGraph]]


@dataclass(frozen=True)
class ExhaustionResult:
    """Observable evaluated on growing Dirichlet balls.

    ``bound`` says which side of the infinite-graph value the last entry
    sits on: heat kernels and M_t increase with the radius (``lower``),
    Dirichlet ground states decrease (``upper``).
    """

    value: float
    radii: np.ndarray
    values: np.ndarray
    converged: bool
    bound: str
    note: str = ""

    @property
    def trace(self) -> list[tuple[int, float]]:
        return [(int(r), float(v)) for r, v in zip(self.radii, self.values)]


def _max_radius(source: Source, r_max: int) -> int:
    if isinstance(source, WeightedGraph):
        return min(r_max, layer(source).R)
    if isinstance(source, SymmetricProfile):
        return r_max if source.rule is not None else min(r_max, source.outer_radius)
    return r_max


def evaluate_at_radius(source: Source, observable: Observable, i: int, cap: int = DEFAULT_SIZE_CAP) -> float:
    """Observable on the Dirichlet restriction of radius i."""
    if isinstance(source, SymmetricProfile):
        op = reduced_operator(source, i, "dirichlet")
        if isinstance(observable, Lambda0):
            return lowest_eigenvalue(op)
        d = decompose(op, check=False)
    else:
        graph = source if isinstance(source, WeightedGraph) else source(i)
        ball = restrict(graph, layer(graph), i, cap)
        if isinstance(observable, Lambda0):
            return lowest_eigenvalue(ball, cap)
        d = decompose(ball, cap, check=False)
    if isinstance(observable, HeatKernelAt):
        if observable.x not in d._index or observable.y not in d._index:
            return 0.0
        return heat_kernel(d, observable.t, observable.x, observable.y)
    if observable.x not in d._index:
        return 0.0
    return mass_function(d, observable.t, observable.x)


def exhaust(
    source: Source,
    observable: Observable,
    tol: float = 1e-8,
    r_max: int | None = None,
    i0: int = 4,
    step: int = 2,
    cap: int = DEFAULT_SIZE_CAP,
) -> ExhaustionResult:
    """Evaluate ``observable`` at radii i0, i0+step, ... until two consecutive
    values differ by less than ``tol`` or ``r_max`` is reached."""
    if tol <= 0:
        raise ValueError("tol must be positive")
    if r_max is None:
        r_max = 2048 if isinstance(source, SymmetricProfile) else 64
    top = _max_radius(source, r_max)
    bound = "upper" if isinstance(observable, Lambda0) else "lower"
    radii: list[int] = []
    values: list[float] = []
    converged = False
    note = ""
    i = min(i0, top)
    while True:
        try:
            val = evaluate_at_radius(source, observable, i, cap)
        except (SizeCapExceeded, SizeOverflow) as exc:
            if not values:
                raise
            what = "the size cap" if isinstance(exc, SizeCapExceeded) else "floating-point range"
            note = f"stopped at radius {radii[-1]}: ball of radius {i} exceeds {what}"
            break
        if values and abs(val - values[-1]) < tol:
            converged = True
        radii.append(i)
        values.append(val)
        if converged or i >= top:
            break
        i = min(i + step, top)
    if not converged and not note:
        note = f"reached radius limit {top}"
    return ExhaustionResult(
        values[-1], np.array(radii), np.array(values), converged, bound, note
    )
