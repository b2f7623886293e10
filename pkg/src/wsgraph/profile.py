"""Weakly spherically symmetric graphs described radius by radius.

A :class:`SymmetricProfile` stores, for r = 0..R, the sphere measure m(S_r),
the outer and inner curvatures κ+(r), κ-(r) and the normalized potential q(r).
Everything that acts on spherically symmetric functions reduces to a
tridiagonal operator on radii, so infinite graphs with a known growth rule can
be explored at radii far beyond what an explicit graph would allow.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Literal

import numpy as np

from . import verdict as vd
from .errors import RadiusOutOfRange, SizeOverflow, ZeroBoundary

Boundary = Literal["dirichlet", "none"]
CriterionKind = Literal["spectrum", "stochastic"]


def _frozen(a) -> np.ndarray:
    a = np.array(a, dtype=float)
    a.flags.writeable = False
    return a


@dataclass(frozen=True)
class GrowthRule:
    """Closed-form generator for the curvature sequence of an infinite profile.

    ``antitree``: |S_0| = 1, |S_r| = max(1, round(r**beta)), κ+(r) = |S_{r+1}|.
    ``tree``: every vertex in S_r has k(r) children, with
    k(r) = max(1, round(coefficient * (r+1)**degree)) and k(0) optionally
    overridden by ``root_branching``.  Both families are unweighted with
    m ≡ 1 and no potential.
    """

    kind: Literal["antitree", "tree"]
    beta: float = 0.0
    degree: float = 0.0
    coefficient: float = 1.0
    root_branching: int | None = None

    @classmethod
    def antitree(cls, beta: float) -> "GrowthRule":
        if not beta > 0:
            raise ValueError("antitree exponent must be positive")
        return cls("antitree", beta=float(beta))

    @classmethod
    def tree(
        cls, degree: float, coefficient: float = 1.0, root_branching: int | None = None
    ) -> "GrowthRule":
        if degree < 0 or coefficient <= 0:
            raise ValueError("tree rule needs degree >= 0 and coefficient > 0")
        return cls("tree", degree=float(degree), coefficient=float(coefficient),
                   root_branching=root_branching)

    @classmethod
    def regular_tree(cls, k: int) -> "GrowthRule":
        if k < 2:
            raise ValueError("regular tree needs k >= 2")
        return cls.tree(0.0, float(k - 1), int(k))

    def describe(self) -> str:
        if self.kind == "antitree":
            return f"antitree(beta={self.beta:g})"
        root = "" if self.root_branching is None else f", root={self.root_branching}"
        return f"tree(degree={self.degree:g}, coefficient={self.coefficient:g}{root})"

    # -- tabulation ------------------------------------------------------
    def antitree_sizes(self, n: int) -> np.ndarray:
        """|S_0|, ..., |S_{n-1}| as floats."""
        r = np.arange(n, dtype=float)
        s = np.maximum(1.0, np.rint(r**self.beta))
        s[0] = 1.0
        return s

    def branching(self, n: int) -> np.ndarray:
        """k(0), ..., k(n-1) as floats."""
        r = np.arange(n, dtype=float)
        k = np.maximum(1.0, np.rint(self.coefficient * (r + 1.0) ** self.degree))
        if self.root_branching is not None and n:
            k[0] = float(self.root_branching)
        return k

    def tabulate(self, R: int) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
        n = R + 1
        if self.kind == "antitree":
            s = self.antitree_sizes(n + 1)
            m = s[:n]
            kp = s[1 : n + 1]
            km = np.concatenate([[0.0], s[: n - 1]])
        else:
            k = self.branching(n)
            with np.errstate(over="ignore"):
                m = np.concatenate([[1.0], np.cumprod(k[:-1])])
            kp = k
            km = np.ones(n)
            km[0] = 0.0
        if not np.all(np.isfinite(m)) or m.max() > 1e300:
            raise SizeOverflow(f"{self.describe()} sphere sizes not representable up to radius {R}")
        return m, kp, km, np.zeros(n)


@dataclass(frozen=True, eq=False)
class SymmetricProfile:
    """Per-radius data (m(S_r), κ+(r), κ-(r), q(r)) for r = 0..R.

    ``kappa_plus[R]`` may be NaN, meaning the outer curvature of the last
    sphere is not tabulated.  Use :func:`validate_profile` to check the sign
    and balance invariants.
    """

    sphere_measure: np.ndarray
    kappa_plus: np.ndarray
    kappa_minus: np.ndarray
    q: np.ndarray
    rule: GrowthRule | None = None
    _boundary: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        arrays = {}
        for name in ("sphere_measure", "kappa_plus", "kappa_minus", "q"):
            a = _frozen(getattr(self, name))
            if a.ndim != 1 or a.size == 0:
                raise ValueError(f"{name} must be a non-empty 1-d sequence")
            arrays[name] = a
            object.__setattr__(self, name, a)
        if len({a.size for a in arrays.values()}) != 1:
            raise ValueError("profile sequences must all have length R+1")
        if np.any(np.isnan(self.kappa_plus[:-1])):
            raise ValueError("kappa_plus may only be missing on the last radius")
        object.__setattr__(self, "_boundary", _frozen(self.kappa_plus * self.sphere_measure))

    @classmethod
    def from_rule(cls, rule: GrowthRule, R: int) -> "SymmetricProfile":
        if R < 0:
            raise RadiusOutOfRange("R must be non-negative")
        m, kp, km, q = rule.tabulate(R)
        return cls(m, kp, km, q, rule)

    @property
    def R(self) -> int:
        return self.sphere_measure.size - 1

    @property
    def boundary(self) -> np.ndarray:
        """∂B(r) = κ+(r) m(S_r), the total weight of edges leaving B_r."""
        return self._boundary

    @property
    def outer_radius(self) -> int:
        """Largest r with κ+(r) tabulated."""
        return self.R if not math.isnan(self.kappa_plus[-1]) else self.R - 1

    def extended(self, R: int) -> "SymmetricProfile":
        """Profile tabulated at least to radius R (needs a growth rule past self.R)."""
        if R <= self.R:
            return self
        if self.rule is None:
            raise RadiusOutOfRange(f"radius {R} beyond tabulated range 0..{self.R}")
        return SymmetricProfile.from_rule(self.rule, R)

    def truncated(self, R: int) -> "SymmetricProfile":
        if not 0 <= R <= self.R:
            raise RadiusOutOfRange(f"radius {R} outside 0..{self.R}")
        s = slice(0, R + 1)
        return SymmetricProfile(
            self.sphere_measure[s], self.kappa_plus[s], self.kappa_minus[s], self.q[s], self.rule
        )

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, SymmetricProfile):
            return NotImplemented
        return self.rule == other.rule and all(
            np.array_equal(getattr(self, k), getattr(other, k), equal_nan=True)
            for k in ("sphere_measure", "kappa_plus", "kappa_minus", "q")
        )

    __hash__ = None  # type: ignore[assignment]


def validate_profile(p: SymmetricProfile, tol: float = 1e-9) -> vd.Verdict:
    """Check signs, finiteness, κ-(0) = 0, the balance identity and rule agreement.

    Balance: κ+(r) m(S_r) = κ-(r+1) m(S_{r+1}) for r < R, relative to ``tol``.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    problems: list[str] = []
    m, kp, km, q = p.sphere_measure, p.kappa_plus, p.kappa_minus, p.q
    R = p.R
    if not np.all(np.isfinite(m) & (m > 0)):
        problems.append("sphere_measure must be finite and positive")
    if not np.all(np.isfinite(kp[:R]) & (kp[:R] > 0)):
        problems.append("kappa_plus must be positive for r < R")
    if not (math.isnan(kp[R]) or (math.isfinite(kp[R]) and kp[R] >= 0)):
        problems.append("kappa_plus(R) must be non-negative or missing")
    if km[0] != 0:
        problems.append("kappa_minus(0) must be 0")
    if not np.all(np.isfinite(km[1:]) & (km[1:] > 0)):
        problems.append("kappa_minus must be positive for r >= 1")
    if not np.all(np.isfinite(q) & (q >= 0)):
        problems.append("q must be finite and non-negative")
    worst = 0.0
    worst_r = None
    if R >= 1:
        lhs = kp[:R] * m[:R]
        rhs = km[1:] * m[1:]
        scale = np.maximum(np.abs(lhs), np.abs(rhs))
        with np.errstate(invalid="ignore", divide="ignore"):
            rel = np.where(scale > 0, np.abs(lhs - rhs) / scale, 0.0)
        worst_r = int(np.argmax(rel))
        worst = float(rel[worst_r])
        if not worst <= tol:
            problems.append(f"balance identity violated at r={worst_r} (relative {worst:.3e})")
    if p.rule is not None:
        ref = SymmetricProfile.from_rule(p.rule, R)
        for name in ("sphere_measure", "kappa_minus", "q"):
            if not np.allclose(getattr(p, name), getattr(ref, name), rtol=tol, atol=0):
                problems.append(f"{name} disagrees with {p.rule.describe()}")
        n = p.outer_radius + 1
        if not np.allclose(kp[:n], ref.kappa_plus[:n], rtol=tol, atol=0):
            problems.append(f"kappa_plus disagrees with {p.rule.describe()}")
    ev = {"max_balance_defect": worst, "worst_radius": worst_r, "problems": problems}
    return vd.negative(**ev) if problems else vd.positive(**ev)


# ---------------------------------------------------------------------------
# tridiagonal reduction
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class ReducedOperator:
    """The formal Laplacian on spherically symmetric functions over radii r_lo..r_hi.

    ``diagonal`` and ``offdiag`` define the symmetrized matrix
    W^{1/2} J W^{-1/2} with W = diag(m(S_r)); the coupling between r and r+1 is
    -sqrt(κ+(r) κ-(r+1)), computed once and used for both triangles.
    Values outside the range are treated as zero; with ``boundary="none"`` the
    outer edges of the last sphere are dropped instead (free outer boundary).
    """

    r_lo: int
    r_hi: int
    diagonal: np.ndarray
    offdiag: np.ndarray
    kappa_plus: np.ndarray
    kappa_minus: np.ndarray
    radius_weights: np.ndarray
    potential: np.ndarray
    boundary: Boundary

    @property
    def size(self) -> int:
        return self.r_hi - self.r_lo + 1

    @property
    def radii(self) -> np.ndarray:
        return np.arange(self.r_lo, self.r_hi + 1)

    def symmetric_matrix(self) -> np.ndarray:
        S = np.diag(self.diagonal)
        idx = np.arange(self.size - 1)
        S[idx, idx + 1] = self.offdiag
        S[idx + 1, idx] = self.offdiag
        return S

    def apply(self, f: np.ndarray) -> np.ndarray:
        """(J f)(r) = κ+(r)(f(r)-f(r+1)) + κ-(r)(f(r)-f(r-1)) + q(r) f(r)."""
        f = np.asarray(f, dtype=float)
        if f.shape != (self.size,):
            raise ValueError("f must have one value per radius")
        out = (self.kappa_plus + self.kappa_minus + self.potential) * f
        if self.boundary == "none":
            out[-1] -= self.kappa_plus[-1] * f[-1]
        out[:-1] -= self.kappa_plus[:-1] * f[1:]
        out[1:] -= self.kappa_minus[1:] * f[:-1]
        return out


def _assemble(p: SymmetricProfile, lo: int, hi: int, boundary: Boundary) -> ReducedOperator:
    s = slice(lo, hi + 1)
    kp = p.kappa_plus[s].copy()
    km = p.kappa_minus[s].copy()
    q = p.q[s].copy()
    if boundary == "none" and math.isnan(kp[-1]):
        kp[-1] = 0.0
    diag = kp + km + q
    if boundary == "none":
        diag = diag - np.concatenate([np.zeros(kp.size - 1), kp[-1:]])
    off = -np.sqrt(p.kappa_plus[lo:hi] * p.kappa_minus[lo + 1 : hi + 1])
    return ReducedOperator(
        lo, hi, _frozen(diag), _frozen(off), _frozen(kp), _frozen(km),
        _frozen(p.sphere_measure[s]), _frozen(q), boundary,
    )


def reduced_operator(
    p: SymmetricProfile, i: int, boundary: Boundary = "dirichlet"
) -> ReducedOperator:
    """Radial operator on radii 0..i; Dirichlet means f(i+1) = 0."""
    if boundary not in ("dirichlet", "none"):
        raise ValueError(f"unknown boundary {boundary!r}")
    if i < 0:
        raise RadiusOutOfRange(f"radius {i} is negative")
    if boundary == "dirichlet" and i > p.outer_radius:
        p = p.extended(i)
        if i > p.outer_radius:
            raise RadiusOutOfRange(f"kappa_plus({i}) not tabulated")
    elif i > p.R:
        p = p.extended(i)
    return _assemble(p, 0, i, boundary)


def exterior_reduced_operator(p: SymmetricProfile, i: int, j: int) -> ReducedOperator:
    """Radial operator on radii i+1..j with f(i) = 0 and f(j+1) = 0."""
    if i < 0 or j < i + 1:
        raise RadiusOutOfRange(f"need 0 <= i < j, got i={i}, j={j}")
    if j > p.outer_radius:
        p = p.extended(j)
        if j > p.outer_radius:
            raise RadiusOutOfRange(f"kappa_plus({j}) not tabulated")
    return _assemble(p, i + 1, j, "dirichlet")


# ---------------------------------------------------------------------------
# radial solutions and ball statistics
# ---------------------------------------------------------------------------


def solve_recursion(
    p: SymmetricProfile, alpha: float, v0: float = 1.0, R: int | None = None
) -> np.ndarray:
    """Spherically symmetric solution of (L + alpha) v = 0 with v(0) = v0.

    v(r+1) = v(r) + (1/∂B(r)) Σ_{j<=r} (q(j) + alpha) m(S_j) v(j).
    """
    if R is None:
        R = p.outer_radius + 1
    if R > p.outer_radius + 1:
        p = p.extended(R)
    if R < 0 or R > p.outer_radius + 1:
        raise RadiusOutOfRange(f"radius {R} outside tabulated range")
    dB = p.boundary[:R]
    if np.any(~(dB > 0)):
        r = int(np.flatnonzero(~(dB > 0))[0])
        raise ZeroBoundary(f"boundary measure vanishes at r={r}")
    weight = (p.q[:R] + alpha) * p.sphere_measure[:R]
    v = np.empty(R + 1)
    v[0] = v0
    acc = 0.0
    for r in range(R):
        acc += weight[r] * v[r]
        v[r + 1] = v[r] + acc / dB[r]
    return v


def radial_residual(p: SymmetricProfile, v: np.ndarray, alpha: float) -> tuple[np.ndarray, np.ndarray]:
    """Residual of (J + alpha) v at radii 0..len(v)-2 and the matching term scale."""
    v = np.asarray(v, dtype=float)
    n = v.size - 1
    kp = p.kappa_plus[:n]
    km = p.kappa_minus[:n]
    qa = p.q[:n] + alpha
    prev = np.concatenate([[0.0], v[: n - 1]])
    t1 = kp * (v[:n] - v[1:])
    t2 = km * (v[:n] - prev)
    t3 = qa * v[:n]
    res = t1 + t2 + t3
    scale = np.abs(kp * v[:n]) + np.abs(kp * v[1:]) + np.abs(km * v[:n]) + np.abs(km * prev) + np.abs(t3)
    return res, scale


@dataclass(frozen=True)
class BallStats:
    volume: np.ndarray
    boundary: np.ndarray
    ratio: np.ndarray
    partial_sums: np.ndarray


def ball_stats(
    p: SymmetricProfile,
    R: int | None = None,
    weight: Literal["one", "q+1", "q+alpha"] = "one",
    alpha: float = 1.0,
) -> BallStats:
    """V_f(r), ∂B(r), V_f(r)/∂B(r) and its partial sums for r = 0..R.

    ``weight`` selects f ≡ 1, f = q + 1 or f = q + alpha.
    """
    if R is None:
        R = p.outer_radius
    if R > p.outer_radius:
        p = p.extended(R)
    if R < 0 or R > p.outer_radius:
        raise RadiusOutOfRange(f"radius {R} outside tabulated range 0..{p.outer_radius}")
    n = R + 1
    if weight == "one":
        f = np.ones(n)
    elif weight == "q+1":
        f = p.q[:n] + 1.0
    elif weight == "q+alpha":
        f = p.q[:n] + alpha
    else:
        raise ValueError(f"unknown weight {weight!r}")
    vol = np.cumsum(f * p.sphere_measure[:n])
    dB = p.boundary[:n]
    with np.errstate(divide="ignore"):
        ratio = vol / dB
    return BallStats(vol, dB.copy(), ratio, np.cumsum(ratio))


# ---------------------------------------------------------------------------
# summability criterion
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CriterionResult:
    """Outcome of Σ_r V(r)/∂B(r): ``converges`` (with upper bound a), ``diverges``
    or ``undetermined`` (tabulated data only)."""

    status: Literal["converges", "diverges", "undetermined"]
    a: float | None
    partial_sums: np.ndarray
    slope: float | None = None
    reason: str = ""

    def __str__(self) -> str:
        if self.status == "converges":
            return f"Converges(a<={self.a:.6g})"
        return self.status.capitalize()


def _antitree_sum_upper(beta: float) -> float:
    """Upper bound for Σ_r V(r)/(|S_r||S_{r+1}|) on the rounded r**beta antitree, beta > 2."""
    rule = GrowthRule.antitree(beta)
    N = int(min(200_000, (2.0**52) ** (1.0 / beta))) - 2
    s = rule.antitree_sizes(N + 2)
    V = np.cumsum(s[: N + 1])
    head = math.fsum(V / (s[: N + 1] * s[1 : N + 2])) * (1.0 + 1e-9)
    # tail r > N: V(r) <= 1 + r/2 + (r+1)^(b+1)/(b+1), |S_r| >= r^b - 1/2
    delta = (1.0 + N / 2.0) / (N + 1.0) ** (beta + 1.0)
    shrink = (1.0 - 0.5 * N ** (-beta)) ** 2
    const = (1.0 / (beta + 1.0) + delta) / shrink
    tail = const * (N ** (2.0 - beta) / (beta - 2.0) + N ** (1.0 - beta) / (beta - 1.0))
    return head + tail


def _tree_sum_upper(rule: GrowthRule) -> float:
    """Upper bound for Σ_r V(r)/|S_{r+1}| on a tree with k(r) ~ c (r+1)^d, d > 1.

    Uses g(r) = V(r)/|S_r| with g(r) = 1 + g(r-1)/k(r-1), so the terms are
    g(r)/k(r) and never overflow.
    """
    c, d = rule.coefficient, rule.degree
    N = 20_000
    k = rule.branching(N + 1)
    g = 1.0
    terms = np.empty(N + 1)
    for r in range(N + 1):
        if r:
            g = 1.0 + g / k[r - 1]
        terms[r] = g / k[r]
    head = math.fsum(terms) * (1.0 + 1e-9)
    K = k[N]
    G = max(g, K / (K - 1.0))
    eps = 1.0 / (2.0 * c * (N + 2.0) ** d)
    tail = G / (c * (1.0 - eps)) * (N + 1.0) ** (1.0 - d) / (d - 1.0)
    return head + tail


def criterion(p: SymmetricProfile, kind: CriterionKind = "spectrum") -> CriterionResult:
    """Decide Σ V_1/∂B (``spectrum``) or Σ V_{q+1}/∂B (``stochastic``).

    Definitive answers come only from a growth rule; tabulated profiles are
    reported as undetermined with their partial sums and the fitted log-log
    slope of the summand.
    """
    weight = "one" if kind == "spectrum" else "q+1"
    if kind not in ("spectrum", "stochastic"):
        raise ValueError(f"unknown criterion kind {kind!r}")
    stats = ball_stats(p, p.outer_radius, weight)
    partial = stats.partial_sums
    rule = p.rule
    q_zero = not np.any(p.q)
    if rule is not None and (kind == "spectrum" or q_zero):
        if rule.kind == "antitree":
            if rule.beta > 2:
                return CriterionResult("converges", _antitree_sum_upper(rule.beta), partial,
                                       reason=f"{rule.describe()}: beta > 2")
            return CriterionResult("diverges", None, partial,
                                   reason=f"{rule.describe()}: beta <= 2")
        if rule.degree > 1:
            return CriterionResult("converges", _tree_sum_upper(rule), partial,
                                   reason=f"{rule.describe()}: sum 1/k(r) converges")
        return CriterionResult("diverges", None, partial,
                               reason=f"{rule.describe()}: sum 1/k(r) diverges")
    if rule is not None and kind == "stochastic":
        # V_{q+1} >= V_1, so divergence of the potential-free sum carries over
        spec = criterion(p, "spectrum")
        if spec.status == "diverges":
            return CriterionResult("diverges", None, partial,
                                   reason="potential-free sum diverges and V_{q+1} >= V_1")
    return CriterionResult("undetermined", None, partial, _tail_slope(stats.ratio),
                           reason="tabulated profile: a finite table cannot decide a tail")


def _tail_slope(ratio: np.ndarray) -> float | None:
    R = ratio.size - 1
    r = np.arange(max(1, R // 2), R + 1)
    if r.size < 3 or np.any(~(ratio[r] > 0)) or np.any(~np.isfinite(ratio[r])):
        return None
    slope, _ = np.polyfit(np.log(r), np.log(ratio[r]), 1)
    return float(slope)
