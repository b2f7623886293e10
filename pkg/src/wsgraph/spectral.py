"""Bottom of the spectrum: exhaustion, volume bounds, certificates, comparisons."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import verdict as vd
from .errors import NotComparable, RadiusOutOfRange
from .graph import Layering, WeightedGraph, curvature, inner, layer, quadratic_form
from .profile import (
    SymmetricProfile,
    ball_stats,
    criterion,
    exterior_reduced_operator,
    reduced_operator,
    solve_recursion,
)
from .semigroup import (
    ExhaustionResult,
    Lambda0,
    SpectralDecomposition,
    Source,
    decompose,
    exhaust,
    heat_kernel_row,
    log_heat_kernel,
    lowest_eigenvalue,
    restrict,
)

DISCRETENESS_FACTOR = 10.0


def lambda0(d: SpectralDecomposition) -> float:
    return float(d.eigenvalues[0])


def rayleigh_quotient(graph: WeightedGraph, f: np.ndarray) -> float:
    return quadratic_form(graph, f) / inner(graph.measure, f, f)


def lambda0_limit(
    source: Source,
    tol: float = 1e-8,
    r_max: int | None = None,
    i0: int = 4,
    step: int = 2,
) -> ExhaustionResult:
    """Dirichlet ground states on growing balls; the last value bounds λ0 from above."""
    return exhaust(source, Lambda0(), tol, r_max, i0, step)


def volume_bound(p: SymmetricProfile) -> tuple[float, float] | None:
    """(a, 1/a) when Σ V_1(r)/∂B(r) is known to converge; a is an upper bound."""
    res = criterion(p, "spectrum")
    if res.status != "converges":
        return None
    return res.a, 1.0 / res.a


def certify_lower_bound(p: SymmetricProfile, lam: float, R: int | None = None) -> vd.Verdict:
    """Evidence that λ0 >= lam from a positive radial solution of (L - lam) v = 0.

    Positive needs v(r) > 0 for r <= R and the envelope
    v(r+1) >= 1 - lam Σ_{j<=r} V_1(j)/∂B(j) at every step.
    """
    if not lam > 0:
        raise ValueError("lam must be positive")
    if R is None:
        R = p.outer_radius + 1
    v = solve_recursion(p, -lam, 1.0, R)
    stats = ball_stats(p, R - 1) if R >= 1 else None
    envelope = 1.0 - lam * stats.partial_sums if stats is not None else np.zeros(0)
    positive = bool(np.all(v > 0))
    slack = 1e-12 * np.maximum(1.0, np.abs(envelope))
    env_ok = bool(np.all(v[1:] >= envelope - slack))
    ev = {
        "lam": lam,
        "radius": R,
        "min_v": float(v.min()),
        "argmin_v": int(np.argmin(v)),
        "envelope_min": float(envelope.min()) if envelope.size else 1.0,
        "envelope_holds": env_ok,
    }
    if positive and env_ok:
        return vd.positive(**ev)
    return vd.negative(**ev)


def exterior_lambda0(
    p: SymmetricProfile,
    i: int,
    offsets: Sequence[int] = (10, 20, 40, 80, 160),
    tol: float = 1e-8,
) -> tuple[float, list[tuple[int, float]], bool]:
    """Ground state of the radial operator on radii i+1..j, stabilized over j."""
    limit = None if p.rule is not None else p.outer_radius
    trace: list[tuple[int, float]] = []
    stable = False
    for off in offsets:
        j = i + off
        if limit is not None and j > limit:
            j = limit
        if j < i + 1 or (trace and j == trace[-1][0]):
            break
        val = lowest_eigenvalue(exterior_reduced_operator(p, i, j))
        if trace and abs(val - trace[-1][1]) <= tol * max(1.0, abs(val)):
            stable = True
        trace.append((j, val))
        if stable:
            break
    if not trace:
        raise RadiusOutOfRange(f"no exterior annulus beyond radius {i}")
    return trace[-1][1], trace, stable


@dataclass(frozen=True)
class EssentialProbe:
    exterior_trace: list[tuple[int, float]]
    lower_bounds: list[tuple[int, float]] | None
    discreteness: vd.Verdict


def essential_probe(
    p: SymmetricProfile,
    i_list: Sequence[int] | None = None,
    offsets: Sequence[int] = (10, 20, 40, 80, 160),
    lambda0_estimate: float | None = None,
) -> EssentialProbe:
    """Exterior Dirichlet ground states λ0 on B_i^c for increasing i.

    Discreteness is reported Positive only when the summability criterion
    converges and the last exterior value exceeds ten times the λ0 estimate.
    """
    if i_list is None:
        top = 40 if p.rule is not None else max(0, p.outer_radius - 2)
        i_list = [i for i in (0, 1, 2, 5, 10, 20, 40) if i <= top]
    trace = []
    for i in i_list:
        val, _, _ = exterior_lambda0(p, i, offsets)
        trace.append((int(i), val))
    crit = criterion(p, "spectrum")
    bounds = None
    if crit.status == "converges":
        stats = ball_stats(p.extended(max(i_list)), max(i_list))
        bounds = [(i, float(1.0 / (crit.a - stats.partial_sums[i]))) for i, _ in trace]
    if lambda0_estimate is None:
        lambda0_estimate = lambda0_limit(p).value
    values = np.array([v for _, v in trace])
    monotone = bool(np.all(np.diff(values) >= -1e-9 * np.maximum(1.0, values[1:])))
    ev = {
        "lambda0_estimate": lambda0_estimate,
        "last_exterior": float(values[-1]),
        "factor": DISCRETENESS_FACTOR,
        "monotone": monotone,
        "criterion": str(crit),
    }
    if (
        crit.status == "converges"
        and monotone
        and values[-1] > DISCRETENESS_FACTOR * lambda0_estimate
    ):
        verdict = vd.positive(**ev)
    else:
        verdict = vd.undetermined(**ev)
    return EssentialProbe(trace, bounds, verdict)


def li_estimate(
    d: SpectralDecomposition, x: int, y: int, t_grid: Sequence[float]
) -> np.ndarray:
    """-ln p_t(x, y)/t along ``t_grid``; tends to the ground state as t grows."""
    return np.array([-log_heat_kernel(d, t, x, y) / t for t in t_grid])


# ---------------------------------------------------------------------------
# comparison with weakly spherically symmetric graphs
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CurvatureComparison:
    """Outcome of comparing per-vertex curvatures against a profile.

    ``label`` is Stronger, Weaker or Neither; when both inequalities hold
    (equal curvatures) it is Stronger.
    """

    label: str
    stronger: bool
    weaker: bool
    root_measure_ok: bool
    radius: int
    detail: list[dict] = field(default_factory=list)


def _comparison_radius(layering: Layering, radius: int | None) -> int:
    top = max(layering.R - 1, 0)
    if radius is None:
        return top
    if not 0 <= radius <= top:
        raise RadiusOutOfRange(f"comparison radius {radius} outside 0..{top}")
    return radius


def curvature_compare(
    graph: WeightedGraph,
    layering: Layering,
    p: SymmetricProfile,
    radius: int | None = None,
    atol: float = 1e-12,
) -> CurvatureComparison:
    """Compare κ±(x) with κ±_sym(r) on spheres 0..radius.

    The outermost sphere of an explicit graph is its truncation frontier
    (no outer edges), so the default radius stops one short of it.
    """
    radius = _comparison_radius(layering, radius)
    p = p.extended(radius)
    if radius > p.outer_radius:
        raise RadiusOutOfRange(f"profile has no kappa_plus at radius {radius}")
    cur = curvature(graph, layering)
    root_ok = abs(graph.measure[layering.root] - p.sphere_measure[0]) <= atol * max(
        1.0, p.sphere_measure[0]
    )
    stronger = weaker = root_ok
    detail = []
    for r in range(radius + 1):
        s = layering.spheres[r]
        kp, km = cur.kappa_plus[s], cur.kappa_minus[s]
        kp_sym, km_sym = p.kappa_plus[r], p.kappa_minus[r]
        s_ok = kp.min() >= kp_sym - atol and km.max() <= km_sym + atol
        w_ok = kp.max() <= kp_sym + atol and km.min() >= km_sym - atol
        stronger &= s_ok
        weaker &= w_ok
        detail.append({
            "r": r,
            "kappa_plus": (float(kp.min()), float(kp.max())),
            "kappa_plus_sym": float(kp_sym),
            "kappa_minus": (float(km.min()), float(km.max())),
            "kappa_minus_sym": float(km_sym),
            "stronger": bool(s_ok),
            "weaker": bool(w_ok),
        })
    label = "Stronger" if stronger else "Weaker" if weaker else "Neither"
    return CurvatureComparison(label, bool(stronger), bool(weaker), bool(root_ok), radius, detail)


@dataclass(frozen=True)
class ComparisonReport:
    label: str
    radius: int
    lambda0_graph: float
    lambda0_sym: float
    lambda0_ok: bool
    kernel_checks: int
    max_violation: float
    violations: list[str]

    @property
    def ok(self) -> bool:
        return self.lambda0_ok and not self.violations

    def lines(self) -> list[str]:
        rel = ">=" if self.label == "Stronger" else "<="
        out = [
            f"curvature growth: {self.label}",
            f"radius: {self.radius}",
            f"lambda0(ball): {self.lambda0_graph:.6g}",
            f"lambda0(profile): {self.lambda0_sym:.6g}",
            f"lambda0 ordering ball {rel} profile: {'holds' if self.lambda0_ok else 'VIOLATED'}",
            f"kernel inequalities checked: {self.kernel_checks}",
            f"kernel violations: {len(self.violations)}",
        ]
        out.extend(f"violation: {v}" for v in self.violations)
        return out


def comparison_report(
    graph: WeightedGraph,
    p: SymmetricProfile,
    t_grid: Sequence[float],
    i: int,
    slack: float = 1e-10,
) -> ComparisonReport:
    """Check the heat kernel and ground state orderings on B_i against the profile.

    Stronger curvature growth: p_sym^i(t, r) >= p^i_t(root, x) for x in S_r and
    λ0(ball) >= λ0(profile); Weaker reverses both.
    """
    lay = layer(graph)
    cmp_ = curvature_compare(graph, lay, p, radius=i)
    if cmp_.label == "Neither":
        raise NotComparable("curvature growth is neither stronger nor weaker than the profile")
    if np.any(graph.potential) or np.any(p.q[: i + 1]):
        raise NotComparable("the comparison needs vanishing potentials on both sides")
    sign = 1.0 if cmp_.label == "Stronger" else -1.0
    ball = restrict(graph, lay, i)
    d = decompose(ball)
    d_sym = decompose(reduced_operator(p, i, "dirichlet"))
    radii = lay.radius_of[d.labels]
    violations: list[str] = []
    worst = 0.0
    checks = 0
    for t in t_grid:
        row = heat_kernel_row(d, t, lay.root)
        row_sym = heat_kernel_row(d_sym, t, 0)
        gap = sign * (row_sym[radii] - row)
        checks += gap.size
        worst = max(worst, float(-gap.min()))
        for k in np.flatnonzero(gap < -slack):
            violations.append(
                f"t={t:g} x={int(d.labels[k])} r={int(radii[k])}: "
                f"p_sym={row_sym[radii[k]]:.17g} p={row[k]:.17g}"
            )
    l_graph, l_sym = lambda0(d), lambda0(d_sym)
    l_ok = sign * (l_graph - l_sym) >= -slack
    return ComparisonReport(cmp_.label, i, l_graph, l_sym, bool(l_ok), checks, worst, violations)


# ---------------------------------------------------------------------------
# report
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SpectrumReport:
    """Ground state estimate with its supporting evidence."""

    exhaustion: ExhaustionResult
    volume_bound: tuple[float, float] | None = None
    certificate: vd.Verdict | None = None
    probe: EssentialProbe | None = None

    @property
    def estimate(self) -> float:
        return self.exhaustion.value

    def lines(self) -> list[str]:
        ex = self.exhaustion
        out = [
            f"lambda0 estimate (upper bound): {ex.value:.6g}",
            f"last radius: {int(ex.radii[-1])}",
            f"trace converged: {'yes' if ex.converged else 'no'}",
        ]
        if ex.note:
            out.append(f"note: {ex.note}")
        if self.volume_bound is not None:
            a, inv = self.volume_bound
            out.append(f"volume sum bound a: {a:.6g}")
            out.append(f"lambda0 lower bound 1/a: {inv:.6g}")
        if self.certificate is not None:
            out.append(f"lower bound certificate: {self.certificate.outcome.value}")
        if self.probe is not None:
            last_i, last_v = self.probe.exterior_trace[-1]
            out.append(f"exterior lambda0 at radius {last_i}: {last_v:.6g}")
            out.append(f"discreteness: {self.probe.discreteness.outcome.value}")
        return out


def spectrum_report(
    source: Source, tol: float = 1e-8, r_max: int | None = None
) -> SpectrumReport:
    """Exhaustion trace, plus volume bound, certificate and exterior probe for profiles."""
    ex = lambda0_limit(source, tol, r_max)
    if not isinstance(source, SymmetricProfile):
        return SpectrumReport(ex)
    vb = volume_bound(source)
    cert = None
    if vb is not None:
        R = max(source.outer_radius + 1, int(ex.radii[-1]))
        cert = certify_lower_bound(source, vb[1], R)
    probe = None
    if source.rule is not None or source.outer_radius >= 3:
        probe = essential_probe(source, lambda0_estimate=ex.value)
    return SpectrumReport(ex, vb, cert, probe)
