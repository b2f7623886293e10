"""Stochastic completeness at infinity: classification, radial solutions, mass deficits."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .graph import Layering, WeightedGraph, layer
from .profile import CriterionResult, SymmetricProfile, ball_stats, criterion, solve_recursion
from .semigroup import ExhaustionResult, MassAt, Source, exhaust
from .spectral import EssentialProbe, curvature_compare, essential_probe, volume_bound

ENVELOPE_SLACK = 1e-10


@dataclass(frozen=True)
class BoundednessDiagnosis:
    """Radial solution of (L + alpha) v = 0 with v(0) = 1 and its two envelopes.

    ``lower`` is 1 + Σ_{j<r} V_{q+α}(j)/∂B(j) and ``upper`` the product
    Π_{j<r} (1 + V_{q+α}(j)/∂B(j)); v lies between them.
    """

    alpha: float
    v: np.ndarray
    lower: np.ndarray
    upper: np.ndarray
    lower_ok: bool
    upper_ok: bool

    @property
    def v_end(self) -> float:
        return float(self.v[-1])

    @property
    def lower_sum(self) -> float:
        return float(self.lower[-1] - 1.0)

    @property
    def product(self) -> float:
        return float(self.upper[-1])


def solution_boundedness(p: SymmetricProfile, alpha: float = 1.0, R: int | None = None) -> BoundednessDiagnosis:
    if not alpha > 0:
        raise ValueError("alpha must be positive")
    if R is None:
        R = p.outer_radius + 1
    v = solve_recursion(p, alpha, 1.0, R)
    if R >= 1:
        ratio = ball_stats(p, R - 1, "q+alpha", alpha).ratio
    else:
        ratio = np.zeros(0)
    lower = np.concatenate([[1.0], 1.0 + np.cumsum(ratio)])
    upper = np.concatenate([[1.0], np.cumprod(1.0 + ratio)])
    lower_ok = bool(np.all(v >= lower - ENVELOPE_SLACK * np.maximum(1.0, lower)))
    upper_ok = bool(np.all(v <= upper + ENVELOPE_SLACK * np.maximum(1.0, upper)))
    return BoundednessDiagnosis(alpha, v, lower, upper, lower_ok, upper_ok)


@dataclass(frozen=True)
class DeficitResult:
    deficit: float
    trace: ExhaustionResult
    converged: bool


def mass_deficit(
    source: Source,
    t: float = 1.0,
    tol: float = 1e-8,
    r_max: int | None = None,
    i0: int = 4,
    step: int = 2,
) -> DeficitResult:
    """1 - lim_i M_t^i(root) estimated along the exhaustion.

    A positive plateau is numerical evidence of heat escaping to infinity,
    not a proof.
    """
    if not t > 0:
        raise ValueError("t must be positive")
    root = 0
    if isinstance(source, WeightedGraph):
        root = source.root
    res = exhaust(source, MassAt(t, root), tol, r_max, i0, step)
    return DeficitResult(1.0 - res.value, res, res.converged)


@dataclass(frozen=True)
class CompletenessReport:
    verdict: str
    criterion: CriterionResult
    envelopes: BoundednessDiagnosis
    mass: ExhaustionResult | None
    t: float
    volume_bound: tuple[float, float] | None = None
    probe: EssentialProbe | None = None

    def lines(self) -> list[str]:
        out = [
            f"verdict: {self.verdict}",
            f"criterion: {self.criterion}",
            f"criterion reason: {self.criterion.reason}",
        ]
        if self.criterion.partial_sums.size:
            out.append(f"partial sum at radius {self.criterion.partial_sums.size - 1}: "
                       f"{self.criterion.partial_sums[-1]:.6g}")
        if self.criterion.slope is not None:
            out.append(f"fitted tail slope: {self.criterion.slope:.6g}")
        env = self.envelopes
        out += [
            f"alpha: {env.alpha:g}",
            f"v(R): {env.v_end:.6g}",
            f"lower envelope sum: {env.lower_sum:.6g} ({'holds' if env.lower_ok else 'VIOLATED'})",
            f"product upper bound: {env.product:.6g} ({'holds' if env.upper_ok else 'VIOLATED'})",
        ]
        if self.mass is not None:
            out += [
                f"t: {self.t:g}",
                f"mass at radius {int(self.mass.radii[-1])}: {self.mass.value:.6g}",
                f"mass deficit estimate: {1.0 - self.mass.value:.6g}",
                f"mass trace converged: {'yes' if self.mass.converged else 'no'}",
            ]
        if self.volume_bound is not None:
            out.append(f"lambda0 lower bound 1/a: {self.volume_bound[1]:.6g}")
        if self.probe is not None:
            out.append(f"discreteness: {self.probe.discreteness.outcome.value}")
        return out


def classify(
    p: SymmetricProfile,
    alpha: float = 1.0,
    t: float = 1.0,
    mass_r_max: int | None = 200,
    tol: float = 1e-8,
) -> CompletenessReport:
    """Complete iff the stochastic sum diverges, Incomplete iff it converges.

    The mass trace is evidence only; pass ``mass_r_max=None`` to skip it.
    """
    crit = criterion(p, "stochastic")
    verdict = {"diverges": "Complete", "converges": "Incomplete"}.get(crit.status, "Undetermined")
    R = p.outer_radius + 1 if p.rule is None else max(p.outer_radius + 1, 60)
    envelopes = solution_boundedness(p, alpha, R)
    mass = None
    if mass_r_max is not None:
        r_max = mass_r_max if p.rule is not None else min(mass_r_max, p.outer_radius)
        mass = exhaust(p, MassAt(t, 0), tol, r_max)
    vb = probe = None
    if verdict == "Incomplete":
        vb = volume_bound(p)
        probe = essential_probe(p)
    return CompletenessReport(verdict, crit, envelopes, mass, t, vb, probe)


def _potential_flags(
    graph: WeightedGraph, layering: Layering, p: SymmetricProfile, radius: int, atol: float
) -> tuple[bool, bool]:
    q = graph.potential / graph.measure
    stronger = weaker = True
    for r in range(radius + 1):
        s = q[layering.spheres[r]]
        stronger &= bool(s.min() >= p.q[r] - atol)
        weaker &= bool(s.max() <= p.q[r] + atol)
    return stronger, weaker


def potential_compare(
    graph: WeightedGraph,
    layering: Layering,
    p: SymmetricProfile,
    radius: int | None = None,
    atol: float = 1e-12,
) -> str:
    """Stronger iff q(x) >= q_sym(r) on every sphere, Weaker if reversed, else Neither."""
    radius = layering.R if radius is None else radius
    stronger, weaker = _potential_flags(graph, layering, p.extended(radius), radius, atol)
    return "Stronger" if stronger else "Weaker" if weaker else "Neither"


@dataclass(frozen=True)
class TransferResult:
    """Graph verdict inferred from a comparison profile, with the premises used."""

    verdict: str
    premises: dict = field(default_factory=dict)

    def lines(self) -> list[str]:
        return [f"transferred verdict: {self.verdict}"] + [
            f"{k}: {v}" for k, v in self.premises.items()
        ]


def sc_transfer(graph: WeightedGraph, p: SymmetricProfile, radius: int | None = None) -> TransferResult:
    """Carry a completeness verdict from a profile over to a comparable graph.

    Stronger curvature and weaker potential pass on Incomplete; weaker
    curvature and stronger potential pass on Complete.
    """
    lay = layer(graph)
    curv = curvature_compare(graph, lay, p, radius)
    report = classify(p, mass_r_max=None)
    # equality counts on both sides of each comparison
    pot_s, pot_w = _potential_flags(graph, lay, p.extended(curv.radius), curv.radius, 1e-12)
    if curv.stronger and pot_w and report.verdict == "Incomplete":
        verdict = "Incomplete"
    elif curv.weaker and pot_s and report.verdict == "Complete":
        verdict = "Complete"
    else:
        verdict = "Undetermined"
    premises = {
        "curvature": curv.label,
        "curvature stronger": curv.stronger,
        "curvature weaker": curv.weaker,
        "root measure matches": curv.root_measure_ok,
        "compared radii": f"0..{curv.radius}",
        "potential stronger": pot_s,
        "potential weaker": pot_w,
        "profile verdict": report.verdict,
        "profile criterion": str(report.criterion),
    }
    return TransferResult(verdict, premises)

