"""Sampling-based verification of the monogamy machinery.

Each suite walks a seeded ensemble, checks the relevant inequality with the
package-wide tolerance (slack >= -1e-9 for state-level checks, -1e-12 for
scalar lemmas), and reports a VerificationSummary. Violations are reported,
never thrown; the worst (most negative) slack and the first worst offending
state are kept so a reported failure can be reproduced from its JSON alone.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import tensor
from .measures import (
    Measure,
    MeasureKind,
    as_kind,
    concurrence_two_qubit,
    eof_from_concurrence,
)
from .monogamy import _pow, base_values, monogamy_score
from .states import (
    EnsembleSpec,
    MultipartiteState,
    box_muller,
    generator,
    haar_vector,
    sample_states,
    state_to_json,
)

STATE_TOL = 1e-9
SCALAR_TOL = 1e-12


@dataclass
class VerificationSummary:
    """Per-suite pass/fail statistics over a sampled ensemble."""

    theorem: str
    ensemble: dict
    count: int = 0
    passes: int = 0
    skipped: int = 0
    violations: int = 0
    worst_margin: float = math.inf
    offender: dict | None = None
    extra: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return self.violations == 0

    def _finalize(self) -> "VerificationSummary":
        if not math.isfinite(self.worst_margin):
            self.worst_margin = 0.0
        return self

    def to_json(self) -> dict:
        return {
            "theorem": self.theorem,
            "ensemble": self.ensemble,
            "count": self.count,
            "passes": self.passes,
            "skipped": self.skipped,
            "violations": self.violations,
            "worst_margin": self.worst_margin,
            "offender": self.offender,
            "extra": self.extra,
        }


def _describe(ensemble, seed: int) -> dict:
    if isinstance(ensemble, EnsembleSpec):
        desc = ensemble.describe()
    else:
        states = list(ensemble)
        desc = {
            "family": "explicit",
            "count": len(states),
            "dims": list(states[0].dims) if states else [],
        }
    desc["seed"] = int(seed)
    return desc


def _materialize(ensemble, seed: int) -> list[MultipartiteState]:
    if isinstance(ensemble, EnsembleSpec):
        return sample_states(ensemble, seed)
    return list(ensemble)


class _Worst:
    """Tracks the most negative slack and the state that produced it."""

    def __init__(self):
        self.margin = math.inf
        self.state = None

    def record(self, slack: float, state=None):
        if slack < self.margin:
            self.margin = slack
            self.state = state


# ---------------------------------------------------------------------------
# scalar proof lemmas
# ---------------------------------------------------------------------------

def check_scalar_lemmas(samples: int, seed: int) -> VerificationSummary:
    """Random audit of the scalar inequalities behind the power theorems.

    Families (drawn uniformly on their stated domains, sampling windows
    t in [1, 5], s - t in [0, 4], x in (0, 10] for the lowering lemma,
    vectors of length 4 in [0, 1]):

      1. (1+x)^t >= 1 + x^t          for 0 <= x <= 1, t >= 1
      2. (sum x_i^t)^(s/t) >= sum x_i^s   for 0 <= x_i <= 1, s >= t >= 1
      3. (1+x)^t <= 1 + x^t          for x > 0, t <= 1
      4. sum a_i b_i <= sqrt(sum a_i^2 sum b_i^2)   (Cauchy-Schwarz)
    """
    samples = int(samples)
    if samples < 1:
        raise ValueError("samples must be >= 1")
    summary = VerificationSummary("scalar-lemmas", {"samples": samples, "seed": int(seed)})
    rng = generator(seed)
    per_family = {}

    x = rng.random(samples)
    t = 1.0 + 4.0 * rng.random(samples)
    slack = (1.0 + x) ** t - (1.0 + x**t)
    per_family["raise_binomial"] = slack

    xs = rng.random((samples, 4))
    t = 1.0 + 4.0 * rng.random(samples)
    s = t + 4.0 * rng.random(samples)
    slack = (xs**t[:, None]).sum(axis=1) ** (s / t) - (xs ** s[:, None]).sum(axis=1)
    per_family["raise_power_sum"] = slack

    x = 10.0 * (1.0 - rng.random(samples))  # in (0, 10]
    t = 1.0 - rng.random(samples)  # in (0, 1]
    slack = (1.0 + x**t) - (1.0 + x) ** t
    per_family["lower_binomial"] = slack

    a = rng.random((samples, 4))
    b = rng.random((samples, 4))
    slack = np.sqrt((a**2).sum(axis=1) * (b**2).sum(axis=1)) - (a * b).sum(axis=1)
    per_family["cauchy_schwarz"] = slack

    worst = math.inf
    for name, sl in per_family.items():
        fam_min = float(sl.min())
        fam_viol = int((sl < -SCALAR_TOL).sum())
        summary.extra[name] = {"worst_margin": fam_min, "violations": fam_viol}
        summary.count += samples
        summary.violations += fam_viol
        summary.passes += samples - fam_viol
        worst = min(worst, fam_min)
    summary.worst_margin = worst
    return summary._finalize()


def check_decreasing_concave_family(samples: int, seed: int) -> VerificationSummary:
    """Random audit of the reversed functional transfer for decreasing concave
    maps, on the synthetic family f(x) = 1 - x^c with c >= 1.

    Given a monogamous configuration w >= sum x_j (all in [0, 1]), the claim
    checked on the sampled domain is f(w)^m <= sum f(x_j)^m. The companion
    side condition f^m(sum x_j) >= sum f^m(x_j) is tabulated but not
    asserted, since it fails on most of the domain.
    """
    samples = int(samples)
    if samples < 1:
        raise ValueError("samples must be >= 1")
    summary = VerificationSummary(
        "decreasing-concave-family", {"samples": samples, "seed": int(seed)}
    )
    rng = generator(seed)
    w = rng.random(samples)
    raw = rng.random((samples, 3))
    scale = w * rng.random(samples) / np.maximum(raw.sum(axis=1), 1e-300)
    xs = raw * scale[:, None]  # sum_j x_j <= w by construction
    c = 1.0 + 3.0 * rng.random(samples)
    m = 1.0 + 2.0 * rng.random(samples)

    f_w = 1.0 - w**c
    f_xs = 1.0 - xs ** c[:, None]
    slack = (f_xs ** m[:, None]).sum(axis=1) - f_w**m
    side = (1.0 - xs.sum(axis=1) ** c) ** m - (f_xs ** m[:, None]).sum(axis=1)

    summary.count = samples
    summary.violations = int((slack < -SCALAR_TOL).sum())
    summary.passes = samples - summary.violations
    summary.worst_margin = float(slack.min())
    summary.extra["side_condition_holds_fraction"] = float((side >= -SCALAR_TOL).mean())
    return summary._finalize()


# ---------------------------------------------------------------------------
# power raising / lowering transfer
# ---------------------------------------------------------------------------

def _normalized(kind) -> MeasureKind:
    return MeasureKind(as_kind(kind).tag, normalized=True)


def verify_raising(kind, ensemble, r: float, alphas, seed: int) -> VerificationSummary:
    """States monogamous at exponent r must stay monogamous at every alpha >= r.

    The measure is coerced to its normalized variant so values lie in [0, 1].
    States with delta(r) < -1e-9 do not satisfy the hypothesis and are
    counted as skipped.
    """
    kind = _normalized(kind)
    r = float(r)
    alphas = tuple(float(a) for a in alphas)
    if any(a < r for a in alphas):
        raise ValueError(f"all alphas must be >= r = {r}")
    summary = VerificationSummary("power-raising", _describe(ensemble, seed))
    summary.extra.update({"measure": kind.label(), "r": r, "alphas": list(alphas)})
    worst = _Worst()
    for state in _materialize(ensemble, seed):
        summary.count += 1
        whole, parts = base_values(kind, state, 0)
        d_r = _pow(whole, r) - math.fsum(_pow(p, r) for p in parts)
        if d_r < -STATE_TOL:
            summary.skipped += 1
            continue
        slacks = [_pow(whole, a) - math.fsum(_pow(p, a) for p in parts) for a in alphas]
        slack = min(slacks)
        worst.record(slack, state)
        if slack < -STATE_TOL:
            summary.violations += 1
        else:
            summary.passes += 1
    summary.worst_margin = worst.margin
    if summary.violations and worst.state is not None:
        summary.offender = state_to_json(worst.state)
    return summary._finalize()


def verify_lowering(kind, ensemble, r: float, alphas, seed: int) -> VerificationSummary:
    """States non-monogamous at exponent r must stay so at every alpha <= r.

    Slack here is sum_j Q^alpha_j - Q^alpha(whole); states with
    delta(r) > 1e-9 are skipped (hypothesis not met).
    """
    kind = _normalized(kind)
    r = float(r)
    alphas = tuple(float(a) for a in alphas)
    if any(a > r for a in alphas):
        raise ValueError(f"all alphas must be <= r = {r}")
    if any(a <= 0.0 for a in alphas):
        raise ValueError("alphas must be positive")
    summary = VerificationSummary("power-lowering", _describe(ensemble, seed))
    summary.extra.update({"measure": kind.label(), "r": r, "alphas": list(alphas)})
    worst = _Worst()
    for state in _materialize(ensemble, seed):
        summary.count += 1
        whole, parts = base_values(kind, state, 0)
        d_r = _pow(whole, r) - math.fsum(_pow(p, r) for p in parts)
        if d_r > STATE_TOL:
            summary.skipped += 1
            continue
        slacks = [
            math.fsum(_pow(p, a) for p in parts) - _pow(whole, a) for a in alphas
        ]
        slack = min(slacks)
        worst.record(slack, state)
        if slack < -STATE_TOL:
            summary.violations += 1
        else:
            summary.passes += 1
    summary.worst_margin = worst.margin
    if summary.violations and worst.state is not None:
        summary.offender = state_to_json(worst.state)
    return summary._finalize()


# ---------------------------------------------------------------------------
# functional lift (squared entanglement of formation)
# ---------------------------------------------------------------------------

def verify_functional_lift(ensemble, m: float, seed: int) -> VerificationSummary:
    """Monotone-convex transfer instantiated for squared entanglement of
    formation built on squared concurrence.

    For pure states the full score E^m(whole) - sum_j E^m(pair_j) is
    asserted (whole-cut E is the entanglement entropy). Mixed states have no
    exact whole-cut E, so only the scalar side condition
    E(sqrt(sum c_j^2))^m >= sum E(c_j)^m on the sampled pair concurrences is
    asserted for them; configurations with sum c_j^2 > 1 are flagged as out
    of range rather than failed.
    """
    m = float(m)
    summary = VerificationSummary("functional-lift-eof", _describe(ensemble, seed))
    summary.extra.update({"m": m, "out_of_range": 0, "mixed_restricted": 0})
    worst = _Worst()
    for state in _materialize(ensemble, seed):
        summary.count += 1
        others = [i for i in range(state.n_subsystems) if i != 0]
        pairs = [
            tensor.partial_trace(state.rho, state.dims, [0, j]) for j in others
        ]
        cs = [concurrence_two_qubit(p) for p in pairs]
        eofs = [eof_from_concurrence(c) for c in cs]
        slacks = []
        if state.is_pure():
            whole = tensor.von_neumann_entropy(
                tensor.partial_trace(state.rho, state.dims, [0])
            )
            slacks.append(_pow(whole, m) - math.fsum(_pow(e, m) for e in eofs))
        else:
            summary.extra["mixed_restricted"] += 1
        y = math.fsum(c * c for c in cs)
        if y <= 1.0 + SCALAR_TOL:
            side = _pow(eof_from_concurrence(math.sqrt(min(y, 1.0))), m) - math.fsum(
                _pow(e, m) for e in eofs
            )
            slacks.append(side)
        else:
            summary.extra["out_of_range"] += 1
        slack = min(slacks) if slacks else 0.0
        worst.record(slack, state)
        if slack < -STATE_TOL:
            summary.violations += 1
        else:
            summary.passes += 1
    summary.worst_margin = worst.margin
    if summary.violations and worst.state is not None:
        summary.offender = state_to_json(worst.state)
    return summary._finalize()


# ---------------------------------------------------------------------------
# mixed-state lifting (squared negativity) and the high-power probe
# ---------------------------------------------------------------------------

_MIXED_COMPUTABLE = (Measure.NEGATIVITY, Measure.LOG_NEGATIVITY)


def verify_mixed_lifting(kind, ensemble, seed: int) -> VerificationSummary:
    """Squared-measure monogamy on mixed-state ensembles.

    Only the negativity family is directly computable on mixed cuts, so the
    measure is restricted to it. delta at r = 2 is asserted; delta at r = 1
    is tabulated in extra without assertion.
    """
    kind = _normalized(kind)
    if kind.tag not in _MIXED_COMPUTABLE:
        raise ValueError(
            f"mixed-state lifting needs a mixed-computable measure, got {kind.label()}"
        )
    summary = VerificationSummary("mixed-lifting", _describe(ensemble, seed))
    summary.extra["measure"] = kind.label()
    worst = _Worst()
    r1 = []
    for state in _materialize(ensemble, seed):
        summary.count += 1
        whole, parts = base_values(kind, state, 0)
        slack = _pow(whole, 2.0) - math.fsum(_pow(p, 2.0) for p in parts)
        r1.append(whole - math.fsum(parts))
        worst.record(slack, state)
        if slack < -STATE_TOL:
            summary.violations += 1
        else:
            summary.passes += 1
    summary.worst_margin = worst.margin
    if summary.violations and worst.state is not None:
        summary.offender = state_to_json(worst.state)
    if r1:
        summary.extra["r1_scores"] = {
            "min": float(min(r1)),
            "max": float(max(r1)),
            "nonnegative_fraction": float(
                sum(1 for v in r1 if v >= -STATE_TOL) / len(r1)
            ),
        }
    return summary._finalize()


def probe_high_power_mixed(r_values, ensemble, seed: int, kind=Measure.NEGATIVITY) -> VerificationSummary:
    """Exploratory scores delta(r) for r >= 2 on mixed ensembles.

    Asserts nothing (the high-power mixed case is open); records worst
    margins per exponent and cross-checks the implication that delta(2) >= 0
    with values in [0, 1] forces delta(r) >= 0 for r > 2.
    """
    rs = tuple(float(r) for r in r_values)
    if any(r < 2.0 for r in rs):
        raise ValueError("probe exponents must be >= 2 (r = 2 allowed as control)")
    kind = _normalized(kind)
    if kind.tag not in _MIXED_COMPUTABLE:
        raise ValueError("probe needs a mixed-computable measure")
    summary = VerificationSummary("probe-high-power", _describe(ensemble, seed))
    summary.extra.update({"measure": kind.label(), "r_values": list(rs)})
    per_r = {r: math.inf for r in rs}
    implication_violations = 0
    for state in _materialize(ensemble, seed):
        summary.count += 1
        summary.passes += 1
        whole, parts = base_values(kind, state, 0)
        d2 = _pow(whole, 2.0) - math.fsum(_pow(p, 2.0) for p in parts)
        for r in rs:
            d = _pow(whole, r) - math.fsum(_pow(p, r) for p in parts)
            per_r[r] = min(per_r[r], d)
            if d2 >= -STATE_TOL and d < -STATE_TOL:
                implication_violations += 1
    summary.worst_margin = min(per_r.values()) if per_r else 0.0
    summary.extra["worst_margin_per_r"] = {f"{r:g}": float(v) for r, v in per_r.items()}
    summary.extra["implication_violations"] = implication_violations
    return summary._finalize()


# ---------------------------------------------------------------------------
# strong monogamy and hierarchy chains over ensembles
# ---------------------------------------------------------------------------

def verify_strong_chain(kind, ensemble, alpha: float, seed: int, focus: int = 0) -> VerificationSummary:
    """Both gaps of the strong monogamy chain on every sampled state."""
    from .monogamy import strong_monogamy_report

    summary = VerificationSummary("strong-monogamy", _describe(ensemble, seed))
    summary.extra.update({"measure": as_kind(kind).label(), "alpha": float(alpha)})
    worst = _Worst()
    for state in _materialize(ensemble, seed):
        summary.count += 1
        rep = strong_monogamy_report(kind, state, focus, alpha)
        slack = min(rep.whole - rep.subset_average, rep.subset_average - rep.pair_sum)
        worst.record(slack, state)
        if slack < -STATE_TOL:
            summary.violations += 1
        else:
            summary.passes += 1
    summary.worst_margin = worst.margin
    if summary.violations and worst.state is not None:
        summary.offender = state_to_json(worst.state)
    return summary._finalize()


def verify_hierarchy_chain(kind, ensemble, alpha: float, seed: int, focus: int = 0,
                           partner: int | None = None) -> VerificationSummary:
    """Every hierarchy level must stay below the whole-cut value."""
    from .monogamy import hierarchy_chain, monogamy_score as _score

    summary = VerificationSummary("hierarchy", _describe(ensemble, seed))
    summary.extra.update({"measure": as_kind(kind).label(), "alpha": float(alpha)})
    worst = _Worst()
    for state in _materialize(ensemble, seed):
        summary.count += 1
        p = partner if partner is not None else next(
            i for i in range(state.n_subsystems) if i != focus
        )
        whole = _score(kind, state, focus, alpha).whole
        rep = hierarchy_chain(kind, state, focus, p, alpha)
        slack = min(whole - lvl for lvl in rep.levels)
        worst.record(slack, state)
        if slack < -STATE_TOL:
            summary.violations += 1
        else:
            summary.passes += 1
    summary.worst_margin = worst.margin
    if summary.violations and worst.state is not None:
        summary.offender = state_to_json(worst.state)
    return summary._finalize()


# ---------------------------------------------------------------------------
# counterexample search
# ---------------------------------------------------------------------------

def counterexample_search(kind, r: float, dims, restarts: int, seed: int,
                          max_steps: int = 400) -> VerificationSummary:
    """Hill-climbing search for pure states minimizing the monogamy score.

    Each restart draws a Haar pure state and perturbs one random coordinate
    of the real parametrization at a time, accepting only improvements.
    Step size starts at 0.1, halves after 20 consecutive rejections, and the
    climb stops below 1e-6 (or after max_steps evaluations; max_steps = 0
    returns the best of the unperturbed restarts). Asserts nothing; the most
    negative score found and its state are reported, and every restart's
    best is kept in extra["restart_bests"] for harvesting.
    """
    kind = as_kind(kind)
    r = float(r)
    if r <= 0.0:
        raise ValueError("r must be positive")
    restarts = int(restarts)
    if restarts < 1:
        raise ValueError("restarts must be >= 1")
    dims = tuple(int(d) for d in dims)
    d = math.prod(dims)

    def score_of(params: np.ndarray) -> float:
        v = params[:d] + 1j * params[d:]
        state = MultipartiteState.from_vector(v, dims)
        return monogamy_score(kind, state, 0, r).score

    summary = VerificationSummary(
        "counterexample-search",
        {"family": "hill_climb", "dims": list(dims), "count": restarts, "seed": int(seed)},
    )
    summary.extra.update(
        {"measure": kind.label(), "r": r, "max_steps": int(max_steps), "restart_bests": []}
    )
    best_overall = math.inf
    best_state = None
    for i in range(restarts):
        rng = generator(seed, i)
        v = haar_vector(d, rng)  # same substream as haar_pure(dims, seed, index=i)
        params = np.concatenate([v.real, v.imag])
        current = score_of(params)
        step = 0.1
        rejects = 0
        evals = 0
        while step >= 1e-6 and evals < max_steps:
            j = int(rng.integers(2 * d))
            proposal = params.copy()
            proposal[j] += step * box_muller(rng, 1)[0]
            candidate = score_of(proposal)
            evals += 1
            if candidate < current:
                params, current = proposal, candidate
                rejects = 0
            else:
                rejects += 1
                if rejects >= 20:
                    step *= 0.5
                    rejects = 0
        v = params[:d] + 1j * params[d:]
        state = MultipartiteState.from_vector(v, dims)
        summary.count += 1
        summary.passes += 1
        summary.extra["restart_bests"].append(
            {"score": float(current), "state": state_to_json(state)}
        )
        if current < best_overall:
            best_overall = current
            best_state = state
    summary.worst_margin = best_overall
    if best_state is not None:
        summary.offender = state_to_json(best_state)
    return summary._finalize()
