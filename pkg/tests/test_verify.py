import math

import numpy as np
import pytest

from monolab import states
from monolab.measures import Measure, MeasureKind
from monolab.monogamy import monogamy_score
from monolab.states import EnsembleSpec, state_from_json
from monolab.verify import (
    check_decreasing_concave_family,
    check_scalar_lemmas,
    counterexample_search,
    probe_high_power_mixed,
    verify_functional_lift,
    verify_hierarchy_chain,
    verify_lowering,
    verify_mixed_lifting,
    verify_raising,
    verify_strong_chain,
)

PURE3 = EnsembleSpec("haar_pure", (2, 2, 2), 60)
MIXED3 = EnsembleSpec("random_mixed", (2, 2, 2), 60)
W3 = EnsembleSpec("named", name="w3")


def product_state():
    psi = np.zeros(8)
    psi[0] = 1.0
    return states.MultipartiteState.from_vector(psi, (2, 2, 2))


# ---------------------------------------------------------------------------
# scalar lemmas
# ---------------------------------------------------------------------------

def test_scalar_lemma_edge_cases():
    # equality edges of the raising lemma
    for t in (1.0, 2.0, 3.5):
        assert (1.0 + 0.0) ** t == 1.0 + 0.0**t
    assert (1.0 + 1.0) ** 2 >= 1.0 + 1.0**2  # 4 >= 2


def test_scalar_lemmas_no_violations():
    summary = check_scalar_lemmas(50_000, seed=1)
    assert summary.violations == 0
    assert summary.worst_margin >= -1e-12
    assert set(summary.extra) == {
        "raise_binomial",
        "raise_power_sum",
        "lower_binomial",
        "cauchy_schwarz",
    }


def test_scalar_lemmas_deterministic():
    a = check_scalar_lemmas(10_000, seed=9).to_json()
    b = check_scalar_lemmas(10_000, seed=9).to_json()
    assert a == b


def test_decreasing_concave_family_audit():
    summary = check_decreasing_concave_family(50_000, seed=2)
    assert summary.violations == 0
    assert 0.0 <= summary.extra["side_condition_holds_fraction"] <= 1.0


# ---------------------------------------------------------------------------
# raising / lowering
# ---------------------------------------------------------------------------

def test_raising_squared_concurrence():
    summary = verify_raising(Measure.CONCURRENCE, PURE3, 2.0, (2.5, 3.0, 4.0), seed=5)
    assert summary.count == 60
    assert summary.violations == 0
    assert summary.skipped == 0  # squared concurrence is monogamous on qubit states
    assert summary.worst_margin >= -1e-9


def test_raising_skips_states_not_satisfying_hypothesis():
    summary = verify_raising(Measure.LOG_NEGATIVITY, W3, 1.0, (1.5, 2.0), seed=0)
    assert summary.count == 1
    assert summary.skipped == 1
    assert summary.violations == 0


def test_raising_ghz_noise_family_negativity():
    spec = EnsembleSpec("named", name="ghz3", p_grid=tuple(i / 10 for i in range(11)))
    summary = verify_raising(Measure.NEGATIVITY, spec, 1.0, (2.0,), seed=0)
    assert summary.count == 11
    assert summary.violations == 0
    assert summary.skipped == 0  # the whole family is monogamous at r = 1


def test_raising_validates_alphas():
    with pytest.raises(ValueError):
        verify_raising(Measure.CONCURRENCE, PURE3, 2.0, (1.5,), seed=0)


def test_raising_deterministic():
    a = verify_raising(Measure.CONCURRENCE, PURE3, 2.0, (3.0,), seed=11).to_json()
    b = verify_raising(Measure.CONCURRENCE, PURE3, 2.0, (3.0,), seed=11).to_json()
    assert a == b


def test_lowering_w_log_negativity():
    summary = verify_lowering(Measure.LOG_NEGATIVITY, W3, 1.0, (0.5, 0.8), seed=0)
    assert summary.count == 1
    assert summary.skipped == 0
    assert summary.violations == 0
    assert summary.worst_margin > 0.0  # delta(alpha) strictly negative for W


def test_lowering_w_eof():
    summary = verify_lowering(Measure.EOF, W3, 1.0, (0.5,), seed=0)
    assert summary.violations == 0
    assert summary.skipped == 0


def test_lowering_zero_score_edge_passes():
    summary = verify_lowering(Measure.NEGATIVITY, [product_state()], 1.0, (0.5,), seed=0)
    assert summary.passes == 1
    assert summary.violations == 0


# ---------------------------------------------------------------------------
# functional lift (squared entanglement of formation)
# ---------------------------------------------------------------------------

def test_functional_lift_ghz_and_w():
    summary = verify_functional_lift([states.ghz(3), states.w(3)], 2.0, seed=0)
    assert summary.violations == 0
    # GHZ: whole EoF^2 = 1 against zero pair terms; its side condition is
    # exactly 0, which is also the worst slack over the two states
    assert summary.worst_margin == 0.0
    w_score = monogamy_score(MeasureKind(Measure.EOF), states.w(3), 0, 2.0).score
    assert w_score > 0.0


def test_functional_lift_w_score_positive():
    # delta for EoF^2 on W: h(1/3)^2 - 2 h((1 + sqrt(5)/3)/2)^2 > 0
    from monolab.tensor import binary_entropy

    expected = binary_entropy(1 / 3) ** 2 - 2 * binary_entropy((1 + math.sqrt(5) / 3) / 2) ** 2
    assert expected > 0
    rep = monogamy_score(MeasureKind(Measure.EOF), states.w(3), 0, 2.0)
    assert abs(rep.score - expected) < 1e-12


def test_functional_lift_product_state():
    summary = verify_functional_lift([product_state()], 2.0, seed=0)
    assert summary.violations == 0
    assert summary.worst_margin == 0.0


def test_functional_lift_mixed_states_restricted():
    spec = EnsembleSpec("random_mixed", (2, 2, 2), 40, ranks=(2,))
    summary = verify_functional_lift(spec, 2.0, seed=3)
    assert summary.violations == 0
    assert summary.extra["mixed_restricted"] == 40  # no exact mixed whole-cut EoF


# ---------------------------------------------------------------------------
# mixed lifting and the high-power probe
# ---------------------------------------------------------------------------

def test_mixed_lifting_squared_negativity():
    summary = verify_mixed_lifting(Measure.NEGATIVITY, MIXED3, seed=7)
    assert summary.count == 60
    assert summary.violations == 0
    assert summary.worst_margin >= -1e-9
    assert "r1_scores" in summary.extra


def test_mixed_lifting_rank_one_matches_pure_claim():
    spec = EnsembleSpec("random_mixed", (2, 2, 2), 20, ranks=(1,))
    summary = verify_mixed_lifting(Measure.NEGATIVITY, spec, seed=1)
    assert summary.violations == 0


def test_mixed_lifting_rejects_non_mixed_computable():
    with pytest.raises(ValueError):
        verify_mixed_lifting(Measure.EOF, MIXED3, seed=0)


def test_probe_high_power_r2_control_matches_mixed_lifting():
    probe = probe_high_power_mixed((2.0, 3.0), MIXED3, seed=7)
    lift = verify_mixed_lifting(Measure.NEGATIVITY, MIXED3, seed=7)
    assert probe.violations == 0  # exploratory, asserts nothing
    assert abs(probe.extra["worst_margin_per_r"]["2"] - lift.worst_margin) < 1e-15
    assert probe.extra["implication_violations"] == 0


def test_probe_ghz_noise_family_no_implication_violations():
    spec = EnsembleSpec("named", name="ghz3", p_grid=tuple(i / 10 for i in range(11)))
    probe = probe_high_power_mixed((2.0, 3.0), spec, seed=0)
    assert probe.extra["implication_violations"] == 0
    assert probe.extra["worst_margin_per_r"]["3"] >= -1e-9


def test_probe_product_states_zero_at_every_power():
    probe = probe_high_power_mixed((2.0, 3.0, 5.0), [product_state()], seed=0)
    for v in probe.extra["worst_margin_per_r"].values():
        assert v == 0.0


def test_probe_rejects_low_exponents():
    with pytest.raises(ValueError):
        probe_high_power_mixed((1.5,), MIXED3, seed=0)


# ---------------------------------------------------------------------------
# strong / hierarchy suites
# ---------------------------------------------------------------------------

def test_strong_chain_suite():
    spec = EnsembleSpec("haar_pure", (2, 2, 2, 2), 30)
    summary = verify_strong_chain(MeasureKind(Measure.CONCURRENCE, True), spec, 2.0, seed=4)
    assert summary.count == 30
    assert summary.violations == 0


def test_hierarchy_chain_suite():
    spec = EnsembleSpec("haar_pure", (2, 2, 2, 2), 30)
    summary = verify_hierarchy_chain(MeasureKind(Measure.CONCURRENCE, True), spec, 2.0, seed=4)
    assert summary.count == 30
    assert summary.violations == 0


# ---------------------------------------------------------------------------
# counterexample search
# ---------------------------------------------------------------------------

def test_search_squared_concurrence_finds_nothing():
    summary = counterexample_search(Measure.CONCURRENCE, 2.0, (2, 2, 2), restarts=6, seed=3, max_steps=150)
    assert summary.worst_margin >= -1e-9


def test_search_log_negativity_finds_witness():
    summary = counterexample_search(Measure.LOG_NEGATIVITY, 1.0, (2, 2, 2), restarts=6, seed=3, max_steps=150)
    assert summary.worst_margin < -1e-3
    assert summary.offender is not None


def test_search_zero_steps_returns_restart_baseline():
    summary = counterexample_search(Measure.LOG_NEGATIVITY, 1.0, (2, 2, 2), restarts=4, seed=8, max_steps=0)
    kind = MeasureKind(Measure.LOG_NEGATIVITY)
    expected = min(
        monogamy_score(kind, states.haar_pure((2, 2, 2), 8, index=i), 0, 1.0).score
        for i in range(4)
    )
    assert abs(summary.worst_margin - expected) < 1e-12


def test_search_deterministic():
    a = counterexample_search(Measure.EOF, 1.0, (2, 2, 2), restarts=3, seed=5, max_steps=80).to_json()
    b = counterexample_search(Measure.EOF, 1.0, (2, 2, 2), restarts=3, seed=5, max_steps=80).to_json()
    assert a == b


def test_search_offender_reproduces_margin():
    summary = counterexample_search(Measure.LOG_NEGATIVITY, 1.0, (2, 2, 2), restarts=5, seed=2, max_steps=150)
    state = state_from_json(summary.offender)
    score = monogamy_score(MeasureKind(Measure.LOG_NEGATIVITY), state, 0, 1.0).score
    assert abs(score - summary.worst_margin) < 1e-12


def test_lowering_skips_when_hypothesis_fails():
    # W is monogamous in log-negativity at r = 1.2 (above the crossing), so
    # the non-monogamy hypothesis is unmet and the state is skipped, not
    # asserted against
    summary = verify_lowering(Measure.LOG_NEGATIVITY, W3, 1.2, (1.1,), seed=0)
    assert summary.skipped == 1
    assert summary.violations == 0 and summary.passes == 0
