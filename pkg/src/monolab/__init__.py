"""monolab: monogamy of bipartite quantum-correlation measures on small
multipartite states, with exponent sweeps, critical-exponent search, and
sampling-based verification of the power-transfer machinery."""

__version__ = "0.1.0"

from .measures import (
    Cut,
    Measure,
    MeasureKind,
    MeasureUndefinedError,
    classical_correlation,
    concurrence_pure_cut,
    concurrence_two_qubit,
    discord,
    eof_from_concurrence,
    eof_pure_cut,
    eof_two_qubit,
    evaluate,
    log_negativity,
    negativity,
    tangle_rank2,
)
from .monogamy import (
    BracketError,
    CriticalExponent,
    HierarchyReport,
    MonogamyReport,
    StrongMonogamyReport,
    bisect_score_crossing,
    critical_exponent,
    hierarchy_chain,
    monogamy_score,
    power_sweep,
    share_sum,
    strong_monogamy_report,
)
from .states import (
    EnsembleSpec,
    MultipartiteState,
    classical_corr_state,
    ghz,
    haar_pure,
    load_state,
    named_state,
    random_mixed,
    sample_states,
    save_state,
    state_from_json,
    state_to_json,
    w,
    white_noise_mix,
)
from .verify import (
    VerificationSummary,
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

__all__ = [name for name in dir() if not name.startswith("_")]
