"""Bipartite quantum-correlation measures evaluated on cuts of a multipartite state.

A ``Cut`` names two disjoint groups of subsystems; everything outside the cut
is traced out first. ``evaluate`` dispatches a ``MeasureKind`` to the right
formula and raises ``MeasureUndefinedError`` when no exact expression exists
for the requested cut (it never falls back silently).

Conventions: logarithms are base 2 throughout (values in bits / ebits),
negativity is stored unnormalized as N = (||rho^T_A||_1 - 1)/2 and doubled
when the kind is flagged normalized, and measure values below 1e-12 are
reported as exactly 0 so that small powers Q^alpha stay stable.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from . import tensor
from .states import MultipartiteState, POSITIVITY_TOL

FLUSH_TOL = 1e-12
PURITY_TOL = 1e-9
RANK_TOL = 1e-9

_PAULI_Y = np.array([[0.0, -1j], [1j, 0.0]])
_SPIN_FLIP = np.kron(_PAULI_Y, _PAULI_Y)
_PAULI = (
    np.eye(2, dtype=complex),
    np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex),
    _PAULI_Y,
    np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex),
)

# Discord / classical-correlation optimizer settings: coarse measurement grid
# followed by coordinate-wise golden-section refinement (target accuracy 1e-4).
_GRID_POINTS = 64
_REFINE_ITERATIONS = 30
_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


class MeasureUndefinedError(ValueError):
    """The requested measure has no exact expression on the requested cut."""


class Measure(str, Enum):
    CONCURRENCE = "concurrence"
    NEGATIVITY = "negativity"
    LOG_NEGATIVITY = "lognegativity"
    EOF = "eof"
    DISCORD = "discord"
    CLASSICAL_CORRELATION = "classical"

    @classmethod
    def from_string(cls, name: str) -> "Measure":
        key = name.strip().lower().replace("-", "").replace("_", "")
        aliases = {
            "concurrence": cls.CONCURRENCE,
            "negativity": cls.NEGATIVITY,
            "lognegativity": cls.LOG_NEGATIVITY,
            "logneg": cls.LOG_NEGATIVITY,
            "eof": cls.EOF,
            "discord": cls.DISCORD,
            "classical": cls.CLASSICAL_CORRELATION,
            "classicalcorrelation": cls.CLASSICAL_CORRELATION,
        }
        if key not in aliases:
            raise ValueError(f"unknown measure {name!r}")
        return aliases[key]


@dataclass(frozen=True)
class MeasureKind:
    """Measure selector: which correlation measure, and whether to rescale it
    so that a maximally entangled qubit pair scores 1 (only negativity
    actually changes under the flag; all other measures already score 1)."""

    tag: Measure
    normalized: bool = False

    def label(self) -> str:
        return self.tag.value


@dataclass(frozen=True)
class Cut:
    """Bipartition side_a : side_b of a subset of the subsystems.

    Order within each side is irrelevant; subsystems on neither side are
    traced out before the measure is evaluated.
    """

    side_a: tuple[int, ...]
    side_b: tuple[int, ...]

    def __post_init__(self):
        a = tuple(int(i) for i in self.side_a)
        b = tuple(int(i) for i in self.side_b)
        if not a or not b:
            raise ValueError("both sides of a cut must be nonempty")
        if set(a) & set(b):
            raise ValueError(f"cut sides overlap: {a} vs {b}")
        if len(set(a)) != len(a) or len(set(b)) != len(b):
            raise ValueError("duplicate subsystem index in cut")
        object.__setattr__(self, "side_a", a)
        object.__setattr__(self, "side_b", b)


def _flush(x: float) -> float:
    return 0.0 if abs(x) < FLUSH_TOL else float(x)


def _reduced(state: MultipartiteState, cut: Cut):
    """Reduced matrix on side_a + side_b plus the positions of each side."""
    n = state.n_subsystems
    for i in cut.side_a + cut.side_b:
        if not 0 <= i < n:
            raise ValueError(f"cut index {i} out of range for {n} subsystems")
    keep = sorted(cut.side_a + cut.side_b)
    if len(keep) == n:
        red = state.rho
    else:
        red = tensor.partial_trace(state.rho, state.dims, keep)
    rdims = tuple(state.dims[i] for i in keep)
    a_pos = sorted(keep.index(i) for i in cut.side_a)
    b_pos = sorted(keep.index(i) for i in cut.side_b)
    return red, rdims, a_pos, b_pos


def _require_two_qubit_density(rho) -> np.ndarray:
    rho = tensor.as_matrix(rho)
    if rho.shape != (4, 4):
        raise ValueError(f"expected a 4x4 two-qubit density matrix, got {rho.shape}")
    rho = tensor.require_hermitian(rho, what="density matrix")
    tr = np.trace(rho)
    if abs(tr - 1.0) > tensor.TRACE_TOL:
        raise ValueError(f"density matrix trace {tr:.12g} != 1")
    if float(np.linalg.eigvalsh(rho)[0]) < -POSITIVITY_TOL:
        raise ValueError("density matrix is not positive semidefinite")
    return rho


# ---------------------------------------------------------------------------
# concurrence family
# ---------------------------------------------------------------------------

def concurrence_two_qubit(rho) -> float:
    """Wootters concurrence of a two-qubit density matrix.

    C = max(0, l1 - l2 - l3 - l4) where the l_i are the decreasingly ordered
    square roots of the eigenvalues of rho (sy x sy) rho* (sy x sy), computed
    through the equivalent Hermitian form sqrt(rho) rho~ sqrt(rho) for
    numerical accuracy.
    """
    rho = _require_two_qubit_density(rho)
    evals, evecs = np.linalg.eigh(rho)
    sqrt_rho = (evecs * np.sqrt(np.clip(evals, 0.0, None))) @ evecs.conj().T
    flipped = _SPIN_FLIP @ rho.conj() @ _SPIN_FLIP
    m = sqrt_rho @ flipped @ sqrt_rho
    lam_sq = np.clip(np.linalg.eigvalsh(m)[::-1], 0.0, None)
    # eigenvalues within solver noise of zero would contribute sqrt-amplified
    # garbage (~1e-8) to the small l_i; treat them as the exact zeros they are
    lam_sq[lam_sq < 1e-13 * max(lam_sq[0], 1e-300)] = 0.0
    lam = np.sqrt(lam_sq)
    c = lam[0] - lam[1] - lam[2] - lam[3]
    return _flush(min(max(float(c), 0.0), 1.0))


def _pure_cut_concurrence(red, rdims, a_pos) -> float:
    ra = tensor.partial_trace(red, rdims, a_pos)
    return math.sqrt(max(0.0, 2.0 * (1.0 - tensor.purity(ra))))


def concurrence_pure_cut(state: MultipartiteState, cut: Cut) -> float:
    """Concurrence sqrt(2 (1 - tr rho_A^2)) across a pure cut.

    Requires the state restricted to the cut to be pure and side A to be a
    single qubit.
    """
    red, rdims, a_pos, _ = _reduced(state, cut)
    if tensor.purity(red) < 1.0 - PURITY_TOL:
        raise ValueError("state on the cut is not pure")
    if len(a_pos) != 1 or rdims[a_pos[0]] != 2:
        raise ValueError("side A of the cut must be a single qubit")
    return _flush(min(_pure_cut_concurrence(red, rdims, a_pos), 1.0))


def _det2_bilinear(a: np.ndarray, b: np.ndarray) -> float:
    # polarization of the 2x2 determinant: det(A+B) = detA + detB + 2 D(A,B)
    return float(0.5 * np.real(np.trace(a) * np.trace(b) - np.trace(a @ b)))


def tangle_rank2(rho, dims, a_index: int) -> float:
    """Convex-roof squared concurrence of a rank <= 2 state across qubit A : rest.

    Every pure-state decomposition of a rank-2 state lives on the Bloch
    sphere of its two-dimensional support, where the squared concurrence
    tau(n) = 4 det rho_A(n) is a quadratic polynomial in the Bloch vector n.
    The convex roof of a quadratic over sphere points with fixed barycenter m
    is attained by a two-point decomposition along the eigendirection of the
    smallest eigenvalue of the quadratic's matrix M, giving the closed form

        tau(rho) = tau_affine(m) + lambda_min(M) (1 - |m|^2).

    Raises MeasureUndefinedError when the numerical rank exceeds 2.
    """
    rho = tensor.as_matrix(rho)
    dims = tensor.check_dims(rho.shape[0], dims)
    if dims[a_index] != 2:
        raise ValueError("side A must be a single qubit")
    evals, evecs = np.linalg.eigh(tensor.require_hermitian(rho, what="density matrix"))
    if rho.shape[0] > 2 and float(evals[-3]) > RANK_TOL:
        raise MeasureUndefinedError(
            f"concurrence undefined on a mixed cut of rank > 2 (third eigenvalue {evals[-3]:.3e})"
        )
    lam0 = float(evals[-1])
    lam1 = float(max(evals[-2], 0.0)) if rho.shape[0] > 1 else 0.0
    support = evecs[:, -2:][:, ::-1]  # columns: dominant, subdominant
    # Phi(sigma_mu) = tr_B(W sigma_mu W^dag) maps the support qubit to A.
    l_ops = [
        tensor.partial_trace(support @ s @ support.conj().T, dims, [a_index])
        for s in _PAULI
    ]
    d = np.empty((4, 4))
    for i in range(4):
        for j in range(i, 4):
            d[i, j] = d[j, i] = _det2_bilinear(l_ops[i], l_ops[j])
    m = np.array([0.0, 0.0, lam0 - lam1])
    q_m = d[0, 0] + 2.0 * float(d[0, 1:] @ m) + float(m @ d[1:, 1:] @ m)
    lam_min = float(np.linalg.eigvalsh(d[1:, 1:])[0])
    tau = q_m + lam_min * (1.0 - float(m @ m))
    return max(tau, 0.0)


# ---------------------------------------------------------------------------
# negativity family
# ---------------------------------------------------------------------------

def _negativity_core(red, rdims, a_pos) -> float:
    pt = tensor.partial_transpose(red, rdims, a_pos)
    return max(0.5 * (tensor.trace_norm_hermitian(pt) - 1.0), 0.0)


def negativity(state: MultipartiteState, cut: Cut, normalized: bool = False) -> float:
    """Negativity N = (||rho^T_A||_1 - 1)/2 across the cut.

    With ``normalized`` the value is doubled so a maximally entangled qubit
    pair scores 1.
    """
    red, rdims, a_pos, _ = _reduced(state, cut)
    n = _negativity_core(red, rdims, a_pos)
    return _flush(2.0 * n if normalized else n)


def log_negativity(state: MultipartiteState, cut: Cut) -> float:
    """Logarithmic negativity log2(2N + 1) in ebits (N unnormalized)."""
    red, rdims, a_pos, _ = _reduced(state, cut)
    return _flush(math.log2(2.0 * _negativity_core(red, rdims, a_pos) + 1.0))


# ---------------------------------------------------------------------------
# entanglement of formation
# ---------------------------------------------------------------------------

def eof_from_concurrence(c: float) -> float:
    """E = h((1 + sqrt(1 - C^2))/2) with h the binary entropy."""
    c = min(max(float(c), 0.0), 1.0)
    return tensor.binary_entropy(0.5 * (1.0 + math.sqrt(1.0 - c * c)))


def eof_two_qubit(rho) -> float:
    """Entanglement of formation of a two-qubit density matrix, in ebits."""
    return _flush(eof_from_concurrence(concurrence_two_qubit(rho)))


def eof_pure_cut(state: MultipartiteState, cut: Cut) -> float:
    """Entanglement entropy of side A for a pure cut, in ebits."""
    red, rdims, a_pos, _ = _reduced(state, cut)
    if tensor.purity(red) < 1.0 - PURITY_TOL:
        raise ValueError("state on the cut is not pure")
    ra = tensor.partial_trace(red, rdims, a_pos)
    return _flush(tensor.von_neumann_entropy(ra))


# ---------------------------------------------------------------------------
# classical correlation and quantum discord (two-qubit, projective
# measurements parametrized by Bloch angles)
# ---------------------------------------------------------------------------

def _conditional_entropy_sum(t4, measured: str, theta, phi) -> np.ndarray:
    """sum_k p_k S(other | outcome k) for measurement direction(s) (theta, phi).

    t4 is rho reshaped to (2, 2, 2, 2) with indices [a, b, a', b'].
    """
    theta = np.atleast_1d(np.asarray(theta, dtype=float))
    phi = np.atleast_1d(np.asarray(phi, dtype=float))
    v = np.stack([np.cos(theta / 2.0) + 0j, np.exp(1j * phi) * np.sin(theta / 2.0)])
    p0 = np.einsum("ag,bg->gab", v, v.conj())
    projectors = (p0, np.eye(2)[None, :, :] - p0)
    total = np.zeros(theta.shape[0])
    for proj in projectors:
        if measured == "a":
            # M[b,b'] = sum_{a,x} P[a,x] T[x,b,a,b']
            m = np.einsum("gax,xbay->gby", proj, t4)
        else:
            # M[a,a'] = sum_{b,x} P[b,x] T[a,x,a',b]
            m = np.einsum("gbx,axyb->gay", proj, t4)
        tr = np.real(m[:, 0, 0] + m[:, 1, 1])
        det = np.real(m[:, 0, 0] * m[:, 1, 1] - m[:, 0, 1] * m[:, 1, 0])
        disc = np.sqrt(np.clip(tr * tr - 4.0 * det, 0.0, None))
        lam = np.stack([0.5 * (tr + disc), 0.5 * (tr - disc)])
        # p S(M/p) = -sum_i lam_i log2(lam_i / p), safe at lam = 0 or p = 0
        with np.errstate(divide="ignore", invalid="ignore"):
            contrib = np.where(lam > 1e-18, lam * np.log2(lam / np.maximum(tr, 1e-300)), 0.0)
        total -= contrib.sum(axis=0)
    return total


def _check_measured_side(measured: str) -> str:
    side = str(measured).strip().lower()
    if side not in ("a", "b"):
        raise ValueError(f"measured side must be 'a' or 'b', got {measured!r}")
    return side


def classical_correlation(rho, measured: str = "b") -> float:
    """Measurement-maximized classical correlation of a two-qubit state, in bits.

    max over projective measurements on the chosen side of
    S(other) - sum_k p_k S(other | outcome k), optimized on a coarse
    (theta, phi) grid followed by coordinate-wise golden-section refinement.
    """
    rho = _require_two_qubit_density(rho)
    measured = _check_measured_side(measured)
    t4 = rho.reshape(2, 2, 2, 2)
    other = tensor.partial_trace(rho, (2, 2), [1] if measured == "a" else [0])
    s_other = tensor.von_neumann_entropy(other)

    thetas = np.linspace(0.0, np.pi, _GRID_POINTS)
    phis = np.linspace(0.0, 2.0 * np.pi, _GRID_POINTS, endpoint=False)
    tt, pp = np.meshgrid(thetas, phis, indexing="ij")
    cond = _conditional_entropy_sum(t4, measured, tt.ravel(), pp.ravel())
    k = int(np.argmin(cond))
    best = float(cond[k])
    th, ph = float(tt.ravel()[k]), float(pp.ravel()[k])

    def f(theta, phi):
        return float(_conditional_entropy_sum(t4, measured, theta, phi)[0])

    lo_t, hi_t = th - np.pi / (_GRID_POINTS - 1), th + np.pi / (_GRID_POINTS - 1)
    lo_p, hi_p = ph - np.pi / _GRID_POINTS, ph + np.pi / _GRID_POINTS
    for _ in range(_REFINE_ITERATIONS):
        m1 = hi_t - _GOLDEN * (hi_t - lo_t)
        m2 = lo_t + _GOLDEN * (hi_t - lo_t)
        f1, f2 = f(m1, ph), f(m2, ph)
        if f1 <= f2:
            hi_t = m2
        else:
            lo_t = m1
        th = m1 if f1 <= f2 else m2
        best = min(best, f1, f2)
        m1 = hi_p - _GOLDEN * (hi_p - lo_p)
        m2 = lo_p + _GOLDEN * (hi_p - lo_p)
        f1, f2 = f(th, m1), f(th, m2)
        if f1 <= f2:
            hi_p = m2
        else:
            lo_p = m1
        ph = m1 if f1 <= f2 else m2
        best = min(best, f1, f2)
    return _flush(max(s_other - best, 0.0))


def discord(rho, measured: str = "b") -> float:
    """Quantum discord I(rho) - classical_correlation(rho), in bits.

    Values within -1e-6 of zero (optimizer shortfall) are clamped to 0.
    """
    rho = _require_two_qubit_density(rho)
    measured = _check_measured_side(measured)
    ra = tensor.partial_trace(rho, (2, 2), [0])
    rb = tensor.partial_trace(rho, (2, 2), [1])
    mutual = (
        tensor.von_neumann_entropy(ra)
        + tensor.von_neumann_entropy(rb)
        - tensor.von_neumann_entropy(rho)
    )
    d = mutual - classical_correlation(rho, measured)
    if -1e-6 <= d < 0.0:
        d = 0.0
    return _flush(d)


# ---------------------------------------------------------------------------
# dispatcher
# ---------------------------------------------------------------------------

def as_kind(kind) -> MeasureKind:
    if isinstance(kind, MeasureKind):
        return kind
    if isinstance(kind, Measure):
        return MeasureKind(kind)
    return MeasureKind(Measure.from_string(str(kind)))


def evaluate(kind, state: MultipartiteState, cut: Cut) -> float:
    """Evaluate a measure on a cut; pure-state identities are used
    automatically when the state restricted to the cut is pure.

    Raises MeasureUndefinedError when the measure has no exact expression on
    the requested cut dimensions.
    """
    kind = as_kind(kind)
    red, rdims, a_pos, b_pos = _reduced(state, cut)
    da = math.prod(rdims[i] for i in a_pos)
    db = math.prod(rdims[i] for i in b_pos)
    tag = kind.tag

    if tag is Measure.NEGATIVITY:
        n = _negativity_core(red, rdims, a_pos)
        val = 2.0 * n if kind.normalized else n
    elif tag is Measure.LOG_NEGATIVITY:
        val = math.log2(2.0 * _negativity_core(red, rdims, a_pos) + 1.0)
    elif tag is Measure.CONCURRENCE:
        if da == 2 and db == 2:
            val = concurrence_two_qubit(red)
        elif len(a_pos) == 1 and rdims[a_pos[0]] == 2:
            if tensor.purity(red) >= 1.0 - PURITY_TOL:
                val = min(_pure_cut_concurrence(red, rdims, a_pos), 1.0)
            else:
                val = math.sqrt(tangle_rank2(red, rdims, a_pos[0]))
        else:
            raise MeasureUndefinedError(
                f"concurrence undefined on a {da}x{db} cut with a non-qubit A side"
            )
    elif tag is Measure.EOF:
        if da == 2 and db == 2:
            val = eof_two_qubit(red)
        elif tensor.purity(red) >= 1.0 - PURITY_TOL:
            ra = tensor.partial_trace(red, rdims, a_pos)
            val = tensor.von_neumann_entropy(ra)
        else:
            raise MeasureUndefinedError(
                f"entanglement of formation undefined on a mixed {da}x{db} cut"
            )
    elif tag in (Measure.DISCORD, Measure.CLASSICAL_CORRELATION):
        if not (da == 2 and db == 2 and len(a_pos) == 1 and len(b_pos) == 1):
            raise MeasureUndefinedError(
                f"{tag.value} defined only on 2x2 cuts, requested {da}x{db}"
            )
        measured = "a" if b_pos[0] == 0 else "b"  # measurement acts on side B
        fn = discord if tag is Measure.DISCORD else classical_correlation
        val = fn(red, measured)
    else:  # pragma: no cover - enum is exhaustive
        raise MeasureUndefinedError(f"unknown measure {tag!r}")
    return _flush(float(val))
