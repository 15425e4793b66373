"""Constructive unitary models: embed memory states, synthesize the step unitary,
and verify or sample the output statistics.

The model follows the step-wise circuit picture: at each time step the memory
register (dimension r = rank of the overlap matrix) is coupled to a fresh
ancilla prepared in |0>, the joint unitary acts, and the ancilla is measured
in the computational basis to produce one output symbol.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InconsistentGramError, NotPSDError, TooLargeError
from .gram import OverlapMatrix, PhaseAssignment, fixed_point_overlaps
from .process import ENUMERATION_GUARD, StochasticProcess, word_distribution

EMBED_RANK_TOL = 1e-11
GS_PIVOT_TOL = 1e-12
GRAM_MATCH_TOL = 1e-8
BRANCH_NORM_FLOOR = 1e-15


@dataclass(frozen=True)
class MemoryStateSet:
    """One complex vector per process state; row j is the memory state of state j."""

    vectors: np.ndarray

    @property
    def num_states(self) -> int:
        return self.vectors.shape[0]

    @property
    def dimension(self) -> int:
        return self.vectors.shape[1]

    def gram(self) -> np.ndarray:
        return self.vectors.conj() @ self.vectors.T


@dataclass(frozen=True)
class UnitaryModel:
    """Step unitary on memory (x) output, with the embedded memory states.

    Basis ordering is memory-major: joint index = memory_index * alphabet_size
    + output_index, with the ancilla prepared in output state 0.
    """

    matrix: np.ndarray
    memory_dim: int
    alphabet_size: int
    memory_states: MemoryStateSet

    def to_json_dict(self) -> dict:
        return {
            "dimension": self.matrix.shape[0],
            "memory_dim": self.memory_dim,
            "alphabet_size": self.alphabet_size,
            "basis_ordering": "memory index major, output index minor",
            "matrix": [
                [[float(v.real), float(v.imag)] for v in row] for row in self.matrix
            ],
        }


def embed_states(overlaps: OverlapMatrix, rank_tol: float = EMBED_RANK_TOL) -> MemoryStateSet:
    """Vectors reproducing the overlap matrix, in the smallest usable dimension.

    Any factor with C = V V^dagger works up to a global unitary; this one comes
    from the eigendecomposition, dropping eigenvalues below ``rank_tol`` times
    the largest.
    """
    c = overlaps.matrix
    lam, vec = np.linalg.eigh(c)
    if lam.min() < -1e-9:
        raise NotPSDError(f"overlap matrix has eigenvalue {lam.min():.3e}")
    keep = lam > rank_tol * lam.max()
    factors = np.sqrt(lam[keep])[None, :] * vec[:, keep]  # (n, r); row j = sigma_j
    return MemoryStateSet(factors.conj())


def _orthonormal_span(columns: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Modified Gram-Schmidt with re-orthogonalization over the columns.

    Returns (Q, K) with Q an orthonormal basis of the column span and K the
    combination coefficients such that Q = columns @ K.  Columns whose
    residual norm falls below the pivot threshold are dependent and skipped.
    """
    d, n = columns.shape
    basis: list[np.ndarray] = []
    coeffs: list[np.ndarray] = []
    for j in range(n):
        v = columns[:, j].astype(complex)
        k = np.zeros(n, dtype=complex)
        k[j] = 1.0
        for _ in range(2):  # one re-orthogonalization pass keeps residuals ~1e-15
            for q, kq in zip(basis, coeffs):
                ov = np.vdot(q, v)
                v = v - ov * q
                k = k - ov * kq
        norm = np.linalg.norm(v)
        if norm > GS_PIVOT_TOL:
            basis.append(v / norm)
            coeffs.append(k / norm)
    Q = np.array(basis).T if basis else np.zeros((d, 0), dtype=complex)
    K = np.array(coeffs).T if coeffs else np.zeros((n, 0), dtype=complex)
    return Q, K


def _complete_basis(Q: np.ndarray) -> np.ndarray:
    """Extend orthonormal columns Q to a full orthonormal basis."""
    d, s = Q.shape
    cols = [Q[:, i] for i in range(s)]
    for b in range(d):
        if len(cols) == d:
            break
        v = np.zeros(d, dtype=complex)
        v[b] = 1.0
        for _ in range(2):
            for q in cols:
                v = v - np.vdot(q, v) * q
        norm = np.linalg.norm(v)
        if norm > GS_PIVOT_TOL:
            cols.append(v / norm)
    return np.array(cols).T


def build_unitary(
    process: StochasticProcess, phases: PhaseAssignment, states: MemoryStateSet
) -> UnitaryModel:
    """Unitary realizing the phase-enhanced step action on the embedded states.

    The action is fixed on span{|sigma_j> (x) |0>}; the completion to a full
    unitary extends both the input and image spans by orthonormal bases and
    pairs them up.  Any completion is valid, so the choice outside the spanned
    subspace is a documented convention, not a contract.
    """
    probs, succ = process._tables
    phi = phases.matrix(process)
    n, m = probs.shape
    r = states.dimension
    d = r * m
    V = states.vectors  # (n, r)

    IN = np.zeros((d, n), dtype=complex)
    OUT = np.zeros((d, n), dtype=complex)
    unit = np.eye(m)
    for j in range(n):
        IN[:, j] = np.kron(V[j], unit[0])
        out = np.zeros(d, dtype=complex)
        for x in np.nonzero(probs[j])[0]:
            out += np.sqrt(probs[j, x]) * np.exp(1j * phi[j, x]) * np.kron(V[succ[j, x]], unit[x])
        OUT[:, j] = out

    mismatch = float(np.abs(IN.conj().T @ IN - OUT.conj().T @ OUT).max())
    if mismatch > GRAM_MATCH_TOL:
        raise InconsistentGramError(
            f"source/target Gram mismatch {mismatch:.3e}: overlaps are not a fixed point"
        )

    Q_in, K = _orthonormal_span(IN)
    Q_out = OUT @ K  # same combinations, orthonormal because the Grams agree
    B_in = _complete_basis(Q_in)
    B_out = _complete_basis(Q_out)
    U = B_out @ B_in.conj().T
    return UnitaryModel(matrix=U, memory_dim=r, alphabet_size=m, memory_states=states)


def unitarity_residual(model: UnitaryModel) -> float:
    U = model.matrix
    return float(np.abs(U.conj().T @ U - np.eye(U.shape[0])).max())


def step_action_residual(
    process: StochasticProcess, phases: PhaseAssignment, model: UnitaryModel
) -> float:
    """Largest deviation of U |sigma_j>|0> from the prescribed superposition."""
    probs, succ = process._tables
    phi = phases.matrix(process)
    V = model.memory_states.vectors
    m = model.alphabet_size
    unit = np.eye(m)
    worst = 0.0
    for j in range(process.num_states):
        lhs = model.matrix @ np.kron(V[j], unit[0])
        rhs = np.zeros_like(lhs)
        for x in np.nonzero(probs[j])[0]:
            rhs += np.sqrt(probs[j, x]) * np.exp(1j * phi[j, x]) * np.kron(V[succ[j, x]], unit[x])
        worst = max(worst, float(np.linalg.norm(lhs - rhs)))
    return worst


def _branch_vectors(model: UnitaryModel, memory: np.ndarray) -> np.ndarray:
    """Apply one step to a memory vector; column x is the unnormalized branch."""
    m = model.alphabet_size
    joint = np.kron(memory, np.eye(m)[0])
    return (model.matrix @ joint).reshape(model.memory_dim, m)


def exact_word_distribution(
    model: UnitaryModel, start_state: int, length: int
) -> dict[tuple[int, ...], float]:
    """Born-rule distribution over length-``length`` output words.

    Repeatedly attaches a fresh ancilla, applies the unitary, and tracks the
    unnormalized memory vector of every output branch; a word's probability is
    the squared norm of its branch.
    """
    if length < 0:
        raise ValueError("length must be >= 0")
    if model.alphabet_size**length > ENUMERATION_GUARD:
        raise TooLargeError(f"alphabet^{length} exceeds the enumeration guard")
    out: dict[tuple[int, ...], float] = {}
    start = model.memory_states.vectors[start_state]

    def recurse(memory: np.ndarray, word: tuple[int, ...]) -> None:
        if len(word) == length:
            out[word] = out.get(word, 0.0) + float(np.vdot(memory, memory).real)
            return
        branches = _branch_vectors(model, memory)
        for x in range(model.alphabet_size):
            branch = branches[:, x]
            if np.vdot(branch, branch).real > BRANCH_NORM_FLOOR**2:
                recurse(branch, word + (x,))

    recurse(start, ())
    return out


def sample_trajectory(
    model: UnitaryModel,
    start_state: int,
    length: int,
    seed: int | np.random.Generator,
) -> tuple[int, ...]:
    """One measured output word; deterministic for a given seed.

    After each output measurement the memory register collapses to the
    selected branch and is renormalized.
    """
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    memory = model.memory_states.vectors[start_state].astype(complex)
    word = []
    for _ in range(length):
        branches = _branch_vectors(model, memory)
        probs = np.einsum("ij,ij->j", branches.conj(), branches).real
        probs = np.clip(probs, 0.0, None)
        probs = probs / probs.sum()
        x = int(rng.choice(model.alphabet_size, p=probs))
        word.append(x)
        norm = np.sqrt(probs[x])
        if norm < BRANCH_NORM_FLOOR:
            raise ArithmeticError("collapsed onto a zero-norm branch")
        memory = branches[:, x] / norm
    return tuple(word)


@dataclass(frozen=True)
class ModelVerification:
    unitarity_residual: float
    step_residual: float
    tv_distance: float
    word_length: int
    memory_dim: int

    @property
    def passed(self) -> bool:
        return bool(
            self.unitarity_residual <= 1e-10
            and self.step_residual <= 1e-10
            and self.tv_distance <= 1e-8
        )

    def to_json_dict(self) -> dict:
        return {
            "unitarity_residual": float(self.unitarity_residual),
            "step_residual": float(self.step_residual),
            "tv_distance": float(self.tv_distance),
            "word_length": self.word_length,
            "memory_dim": self.memory_dim,
            "passed": self.passed,
        }


def total_variation(a: dict, b: dict) -> float:
    words = set(a) | set(b)
    return 0.5 * sum(abs(a.get(w, 0.0) - b.get(w, 0.0)) for w in words)


def verify_model(
    process: StochasticProcess,
    phases: PhaseAssignment,
    word_length: int = 4,
    fp_tol: float = 1e-12,
) -> ModelVerification:
    """Run the full pipeline and report its residuals.

    Overlaps -> embedding -> unitary -> exact word statistics, compared
    against the process's own word distribution from every start state.
    """
    overlaps = fixed_point_overlaps(process, phases, tol=fp_tol)
    states = embed_states(overlaps)
    model = build_unitary(process, phases, states)
    worst_tv = 0.0
    for j in range(process.num_states):
        reference = word_distribution(process, j, word_length)
        produced = exact_word_distribution(model, j, word_length)
        worst_tv = max(worst_tv, total_variation(reference, produced))
    return ModelVerification(
        unitarity_residual=unitarity_residual(model),
        step_residual=step_action_residual(process, phases, model),
        tv_distance=worst_tv,
        word_length=word_length,
        memory_dim=model.memory_dim,
    )
