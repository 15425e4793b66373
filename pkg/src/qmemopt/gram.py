"""Phase-dependent memory-state overlaps and the resulting memory spectrum.

The overlap of two quantum memory states is the phase-weighted Bhattacharyya
sum over future words,

    c_jk = sum_w sqrt(P(w|j) P(w|k)) exp(i (phi_{w,k} - phi_{w,j})),

with the multi-step phase of a word accumulated along the update rule.  The
spectrum of the stationary-weighted Gram matrix sqrt(pi_j pi_k) c_jk equals
the nonzero spectrum of the steady-state memory ensemble, from which the
entropic (cq) and dimensional (dq) memory costs follow.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping

import numpy as np

from .errors import NotConvergedError, NotMarkovError, NotPSDError, TooLargeError
from .process import (
    ENUMERATION_GUARD,
    StationaryDistribution,
    StochasticProcess,
    shannon_entropy_bits,
)

TWO_PI = 2.0 * np.pi

HERMITIAN_TOL = 1e-12
PSD_EIGENVALUE_FLOOR = -1e-9
DEFAULT_RANK_TOL = 1e-9
DEFAULT_FP_TOL = 1e-12
DEFAULT_FP_MAX_ITER = 10_000


# -- phase assignments -------------------------------------------------------


@dataclass(frozen=True)
class PhaseAssignment:
    """One phase angle per nonzero transition, keyed by (symbol, from_state).

    Angles are canonicalized to [0, 2*pi).  Keys must match the process's
    transitions exactly; phases on zero-probability transitions are rejected.
    """

    phases: tuple[tuple[tuple[int, int], float], ...]

    def __post_init__(self):
        canon = tuple(
            (key, float(np.mod(angle, TWO_PI))) for key, angle in sorted(self.phases)
        )
        object.__setattr__(self, "phases", canon)

    def as_dict(self) -> dict[tuple[int, int], float]:
        return dict(self.phases)

    def __getitem__(self, key: tuple[int, int]) -> float:
        return self.as_dict()[key]

    @staticmethod
    def _keys_of(process: StochasticProcess) -> set[tuple[int, int]]:
        return {(t.symbol, t.from_state) for t in process.transitions}

    @classmethod
    def zero(cls, process: StochasticProcess) -> "PhaseAssignment":
        return cls(tuple((key, 0.0) for key in sorted(cls._keys_of(process))))

    @classmethod
    def random(cls, process: StochasticProcess, rng: np.random.Generator) -> "PhaseAssignment":
        keys = sorted(cls._keys_of(process))
        return cls(tuple((key, float(rng.uniform(0, TWO_PI))) for key in keys))

    @classmethod
    def from_mapping(
        cls, process: StochasticProcess, mapping: Mapping[tuple[int, int], float]
    ) -> "PhaseAssignment":
        """Missing transitions default to phase 0; unknown keys are rejected."""
        keys = cls._keys_of(process)
        extra = set(mapping) - keys
        if extra:
            raise ValueError(f"phases on absent or zero-probability transitions: {sorted(extra)}")
        return cls(tuple((key, float(mapping.get(key, 0.0))) for key in sorted(keys)))

    def matrix(self, process: StochasticProcess) -> np.ndarray:
        """Angles as an (num_states, alphabet_size) array, 0 where no transition."""
        if self._keys_of(process) != {k for k, _ in self.phases}:
            raise ValueError("phase keys do not match the process's transitions")
        phi = np.zeros((process.num_states, process.alphabet_size))
        for (x, j), angle in self.phases:
            phi[j, x] = angle
        return phi

    def to_json_dict(self) -> dict[str, float]:
        return {f"{x},{j}": angle for (x, j), angle in self.phases}

    @classmethod
    def from_json_dict(
        cls, process: StochasticProcess, data: Mapping[str, float]
    ) -> "PhaseAssignment":
        mapping = {}
        for key, angle in data.items():
            x, j = key.split(",")
            mapping[(int(x), int(j))] = float(angle)
        return cls.from_mapping(process, mapping)


# -- overlap matrices ----------------------------------------------------------


@dataclass(frozen=True)
class OverlapMatrix:
    """Hermitian unit-diagonal matrix of memory-state inner products."""

    matrix: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.matrix, dtype=complex)
        if c.ndim != 2 or c.shape[0] != c.shape[1]:
            raise ValueError("overlap matrix must be square")
        if np.abs(np.diagonal(c) - 1.0).max() > 1e-9:
            raise ValueError("overlap matrix must have unit diagonal")
        if np.abs(c - c.conj().T).max() > HERMITIAN_TOL:
            raise ValueError("overlap matrix must be Hermitian")
        if np.abs(c).max() > 1 + 1e-12:
            raise ValueError("overlap magnitudes cannot exceed 1")
        lam_min = float(np.linalg.eigvalsh(c).min())
        if lam_min < PSD_EIGENVALUE_FLOOR:
            raise NotPSDError(f"overlap matrix has eigenvalue {lam_min:.3e}")
        object.__setattr__(self, "matrix", c)

    @property
    def num_states(self) -> int:
        return self.matrix.shape[0]

    def to_json_dict(self) -> dict:
        return {
            "dimension": self.num_states,
            "entries": [[[float(v.real), float(v.imag)] for v in row] for row in self.matrix],
        }


def markov_overlaps(process: StochasticProcess, phases: PhaseAssignment) -> OverlapMatrix:
    """Closed-form overlaps for Markov processes.

    The Markov property collapses the word sum to a single step:
    c_jk = sum_y sqrt(T_yj T_yk) exp(i (phi_{y,k} - phi_{y,j})).
    """
    if not process.is_markov:
        raise NotMarkovError("closed-form overlaps require a Markov process")
    T = process.markov_matrix()
    phi = phases.matrix(process)  # phi[state, symbol]
    n = process.num_states
    c = np.eye(n, dtype=complex)
    for j in range(n):
        for k in range(j + 1, n):
            weights = np.sqrt(T[:, j] * T[:, k])
            val = complex((weights * np.exp(1j * (phi[k, :] - phi[j, :]))).sum())
            c[j, k] = val
            c[k, j] = np.conj(val)
    return OverlapMatrix(c)


def fixed_point_overlaps(
    process: StochasticProcess,
    phases: PhaseAssignment,
    tol: float = DEFAULT_FP_TOL,
    max_iter: int = DEFAULT_FP_MAX_ITER,
) -> OverlapMatrix:
    """Overlaps as the fixed point of the one-step recursion.

    Iterates c_jk <- sum_x sqrt(P(x|j) P(x|k)) exp(i (phi_{x,k} - phi_{x,j}))
    c_{l(j,x) l(k,x)} from the all-ones matrix (the length-0 truncation) until
    the max-norm change drops below ``tol``.  Markov inputs converge in one
    step.  Raises NotConvergedError otherwise; this signals a
    non-synchronizing process or a tolerance that is too tight.
    """
    probs, succ = process._tables
    phi = phases.matrix(process)
    n, m = probs.shape
    # Per-symbol coefficient matrices and successor index grids.
    weights = []
    for x in range(m):
        w = np.sqrt(np.outer(probs[:, x], probs[:, x])) * np.exp(
            1j * (phi[None, :, x] - phi[:, None, x])
        )
        jx = np.clip(succ[:, x], 0, None)
        weights.append((w, jx))
    c = np.ones((n, n), dtype=complex)
    for iteration in range(1, max_iter + 1):
        new = np.zeros_like(c)
        for w, jx in weights:
            new += w * c[np.ix_(jx, jx)]
        residual = float(np.abs(new - c).max())
        c = new
        if residual < tol:
            return OverlapMatrix(c)
    raise NotConvergedError(max_iter, residual)


def brute_force_fidelity(
    process: StochasticProcess, phases: PhaseAssignment, length: int
) -> np.ndarray:
    """Length-``length`` truncation of the overlap word sum, by direct enumeration.

    Independent oracle for the fixed-point solver: explicitly enumerates all
    words with positive probability from both states of each pair, summing
    sqrt(P(w|j) P(w|k)) exp(i dphi) without the trailing overlap factor.
    Returns a plain complex matrix (it need not be positive semidefinite).
    """
    if length < 0:
        raise ValueError("length must be >= 0")
    probs, succ = process._tables
    phi = phases.matrix(process)
    n, m = probs.shape
    c = np.ones((n, n), dtype=complex)
    for j in range(n):
        for k in range(j + 1, n):
            amp = np.array([1.0])
            dphi = np.array([0.0])
            sj = np.array([j], dtype=int)
            sk = np.array([k], dtype=int)
            for _ in range(length):
                new_amp, new_dphi, new_sj, new_sk = [], [], [], []
                for x in range(m):
                    pj = probs[sj, x]
                    pk = probs[sk, x]
                    alive = (pj > 0) & (pk > 0)
                    if not alive.any():
                        continue
                    new_amp.append(amp[alive] * np.sqrt(pj[alive] * pk[alive]))
                    new_dphi.append(dphi[alive] + phi[sk[alive], x] - phi[sj[alive], x])
                    new_sj.append(succ[sj[alive], x])
                    new_sk.append(succ[sk[alive], x])
                if not new_amp:
                    amp = np.array([])
                    break
                amp = np.concatenate(new_amp)
                dphi = np.concatenate(new_dphi)
                sj = np.concatenate(new_sj)
                sk = np.concatenate(new_sk)
                if amp.size > ENUMERATION_GUARD:
                    raise TooLargeError(
                        f"more than {ENUMERATION_GUARD} joint words at length {length}"
                    )
            val = complex((amp * np.exp(1j * dphi)).sum()) if amp.size else 0.0
            c[j, k] = val
            c[k, j] = np.conj(val)
    return c


# -- memory spectrum -----------------------------------------------------------


@dataclass(frozen=True)
class MemorySpectrum:
    """Spectrum of the stationary-weighted Gram matrix and derived memory costs."""

    eigenvalues: np.ndarray
    cq_bits: float
    dq_bits: float
    rank: int
    rank_tolerance: float

    def to_json_dict(self) -> dict:
        return {
            "eigenvalues": [float(v) for v in self.eigenvalues],
            "cq_bits": self.cq_bits,
            "dq_bits": self.dq_bits,
            "rank": self.rank,
            "rank_tolerance": self.rank_tolerance,
        }


def weighted_gram(
    overlaps: OverlapMatrix | np.ndarray, pi: StationaryDistribution | np.ndarray
) -> np.ndarray:
    c = overlaps.matrix if isinstance(overlaps, OverlapMatrix) else np.asarray(overlaps)
    p = pi.pi if isinstance(pi, StationaryDistribution) else np.asarray(pi, dtype=float)
    return np.sqrt(np.outer(p, p)) * c


def memory_spectrum(
    overlaps: OverlapMatrix | np.ndarray,
    pi: StationaryDistribution | np.ndarray,
    rank_tolerance: float = DEFAULT_RANK_TOL,
) -> MemorySpectrum:
    """Eigenvalues of the weighted Gram matrix with the entropic and dimensional costs.

    The weighted Gram shares its nonzero spectrum with the steady-state memory
    ensemble, so the eigensolve stays in state-count dimension.  Eigenvalues in
    [-1e-9, 0) are clipped to zero; anything lower raises NotPSDError.
    """
    G = weighted_gram(overlaps, pi)
    lam = np.linalg.eigvalsh(G)[::-1]
    if lam.min() < PSD_EIGENVALUE_FLOOR:
        raise NotPSDError(f"weighted Gram has eigenvalue {lam.min():.3e}")
    lam = np.clip(lam, 0.0, None)
    total = lam.sum()
    if abs(total - 1.0) > 1e-6:
        raise ValueError(f"Gram trace {total:.9g} is not 1; check pi and the unit diagonal")
    rank = int((lam > rank_tolerance * lam.max()).sum())
    return MemorySpectrum(
        eigenvalues=lam,
        cq_bits=shannon_entropy_bits(lam),
        dq_bits=float(np.log2(rank)),
        rank=rank,
        rank_tolerance=rank_tolerance,
    )
