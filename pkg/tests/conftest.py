"""Shared helpers and independent reference implementations for the test suite.

The reference code here deliberately re-derives quantities along different
routes than the package (recursive word enumeration, analytic eigenvalues)
so that agreement is evidence, not tautology.
"""

from __future__ import annotations

import numpy as np
import pytest

from qmemopt import StochasticProcess, Transition


def analytic_quasi_eigs_zero(p: float) -> np.ndarray:
    """Weighted-Gram eigenvalues of the quasi-cycle at zero phases.

    Uniform pi and a circulant-symmetric overlap with off-diagonals
    a = sqrt(p(1-p)) give ((1+2a)/3, (1-a)/3, (1-a)/3).
    """
    a = np.sqrt(p * (1 - p))
    return np.array([(1 + 2 * a) / 3, (1 - a) / 3, (1 - a) / 3])


def analytic_quasi_eigs_flipped(p: float) -> np.ndarray:
    """Eigenvalues after flipping one off-diagonal's sign: ((1+a)/3, (1+a)/3, (1-2a)/3)."""
    a = np.sqrt(p * (1 - p))
    return np.array([(1 + a) / 3, (1 + a) / 3, (1 - 2 * a) / 3])


def entropy_bits(values: np.ndarray) -> float:
    v = np.asarray(values, dtype=float)
    v = v[v > 0]
    return float(-(v * np.log2(v)).sum())


def naive_truncated_overlap(process: StochasticProcess, phases, j: int, k: int, length: int) -> complex:
    """Recursive word-sum oracle for the truncated overlap, one word at a time."""
    probs = process.emission_probs
    succ = process.successors
    phi = phases.matrix(process)

    def rec(sj: int, sk: int, depth: int) -> complex:
        if depth == 0:
            return 1.0 + 0.0j
        total = 0.0 + 0.0j
        for x in range(process.alphabet_size):
            if probs[sj, x] > 0 and probs[sk, x] > 0:
                amp = np.sqrt(probs[sj, x] * probs[sk, x])
                phase = np.exp(1j * (phi[sk, x] - phi[sj, x]))
                total += amp * phase * rec(succ[sj, x], succ[sk, x], depth - 1)
        return total

    return rec(j, k, length)


def biased_two_state() -> StochasticProcess:
    """2-state Markov chain with stationary distribution (1/4, 3/4)."""
    return StochasticProcess(
        2,
        2,
        (
            Transition(0, 0, 0.4, 0),
            Transition(0, 1, 0.6, 1),
            Transition(1, 0, 0.2, 0),
            Transition(1, 1, 0.8, 1),
        ),
    )


def hidden_pair_process() -> StochasticProcess:
    """Unifilar HMM whose states 0 and 1 emit identical one-step distributions
    but have distinct futures (via differently biased successors)."""
    return StochasticProcess(
        4,
        2,
        (
            Transition(0, 0, 0.5, 0),
            Transition(0, 1, 0.5, 2),
            Transition(1, 0, 0.5, 1),
            Transition(1, 1, 0.5, 3),
            Transition(2, 0, 0.9, 1),
            Transition(2, 1, 0.1, 0),
            Transition(3, 0, 0.1, 0),
            Transition(3, 1, 0.9, 1),
        ),
    )


def alternator() -> StochasticProcess:
    """Two states swapping on a single symbol; futures are identical."""
    return StochasticProcess(
        2, 1, (Transition(0, 0, 1.0, 1), Transition(1, 0, 1.0, 0))
    )


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(1234)
