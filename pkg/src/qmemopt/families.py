"""Process factories: named families and seeded random generators."""

from __future__ import annotations

import numpy as np

from .process import StochasticProcess, Transition, markov_process


def quasi_cycle(p: float) -> StochasticProcess:
    """Symmetric three-state quasi-cycle: self-loop 1-p, cyclic advance p."""
    if not 0 < p <= 1:
        raise ValueError("p must be in (0, 1]")
    return markov_process(
        [
            [1 - p, 0.0, p],
            [p, 1 - p, 0.0],
            [0.0, p, 1 - p],
        ]
    )


def mixed_cycle(p: float, eps: float) -> StochasticProcess:
    """Quasi-cycle contaminated with uniform leakage: (1-3*eps)*T + eps everywhere.

    For small eps near p = 1/2 these processes keep the quasi-cycle's entropic
    advantage while admitting dimensional certificates with genuinely complex
    phases, which makes them the workhorse of the ambiguity search.
    """
    if eps < 0 or 3 * eps > 1:
        raise ValueError("eps must satisfy 0 <= 3*eps <= 1")
    T = np.array([[1 - p, 0.0, p], [p, 1 - p, 0.0], [0.0, p, 1 - p]])
    return markov_process((1 - 3 * eps) * T + eps)


def slippage_cycle(p: float, delta: float) -> StochasticProcess:
    """Quasi-cycle with a backward slip: state 2 falls back to state 1 with rate delta."""
    if not 0 < p < 1 or delta < 0 or p + delta > 1:
        raise ValueError("require 0 < p < 1 and 0 <= delta <= 1 - p")
    return markov_process(
        [
            [1 - p, 0.0, p],
            [p, 1 - p, delta],
            [0.0, p, 1 - p - delta],
        ]
    )


def slippage_line_delta(p: float) -> float | None:
    """Slip rate delta at which the slippage cycle's memory states become linearly dependent.

    Solves sqrt(p*delta*(1-p)) - p*sqrt(p) = (1-p)*sqrt(1-p-delta) for delta by
    bisection; returns None when no root exists in (0, 1-p).
    """

    def g(d: float) -> float:
        return float(np.sqrt(p * d * (1 - p)) - p * np.sqrt(p) - (1 - p) * np.sqrt(1 - p - d))

    lo, hi = 1e-15, 1 - p - 1e-15
    if g(lo) > 0 or g(hi) < 0:
        return None
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if g(mid) <= 0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def slippage_dependence(p: float, delta: float) -> tuple[tuple[int, int, int], float, float]:
    """The unique linear-dependence data on the slippage line.

    Returns (permutation, alpha, beta) such that
    alpha*|s_perm[0]> + beta*|s_perm[1]> = |s_perm[2]>, with
    alpha = sqrt(p)/sqrt(1-p-delta) and beta = -p/sqrt((1-p)(1-p-delta)).
    """
    alpha = float(np.sqrt(p) / np.sqrt(1 - p - delta))
    beta = float(-p / np.sqrt((1 - p) * (1 - p - delta)))
    return (2, 0, 1), alpha, beta


def octant_process(angles: np.ndarray) -> StochasticProcess:
    """Three-state Markov process from three octant points (theta_i, psi_i).

    Each state's outgoing probabilities are the squared direction cosines of
    its point: (sin^2(t)cos^2(s), sin^2(t)sin^2(s), cos^2(t)).
    """
    a = np.asarray(angles, dtype=float).reshape(3, 2)
    T = np.empty((3, 3))
    for v in range(3):
        th, ps = a[v]
        T[:, v] = [
            (np.sin(th) * np.cos(ps)) ** 2,
            (np.sin(th) * np.sin(ps)) ** 2,
            np.cos(th) ** 2,
        ]
    return markov_process(T)


def random_markov(rng: np.random.Generator, measure: str = "simplex") -> StochasticProcess:
    """Random three-state Markov process under one of three sampling measures.

    "simplex": each column uniform on the probability simplex (Dirichlet(1,1,1));
    "angles":  uniform in the two octant angles per state;
    "sphere":  uniform on the octant surface (normalized |Gaussian| directions).
    """
    cols = []
    for _ in range(3):
        if measure == "simplex":
            cols.append(rng.dirichlet(np.ones(3)))
        elif measure == "angles":
            th = rng.uniform(0, np.pi / 2)
            ps = rng.uniform(0, np.pi / 2)
            cols.append(
                np.array(
                    [
                        (np.sin(th) * np.cos(ps)) ** 2,
                        (np.sin(th) * np.sin(ps)) ** 2,
                        np.cos(th) ** 2,
                    ]
                )
            )
        elif measure == "sphere":
            v = np.abs(rng.normal(size=3))
            v /= np.linalg.norm(v)
            cols.append(v**2)
        else:
            raise ValueError(f"unknown measure {measure!r}")
    return markov_process(np.array(cols).T)


def random_unifilar(
    rng: np.random.Generator, num_states: int, alphabet_size: int
) -> StochasticProcess:
    """Random irreducible unifilar process: per state, a random nonempty symbol
    subset with Dirichlet probabilities and random successors.  Redraws until
    irreducible."""
    while True:
        transitions = []
        for j in range(num_states):
            k = int(rng.integers(1, alphabet_size + 1))
            symbols = rng.choice(alphabet_size, size=k, replace=False)
            probs = rng.dirichlet(np.ones(k))
            for x, pr in zip(symbols, probs):
                transitions.append(Transition(j, int(x), float(pr), int(rng.integers(num_states))))
        process = StochasticProcess(num_states, alphabet_size, tuple(transitions))
        if process.is_irreducible():
            return process
