"""Stationary unifilar stochastic processes and their classical memory metrics.

A process is a finite set of states over a finite output alphabet, with at
most one transition per (state, symbol) pair: the current state and the
emitted symbol determine the successor state.  Markov processes are the
special case where the alphabet indexes the states and every transition
emits its destination.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Mapping

import numpy as np

from .errors import InvalidProcessError, ReducibleProcessError, TooLargeError

#: Hard cap on the number of positive-probability words any enumeration may visit.
ENUMERATION_GUARD = 10**7

#: Absolute tolerance for probability comparisons (matches input normalization).
PROB_TOL = 1e-9


def shannon_entropy_bits(probs: np.ndarray) -> float:
    """Shannon entropy in bits with the 0*log(0) = 0 convention."""
    p = np.asarray(probs, dtype=float)
    p = p[p > 0]
    return float(-(p * np.log2(p)).sum())


@dataclass(frozen=True)
class Transition:
    from_state: int
    symbol: int
    prob: float
    to_state: int


@dataclass(frozen=True)
class StochasticProcess:
    """Labeled transition structure of a stationary stochastic process.

    Zero-probability transitions are dropped on construction; phases attached
    to them would be physically meaningless.  Structural problems that a
    report should surface (row sums, duplicate (state, symbol) pairs,
    reachability) are left to :func:`validate`; only outright nonsense
    (indices out of range, negative probabilities) raises here.
    """

    num_states: int
    alphabet_size: int
    transitions: tuple[Transition, ...]

    def __post_init__(self):
        if self.num_states < 1 or self.alphabet_size < 1:
            raise InvalidProcessError("num_states and alphabet_size must be positive")
        kept = []
        for t in self.transitions:
            if not (0 <= t.from_state < self.num_states and 0 <= t.to_state < self.num_states):
                raise InvalidProcessError(f"state index out of range in {t}")
            if not 0 <= t.symbol < self.alphabet_size:
                raise InvalidProcessError(f"symbol index out of range in {t}")
            if not np.isfinite(t.prob) or t.prob < 0 or t.prob > 1 + PROB_TOL:
                raise InvalidProcessError(f"probability out of [0, 1] in {t}")
            if t.prob > 0:
                kept.append(t)
        kept.sort(key=lambda t: (t.from_state, t.symbol, t.to_state))
        object.__setattr__(self, "transitions", tuple(kept))

    # -- derived structure -------------------------------------------------

    @cached_property
    def _tables(self) -> tuple[np.ndarray, np.ndarray]:
        """(probs, successors) as (n, m) arrays; successor -1 where absent.

        Raises InvalidProcessError on a unifilarity violation because the
        tables are only meaningful for unifilar processes.
        """
        probs = np.zeros((self.num_states, self.alphabet_size))
        succ = -np.ones((self.num_states, self.alphabet_size), dtype=int)
        for t in self.transitions:
            if succ[t.from_state, t.symbol] != -1:
                raise InvalidProcessError(
                    f"two transitions from state {t.from_state} on symbol {t.symbol}"
                )
            probs[t.from_state, t.symbol] = t.prob
            succ[t.from_state, t.symbol] = t.to_state
        return probs, succ

    @property
    def emission_probs(self) -> np.ndarray:
        """P(x|j) as an (num_states, alphabet_size) array."""
        return self._tables[0]

    @property
    def successors(self) -> np.ndarray:
        """Update rule as an (num_states, alphabet_size) int array, -1 where absent."""
        return self._tables[1]

    @cached_property
    def is_markov(self) -> bool:
        """True when the alphabet indexes states and every transition emits its destination."""
        return self.alphabet_size == self.num_states and all(
            t.symbol == t.to_state for t in self.transitions
        )

    def markov_matrix(self) -> np.ndarray:
        """Column-stochastic matrix T with T[y, x] = P(x -> y), for Markov processes."""
        from .errors import NotMarkovError

        if not self.is_markov:
            raise NotMarkovError("process is not Markov (symbol != destination)")
        T = np.zeros((self.num_states, self.num_states))
        for t in self.transitions:
            T[t.to_state, t.from_state] = t.prob
        return T

    def state_transition_matrix(self) -> np.ndarray:
        """Row-stochastic matrix M with M[j, k] = P(next state k | state j)."""
        M = np.zeros((self.num_states, self.num_states))
        for t in self.transitions:
            M[t.from_state, t.to_state] += t.prob
        return M

    def is_irreducible(self) -> bool:
        """Every state reachable from every other state."""
        n = self.num_states
        adj = self.state_transition_matrix() > 0
        return _reaches_all(adj, 0) and _reaches_all(adj.T, 0)


def _reaches_all(adj: np.ndarray, start: int) -> bool:
    n = adj.shape[0]
    seen = np.zeros(n, dtype=bool)
    seen[start] = True
    stack = [start]
    while stack:
        j = stack.pop()
        for k in np.nonzero(adj[j])[0]:
            if not seen[k]:
                seen[k] = True
                stack.append(int(k))
    return bool(seen.all())


# -- validation ------------------------------------------------------------


@dataclass(frozen=True)
class ValidationReport:
    violations: tuple[str, ...]

    @property
    def valid(self) -> bool:
        return not self.violations


def validate(process: StochasticProcess) -> ValidationReport:
    """Report violations of stochasticity, unifilarity, and reachability."""
    problems: list[str] = []

    seen: dict[tuple[int, int], int] = {}
    for t in process.transitions:
        key = (t.from_state, t.symbol)
        seen[key] = seen.get(key, 0) + 1
    for (j, x), count in sorted(seen.items()):
        if count > 1:
            problems.append(f"unifilarity: {count} transitions from state {j} on symbol {x}")

    sums = np.zeros(process.num_states)
    for t in process.transitions:
        sums[t.from_state] += t.prob
    for j, s in enumerate(sums):
        if abs(s - 1.0) > PROB_TOL:
            problems.append(f"stochasticity: outgoing probabilities of state {j} sum to {s:.12g}")

    if not problems and not process.is_irreducible():
        problems.append("reachability: state graph is not strongly connected")

    return ValidationReport(tuple(problems))


def require_valid(process: StochasticProcess) -> None:
    report = validate(process)
    if report.violations:
        raise InvalidProcessError("; ".join(report.violations))


# -- stationary distribution -------------------------------------------------

#: Above this state count the stationary solve switches to power iteration.
DIRECT_SOLVE_LIMIT = 64
POWER_ITERATION_TOL = 1e-12
POWER_ITERATION_CAP = 10**6


@dataclass(frozen=True)
class StationaryDistribution:
    pi: np.ndarray

    def __post_init__(self):
        p = np.asarray(self.pi, dtype=float)
        if p.min() < -PROB_TOL or abs(p.sum() - 1.0) > PROB_TOL:
            raise InvalidProcessError("stationary vector is not a probability distribution")
        object.__setattr__(self, "pi", np.clip(p, 0.0, None))

    def __len__(self) -> int:
        return len(self.pi)


def stationary_distribution(process: StochasticProcess) -> StationaryDistribution:
    """Unique left fixed point of the state-transition map.

    Raises ReducibleProcessError when the process is not irreducible.
    """
    if not process.is_irreducible():
        raise ReducibleProcessError("no unique stationary distribution")
    M = process.state_transition_matrix()
    n = process.num_states
    if n <= DIRECT_SOLVE_LIMIT:
        A = M.T - np.eye(n)
        A[-1, :] = 1.0
        b = np.zeros(n)
        b[-1] = 1.0
        pi = np.linalg.solve(A, b)
    else:
        pi = np.full(n, 1.0 / n)
        for _ in range(POWER_ITERATION_CAP):
            new = pi @ M
            if np.abs(new - pi).max() < POWER_ITERATION_TOL:
                pi = new
                break
            pi = new
    pi = np.clip(pi, 0.0, None)
    return StationaryDistribution(pi / pi.sum())


# -- word statistics ---------------------------------------------------------


def word_distribution(
    process: StochasticProcess, start_state: int, length: int
) -> dict[tuple[int, ...], float]:
    """Probabilities of length-``length`` output words conditioned on the start state.

    Zero-probability words are omitted.  Raises TooLargeError when the number
    of surviving words would exceed the enumeration guard.
    """
    if length < 0:
        raise ValueError("length must be >= 0")
    probs, succ = process._tables
    frontier: dict[tuple[tuple[int, ...], int], float] = {((), start_state): 1.0}
    for _ in range(length):
        nxt: dict[tuple[tuple[int, ...], int], float] = {}
        for (word, j), p in frontier.items():
            for x in np.nonzero(probs[j])[0]:
                key = (word + (int(x),), int(succ[j, x]))
                nxt[key] = nxt.get(key, 0.0) + p * probs[j, x]
        if len(nxt) > ENUMERATION_GUARD:
            raise TooLargeError(f"more than {ENUMERATION_GUARD} words at length {length}")
        frontier = nxt
    dist: dict[tuple[int, ...], float] = {}
    for (word, _), p in frontier.items():
        dist[word] = dist.get(word, 0.0) + p
    return dist


def merge_equivalent_states(process: StochasticProcess, horizon: int) -> StochasticProcess:
    """Merge states whose conditional word distributions agree up to ``horizon``.

    Distributions over words of length ``horizon`` determine all shorter ones
    by marginalization, so a single length suffices.  For Markov processes
    horizon 1 is exact (identical transition-matrix columns).
    """
    if horizon < 1:
        raise ValueError("horizon must be >= 1")
    n = process.num_states
    dists = [word_distribution(process, j, horizon) for j in range(n)]

    def same(a: dict, b: dict) -> bool:
        keys = set(a) | set(b)
        return all(abs(a.get(w, 0.0) - b.get(w, 0.0)) <= PROB_TOL for w in keys)

    cls = list(range(n))
    for j in range(n):
        for k in range(j):
            if cls[k] == k and same(dists[j], dists[k]):
                cls[j] = k
                break
    reps = sorted({c for c in cls})
    index = {rep: i for i, rep in enumerate(reps)}
    new_transitions = []
    probs, succ = process._tables
    for rep in reps:
        for x in np.nonzero(probs[rep])[0]:
            new_transitions.append(
                Transition(index[rep], int(x), float(probs[rep, x]), index[cls[succ[rep, x]]])
            )
    return StochasticProcess(len(reps), process.alphabet_size, tuple(new_transitions))


# -- memory metrics ----------------------------------------------------------


def c_mu(process: StochasticProcess) -> float:
    """Statistical complexity: entropy of the stationary state distribution, in bits.

    Assumes the process is already in merged (causal-state) form.
    """
    return shannon_entropy_bits(stationary_distribution(process).pi)


def d_mu(process: StochasticProcess) -> float:
    """Topological complexity: log2 of the number of states."""
    return float(np.log2(process.num_states))


def synchronization_entropy(process: StochasticProcess, length: int) -> float:
    """Average uncertainty H(S_0 | X_{-L:0}) about the current state after L observations.

    Enumerates length-L words weighted by their stationary probability,
    tracking the joint distribution over end states.  Vanishing values for
    growing L indicate a synchronizable process; the overlap fixed point is
    only guaranteed to converge in that regime.
    """
    if length < 1:
        raise ValueError("length must be >= 1")
    probs, succ = process._tables
    pi = stationary_distribution(process).pi
    n = process.num_states
    # frontier maps a word to the vector u with u[k] = P(word, end state k)
    frontier: dict[tuple[int, ...], np.ndarray] = {(): pi.copy()}
    for _ in range(length):
        nxt: dict[tuple[int, ...], np.ndarray] = {}
        for word, u in frontier.items():
            for x in range(process.alphabet_size):
                w = probs[:, x] * u
                if w.sum() <= 0:
                    continue
                v = np.zeros(n)
                for j in np.nonzero(w)[0]:
                    v[succ[j, x]] += w[j]
                nxt[word + (int(x),)] = v
        if len(nxt) > ENUMERATION_GUARD:
            raise TooLargeError(f"more than {ENUMERATION_GUARD} words at length {length}")
        frontier = nxt
    h = 0.0
    for u in frontier.values():
        pw = u.sum()
        if pw > 0:
            h += pw * shannon_entropy_bits(u / pw)
    return h


# -- serialization -----------------------------------------------------------


def process_to_dict(process: StochasticProcess) -> dict:
    return {
        "states": process.num_states,
        "alphabet": process.alphabet_size,
        "transitions": [
            {"from": t.from_state, "symbol": t.symbol, "prob": t.prob, "to": t.to_state}
            for t in process.transitions
        ],
    }


def process_from_dict(data: Mapping) -> StochasticProcess:
    """Build a process from its JSON form.

    Accepts either the explicit transition list or the Markov shorthand
    {"markov": rows} where entry (y, x) is the probability of moving from
    state x to state y while emitting y (columns sum to 1).
    """
    if "markov" in data:
        T = np.asarray(data["markov"], dtype=float)
        if T.ndim != 2 or T.shape[0] != T.shape[1]:
            raise InvalidProcessError("markov shorthand requires a square matrix")
        n = T.shape[0]
        transitions = [
            Transition(x, y, float(T[y, x]), y)
            for x in range(n)
            for y in range(n)
            if T[y, x] > 0
        ]
        return StochasticProcess(n, n, tuple(transitions))
    try:
        n = int(data["states"])
        m = int(data["alphabet"])
        transitions = tuple(
            Transition(int(t["from"]), int(t["symbol"]), float(t["prob"]), int(t["to"]))
            for t in data["transitions"]
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise InvalidProcessError(f"malformed process document: {exc}") from exc
    return StochasticProcess(n, m, transitions)


def markov_process(T: np.ndarray | Iterable[Iterable[float]]) -> StochasticProcess:
    """Process from a column-stochastic transition matrix (symbol = destination)."""
    return process_from_dict({"markov": np.asarray(T, dtype=float).tolist()})


def process_sha256(process: StochasticProcess) -> str:
    """Hash of the canonical JSON form, used for provenance in result files."""
    blob = json.dumps(process_to_dict(process), sort_keys=True).encode()
    return hashlib.sha256(blob).hexdigest()
