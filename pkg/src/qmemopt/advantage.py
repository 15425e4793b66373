"""Dimensional certificates, entropic phase optimization, and the ambiguity of optimality.

Phase assignments carry redundancy: per-symbol shifts leave every overlap
unchanged, and per-state shifts conjugate the weighted Gram by a diagonal
unitary.  The optimizer therefore works on a gauge-fixed slice of phase
space, computed exactly from the span of the redundancy generators, so that
each physically distinct model is visited once.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .errors import NoBranchError, NotMarkovError, TooLargeError, WrongArityError
from .families import mixed_cycle
from .gram import (
    DEFAULT_RANK_TOL,
    MemorySpectrum,
    PhaseAssignment,
    fixed_point_overlaps,
    markov_overlaps,
    memory_spectrum,
    weighted_gram,
)
from .process import (
    StationaryDistribution,
    StochasticProcess,
    process_sha256,
    require_valid,
    shannon_entropy_bits,
    stationary_distribution,
)

FEASIBILITY_TOL = 1e-12
COS_CLAMP_TOL = 1e-9
CERTIFICATE_RESIDUAL_TOL = 1e-8
REFINE_STOP_RAD = 1e-6
GRID_POINT_GUARD = 2 * 10**7
GENERIC_GRID_POINT_GUARD = 2 * 10**5  # per-point fixed-point solves are ~1000x dearer
AMBIGUITY_MARGIN = 1e-6

DEFAULT_ALPHA_BETA_VALUES = (1.0, 2.0, 3.0, 0.5, 0.25)


def default_alpha_beta_pairs(extra_log_spaced: int = 0) -> tuple[tuple[float, float], ...]:
    """Cartesian square of the default magnitude set, optionally densified.

    Sign flips are omitted: a negative coefficient is the same certificate
    with pi absorbed into a phase, so feasibility depends on magnitudes only.
    """
    values = list(DEFAULT_ALPHA_BETA_VALUES)
    if extra_log_spaced:
        values.extend(float(v) for v in np.geomspace(0.125, 8.0, extra_log_spaced))
    values = sorted(set(values))
    return tuple((a, b) for a in values for b in values)


# -- gauge fixing --------------------------------------------------------------


def _slots(process: StochasticProcess) -> list[tuple[int, int]]:
    """Canonical transition order: (from_state, symbol), state-major."""
    return sorted((t.from_state, t.symbol) for t in process.transitions)


def _gauge_generators(process: StochasticProcess, slots: list[tuple[int, int]]) -> np.ndarray:
    """Rows spanning the redundant directions of phase space.

    Per-symbol shifts cancel inside every word-phase difference; per-state
    shifts theta move a transition by theta(from) - theta(successor).
    """
    index = {s: i for i, s in enumerate(slots)}
    succ = process.successors
    rows = []
    for y in range(process.alphabet_size):
        row = np.zeros(len(slots))
        for (j, x) in slots:
            if x == y:
                row[index[(j, x)]] += 1.0
        rows.append(row)
    for s in range(process.num_states):
        row = np.zeros(len(slots))
        for (j, x) in slots:
            if j == s:
                row[index[(j, x)]] += 1.0
            if succ[j, x] == s:
                row[index[(j, x)]] -= 1.0
        rows.append(row)
    return np.array(rows)


def gauge_fixed_slots(
    process: StochasticProcess,
) -> tuple[list[tuple[int, int]], list[int], list[int]]:
    """Transitions split into pinned (gauge) and free (physical) coordinates.

    Row reduction over the gauge generators with pivots chosen in canonical
    transition order; the pivot set is a perfect transversal, so pinning those
    phases to zero visits each physical equivalence class exactly once and
    keeps the all-zero assignment in the search space.
    """
    slots = _slots(process)
    A = _gauge_generators(process, slots)
    nrow, ncol = A.shape
    pivots: list[int] = []
    r = 0
    for c in range(ncol):
        pivot_row = None
        for i in range(r, nrow):
            if abs(A[i, c]) > 1e-9:
                pivot_row = i
                break
        if pivot_row is None:
            continue
        A[[r, pivot_row]] = A[[pivot_row, r]]
        A[r] = A[r] / A[r, c]
        for i in range(nrow):
            if i != r and abs(A[i, c]) > 1e-12:
                A[i] = A[i] - A[i, c] * A[r]
        pivots.append(c)
        r += 1
        if r == nrow:
            break
    free = [i for i in range(ncol) if i not in pivots]
    return slots, pivots, free


def _assignment_from_slots(
    process: StochasticProcess, slots: list[tuple[int, int]], values: np.ndarray
) -> PhaseAssignment:
    mapping = {(x, j): float(v) for (j, x), v in zip(slots, values)}
    return PhaseAssignment.from_mapping(process, mapping)


# -- batched evaluation of the entropic cost ----------------------------------


class _MarkovCqEvaluator:
    """Vectorized C^phi over batches of phase vectors, for Markov processes.

    Assembles the weighted Gram for every phase vector in a batch and
    diagonalizes them in one stacked eigensolve.
    """

    def __init__(self, process: StochasticProcess, pi: StationaryDistribution):
        if not process.is_markov:
            raise NotMarkovError("vectorized evaluator requires a Markov process")
        self.n = process.num_states
        self.slots = _slots(process)
        index = {s: i for i, s in enumerate(self.slots)}
        T = process.markov_matrix()
        self.pairs = [(j, k) for j in range(self.n) for k in range(j + 1, self.n)]
        terms = []
        for p_idx, (j, k) in enumerate(self.pairs):
            for w in range(self.n):
                if T[w, j] > 0 and T[w, k] > 0:
                    terms.append((p_idx, np.sqrt(T[w, j] * T[w, k]), index[(k, w)], index[(j, w)]))
        self._t_pair = np.array([t[0] for t in terms], dtype=int)
        self._t_weight = np.array([t[1] for t in terms])
        self._t_k = np.array([t[2] for t in terms], dtype=int)
        self._t_j = np.array([t[3] for t in terms], dtype=int)
        self._sqpi = np.sqrt(np.outer(pi.pi, pi.pi))

    def grams(self, phi: np.ndarray) -> np.ndarray:
        """(batch, n, n) weighted Gram matrices for phase vectors phi (batch, n_slots)."""
        batch = phi.shape[0]
        expi = np.exp(1j * phi)
        term_vals = self._t_weight * (expi[:, self._t_k] * np.conj(expi[:, self._t_j]))
        C = np.zeros((batch, self.n, self.n), dtype=complex)
        for p_idx, (j, k) in enumerate(self.pairs):
            mask = self._t_pair == p_idx
            cjk = term_vals[:, mask].sum(axis=1)
            C[:, j, k] = cjk
            C[:, k, j] = np.conj(cjk)
        diag = np.arange(self.n)
        C[:, diag, diag] = 1.0
        return self._sqpi[None, :, :] * C

    def cq(self, phi: np.ndarray) -> np.ndarray:
        lam = np.linalg.eigvalsh(self.grams(phi))
        lam = np.clip(lam, 1e-18, None)
        return -(lam * np.log2(lam)).sum(axis=1)


class _GenericCqEvaluator:
    """Fallback evaluator for non-Markov unifilar processes (fixed point per point)."""

    def __init__(self, process: StochasticProcess, pi: StationaryDistribution, fp_tol: float):
        self.process = process
        self.slots = _slots(process)
        self.pi = pi
        self.fp_tol = fp_tol

    def cq(self, phi: np.ndarray) -> np.ndarray:
        out = np.empty(phi.shape[0])
        for i, row in enumerate(phi):
            assignment = _assignment_from_slots(self.process, self.slots, row)
            overlaps = fixed_point_overlaps(self.process, assignment, tol=self.fp_tol)
            lam = np.clip(np.linalg.eigvalsh(weighted_gram(overlaps, self.pi)), 0.0, None)
            out[i] = shannon_entropy_bits(lam)
        return out


def _make_evaluator(process: StochasticProcess, pi: StationaryDistribution, fp_tol: float = 1e-12):
    if process.is_markov:
        return _MarkovCqEvaluator(process, pi)
    return _GenericCqEvaluator(process, pi, fp_tol)


# -- entropic minimization ------------------------------------------------------


@dataclass(frozen=True)
class OptimizationResult:
    best_phases: PhaseAssignment
    cq_min_bits: float
    grid_resolution: int
    refinement_iterations: int

    def to_json_dict(self, process: StochasticProcess | None = None) -> dict:
        doc = {
            "best_phases": self.best_phases.to_json_dict(),
            "cq_min_bits": self.cq_min_bits,
            "grid_resolution": self.grid_resolution,
            "refinement_iterations": self.refinement_iterations,
            "refine_stop_radians": REFINE_STOP_RAD,
        }
        if process is not None:
            doc["process_sha256"] = process_sha256(process)
        return doc


def minimize_cq(
    process: StochasticProcess,
    phases_grid_resolution: int = 24,
    refine: bool = True,
    fp_tol: float = 1e-12,
) -> OptimizationResult:
    """Minimize the entropic memory cost over the gauge-fixed phase space.

    Exhaustive grid over the free phases at the given resolution, then
    coordinate descent with a geometrically shrinking step (factor 1/2 from
    half a grid step down to 1e-6 rad).  Deterministic; the all-zero
    assignment is always a grid point, so the result never exceeds the
    zero-phase cost.
    """
    if phases_grid_resolution < 1:
        raise ValueError("grid resolution must be >= 1")
    require_valid(process)
    pi = stationary_distribution(process)
    evaluator = _make_evaluator(process, pi, fp_tol)
    slots, _, free = gauge_fixed_slots(process)
    n_slots = len(slots)
    res = phases_grid_resolution

    guard = GRID_POINT_GUARD if process.is_markov else GENERIC_GRID_POINT_GUARD
    n_points = res ** len(free)
    if n_points > guard:
        raise TooLargeError(
            f"{res}^{len(free)} grid points exceed the guard; lower the resolution"
        )

    grid = np.arange(res) * 2 * np.pi / res
    best_val = np.inf
    best_phi = np.zeros(n_slots)
    chunk = 65536
    combo_iter = itertools.product(grid, repeat=len(free))
    while True:
        block = list(itertools.islice(combo_iter, chunk))
        if not block:
            break
        phi = np.zeros((len(block), n_slots))
        if free:
            phi[:, free] = np.asarray(block)
        values = evaluator.cq(phi)
        i = int(np.argmin(values))
        if values[i] < best_val:
            best_val = float(values[i])
            best_phi = phi[i].copy()

    sweeps = 0
    if refine and free:
        step = np.pi / res
        while step > REFINE_STOP_RAD:
            improved = False
            for f in free:
                candidates = np.tile(best_phi, (2, 1))
                candidates[0, f] += step
                candidates[1, f] -= step
                values = evaluator.cq(candidates)
                i = int(np.argmin(values))
                if values[i] < best_val - 1e-15:
                    best_val = float(values[i])
                    best_phi = candidates[i]
                    improved = True
            sweeps += 1
            if not improved:
                step /= 2

    return OptimizationResult(
        best_phases=_assignment_from_slots(process, slots, best_phi),
        cq_min_bits=best_val,
        grid_resolution=res,
        refinement_iterations=sweeps,
    )


def zero_phase_spectrum(
    process: StochasticProcess, rank_tolerance: float = DEFAULT_RANK_TOL
) -> MemorySpectrum:
    """Memory spectrum of the phase-free model."""
    zero = PhaseAssignment.zero(process)
    overlaps = (
        markov_overlaps(process, zero)
        if process.is_markov
        else fixed_point_overlaps(process, zero)
    )
    return memory_spectrum(overlaps, stationary_distribution(process), rank_tolerance)


def phase_pair_scan(
    process: StochasticProcess,
    key_a: tuple[int, int],
    key_b: tuple[int, int],
    resolution: int = 24,
) -> tuple[np.ndarray, np.ndarray]:
    """C^phi over a 2-D grid of two named transition phases, all others zero.

    Keys are (symbol, from_state).  Returns (angles, grid) with grid[i, j] the
    cost at (key_a=angles[i], key_b=angles[j]).  This is the figure-style
    slice of phase space; it is generally redundant with respect to gauge.
    """
    pi = stationary_distribution(process)
    evaluator = _make_evaluator(process, pi)
    slots = _slots(process)
    try:
        ia = slots.index((key_a[1], key_a[0]))
        ib = slots.index((key_b[1], key_b[0]))
    except ValueError as exc:
        raise ValueError(f"no such transition: {exc}") from exc
    angles = np.arange(resolution) * 2 * np.pi / resolution
    A, B = np.meshgrid(angles, angles, indexing="ij")
    phi = np.zeros((resolution * resolution, len(slots)))
    phi[:, ia] = A.ravel()
    phi[:, ib] = B.ravel()
    values = evaluator.cq(phi).reshape(resolution, resolution)
    return angles, values


# -- dimensional certificates -----------------------------------------------------


@dataclass(frozen=True)
class DimensionalCertificate:
    """Witness of a linear dependence alpha*|s_x> + beta*|s_y> = |s_z>."""

    dependent_state: int
    independent_states: tuple[int, int]
    alpha: float
    beta: float
    phases: PhaseAssignment
    residual: float
    achieved_rank: int

    def to_json_dict(self, process: StochasticProcess | None = None) -> dict:
        doc = {
            "dependent_state": self.dependent_state,
            "independent_states": list(self.independent_states),
            "alpha": self.alpha,
            "beta": self.beta,
            "phases": self.phases.to_json_dict(),
            "residual": self.residual,
            "achieved_rank": self.achieved_rank,
            "residual_tolerance": CERTIFICATE_RESIDUAL_TOL,
            "rank_tolerance": DEFAULT_RANK_TOL,
        }
        if process is not None:
            doc["process_sha256"] = process_sha256(process)
        return doc


def _require_3state_markov(process: StochasticProcess) -> np.ndarray:
    if process.num_states != 3:
        raise WrongArityError("dimensional analysis is defined for 3-state processes")
    if not process.is_markov:
        raise NotMarkovError("dimensional analysis requires a Markov process")
    return process.markov_matrix()


def dimensional_feasibility(
    process: StochasticProcess,
    alpha_beta_pairs: tuple[tuple[float, float], ...] | None = None,
    tol: float = FEASIBILITY_TOL,
) -> list[tuple[tuple[int, int, int], float, float]]:
    """All (permutation, alpha, beta) whose linear dependence passes the interval test.

    A triple is feasible when |a*sqrt(T_wx) - b*sqrt(T_wy)| <= sqrt(T_wz)
    <= a*sqrt(T_wx) + b*sqrt(T_wy) holds for every symbol w, with a, b the
    coefficient magnitudes (signs only shift phases).  Permutations are
    (x, y, z) with z the dependent state.
    """
    T = _require_3state_markov(process)
    if alpha_beta_pairs is None:
        alpha_beta_pairs = default_alpha_beta_pairs()
    R = np.sqrt(T)
    found = []
    for perm in itertools.permutations(range(3)):
        x, y, z = perm
        for alpha, beta in alpha_beta_pairs:
            a, b = abs(alpha), abs(beta)
            ok = True
            for w in range(3):
                lo = abs(a * R[w, x] - b * R[w, y])
                hi = a * R[w, x] + b * R[w, y]
                if not (lo <= R[w, z] + tol and R[w, z] <= hi + tol):
                    ok = False
                    break
            if ok:
                found.append(((x, y, z), float(alpha), float(beta)))
    return found


def recover_phases(
    process: StochasticProcess,
    permutation: tuple[int, int, int],
    alpha: float,
    beta: float,
    rank_tolerance: float = DEFAULT_RANK_TOL,
) -> DimensionalCertificate:
    """Phase assignment collapsing the memory to rank 2, for a feasible triple.

    Works in the gauge phi_{w,x} = 0 for all symbols w.  The cosine formula
    fixes phi_{w,y} up to a sign per symbol; the branches are enumerated and
    the first one whose end-to-end certificate residual passes is returned.
    Raises NoBranchError when none does (numerical marginality at a boundary).
    """
    T = _require_3state_markov(process)
    x, y, z = permutation
    R = np.sqrt(T)
    pi = stationary_distribution(process)

    # Symbol-wise candidate angles for phi_{w,y}; one entry per sign branch.
    candidates: list[list[float]] = []
    for w in range(3):
        twx, twy, twz = T[w, x], T[w, y], T[w, z]
        if twx > 0 and twy > 0:
            cos_val = (twz - alpha**2 * twx - beta**2 * twy) / (
                2 * alpha * beta * np.sqrt(twx * twy)
            )
            if abs(cos_val) > 1 + COS_CLAMP_TOL:
                candidates.append([])
                continue
            angle = float(np.arccos(np.clip(cos_val, -1.0, 1.0)))
            candidates.append([angle, -angle] if angle > 0 else [0.0])
        else:
            candidates.append([0.0])

    for branch in itertools.product(*candidates):
        mapping: dict[tuple[int, int], float] = {}
        coeffs = np.zeros(3, dtype=complex)
        consistent = True
        for w in range(3):
            twx, twy, twz = T[w, x], T[w, y], T[w, z]
            if twx > 0:
                mapping[(w, x)] = 0.0
            phi_wy = branch[w]
            if twy > 0:
                mapping[(w, y)] = phi_wy
            target = alpha * R[w, x] + beta * R[w, y] * np.exp(1j * phi_wy)
            if twz > 0:
                if abs(abs(target) - R[w, z]) > CERTIFICATE_RESIDUAL_TOL:
                    consistent = False
                    break
                phi_wz = float(np.angle(target))
                mapping[(w, z)] = phi_wz
                coeffs[w] = target - R[w, z] * np.exp(1j * phi_wz)
            else:
                coeffs[w] = target
        if not consistent:
            continue
        # The step unitary is norm-preserving and ancilla branches are
        # orthogonal, so the dependence residual equals the root-sum-square
        # of the per-symbol coefficient mismatches (no cancellation).
        residual = float(np.sqrt((np.abs(coeffs) ** 2).sum()))
        if residual <= CERTIFICATE_RESIDUAL_TOL:
            phases = PhaseAssignment.from_mapping(process, mapping)
            overlaps = markov_overlaps(process, phases)
            spectrum = memory_spectrum(overlaps, pi, rank_tolerance)
            return DimensionalCertificate(
                dependent_state=z,
                independent_states=(x, y),
                alpha=float(alpha),
                beta=float(beta),
                phases=phases,
                residual=residual,
                achieved_rank=spectrum.rank,
            )
    raise NoBranchError(
        f"no sign branch yields a consistent certificate for permutation {permutation}"
    )


def find_certificate(
    process: StochasticProcess,
    alpha_beta_pairs: tuple[tuple[float, float], ...] | None = None,
    rank_tolerance: float = DEFAULT_RANK_TOL,
) -> DimensionalCertificate | None:
    """First recoverable certificate over the feasibility triples, or None."""
    for perm, alpha, beta in dimensional_feasibility(process, alpha_beta_pairs):
        try:
            return recover_phases(process, perm, alpha, beta, rank_tolerance)
        except NoBranchError:
            continue
    return None


# -- ambiguity of optimality -------------------------------------------------------


@dataclass(frozen=True)
class AmbiguityReport:
    cq_zero: float
    cq_at_dim_cert: float | None
    cq_min: float
    ambiguous: bool

    def to_json_dict(self) -> dict:
        return {
            "cq_zero": self.cq_zero,
            "cq_at_dim_cert": self.cq_at_dim_cert,
            "cq_min": self.cq_min,
            "ambiguous": self.ambiguous,
            "margin": AMBIGUITY_MARGIN,
        }


def ambiguity_report(
    process: StochasticProcess,
    certificate: DimensionalCertificate | None = None,
    alpha_beta_pairs: tuple[tuple[float, float], ...] | None = None,
    phase_grid: int = 24,
    refine: bool = True,
    margin: float = AMBIGUITY_MARGIN,
) -> AmbiguityReport:
    """Compare the dimension-optimal model's entropy against C_q and the entropic optimum.

    Ambiguous means the strict ordering C^phi(certificate) > C_q(zero phases)
    > C^phi_min holds with the given margin: minimizing dimension and
    minimizing entropy then demand different models.
    """
    pi = stationary_distribution(process)
    cq_zero = float(zero_phase_spectrum(process).cq_bits)
    if certificate is None:
        certificate = find_certificate(process, alpha_beta_pairs)
    cq_cert = None
    if certificate is not None:
        overlaps = markov_overlaps(process, certificate.phases)
        cq_cert = float(memory_spectrum(overlaps, pi).cq_bits)
    cq_min = float(minimize_cq(process, phase_grid, refine).cq_min_bits)
    ambiguous = (
        cq_cert is not None
        and cq_cert > cq_zero + margin
        and cq_zero > cq_min + margin
    )
    return AmbiguityReport(
        cq_zero=cq_zero, cq_at_dim_cert=cq_cert, cq_min=cq_min, ambiguous=ambiguous
    )


def search_ambiguity(
    p_values: np.ndarray | None = None,
    eps_values: np.ndarray | None = None,
    margin: float = 1e-4,
    phase_grid: int = 16,
) -> tuple[StochasticProcess, DimensionalCertificate, AmbiguityReport] | None:
    """Scan contaminated quasi-cycles for a process exhibiting the ambiguity.

    Returns the first (process, certificate, report) whose ordering holds
    with the requested margin, or None when the scan is exhausted.  The scan
    is deterministic.
    """
    if p_values is None:
        p_values = np.array([0.40, 0.42, 0.45, 0.48, 0.50])
    if eps_values is None:
        eps_values = np.array([0.02, 0.01, 0.03, 0.05])
    for p in p_values:
        for eps in eps_values:
            process = mixed_cycle(float(p), float(eps))
            certificate = find_certificate(process)
            if certificate is None:
                continue
            report = ambiguity_report(
                process, certificate=certificate, phase_grid=phase_grid, margin=margin
            )
            if report.ambiguous:
                return process, certificate, report
    return None
