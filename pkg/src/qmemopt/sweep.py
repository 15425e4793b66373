"""Octant sweeps over three-state Markov processes: dimensional and entropic advantage rates.

Each state's outgoing probability column is a point on the positive octant of
the unit sphere (squared direction cosines of two angles); a process is a
triple of such points.  The dimensional sweep enumerates the full grid and
counts cells whose memory admits a linear dependence; the entropic sweep
draws random processes and runs the phase optimizer on each.
"""

from __future__ import annotations

import csv
import sys
import time
from dataclasses import dataclass
from multiprocessing import Pool
from typing import Iterator

import numpy as np

from .advantage import dimensional_feasibility, minimize_cq, zero_phase_spectrum
from .errors import ReducibleProcessError
from .families import octant_process, random_markov
from .process import StochasticProcess, Transition

SCHEMA_VERSION = 1

ENTROPIC_ADVANTAGE_MARGIN = 1e-6

#: Cells per worker task in the vectorized dimensional kernel.
_CHUNK = 25

_PERMS = [(0, 1, 2), (1, 2, 0), (2, 0, 1), (1, 0, 2), (2, 1, 0), (0, 2, 1)]


@dataclass(frozen=True)
class SweepConfig:
    steps_per_edge: int = 20
    alpha_beta_pairs: tuple[tuple[float, float], ...] = ((1.0, 1.0),)
    entropic_samples: int = 2000
    phase_grid: int = 16
    seed: int = 0
    workers: int = 1
    placement: str = "midpoint"  # or "endpoint"
    sampling: str = "simplex"  # or "angles" / "sphere"
    refine: bool = True

    def __post_init__(self):
        if self.steps_per_edge < 2:
            raise ValueError("steps_per_edge must be >= 2")
        if self.entropic_samples < 1:
            raise ValueError("entropic_samples must be >= 1")
        if self.placement not in ("midpoint", "endpoint"):
            raise ValueError("placement must be 'midpoint' or 'endpoint'")


@dataclass(frozen=True)
class SweepReport:
    total_cells: int = 0
    dimensional_feasible_count: int = 0
    dimensional_rate: float = 0.0
    entropic_tested: int = 0
    entropic_advantage_count: int = 0
    entropic_rate: float = 0.0
    skipped: int = 0
    runtime_seconds: float = 0.0

    def to_json_dict(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "total_cells": self.total_cells,
            "dimensional_feasible_count": self.dimensional_feasible_count,
            "dimensional_rate": self.dimensional_rate,
            "entropic_tested": self.entropic_tested,
            "entropic_advantage_count": self.entropic_advantage_count,
            "entropic_rate": self.entropic_rate,
            "skipped": self.skipped,
            "runtime_seconds": self.runtime_seconds,
        }


# -- octant grid ------------------------------------------------------------


def octant_angles(steps_per_edge: int, placement: str = "midpoint") -> np.ndarray:
    """Angle grid over [0, pi/2].

    "midpoint" places cell centers ((k + 1/2) * pi/2 / steps); "endpoint"
    includes both corners (linspace).  Midpoint placement avoids the
    degenerate pole theta = 0, where all psi collapse onto one point, and is
    the default; the observed advantage rates depend on this choice.
    """
    if placement == "midpoint":
        return (np.arange(steps_per_edge) + 0.5) * (np.pi / 2) / steps_per_edge
    return np.linspace(0.0, np.pi / 2, steps_per_edge)


def octant_points(steps_per_edge: int, placement: str = "midpoint") -> np.ndarray:
    """All grid points as probability triples, shape (steps^2, 3), theta-major."""
    ang = octant_angles(steps_per_edge, placement)
    th, ps = np.meshgrid(ang, ang, indexing="ij")
    p0 = (np.sin(th) * np.cos(ps)) ** 2
    p1 = (np.sin(th) * np.sin(ps)) ** 2
    p2 = np.cos(th) ** 2
    return np.stack([p0.ravel(), p1.ravel(), p2.ravel()], axis=1)


def octant_point_angles(steps_per_edge: int, placement: str = "midpoint") -> np.ndarray:
    ang = octant_angles(steps_per_edge, placement)
    th, ps = np.meshgrid(ang, ang, indexing="ij")
    return np.stack([th.ravel(), ps.ravel()], axis=1)


def enumerate_octant_grid(
    steps_per_edge: int, placement: str = "midpoint"
) -> Iterator[StochasticProcess]:
    """Stream the grid as processes, state-0 point outermost."""
    angles = octant_point_angles(steps_per_edge, placement)
    for a0 in angles:
        for a1 in angles:
            for a2 in angles:
                yield octant_process(np.concatenate([a0, a1, a2]))


# -- dimensional sweep --------------------------------------------------------

_worker_state: dict = {}


def _feasible_block(R: np.ndarray, lo: int, hi: int, pairs) -> np.ndarray:
    """Feasibility flags for cells (i, j, k) with i in [lo, hi), any pair/permutation."""
    S = R.shape[0]
    feasible = np.zeros((hi - lo, S, S), dtype=bool)

    def coord(axis: int, w: int) -> np.ndarray:
        v = R[:, w]
        if axis == 0:
            return v[lo:hi, None, None]
        if axis == 1:
            return v[None, :, None]
        return v[None, None, :]

    for alpha, beta in pairs:
        a, b = abs(alpha), abs(beta)
        for x, y, z in _PERMS:
            ok = np.ones((hi - lo, S, S), dtype=bool)
            for w in range(3):
                rx, ry, rz = coord(x, w), coord(y, w), coord(z, w)
                ok &= np.abs(a * rx - b * ry) <= rz + 1e-12
                ok &= rz <= a * rx + b * ry + 1e-12
                if not ok.any():
                    break
            feasible |= ok
    return feasible


def _init_dimensional(R: np.ndarray, pairs) -> None:
    _worker_state["R"] = R
    _worker_state["pairs"] = pairs


def _count_chunk(bounds: tuple[int, int]) -> int:
    lo, hi = bounds
    return int(_feasible_block(_worker_state["R"], lo, hi, _worker_state["pairs"]).sum())


def sweep_dimensional(config: SweepConfig, csv_path: str | None = None) -> SweepReport:
    """Count grid cells admitting a dimensional advantage for any configured pair.

    Counts are independent of worker count and scheduling; the union over
    pairs and permutations is a commutative OR per cell.  CSV emission (one
    row per cell) streams serially and is only sensible for small grids.
    """
    start = time.time()
    points = octant_points(config.steps_per_edge, config.placement)
    R = np.sqrt(points)
    S = R.shape[0]
    total = S**3
    pairs = tuple(config.alpha_beta_pairs)
    bounds = [(lo, min(lo + _CHUNK, S)) for lo in range(0, S, _CHUNK)]

    feasible = 0
    if csv_path is not None:
        angles = octant_point_angles(config.steps_per_edge, config.placement)
        pair_names = [f"feas_{a:g}_{b:g}" for a, b in pairs]
        with open(csv_path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(
                ["schema_version", "cell", "theta0", "psi0", "theta1", "psi1", "theta2", "psi2"]
                + pair_names
                + ["feasible"]
            )
            for lo, hi in bounds:
                per_pair = [_feasible_block(R, lo, hi, (pair,)) for pair in pairs]
                combined = np.logical_or.reduce(per_pair)
                feasible += int(combined.sum())
                for i in range(lo, hi):
                    for j in range(S):
                        for k in range(S):
                            cell = (i * S + j) * S + k
                            writer.writerow(
                                [
                                    SCHEMA_VERSION,
                                    cell,
                                    f"{angles[i, 0]:.12g}",
                                    f"{angles[i, 1]:.12g}",
                                    f"{angles[j, 0]:.12g}",
                                    f"{angles[j, 1]:.12g}",
                                    f"{angles[k, 0]:.12g}",
                                    f"{angles[k, 1]:.12g}",
                                ]
                                + [int(flags[i - lo, j, k]) for flags in per_pair]
                                + [int(combined[i - lo, j, k])]
                            )
    elif config.workers > 1:
        with Pool(config.workers, initializer=_init_dimensional, initargs=(R, pairs)) as pool:
            for done, count in enumerate(pool.imap(_count_chunk, bounds), start=1):
                feasible += count
                if done % 4 == 0 or done == len(bounds):
                    print(
                        f"dimensional sweep: {done}/{len(bounds)} chunks", file=sys.stderr
                    )
    else:
        _init_dimensional(R, pairs)
        for done, b in enumerate(bounds, start=1):
            feasible += _count_chunk(b)
            if done % 4 == 0 or done == len(bounds):
                print(f"dimensional sweep: {done}/{len(bounds)} chunks", file=sys.stderr)

    return SweepReport(
        total_cells=total,
        dimensional_feasible_count=feasible,
        dimensional_rate=feasible / total,
        runtime_seconds=time.time() - start,
    )


def sample_feasible_cells(
    config: SweepConfig, count: int, rng_seed: int | None = None
) -> list[tuple[StochasticProcess, tuple[tuple[int, int, int], float, float]]]:
    """Draw random grid cells until ``count`` feasible ones are found.

    Returns (process, witness-triple) per hit; deterministic for a given seed.
    """
    seed = config.seed if rng_seed is None else rng_seed
    rng = np.random.default_rng(seed)
    points = octant_points(config.steps_per_edge, config.placement)
    S = points.shape[0]
    hits = []
    attempts = 0
    while len(hits) < count:
        attempts += 1
        if attempts > 10**6:
            raise RuntimeError("feasible-cell sampling did not terminate")
        i, j, k = rng.integers(0, S, size=3)
        T = np.stack([points[i], points[j], points[k]], axis=1)
        process = StochasticProcess(
            3,
            3,
            tuple(
                Transition(v, w, float(T[w, v]), w)
                for v in range(3)
                for w in range(3)
                if T[w, v] > 0
            ),
        )
        triples = dimensional_feasibility(process, config.alpha_beta_pairs)
        if triples:
            hits.append((process, triples[0]))
    return hits


# -- entropic sweep -----------------------------------------------------------


def _init_entropic(config: SweepConfig) -> None:
    _worker_state["config"] = config


def _entropic_one(index: int) -> tuple[bool, bool, list]:
    """(advantage, skipped, csv_row) for sample ``index``; RNG derived from (seed, index)."""
    config: SweepConfig = _worker_state["config"]
    rng = np.random.default_rng((config.seed, index))
    process = random_markov(rng, config.sampling)
    T = process.markov_matrix()
    row: list = [SCHEMA_VERSION, index] + [f"{v:.12g}" for v in T.ravel()]
    try:
        cq_zero = zero_phase_spectrum(process).cq_bits
        result = minimize_cq(process, config.phase_grid, config.refine)
    except ReducibleProcessError:
        return False, True, row + ["", "", ""]
    advantage = result.cq_min_bits < cq_zero - ENTROPIC_ADVANTAGE_MARGIN
    row += [f"{cq_zero:.12g}", f"{result.cq_min_bits:.12g}", int(advantage)]
    return advantage, False, row


def sample_entropic(config: SweepConfig, csv_path: str | None = None) -> SweepReport:
    """Estimate how often random processes admit an entropic advantage.

    Each sample gets its own RNG stream derived from (seed, index), so the
    report does not depend on worker count or scheduling.  Reducible or
    degenerate draws are skipped and tallied.
    """
    start = time.time()
    indices = range(config.entropic_samples)
    _init_entropic(config)
    if config.workers > 1:
        with Pool(config.workers, initializer=_init_entropic, initargs=(config,)) as pool:
            results = []
            for done, res in enumerate(pool.imap(_entropic_one, indices, chunksize=16), 1):
                results.append(res)
                if done % 200 == 0 or done == config.entropic_samples:
                    print(f"entropic sweep: {done}/{config.entropic_samples}", file=sys.stderr)
    else:
        results = []
        for done, i in enumerate(indices, 1):
            results.append(_entropic_one(i))
            if done % 200 == 0 or done == config.entropic_samples:
                print(f"entropic sweep: {done}/{config.entropic_samples}", file=sys.stderr)

    advantages = sum(1 for adv, skip, _ in results if adv)
    skipped = sum(1 for _, skip, _ in results if skip)
    tested = config.entropic_samples - skipped

    if csv_path is not None:
        with open(csv_path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(
                ["schema_version", "sample"]
                + [f"t{w}{v}" for w in range(3) for v in range(3)]
                + ["cq_bits", "cq_min_bits", "advantage"]
            )
            for _, _, row in results:
                writer.writerow(row)

    return SweepReport(
        entropic_tested=tested,
        entropic_advantage_count=advantages,
        entropic_rate=advantages / tested if tested else 0.0,
        skipped=skipped,
        runtime_seconds=time.time() - start,
    )
