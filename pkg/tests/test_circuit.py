import numpy as np
import pytest

from qmemopt import (
    InconsistentGramError,
    NotConvergedError,
    OverlapMatrix,
    PhaseAssignment,
    StochasticProcess,
    Transition,
    build_unitary,
    embed_states,
    exact_word_distribution,
    fixed_point_overlaps,
    markov_overlaps,
    memory_spectrum,
    quasi_cycle,
    random_unifilar,
    sample_trajectory,
    stationary_distribution,
    verify_model,
    word_distribution,
)
from qmemopt.circuit import total_variation


def fair_coin() -> StochasticProcess:
    return StochasticProcess(1, 2, (Transition(0, 0, 0.5, 0), Transition(0, 1, 0.5, 0)))


def build_pipeline(process, phases):
    overlaps = fixed_point_overlaps(process, phases)
    states = embed_states(overlaps)
    return build_unitary(process, phases, states)


# -- embedding -------------------------------------------------------------------


def test_embed_identity_overlaps():
    states = embed_states(OverlapMatrix(np.eye(3)))
    assert states.dimension == 3
    assert np.allclose(states.gram(), np.eye(3), atol=1e-12)


def test_embed_identical_states():
    states = embed_states(OverlapMatrix(np.ones((3, 3))))
    assert states.dimension == 1
    assert np.allclose(np.abs(states.vectors), 1.0, atol=1e-12)


def test_embed_rank_two_at_half():
    # at p = 1/2 the flipped-phase overlap matrix has an exactly vanishing eigenvalue
    process = quasi_cycle(0.5)
    phases = PhaseAssignment.from_mapping(process, {(2, 2): np.pi})
    overlaps = markov_overlaps(process, phases)
    assert np.linalg.eigvalsh(overlaps.matrix).min() < 1e-10
    states = embed_states(overlaps)
    assert states.dimension == 2
    assert np.abs(states.gram() - overlaps.matrix).max() < 1e-10


def test_embed_reproduces_overlaps(rng):
    for _ in range(10):
        process = random_unifilar(rng, 4, 3)
        phases = PhaseAssignment.random(process, rng)
        try:
            overlaps = fixed_point_overlaps(process, phases)
        except NotConvergedError:
            continue
        states = embed_states(overlaps)
        assert np.abs(states.gram() - overlaps.matrix).max() < 1e-10


# -- unitary construction -----------------------------------------------------------


def test_fair_coin_unitary_action():
    process = fair_coin()
    model = build_pipeline(process, PhaseAssignment.zero(process))
    assert model.memory_dim == 1
    sigma = model.memory_states.vectors[0]
    out = model.matrix @ np.kron(sigma, [1.0, 0.0])
    expected = (np.kron(sigma, [1.0, 0.0]) + np.kron(sigma, [0.0, 1.0])) / np.sqrt(2)
    assert np.abs(out - expected).max() < 1e-12


def test_quasi_cycle_unitary_residuals():
    process = quasi_cycle(0.3)
    report = verify_model(process, PhaseAssignment.zero(process))
    assert report.unitarity_residual <= 1e-10
    assert report.step_residual <= 1e-10


def test_random_unifilar_unitary(rng):
    built = 0
    while built < 5:
        process = random_unifilar(rng, 4, 4)
        phases = PhaseAssignment.random(process, rng)
        try:
            model = build_pipeline(process, phases)
        except NotConvergedError:
            continue
        built += 1
        U = model.matrix
        assert np.abs(U.conj().T @ U - np.eye(U.shape[0])).max() <= 1e-10


def test_inconsistent_gram_rejected():
    # identity overlaps are not a fixed point for the quasi-cycle
    process = quasi_cycle(0.3)
    states = embed_states(OverlapMatrix(np.eye(3)))
    with pytest.raises(InconsistentGramError):
        build_unitary(process, PhaseAssignment.zero(process), states)


# -- word statistics ------------------------------------------------------------------


def test_exact_single_step_distribution():
    p = 0.3
    process = quasi_cycle(p)
    model = build_pipeline(process, PhaseAssignment.zero(process))
    dist = exact_word_distribution(model, 0, 1)
    assert dist[(0,)] == pytest.approx(1 - p, abs=1e-12)
    assert dist[(1,)] == pytest.approx(p, abs=1e-12)


def test_exact_empty_word():
    process = quasi_cycle(0.3)
    model = build_pipeline(process, PhaseAssignment.zero(process))
    assert exact_word_distribution(model, 0, 0) == pytest.approx({(): 1.0})


def test_exact_matches_process_words():
    process = quasi_cycle(0.3)
    model = build_pipeline(process, PhaseAssignment.zero(process))
    for j in range(3):
        tv = total_variation(
            exact_word_distribution(model, j, 4), word_distribution(process, j, 4)
        )
        assert tv < 1e-8


def test_output_statistics_phase_independent(rng):
    process = quasi_cycle(0.3)
    reference = None
    for _ in range(4):
        model = build_pipeline(process, PhaseAssignment.random(process, rng))
        dist = exact_word_distribution(model, 0, 4)
        if reference is None:
            reference = dist
        else:
            assert total_variation(reference, dist) < 1e-10


# -- sampling ----------------------------------------------------------------------


def test_deterministic_cycle_trajectory():
    process = quasi_cycle(1.0)
    model = build_pipeline(process, PhaseAssignment.zero(process))
    for seed in (0, 7, 123):
        assert sample_trajectory(model, 0, 3, seed) == (1, 2, 0)


def test_trajectory_deterministic_given_seed():
    process = quasi_cycle(0.3)
    model = build_pipeline(process, PhaseAssignment.zero(process))
    a = sample_trajectory(model, 0, 50, 42)
    b = sample_trajectory(model, 0, 50, 42)
    assert a == b


def test_fair_coin_frequency():
    process = fair_coin()
    model = build_pipeline(process, PhaseAssignment.zero(process))
    n = 100_000
    word = sample_trajectory(model, 0, n, 2024)
    ones = sum(word)
    sigma = 0.5 * np.sqrt(n)
    assert abs(ones - n / 2) < 3 * sigma


def test_sampled_words_chi_squared():
    process = quasi_cycle(0.3)
    model = build_pipeline(process, PhaseAssignment.zero(process))
    expected = exact_word_distribution(model, 0, 3)
    n = 100_000
    rng = np.random.default_rng(7)
    counts: dict[tuple, int] = {}
    for _ in range(n):
        w = sample_trajectory(model, 0, 3, rng)
        counts[w] = counts.get(w, 0) + 1
    chi2 = sum(
        (counts.get(w, 0) - n * p) ** 2 / (n * p) for w, p in expected.items()
    )
    # 8 words from start state x -> df = 7; chi2 critical value at the 0.01 level
    assert len(expected) == 8
    assert chi2 < 18.475


# -- verification -----------------------------------------------------------------------


def test_verify_single_state():
    report = verify_model(fair_coin(), PhaseAssignment.zero(fair_coin()))
    assert report.unitarity_residual <= 1e-12
    assert report.step_residual <= 1e-12
    assert report.tv_distance <= 1e-12


def test_verify_quasi_cycle_random_phases(rng):
    process = quasi_cycle(0.3)
    report = verify_model(process, PhaseAssignment.random(process, rng))
    assert report.passed
    assert report.tv_distance < 1e-8


def test_verify_many_random_markov(rng):
    from qmemopt import random_markov

    for _ in range(20):
        process = random_markov(rng, "simplex")
        report = verify_model(process, PhaseAssignment.random(process, rng))
        assert report.passed


def test_memory_dimension_matches_gram_rank(rng):
    # the embedded dimension realizes 2^{dq} of the weighted spectrum
    process = quasi_cycle(0.5)
    phases = PhaseAssignment.from_mapping(process, {(2, 2): np.pi})
    overlaps = markov_overlaps(process, phases)
    spectrum = memory_spectrum(overlaps, stationary_distribution(process))
    model = build_unitary(process, phases, embed_states(overlaps))
    assert model.memory_dim == spectrum.rank == 2
    assert 2 ** spectrum.dq_bits == pytest.approx(model.memory_dim)
