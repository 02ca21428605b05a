import math

import numpy as np
import pytest

from seqmeas import (
    CommutingPair,
    DimensionError,
    InvariantError,
    JointVector,
    Model,
    MeasurementStep,
    OutcomeDistribution,
    Scenario,
    StateVector,
    co_measurement_basis,
    functional_step,
    marginal,
    pair_from_locals,
    pauli_direction,
    phase_aligned_max_diff,
    run_chain_analytic,
    sample_chain,
    separate_step,
    skip_step,
    step_outcomes,
)

from conftest import random_pauli_pair, random_scenario, random_state
from oracles import chain_distribution, scenario_to_dense_steps

SQRT_HALF = 1.0 / math.sqrt(2.0)


# --- step construction invariants ---


def test_skip_step_carries_nothing(z_pair):
    with pytest.raises(InvariantError):
        MeasurementStep(Model.SKIP, pair=z_pair)


def test_separate_step_rejects_f(z_pair):
    with pytest.raises(InvariantError):
        MeasurementStep(Model.SEPARATE, z_pair, f="product")


def test_functional_step_requires_f(z_pair):
    with pytest.raises(InvariantError):
        MeasurementStep(Model.FUNCTIONAL, z_pair)


def test_scenario_needs_a_measuring_step(bell):
    with pytest.raises(InvariantError):
        Scenario(bell, (skip_step(),))


def test_scenario_rejects_dimension_mismatch(z_pair):
    with pytest.raises(DimensionError):
        Scenario(StateVector([1.0, 0.0]), (separate_step(z_pair),))


# --- step_outcomes ---


def test_step_outcomes_functional_bell(bell, z_pair):
    branches = step_outcomes(bell, functional_step(z_pair))
    assert len(branches) == 1
    label, prob, post = branches[0]
    assert label == 1.0
    assert abs(prob - 1.0) <= 1e-12
    assert phase_aligned_max_diff(post, bell) <= 1e-12


def test_step_outcomes_separate_bell(bell, z_pair):
    branches = step_outcomes(bell, separate_step(z_pair))
    assert [(label, round(prob, 12)) for label, prob, _ in branches] == [
        ((1.0, 1.0), 0.5),
        ((-1.0, -1.0), 0.5),
    ]
    np.testing.assert_array_equal(branches[0][2].amps, np.eye(4)[0])
    np.testing.assert_array_equal(branches[1][2].amps, np.eye(4)[3])


def test_step_outcomes_functional_worked_probs(z_pair):
    state = StateVector([0.6, 0.48, 0.64, 0.0])
    probs = {label: p for label, p, _ in step_outcomes(state, functional_step(z_pair))}
    assert abs(probs[1.0] - 0.36) <= 1e-12
    assert abs(probs[-1.0] - 0.64) <= 1e-12


def test_step_outcomes_rejects_skip(bell):
    with pytest.raises(InvariantError):
        step_outcomes(bell, skip_step())


def test_step_outcomes_dimension_mismatch(z_pair):
    with pytest.raises(DimensionError):
        step_outcomes(StateVector([1.0, 0.0]), separate_step(z_pair))


# --- run_chain_analytic ---


def test_chain_functional_then_x(bell, z_pair, x_pair):
    scn = Scenario(bell, (functional_step(z_pair), separate_step(x_pair)))
    dist = run_chain_analytic(scn)
    assert abs(marginal(dist, -1)[(1.0, 1.0)] - 0.5) <= 1e-12
    # independent projector-chain oracle over dense matrices
    oracle = chain_distribution(bell.amps, scenario_to_dense_steps(scn))
    assert set(oracle) == set(dist.entries)
    for seq, (prob, _) in dist:
        assert abs(prob - oracle[seq][0]) <= 1e-12


def test_chain_separate_then_x_is_uniform(bell, z_pair, x_pair):
    scn = Scenario(bell, (separate_step(z_pair), separate_step(x_pair)))
    final = marginal(run_chain_analytic(scn), -1)
    assert all(abs(p - 0.25) <= 1e-12 for p in final.values())


def test_chain_worked_functional_marginal(z_pair, x_pair):
    state = StateVector([0.6, 0.48, 0.64, 0.0])
    scn = Scenario(state, (functional_step(z_pair), separate_step(x_pair)))
    p = marginal(run_chain_analytic(scn), -1)[(1.0, 1.0)]
    assert abs(p - 0.4036) <= 1e-12
    oracle = chain_distribution(state.amps, scenario_to_dense_steps(scn))
    total = sum(prob for seq, (prob, _) in oracle.items() if seq[-1] == (1.0, 1.0))
    assert abs(p - total) <= 1e-12


def test_chain_skip_then_x(z_pair, x_pair):
    state = StateVector([0.6, 0.48, 0.64, 0.0])
    scn = Scenario(state, (skip_step(), separate_step(x_pair)))
    p = marginal(run_chain_analytic(scn), -1)[(1.0, 1.0)]
    assert abs(p - 0.7396) <= 1e-12


def test_chain_distribution_normalizes(z_pair, x_pair):
    rng = np.random.default_rng(5)
    for _ in range(25):
        scn = random_scenario(rng)
        dist = run_chain_analytic(scn)
        assert abs(sum(p for _, (p, _) in dist) - 1.0) <= 1e-12


def test_chain_matches_dense_oracle_randomized():
    rng = np.random.default_rng(17)
    for _ in range(150):
        scn = random_scenario(rng)
        dist = run_chain_analytic(scn)
        oracle = chain_distribution(scn.initial.amps, scenario_to_dense_steps(scn))
        assert set(oracle) == set(dist.entries)
        for seq, (prob, final) in dist:
            oprob, ofinal = oracle[seq]
            assert abs(prob - oprob) <= 1e-12
            # states on near-null branches are ill-conditioned in any
            # implementation (relative error ~ eps/sqrt(prob))
            if prob > 1e-6 and final is not None and ofinal is not None:
                assert phase_aligned_max_diff(final, StateVector(ofinal)) <= 1e-12


# --- marginal ---


def test_marginal_single_step_identity(bell, z_pair):
    scn = Scenario(bell, (separate_step(z_pair),))
    dist = run_chain_analytic(scn)
    marg = marginal(dist, 0)
    assert marg == {seq[0]: p for seq, (p, _) in dist}


def test_marginal_index_out_of_range(bell, z_pair):
    dist = run_chain_analytic(Scenario(bell, (separate_step(z_pair),)))
    with pytest.raises(IndexError):
        marginal(dist, 1)
    with pytest.raises(IndexError):
        marginal(dist, -2)


def test_marginal_sums_to_one(z_pair, x_pair):
    rng = np.random.default_rng(9)
    for _ in range(20):
        scn = Scenario(
            random_state(rng), (functional_step(z_pair), separate_step(x_pair))
        )
        for index in (0, 1, -1):
            assert abs(sum(marginal(run_chain_analytic(scn), index).values()) - 1.0) <= 1e-12


# --- compatibility of the two single-step models ---


def test_same_opposite_compatibility():
    rng = np.random.default_rng(41)
    for _ in range(50):
        state = random_state(rng)
        pair = random_pauli_pair(rng)
        same = opposite = 0.0
        for (a, b), prob, _ in step_outcomes(state, separate_step(pair)):
            if a * b > 0:
                same += prob
            else:
                opposite += prob
        functional = {
            label: prob for label, prob, _ in step_outcomes(state, functional_step(pair))
        }
        assert abs(same - functional.get(1.0, 0.0)) <= 1e-12
        assert abs(opposite - functional.get(-1.0, 0.0)) <= 1e-12


# --- degeneracy-lifting co-measurement reproduces functional chains ---


def co_measurement_pair(state, fobs):
    """Separate-style pair over the state-adapted basis; labels (fvalue, slot)."""
    joint = []
    for fvalue, vectors in co_measurement_basis(state, fobs):
        joint.extend(
            JointVector(fvalue, float(j), v) for j, v in enumerate(vectors)
        )
    return CommutingPair(tuple(joint))


def test_co_measurement_step_reproduces_functional():
    rng = np.random.default_rng(43)
    for _ in range(50):
        state = random_state(rng)
        pair = random_pauli_pair(rng)
        step = functional_step(pair, "product")
        fine = step_outcomes(state, separate_step(co_measurement_pair(state, step.fobs)))
        coarse = {label: (p, post) for label, p, post in step_outcomes(state, step)}
        merged = {}
        for (fvalue, _), prob, post in fine:
            assert fvalue not in merged, "only one fine branch may survive per eigenspace"
            merged[fvalue] = (prob, post)
        assert set(merged) == set(coarse)
        for fvalue, (prob, post) in merged.items():
            cprob, cpost = coarse[fvalue]
            assert abs(prob - cprob) <= 1e-12
            assert phase_aligned_max_diff(post, cpost) <= 1e-12


def test_co_measurement_chain_reproduces_functional_chain(x_pair):
    rng = np.random.default_rng(44)
    for _ in range(25):
        state = random_state(rng)
        pair = random_pauli_pair(rng)
        step = functional_step(pair, "product")
        scn_coarse = Scenario(state, (step, separate_step(x_pair)))
        scn_fine = Scenario(
            state,
            (separate_step(co_measurement_pair(state, step.fobs)), separate_step(x_pair)),
        )
        coarse = {seq: p for seq, (p, _) in run_chain_analytic(scn_coarse)}
        merged = {}
        for seq, (p, _) in run_chain_analytic(scn_fine):
            key = (seq[0][0],) + seq[1:]
            merged[key] = merged.get(key, 0.0) + p
        assert set(merged) == set(coarse)
        for key, p in merged.items():
            assert abs(p - coarse[key]) <= 1e-12


# --- injective f collapses onto the separate model ---


def test_injective_f_matches_separate():
    rng = np.random.default_rng(47)

    def f(a, b):
        return 2.0 * a + b

    for _ in range(25):
        state = random_state(rng)
        pairs = [random_pauli_pair(rng) for _ in range(2)]
        scn_f = Scenario(state, tuple(functional_step(p, f) for p in pairs))
        scn_s = Scenario(state, tuple(separate_step(p) for p in pairs))
        dist_f = {seq: p for seq, (p, _) in run_chain_analytic(scn_f)}
        mapped = {}
        for seq, (p, _) in run_chain_analytic(scn_s):
            mapped[tuple(f(a, b) for a, b in seq)] = p
        assert set(mapped) == set(dist_f)
        for key, p in mapped.items():
            assert abs(p - dist_f[key]) <= 1e-12


# --- OutcomeDistribution invariants ---


def test_outcome_distribution_rejects_bad_total():
    state = StateVector([1.0, 0.0])
    with pytest.raises(InvariantError):
        OutcomeDistribution({(1.0,): (0.5, state)})


def test_outcome_distribution_rejects_final_state_on_null_branch():
    state = StateVector([1.0, 0.0])
    with pytest.raises(InvariantError):
        OutcomeDistribution({(1.0,): (1.0, state), (2.0,): (0.0, state)})


# --- sample_chain ---


def test_sample_single_trial(bell, z_pair, x_pair):
    scn = Scenario(bell, (functional_step(z_pair), separate_step(x_pair)))
    counts = sample_chain(scn, seed=5, n=1)
    assert len(counts) == 1
    assert sum(counts.values()) == 1


def test_sample_counts_sum(bell, z_pair, x_pair):
    scn = Scenario(bell, (separate_step(z_pair), separate_step(x_pair)))
    counts = sample_chain(scn, seed=3, n=500)
    assert sum(counts.values()) == 500


def test_sample_deterministic_replay(bell, z_pair, x_pair):
    scn = Scenario(bell, (functional_step(z_pair), separate_step(x_pair)))
    assert sample_chain(scn, seed=11, n=300) == sample_chain(scn, seed=11, n=300)


def test_sample_trials_are_per_index_streams(bell, z_pair, x_pair):
    # trial t depends only on (seed, t): a longer run extends a shorter one
    scn = Scenario(bell, (separate_step(z_pair), separate_step(x_pair)))
    short = sample_chain(scn, seed=13, n=100)
    long = sample_chain(scn, seed=13, n=200)
    assert all(long.get(seq, 0) >= c for seq, c in short.items())
    assert sum(long.values()) - sum(short.values()) == 100


def test_sample_matches_analytic_at_moderate_n(bell, z_pair, x_pair):
    scn = Scenario(bell, (functional_step(z_pair), separate_step(x_pair)))
    n = 4000
    counts = sample_chain(scn, seed=29, n=n)
    for seq, (p, _) in run_chain_analytic(scn):
        emp = counts.get(seq, 0) / n
        assert abs(emp - p) <= 4.0 * math.sqrt(p * (1.0 - p) / n)


def test_sample_rejects_nonpositive_n(bell, z_pair):
    scn = Scenario(bell, (separate_step(z_pair),))
    with pytest.raises(InvariantError):
        sample_chain(scn, seed=1, n=0)


def test_sample_supports_negative_seed(bell, z_pair):
    scn = Scenario(bell, (separate_step(z_pair),))
    counts = sample_chain(scn, seed=-9, n=50)
    assert sum(counts.values()) == 50
    assert counts == sample_chain(scn, seed=-9, n=50)
