import math

import numpy as np
import pytest

from seqmeas import (
    Scenario,
    StateVector,
    functional_step,
    pair_from_locals,
    pauli_direction,
    phase_aligned_max_diff,
    separate_step,
    skip_step,
)

SQRT_HALF = 1.0 / math.sqrt(2.0)


@pytest.fixture
def bell():
    return StateVector([SQRT_HALF, 0.0, 0.0, SQRT_HALF])


@pytest.fixture
def z_pair():
    return pair_from_locals(pauli_direction(0.0), pauli_direction(0.0))


@pytest.fixture
def x_pair():
    return pair_from_locals(pauli_direction(math.pi / 2), pauli_direction(math.pi / 2))


def random_state(rng, dim=4, real=False):
    raw = rng.standard_normal(dim)
    if not real:
        raw = raw + 1j * rng.standard_normal(dim)
    return StateVector.normalized(raw)


def random_pauli_pair(rng):
    theta, phi = rng.uniform(0.0, 2.0 * math.pi, size=2)
    return pair_from_locals(pauli_direction(theta), pauli_direction(phi))


# outcome functions shared between engine and oracle in randomized tests
F_CHOICES = (
    "product",
    lambda a, b: a,            # keeps only the left outcome: rank-2 eigenspaces
    lambda a, b: 2.0 * a + b,  # injective on (+-1, +-1): degeneracy fully lifted
)


def random_scenario(rng, max_steps=3):
    """Random 2-qubit chain mixing both models, random angles, and skips."""
    initial = random_state(rng)
    n_steps = int(rng.integers(1, max_steps + 1))
    steps = []
    for _ in range(n_steps):
        kind = rng.choice(["separate", "functional", "skip"], p=[0.45, 0.45, 0.1])
        if kind == "skip":
            steps.append(skip_step())
        elif kind == "separate":
            steps.append(separate_step(random_pauli_pair(rng)))
        else:
            f = F_CHOICES[rng.integers(0, len(F_CHOICES))]
            steps.append(functional_step(random_pauli_pair(rng), f))
    if all(s.model.value == "skip" for s in steps):
        steps[-1] = separate_step(random_pauli_pair(rng))
    return Scenario(initial, tuple(steps))


def assert_state_close_up_to_phase(u, v, tol=1e-12):
    assert phase_aligned_max_diff(u, v) <= tol
