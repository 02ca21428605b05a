"""Sequential measurement chains under the two rival projection rules.

A step either measures the full commuting pair ("separate": one branch per
joint eigenvector) or only a function of its outcomes ("functional": one
branch per f-eigenspace). Skip steps leave the state untouched and carry no
outcome label; they encode the "first measurement omitted" variant of a
scenario without a second code path.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Callable, Mapping, Union

import numpy as np

from .errors import DimensionError, InvariantError
from .hilbert import PROB_ZERO, StateVector, project
from .observables import (
    CommutingPair,
    FunctionObservable,
    eigenspace_projectors,
    function_observable,
)

# a separate step is labeled by its (a, b) pair, a functional step by f(a, b)
Label = Union[float, tuple[float, float]]
OutcomeSequence = tuple[Label, ...]
FunctionSpec = Union[str, Callable[[float, float], float]]


class Model(str, enum.Enum):
    SEPARATE = "separate"
    FUNCTIONAL = "functional"
    SKIP = "skip"


@dataclass(frozen=True, eq=False)
class MeasurementStep:
    """One link of a measurement chain.

    ``f`` is required exactly when ``model`` is FUNCTIONAL and may be the
    string ``"product"`` or a callable on eigenvalue pairs.
    """

    model: Model
    pair: CommutingPair | None = None
    f: FunctionSpec | None = None
    fobs: FunctionObservable | None = field(init=False, default=None, repr=False)
    _projectors: tuple = field(init=False, default=(), repr=False)

    def __post_init__(self):
        model = Model(self.model)
        object.__setattr__(self, "model", model)
        if model is Model.SKIP:
            if self.pair is not None or self.f is not None:
                raise InvariantError("skip steps carry no observable and no f")
            return
        if self.pair is None:
            raise InvariantError(f"{model.value} steps need a commuting pair")
        if model is Model.SEPARATE:
            if self.f is not None:
                raise InvariantError("separate steps take no outcome function")
            return
        if self.f is None:
            raise InvariantError("functional steps need an outcome function")
        fobs = function_observable(self.pair, self.f)
        object.__setattr__(self, "fobs", fobs)
        object.__setattr__(self, "_projectors", tuple(eigenspace_projectors(fobs)))

    @property
    def dim(self) -> int | None:
        return None if self.pair is None else self.pair.dim


def separate_step(pair: CommutingPair) -> MeasurementStep:
    return MeasurementStep(Model.SEPARATE, pair)


def functional_step(pair: CommutingPair, f: FunctionSpec = "product") -> MeasurementStep:
    return MeasurementStep(Model.FUNCTIONAL, pair, f)


def skip_step() -> MeasurementStep:
    return MeasurementStep(Model.SKIP)


@dataclass(frozen=True, eq=False)
class Scenario:
    """Initial state plus an ordered measurement chain."""

    initial: StateVector
    steps: tuple[MeasurementStep, ...]

    def __post_init__(self):
        steps = tuple(self.steps)
        if all(s.model is Model.SKIP for s in steps):
            raise InvariantError("scenario needs at least one measuring step")
        for s in steps:
            if s.dim is not None and s.dim != self.initial.dim:
                raise DimensionError(
                    f"step dimension {s.dim} differs from state dimension "
                    f"{self.initial.dim}"
                )
        object.__setattr__(self, "steps", steps)

    @property
    def dim(self) -> int:
        return self.initial.dim

    @property
    def labeled_steps(self) -> tuple[MeasurementStep, ...]:
        return tuple(s for s in self.steps if s.model is not Model.SKIP)


@dataclass(frozen=True, eq=False)
class OutcomeDistribution:
    """Exact probabilities of every outcome sequence, with final states.

    Entries whose probability is at or below PROB_ZERO carry no final state.
    """

    entries: Mapping[OutcomeSequence, tuple[float, StateVector | None]]

    def __post_init__(self):
        total = 0.0
        for seq, (prob, final) in self.entries.items():
            if prob < 0.0:
                raise InvariantError(f"negative probability for {seq!r}")
            if prob <= PROB_ZERO and final is not None:
                raise InvariantError(
                    f"impossible outcome {seq!r} must not carry a final state"
                )
            total += prob
        if abs(total - 1.0) > 1e-12:
            raise InvariantError(f"probabilities sum to {total!r}, not 1")

    def __iter__(self):
        return iter(self.entries.items())

    def __len__(self) -> int:
        return len(self.entries)


def step_outcomes(
    state: StateVector, step: MeasurementStep
) -> list[tuple[Label, float, StateVector]]:
    """Branches (label, probability, post state) of one measuring step.

    Separate steps collapse onto individual joint eigenvectors with Born
    weights; functional steps project onto whole f-eigenspaces. Branches at
    or below PROB_ZERO are dropped.
    """
    if step.model is Model.SKIP:
        raise InvariantError("skip steps have no outcomes")
    if step.pair.dim != state.dim:
        raise DimensionError(
            f"dimension mismatch: {state.dim} vs {step.pair.dim}"
        )
    branches: list[tuple[Label, float, StateVector]] = []
    if step.model is Model.SEPARATE:
        coeffs = step.pair._matrix.conj() @ state.amps
        probs = np.abs(coeffs) ** 2
        for jv, prob in zip(step.pair.joint, probs):
            if prob > PROB_ZERO:
                branches.append(((jv.a, jv.b), float(prob), jv.vector))
    else:
        for fvalue, projector in step._projectors:
            prob, post = project(state, projector)
            if post is not None:
                branches.append((fvalue, prob, post))
    return branches


@dataclass
class _Node:
    labels: list
    probs: list[float]
    cum: np.ndarray
    children: list


def _build_tree(state: StateVector, steps: tuple[MeasurementStep, ...], k: int):
    """Branching tree of the chain from step k onward; None past the last step."""
    while k < len(steps) and steps[k].model is Model.SKIP:
        k += 1
    if k == len(steps):
        return None
    labels, probs, children = [], [], []
    for label, prob, post in step_outcomes(state, steps[k]):
        labels.append(label)
        probs.append(prob)
        children.append((_build_tree(post, steps, k + 1), post))
    return _Node(labels, probs, np.cumsum(probs), children)


def run_chain_analytic(scn: Scenario) -> OutcomeDistribution:
    """Exact outcome-sequence distribution by full tree expansion."""
    entries: dict[OutcomeSequence, tuple[float, StateVector | None]] = {}

    def walk(node, prefix: tuple, prob: float, state: StateVector):
        if node is None:
            entries[prefix] = (prob, state if prob > PROB_ZERO else None)
            return
        for i, label in enumerate(node.labels):
            child, post = node.children[i]
            walk(child, prefix + (label,), prob * node.probs[i], post)

    root = _build_tree(scn.initial, scn.steps, 0)
    walk(root, (), 1.0, scn.initial)
    return OutcomeDistribution(entries)


def marginal(dist: OutcomeDistribution, step_index: int) -> dict[Label, float]:
    """Distribution of one labeled step's outcome, summed over the others.

    ``step_index`` counts labeled (non-skip) steps and accepts negative
    indices; -1 is the final step.
    """
    length = len(next(iter(dist.entries)))
    index = step_index + length if step_index < 0 else step_index
    if not 0 <= index < length:
        raise IndexError(f"step index {step_index} out of range for {length} labels")
    out: dict[Label, float] = {}
    for seq, (prob, _) in dist.entries.items():
        label = seq[index]
        out[label] = out.get(label, 0.0) + prob
    return out


def _trial_rng(seed: int, trial: int) -> np.random.Generator:
    """Independent stream for one trial, a pure function of (seed, trial)."""
    key = seed % (1 << 128)
    return np.random.Generator(np.random.Philox(key=key, counter=[0, 0, 0, trial]))


def sample_chain(scn: Scenario, seed: int, n: int) -> dict[OutcomeSequence, int]:
    """Born-rule Monte Carlo: n independent trials of the chain.

    Each trial draws its randomness from a counter-based stream keyed by
    (seed, trial index), so counts are reproducible bit-for-bit and do not
    depend on evaluation order. Branches are sampled by inverse CDF over the
    analytically computed probabilities of the current state.
    """
    if n < 1:
        raise InvariantError(f"sample count must be positive, got {n}")
    root = _build_tree(scn.initial, scn.steps, 0)
    counts: dict[OutcomeSequence, int] = {}
    for trial in range(n):
        rng = _trial_rng(seed, trial)
        node, seq = root, []
        while node is not None:
            i = min(
                int(np.searchsorted(node.cum, node.cum[-1] * rng.random(), side="right")),
                len(node.labels) - 1,
            )
            seq.append(node.labels[i])
            node = node.children[i][0]
        key = tuple(seq)
        counts[key] = counts.get(key, 0) + 1
    return counts
