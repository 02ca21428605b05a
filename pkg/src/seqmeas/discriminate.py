"""Statistical discrimination between the two measurement hypotheses.

The two chain models predict exact final-step distributions; a fixed-sample
likelihood-ratio test with a Hoeffding-style sample-size bound decides
between them from simulated trials.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Mapping

from .errors import (
    DimensionError,
    IndistinguishableError,
    InvariantError,
    ModelMismatchError,
)
from .hilbert import PROB_ZERO
from .measurement import Label, Scenario, marginal, run_chain_analytic, sample_chain

# total-variation distances at or below this count as identical predictions
TV_INDISTINGUISHABLE = 1e-12

Distribution = Mapping[Label, float]


class Decision(str, enum.Enum):
    FAVORS_A = "FavorsA"
    FAVORS_B = "FavorsB"
    INCONCLUSIVE = "Inconclusive"
    CERTAIN_A = "CertainA"
    CERTAIN_B = "CertainB"


@dataclass(frozen=True)
class HypothesisTestReport:
    """Outcome of a likelihood-ratio decision between hypotheses A and B.

    ``n_required`` is None when the predictions coincide (tv_distance 0) and
    no finite sample separates them. ``decision`` is Certain* exactly when an
    observed outcome is impossible under one hypothesis but not the other.
    """

    tv_distance: float
    n_required: int | None
    log_odds: float
    decision: Decision
    alpha: float

    def __post_init__(self):
        if not -1e-12 <= self.tv_distance <= 1.0 + 1e-12:
            raise InvariantError(f"tv distance {self.tv_distance!r} outside [0, 1]")
        if not 0.0 < self.alpha < 1.0:
            raise InvariantError(f"alpha {self.alpha!r} outside (0, 1)")
        if self.n_required is not None and self.n_required < 1:
            raise InvariantError(f"n_required must be positive, got {self.n_required}")


def total_variation(p: Distribution, q: Distribution) -> float:
    """Half the L1 distance between two label distributions; labels missing
    from one side count as probability zero."""
    labels = set(p) | set(q)
    return 0.5 * sum(abs(p.get(k, 0.0) - q.get(k, 0.0)) for k in labels)


def required_samples(tv: float, alpha: float) -> int:
    """Samples sufficient for a likelihood-ratio decision at error level
    alpha between two fixed distributions at total-variation distance tv:
    ceil(ln(1/alpha) / (2 tv^2))."""
    if not 0.0 < alpha < 1.0:
        raise InvariantError(f"alpha {alpha!r} outside (0, 1)")
    if tv <= 0.0:
        raise IndistinguishableError("total variation is zero")
    if tv > 1.0 + 1e-12:
        raise InvariantError(f"total variation {tv!r} exceeds 1")
    return math.ceil(math.log(1.0 / alpha) / (2.0 * min(tv, 1.0) ** 2))


def likelihood_ratio_test(
    counts: Mapping[Label, int],
    p_a: Distribution,
    p_b: Distribution,
    alpha: float,
) -> HypothesisTestReport:
    """Decide between hypotheses A and B from observed outcome counts.

    log_odds is the log-likelihood ratio sum(count * (ln pA - ln pB)); the
    decision favors a hypothesis when the odds clear 1/alpha. An outcome
    with probability zero under exactly one hypothesis settles the question
    outright (Certain*); one impossible under both means the count data does
    not belong to either scenario encoding.
    """
    if not 0.0 < alpha < 1.0:
        raise InvariantError(f"alpha {alpha!r} outside (0, 1)")
    observed = {label: c for label, c in counts.items() if c > 0}
    if not observed:
        raise InvariantError("counts are empty")
    certain_a = certain_b = False
    log_odds = 0.0
    for label, count in observed.items():
        pa, pb = p_a.get(label, 0.0), p_b.get(label, 0.0)
        if pa <= PROB_ZERO and pb <= PROB_ZERO:
            raise ModelMismatchError(
                f"outcome {label!r} is impossible under both hypotheses"
            )
        if pa <= PROB_ZERO:
            certain_b = True
        elif pb <= PROB_ZERO:
            certain_a = True
        else:
            log_odds += count * (math.log(pa) - math.log(pb))
    if certain_a and certain_b:
        raise ModelMismatchError(
            "some outcomes rule out hypothesis A and others rule out B"
        )

    tv = total_variation(p_a, p_b)
    n_required = required_samples(tv, alpha) if tv > 0.0 else None
    if certain_a:
        decision, log_odds = Decision.CERTAIN_A, math.inf
    elif certain_b:
        decision, log_odds = Decision.CERTAIN_B, -math.inf
    else:
        threshold = math.log(1.0 / alpha)
        if log_odds > threshold:
            decision = Decision.FAVORS_A
        elif log_odds < -threshold:
            decision = Decision.FAVORS_B
        else:
            decision = Decision.INCONCLUSIVE
    return HypothesisTestReport(tv, n_required, log_odds, decision, alpha)


def final_marginal(scn: Scenario) -> dict[Label, float]:
    """Predicted distribution of the last measuring step's outcome."""
    return marginal(run_chain_analytic(scn), -1)


def run_discrimination(
    scn_a: Scenario,
    scn_b: Scenario,
    truth: str,
    seed: int = 0,
    alpha: float = 1e-6,
) -> HypothesisTestReport:
    """Simulate the proposed experiment once.

    Computes both models' final-step predictions, sizes the sample from
    their total-variation distance, draws that many trials from the truth
    scenario ("A" or "B"), and runs the likelihood-ratio test.
    """
    if truth not in ("A", "B"):
        raise InvariantError(f'truth must be "A" or "B", got {truth!r}')
    if scn_a.dim != scn_b.dim:
        raise DimensionError(
            f"scenarios live in different spaces: {scn_a.dim} vs {scn_b.dim}"
        )
    dist_a = final_marginal(scn_a)
    dist_b = final_marginal(scn_b)
    tv = total_variation(dist_a, dist_b)
    if tv <= TV_INDISTINGUISHABLE:
        raise IndistinguishableError(
            f"the two hypotheses predict the same distribution (tv = {tv:.3e})"
        )
    n = required_samples(tv, alpha)
    scn_truth = scn_a if truth == "A" else scn_b
    counts: dict[Label, int] = {}
    for seq, count in sample_chain(scn_truth, seed, n).items():
        label = seq[-1]
        counts[label] = counts.get(label, 0) + count
    return likelihood_ratio_test(counts, dist_a, dist_b, alpha)
