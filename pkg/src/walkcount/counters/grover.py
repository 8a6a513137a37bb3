import numpy as np
from numpy.typing import NDArray

from ..circuit import phase_estimate_distribution
from ..fourier import EIGHT_OVER_PI_SQ
from ..grover import (
    CountEstimate,
    MarkedSet,
    count_error_bound,
    count_from_outcome,
    grover_step,
    uniform_input,
)
from ..qstate import Rng
from .counter import Counter


class GroverCounter(Counter):
    algorithm = "grover"

    def __init__(self, marked: MarkedSet, p: int):
        super().__init__()
        self.marked = marked
        self.p = p

    @property
    def domain_size(self) -> int:
        return self.marked.domain_size

    @property
    def true_count(self) -> int:
        return self.marked.k

    @property
    def params(self) -> dict[str, int | float]:
        return {"N": self.domain_size, "k": self.true_count, "p": self.p}

    def compute_distribution(self) -> NDArray[np.float64]:
        dist = phase_estimate_distribution(grover_step(self.marked), uniform_input(self.marked), self.p)
        return np.array([prob for _, prob in dist])

    def error_bound(self) -> float:
        return count_error_bound(self.domain_size, self.true_count, 2 ** self.p)

    def required_probability(self) -> float:
        return EIGHT_OVER_PI_SQ

    def estimate(self, rng: Rng) -> CountEstimate:
        P = 2 ** self.p
        outcome = rng.sample_index(self.distribution)
        theta_prime, k_est = count_from_outcome(self.domain_size, outcome, P)
        return CountEstimate(k_est=k_est, theta_prime=theta_prime, queries=P - 1,
                             success_bound=EIGHT_OVER_PI_SQ, raw_outcome=outcome)
