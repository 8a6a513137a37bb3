import logging

import numpy as np
from numpy.typing import NDArray

from ..grover import CountEstimate
from ..metrics import TrialMetrics
from ..qstate import Rng

logger = logging.getLogger(__name__)


class Counter:
    """
    A counting algorithm run as a batch of seeded Monte Carlo trials.

    Subclasses compute the exact outcome distribution of one phase-estimation
    run once (`distribution`) and draw from it per trial, which consumes the
    random stream exactly like sampling the simulated register.
    """
    algorithm: str = ""

    def __init__(self):
        super().__init__()
        if type(self) == Counter:
            raise TypeError("A Counter cannot be instantiated directly! "
                            "Instantiate a subclass instead.")
        self._distribution: NDArray[np.float64] | None = None

    @property
    def domain_size(self) -> int:
        raise NotImplementedError

    @property
    def true_count(self) -> int:
        raise NotImplementedError

    @property
    def params(self) -> dict[str, int | float]:
        raise NotImplementedError

    def compute_distribution(self) -> NDArray[np.float64]:
        raise NotImplementedError

    @property
    def distribution(self) -> NDArray[np.float64]:
        if self._distribution is None:
            self._distribution = self.compute_distribution()
            logger.debug("%s: outcome distribution over %d outcomes", self.algorithm, self._distribution.size)
        return self._distribution

    @property
    def exact_case(self) -> bool:
        """k = 0 or k = N, where the estimate must be exact"""
        return self.true_count in (0, self.domain_size)

    def error_bound(self) -> float:
        """Allowed |k' - k| for a successful trial"""
        raise NotImplementedError

    def required_probability(self) -> float:
        raise NotImplementedError

    def estimate(self, rng: Rng) -> CountEstimate:
        """
        Produce one count estimate.

        :param rng: the trial's random stream
        :return: the estimate with its query count
        """
        raise NotImplementedError

    def is_success(self, est: CountEstimate) -> bool:
        if self.exact_case:
            return est.k_est == self.true_count
        return abs(est.k_est - self.true_count) <= self.error_bound()

    def run(self, trials: int, seed: int, commit_to: str | None = None) -> TrialMetrics:
        """
        Run `trials` independent trials; trial i draws from stream i of `seed`.

        :param commit_to: sqlite database receiving the batch summary
        :return: the batch statistics, rows ordered by trial index
        """
        metrics = TrialMetrics(
            algorithm=self.algorithm,
            k=self.true_count,
            required_probability=1.0 if self.exact_case else self.required_probability(),
            seed=seed,
            params=dict(self.params, seed=seed, trials=trials),
        )
        bound = 0.0 if self.exact_case else self.error_bound()
        for i in range(trials):
            est = self.estimate(Rng(seed, stream=i))
            metrics.add_trial(est.raw_outcome, est.theta_prime, est.k_est, est.queries,
                              bound, self.is_success(est), exact_branch=est.probed)

        logger.info("%s: %d/%d trials within bound (required frequency >= %.4f)",
                    self.algorithm, metrics.successes, metrics.trials, metrics.threshold)
        if commit_to is not None:
            metrics.commit(to_db=commit_to)
        return metrics
