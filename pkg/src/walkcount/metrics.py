import datetime
import json
import math
import sqlite3
from dataclasses import dataclass, field

import numpy as np

TRIAL_HEADER = ("seed", "stream", "outcome", "theta_prime", "k_est", "queries", "bound", "pass")


@dataclass
class TrialMetrics:
    """
    Running statistics of a Monte Carlo batch of counting trials.

    :param algorithm: name of the counting algorithm
    :param k: the true number of marked elements
    :param required_probability: the success probability the algorithm guarantees
    :param params: experiment parameters, stored alongside the summary
    :param seed: seed of the batch; trial i draws from stream i of it
    """
    algorithm: str
    k: int
    required_probability: float
    seed: int = 0
    params: dict[str, int | float] = field(default_factory=dict)
    successes: int = 0
    exact_branches: int = 0
    total_queries: int = 0
    k_estimates: list[float] = field(default_factory=list)
    rows: list[tuple] = field(default_factory=list)

    def add_trial(self, outcome: int | None, theta_prime: float, k_est: float, queries: int,
                  bound: float, success: bool, exact_branch: bool = False):
        """Record one trial; rows keep the trial order"""
        self.rows.append((self.seed, len(self.k_estimates), -1 if outcome is None else outcome,
                          theta_prime, k_est, queries, bound, int(success)))
        self.k_estimates.append(k_est)
        self.total_queries += queries
        self.successes += int(success)
        self.exact_branches += int(exact_branch)

    @property
    def trials(self) -> int:
        return len(self.k_estimates)

    @property
    def success_frequency(self) -> float:
        return self.successes / self.trials if self.trials else 0.0

    @property
    def binomial_sigma(self) -> float:
        """Standard deviation of the success frequency at the required probability"""
        if not self.trials:
            return 0.0
        p = self.required_probability
        return math.sqrt(p * (1 - p) / self.trials)

    @property
    def threshold(self) -> float:
        return self.required_probability - 3 * self.binomial_sigma

    @property
    def passed(self) -> bool:
        return self.trials > 0 and self.success_frequency >= self.threshold

    @property
    def k_mean(self) -> float:
        return float(np.mean(self.k_estimates)) if self.k_estimates else 0.0

    @property
    def k_std(self) -> float:
        return float(np.std(self.k_estimates)) if self.k_estimates else 0.0

    @property
    def mean_queries(self) -> float:
        return self.total_queries / self.trials if self.trials else 0.0

    def to_dict(self) -> dict:
        """Summary without the per-trial rows"""
        return {
            'algorithm': self.algorithm,
            'params': self.params,
            'k': self.k,
            'trials': self.trials,
            'successes': self.successes,
            'success_frequency': self.success_frequency,
            'required_probability': self.required_probability,
            'binomial_sigma': self.binomial_sigma,
            'threshold': self.threshold,
            'passed': self.passed,
            'exact_branches': self.exact_branches,
            'k_mean': self.k_mean,
            'k_std': self.k_std,
            'mean_queries': self.mean_queries,
        }

    def commit(self, to_db="counting.db"):
        conn = sqlite3.connect(to_db)

        # Make sure the table exists
        with conn:
            conn.execute("""
                CREATE TABLE IF NOT EXISTS trial_batches (
                    id INTEGER PRIMARY KEY AUTOINCREMENT,
                    timestamp TEXT,
                    algorithm TEXT,
                    params TEXT,
                    k INTEGER,
                    trials INTEGER,
                    success_frequency REAL,
                    threshold REAL,
                    passed INTEGER,
                    k_mean REAL,
                    k_std REAL,
                    mean_queries REAL
                )
            """)

        timestamp = datetime.datetime.now().strftime('%Y-%m-%d %H:%M:%S')

        with conn:
            conn.execute("""
                INSERT INTO trial_batches (
                    timestamp, algorithm, params, k, trials, success_frequency,
                    threshold, passed, k_mean, k_std, mean_queries
                ) VALUES (?, ?, ?, ?, ?, ?, ?, ?, ?, ?, ?)
            """, (
                timestamp,
                self.algorithm,
                json.dumps(self.params, sort_keys=True),
                self.k,
                self.trials,
                self.success_frequency,
                self.threshold,
                int(self.passed),
                self.k_mean,
                self.k_std,
                self.mean_queries,
            ))

        conn.close()
