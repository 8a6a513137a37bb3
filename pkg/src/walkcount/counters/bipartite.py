import numpy as np
from numpy.typing import NDArray

from ..grover import CountEstimate
from ..qstate import Rng
from ..walk import (
    BipartiteMarking,
    OracleProbe,
    WalkSpace,
    bipartite_error_bound,
    check_count_scope,
    count_distribution,
    run_count_loop,
    success_probability_bound,
)
from .counter import Counter


class BipartiteCounter(Counter):
    algorithm = "bipartite"

    def __init__(self, ws: WalkSpace, marking: BipartiteMarking, p: int, t: int,
                 oracle_probe: OracleProbe | None = None):
        super().__init__()
        check_count_scope(ws, marking, t)
        self.ws = ws
        self.marking = marking
        self.p = p
        self.t = t
        self.oracle_probe = oracle_probe or marking.marked.__contains__

    @property
    def domain_size(self) -> int:
        return self.ws.position_dim

    @property
    def true_count(self) -> int:
        return self.marking.k

    @property
    def params(self) -> dict[str, int | float]:
        return {"n1": self.marking.n1, "k1": self.marking.k1, "p": self.p, "t": self.t}

    def compute_distribution(self) -> NDArray[np.float64]:
        return count_distribution(self.ws, self.marking, self.p)

    def error_bound(self) -> float:
        loose, _ = bipartite_error_bound(self.domain_size, self.true_count, 2 ** self.p)
        return loose

    def required_probability(self) -> float:
        return success_probability_bound(self.t)

    def estimate(self, rng: Rng) -> CountEstimate:
        dist = self.distribution
        return run_count_loop(lambda: rng.sample_index(dist), self.domain_size,
                              self.p, self.t, rng, self.oracle_probe)
