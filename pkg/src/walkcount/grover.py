"""
Grover search and quantum counting over a marked subset of N = 2^n items.

In the plane spanned by |x0> (uniform over unmarked items) and |x1>
(uniform over marked items) the Grover step U_G = G O is a rotation by
2 theta, where sin(theta) = sqrt(k/N).
"""
import logging
import math
from dataclasses import dataclass, field

import numpy as np

from .circuit import hadamard_layer, phase_estimate, phase_estimate_distribution, plan_matrix
from .errors import DegenerateMarkingError, DomainError
from .fourier import EIGHT_OVER_PI_SQ
from .qstate import (
    DenseUnitary,
    HilbertDims,
    Rng,
    StateVector,
    basis_state,
    inner,
    measure_first_register,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class MarkedSet:
    domain_size: int
    marked: frozenset[int] = field(default_factory=frozenset)

    def __post_init__(self):
        N = self.domain_size
        if N < 2 or N & (N - 1):
            raise DomainError(f"Domain size must be a power of two >= 2, got {N}")
        object.__setattr__(self, "marked", frozenset(int(x) for x in self.marked))
        bad = [x for x in self.marked if not 0 <= x < N]
        if bad:
            raise DomainError(f"Marked indices {sorted(bad)} outside [0, {N})")

    @classmethod
    def first(cls, N: int, k: int) -> "MarkedSet":
        """Marks items 0..k-1"""
        if not 0 <= k <= N:
            raise DomainError(f"Cannot mark {k} of {N} items")
        return cls(N, frozenset(range(k)))

    @property
    def n(self) -> int:
        return self.domain_size.bit_length() - 1

    @property
    def k(self) -> int:
        return len(self.marked)

    @property
    def dims(self) -> HilbertDims:
        return HilbertDims((self.domain_size,))

    def is_marked(self, x: int) -> bool:
        return x in self.marked

    def require_nondegenerate(self):
        if self.k in (0, self.domain_size):
            raise DegenerateMarkingError(
                f"k = {self.k} of N = {self.domain_size}: the Grover rotation is undefined")


@dataclass(frozen=True)
class GroverAngles:
    theta: float
    sin_theta: float
    cos_theta: float


@dataclass(frozen=True)
class CountEstimate:
    k_est: float
    theta_prime: float
    queries: int
    success_bound: float
    raw_outcome: int | None = None
    probed: bool = False
    """Set when the estimate came from classically probing one element"""


@dataclass(frozen=True)
class SearchResult:
    outcome: int
    success: bool
    iterations: int


def grover_angles(N: int, k: int) -> GroverAngles:
    if not 0 <= k <= N:
        raise DomainError(f"Cannot mark {k} of {N} items")
    s, c = math.sqrt(k / N), math.sqrt((N - k) / N)
    return GroverAngles(theta=math.atan2(s, c), sin_theta=s, cos_theta=c)


def search_iterations(N: int, k: int) -> int:
    """floor((pi/4) sqrt(N/k))"""
    if k < 1:
        raise DegenerateMarkingError("Search needs at least one marked item")
    return math.floor(math.pi / 4 * math.sqrt(N / k))


def uniform_input(m: MarkedSet) -> StateVector:
    """H^n |0>"""
    h = plan_matrix(hadamard_layer(m.n))
    return StateVector(m.dims, h.entries @ basis_state(m.dims, 0).amps)


def plane_states(m: MarkedSet) -> tuple[StateVector, StateVector]:
    """|x0>, |x1>: uniform superpositions of the unmarked and the marked items"""
    m.require_nondegenerate()
    N, k = m.domain_size, m.k
    mask = np.zeros(N, dtype=bool)
    mask[list(m.marked)] = True
    x0 = np.where(mask, 0.0, 1.0 / math.sqrt(N - k))
    x1 = np.where(mask, 1.0 / math.sqrt(k), 0.0)
    return StateVector(m.dims, x0), StateVector(m.dims, x1)


def phase_oracle(m: MarkedSet) -> DenseUnitary:
    """O|x> = (-1)^f(x) |x>"""
    diag = np.ones(m.domain_size)
    diag[list(m.marked)] = -1.0
    return DenseUnitary(m.dims, np.diag(diag))


def bit_oracle(m: MarkedSet) -> DenseUnitary:
    """O|x>|b> = |x>|b xor f(x)> on [N, 2]"""
    N = m.domain_size
    perm = np.zeros((2 * N, 2 * N))
    for x in range(N):
        f = int(m.is_marked(x))
        for b in (0, 1):
            perm[2 * x + (b ^ f), 2 * x + b] = 1.0
    return DenseUnitary(HilbertDims((N, 2)), perm)


def diffusion(n: int) -> DenseUnitary:
    """G = 2|psi><psi| - I with |psi> uniform over 2^n items"""
    if n < 1:
        raise DomainError(f"Diffusion needs at least one qubit, got {n}")
    N = 2 ** n
    return DenseUnitary(HilbertDims((N,)), np.full((N, N), 2.0 / N) - np.eye(N))


def diffusion_circuit(n: int) -> DenseUnitary:
    """G = H^n (2|0><0| - I) H^n, built from the Hadamard layer"""
    h = plan_matrix(hadamard_layer(n)).entries
    reflect = -np.eye(2 ** n)
    reflect[0, 0] = 1.0
    return DenseUnitary(HilbertDims((2 ** n,)), h @ reflect @ h)


def grover_step(m: MarkedSet) -> DenseUnitary:
    """U_G = G O"""
    return diffusion(m.n) @ phase_oracle(m)


def grover_trajectory(m: MarkedSet, t_max: int) -> list[StateVector]:
    """U_G^t|psi> for t = 0..t_max"""
    u = grover_step(m)
    states = [uniform_input(m)]
    for _ in range(t_max):
        states.append(u @ states[-1])
    return states


def rotation_amplitudes(m: MarkedSet, t: int) -> tuple[float, float]:
    """(<x0|U_G^t|psi>, <x1|U_G^t|psi>); both amplitudes are real"""
    x0, x1 = plane_states(m)
    state = grover_trajectory(m, t)[-1]
    return inner(x0, state).real, inner(x1, state).real


def marked_probability(m: MarkedSet, state: StateVector) -> float:
    probs = state.probabilities()
    return float(sum(probs[x] for x in m.marked))


def search_success_probability(m: MarkedSet, t: int | None = None) -> float:
    """Exact probability that measuring U_G^t|psi> yields a marked item"""
    if t is None:
        t = search_iterations(m.domain_size, m.k)
    return marked_probability(m, grover_trajectory(m, t)[-1])


def search_bound_applies(N: int, k: int) -> bool:
    """
    Whether the success guarantee 1 - k/N covers (N, k): it needs the final
    angle (2t+1) theta to stay within pi/2 + theta, i.e. t <= pi/(4 theta).
    """
    theta = grover_angles(N, k).theta
    return search_iterations(N, k) * theta <= math.pi / 4


def grover_search(m: MarkedSet, rng: Rng) -> SearchResult:
    m.require_nondegenerate()
    t = search_iterations(m.domain_size, m.k)
    state = grover_step(m).power(t) @ uniform_input(m)
    outcome = measure_first_register(state, 0, rng).outcome_index
    logger.debug("grover search N=%d k=%d t=%d -> %d", m.domain_size, m.k, t, outcome)
    return SearchResult(outcome=outcome, success=m.is_marked(outcome), iterations=t)


def grover_eigen_decomposition(m: MarkedSet) -> list[tuple[float, complex, StateVector]]:
    """
    |psi> = e^{i theta}/sqrt2 |v+> + e^{-i theta}/sqrt2 |v->, where
    |v+-> = (|x0> -+ i|x1>)/sqrt2 have eigenvalues exp(+-2 i theta).
    Returns (phase lambda, amplitude, eigenvector) with eigenvalue exp(2 pi i lambda).
    """
    x0, x1 = plane_states(m)
    theta = grover_angles(m.domain_size, m.k).theta
    v_plus = StateVector(m.dims, (x0.amps - 1j * x1.amps) / math.sqrt(2))
    v_minus = StateVector(m.dims, (x0.amps + 1j * x1.amps) / math.sqrt(2))
    return [
        (theta / math.pi, np.exp(1j * theta) / math.sqrt(2), v_plus),
        (1.0 - theta / math.pi, np.exp(-1j * theta) / math.sqrt(2), v_minus),
    ]


def count_from_outcome(N: int, outcome: int, P: int) -> tuple[float, float]:
    """
    Post-processing of one phase-estimation outcome: theta' = pi outcome / P,
    reflected to pi - theta' when above pi/2, and k' = N sin^2(theta').
    """
    theta_prime = math.pi * outcome / P
    if theta_prime > math.pi / 2:
        theta_prime = math.pi - theta_prime
    return theta_prime, N * math.sin(theta_prime) ** 2


def quantum_count(m: MarkedSet, p: int, rng: Rng) -> CountEstimate:
    P = 2 ** p
    estimate = phase_estimate(grover_step(m), uniform_input(m), p, rng)
    theta_prime, k_est = count_from_outcome(m.domain_size, estimate.raw_outcome, P)
    return CountEstimate(k_est=k_est, theta_prime=theta_prime, queries=P - 1,
                         success_bound=EIGHT_OVER_PI_SQ, raw_outcome=estimate.raw_outcome)


def count_error_bound(N: int, k: int, P: int) -> float:
    """2 pi sqrt(k(N-k))/P + pi^2 N/P^2"""
    if not 0 < k < N:
        raise DegenerateMarkingError(f"The counting bound needs 0 < k < N, got k={k}, N={N}")
    return 2 * math.pi * math.sqrt(k * (N - k)) / P + math.pi ** 2 * N / P ** 2


def sin_sq_error_bound(theta: float, P: int) -> float:
    """2 pi sin(theta) cos(theta)/P + pi^2/P"""
    if not 0.0 < theta < math.pi / 2:
        raise DomainError(f"theta must lie in (0, pi/2), got {theta}")
    return 2 * math.pi * math.sin(theta) * math.cos(theta) / P + math.pi ** 2 / P


def angle_table(N: int) -> list[tuple[int, float, float, float]]:
    """(k, theta, 2 theta, theta(k) - theta(k-1)) for k = 0..N"""
    rows = []
    previous = 0.0
    for k in range(N + 1):
        theta = grover_angles(N, k).theta
        rows.append((k, theta, 2 * theta, theta - previous if k else 0.0))
        previous = theta
    return rows


@dataclass(frozen=True)
class CountOutcome:
    outcome: int
    probability: float
    theta_prime: float
    k_est: float
    within_bound: bool


def count_outcome_table(m: MarkedSet, p: int) -> list[CountOutcome]:
    """Every phase-estimation outcome of the counting circuit with its estimate"""
    P, N, k = 2 ** p, m.domain_size, m.k
    bound = count_error_bound(N, k, P) if 0 < k < N else 0.0
    rows = []
    for outcome, prob in phase_estimate_distribution(grover_step(m), uniform_input(m), p):
        theta_prime, k_est = count_from_outcome(N, outcome, P)
        within = abs(k_est - k) <= bound + 1e-12
        rows.append(CountOutcome(outcome, prob, theta_prime, k_est, within))
    return rows
