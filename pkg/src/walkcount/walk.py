"""
Coined quantum walks with the flip-flop shift and the Grover coin, and the
search-and-count machinery on complete bipartite graphs K_{n1,n2}.

The walk space is positions (x) coins with dims [N, d]; |v, c> sits at flat
index v*d + c. On K_{n,n} the search operator U = U_w O leaves an
eight-dimensional subspace invariant. Its basis vectors |S_i, S_j> are
uniform superpositions of a vertex class S_i with the coin pointing into a
class S_j on the other side.
"""
import logging
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from numpy.typing import NDArray

from .circuit import phase_distribution_from_spectrum, phase_estimate, phase_estimate_distribution
from .config import TOLERANCES
from .errors import (
    ColoringError,
    DegenerateMarkingError,
    DimensionMismatchError,
    DomainError,
    ScopeError,
    SubspaceLeakError,
)
from .fourier import EIGHT_OVER_PI_SQ
from .graph import ColoredGraph, is_properly_colored
from .grover import CountEstimate
from .qstate import DenseUnitary, HilbertDims, Rng, StateVector

logger = logging.getLogger(__name__)

BASIS_LABELS = (
    "K1,K2", "K1,K2^C", "K1^C,K2", "K1^C,K2^C",
    "K2,K1", "K2,K1^C", "K2^C,K1", "K2^C,K1^C",
)

OracleProbe = Callable[[int], bool]


@dataclass(frozen=True, eq=False)
class WalkSpace:
    graph: ColoredGraph

    def __post_init__(self):
        if not is_properly_colored(self.graph):
            raise ColoringError("Walks need a properly edge-colored graph")

    @property
    def position_dim(self) -> int:
        return self.graph.vertex_count

    @property
    def coin_dim(self) -> int:
        return self.graph.degree

    @property
    def dims(self) -> HilbertDims:
        return HilbertDims((self.position_dim, self.coin_dim))

    def index(self, v: int, c: int) -> int:
        return v * self.coin_dim + c


@dataclass(frozen=True)
class BipartiteMarking:
    """
    Marked vertices K1 in V1 = {0..n1-1} and K2 in V2 = {n1..n1+n2-1}.

    :param n1: size of V1
    :param n2: size of V2
    :param K1: marked vertices of V1
    :param K2: marked vertices of V2, labeled n1..n1+n2-1
    """
    n1: int
    n2: int
    K1: frozenset[int] = field(default_factory=frozenset)
    K2: frozenset[int] = field(default_factory=frozenset)

    def __post_init__(self):
        if self.n1 < 1 or self.n2 < 1:
            raise DomainError(f"Partition sizes must be >= 1, got ({self.n1}, {self.n2})")
        object.__setattr__(self, "K1", frozenset(int(v) for v in self.K1))
        object.__setattr__(self, "K2", frozenset(int(v) for v in self.K2))
        if any(not 0 <= v < self.n1 for v in self.K1):
            raise DomainError(f"K1 = {sorted(self.K1)} is not inside V1 = [0, {self.n1})")
        if any(not self.n1 <= v < self.n1 + self.n2 for v in self.K2):
            raise DomainError(f"K2 = {sorted(self.K2)} is not inside V2 = [{self.n1}, {self.n1 + self.n2})")

    @classmethod
    def first(cls, n1: int, k1: int, n2: int | None = None, k2: int | None = None) -> "BipartiteMarking":
        """Marks the first k1 vertices of V1 and the first k2 of V2"""
        n2 = n1 if n2 is None else n2
        k2 = k1 if k2 is None else k2
        if not (0 <= k1 <= n1 and 0 <= k2 <= n2):
            raise DomainError(f"Cannot mark ({k1}, {k2}) of ({n1}, {n2}) vertices")
        return cls(n1, n2, frozenset(range(k1)), frozenset(range(n1, n1 + k2)))

    @property
    def k1(self) -> int:
        return len(self.K1)

    @property
    def k2(self) -> int:
        return len(self.K2)

    @property
    def k(self) -> int:
        return self.k1 + self.k2

    @property
    def marked(self) -> frozenset[int]:
        return self.K1 | self.K2

    @property
    def restricted(self) -> bool:
        """The counting algorithm's scope: n1 = n2 and k1 = k2"""
        return self.n1 == self.n2 and self.k1 == self.k2

    @property
    def nondegenerate(self) -> bool:
        return 0 < self.k1 < self.n1 and 0 < self.k2 < self.n2

    def classes(self) -> dict[str, list[int]]:
        v1, v2 = range(self.n1), range(self.n1, self.n1 + self.n2)
        return {
            "K1": sorted(self.K1),
            "K1^C": [v for v in v1 if v not in self.K1],
            "K2": sorted(self.K2),
            "K2^C": [v for v in v2 if v not in self.K2],
        }


@dataclass(frozen=True)
class WalkAngles:
    theta1: float
    theta2: float

    def __post_init__(self):
        for name, th in (("theta1", self.theta1), ("theta2", self.theta2)):
            if not 0.0 <= th <= math.pi:
                raise DomainError(f"{name} must lie in [0, pi], got {th}")

    @property
    def Sigma(self) -> float:
        return (self.theta1 + self.theta2) / 2

    @property
    def Delta(self) -> float:
        return (self.theta1 - self.theta2) / 2

    @classmethod
    def of(cls, bm: BipartiteMarking) -> "WalkAngles":
        return walk_angles(bm.n1, bm.k1, bm.n2, bm.k2)


@dataclass(frozen=True)
class EigenPair:
    label: str
    angle: float
    """Argument of the eigenvalue"""
    eigenvalue: complex
    vector: NDArray[np.complex128]


@dataclass(frozen=True, eq=False)
class ReducedWalkSystem:
    angles: WalkAngles
    u_prime: NDArray[np.complex128]
    basis_labels: tuple[str, ...]
    eigenpairs: list[EigenPair]
    d_coeffs: list[complex]
    """<lambda|D> per eigenpair, in the same order"""


def _marking_angle(n: int, k: int) -> float:
    """theta with cos(theta) = 1 - 2k/n and sin(theta) = (2/n) sqrt(k(n-k))"""
    if not 0 <= k <= n:
        raise DomainError(f"Cannot mark {k} of {n} vertices")
    return math.atan2(2 * math.sqrt(k * (n - k)) / n, 1 - 2 * k / n)


def walk_angles(n1: int, k1: int, n2: int, k2: int) -> WalkAngles:
    return WalkAngles(_marking_angle(n1, k1), _marking_angle(n2, k2))


def rotation(theta: float) -> NDArray[np.float64]:
    """R(theta) = [[cos, -sin], [sin, cos]]"""
    c, s = math.cos(theta), math.sin(theta)
    return np.array([[c, -s], [s, c]])


def block_operator(theta: float) -> NDArray[np.float64]:
    """The 4x4 block mapping one side's reduced basis onto the other's"""
    c, s = math.cos(theta), math.sin(theta)
    return np.array([
        [c, -s, 0, 0],
        [0, 0, -c, s],
        [-s, -c, 0, 0],
        [0, 0, s, c],
    ])


def flip_flop_shift(ws: WalkSpace) -> DenseUnitary:
    """S|v, c> = |e_c(v), c>"""
    total = ws.dims.total
    perm = np.zeros((total, total))
    for v in range(ws.position_dim):
        for c in range(ws.coin_dim):
            perm[ws.index(ws.graph.endpoint(v, c), c), ws.index(v, c)] = 1.0
    return DenseUnitary(ws.dims, perm)


def grover_coin(d: int) -> DenseUnitary:
    """C = (2/d) J - I"""
    if d < 1:
        raise DomainError(f"Coin dimension must be >= 1, got {d}")
    return DenseUnitary(HilbertDims((d,)), np.full((d, d), 2.0 / d) - np.eye(d))


def walk_operator(ws: WalkSpace) -> DenseUnitary:
    """U_w = S (I (x) C)"""
    coin = np.kron(np.eye(ws.position_dim), grover_coin(ws.coin_dim).entries)
    return flip_flop_shift(ws) @ DenseUnitary(ws.dims, coin)


def _check_partition(ws: WalkSpace, bm: BipartiteMarking):
    if ws.graph.graph.parts != (bm.n1, bm.n2):
        raise DimensionMismatchError(
            f"Marking on ({bm.n1}, {bm.n2}) does not match graph parts {ws.graph.graph.parts}")


def walk_oracle(ws: WalkSpace, bm: BipartiteMarking) -> DenseUnitary:
    """O = (I - 2 sum_{j in K} |j><j|) (x) I"""
    _check_partition(ws, bm)
    position = np.ones(ws.position_dim)
    position[sorted(bm.marked)] = -1.0
    return DenseUnitary(ws.dims, np.diag(np.repeat(position, ws.coin_dim)))


def search_operator(ws: WalkSpace, bm: BipartiteMarking) -> DenseUnitary:
    """U = U_w O"""
    return walk_operator(ws) @ walk_oracle(ws, bm)


def _class_pairs(bm: BipartiteMarking) -> list[tuple[list[int], list[int]]]:
    cl = bm.classes()
    pairs = [label.split(",") for label in BASIS_LABELS]
    return [(cl[a], cl[b]) for a, b in pairs]


def reduced_basis(ws: WalkSpace, bm: BipartiteMarking) -> list[StateVector]:
    """|S_i, S_j> = (|S_i||S_j|)^(-1/2) sum_{v in S_i, u in S_j} |v, color(vu)>"""
    _check_partition(ws, bm)
    if not bm.nondegenerate:
        raise DegenerateMarkingError(
            f"Reduced basis needs 0 < k1 < n1 and 0 < k2 < n2, got k1={bm.k1}, k2={bm.k2}")
    basis = []
    for si, sj in _class_pairs(bm):
        amps = np.zeros(ws.dims.total, dtype=np.complex128)
        value = 1.0 / math.sqrt(len(si) * len(sj))
        for v in si:
            for u in sj:
                amps[ws.index(v, ws.graph.color_of(v, u))] = value
        basis.append(StateVector(ws.dims, amps))
    return basis


def _eigenpairs(angles: WalkAngles) -> list[EigenPair]:
    S, D = angles.Sigma, angles.Delta
    eS, eD = np.exp(1j * S), np.exp(1j * D)
    tail_sigma = np.array([1, -1j, 1j, 1])
    tail_delta = np.array([1, -1j, -1j, -1])
    head_sigma = eD * np.array([1, -1j, 1j, 1])
    head_delta = eS * np.array([1, 1j, 1j, -1])
    norm = 1 / math.sqrt(8)

    pairs = []
    for sign, label in ((1, "+"), (-1, "-")):
        sigma = norm * np.concatenate([sign * head_sigma, tail_sigma])
        delta = norm * np.concatenate([sign * head_delta, tail_delta])
        shift = 0.0 if sign == 1 else math.pi
        name = "Sigma" if sign == 1 else "(Sigma+pi)"
        pairs.append(EigenPair(f"+{name}", S + shift, sign * eS, sigma))
        pairs.append(EigenPair(f"-{name}", -(S + shift), np.conj(sign * eS), sigma.conj()))
        name = "Delta" if sign == 1 else "(Delta+pi)"
        pairs.append(EigenPair(f"+{name}", D + shift, sign * eD, delta))
        pairs.append(EigenPair(f"-{name}", -(D + shift), np.conj(sign * eD), delta.conj()))
    order = ["+Sigma", "-Sigma", "+(Sigma+pi)", "-(Sigma+pi)", "+Delta", "-Delta", "+(Delta+pi)", "-(Delta+pi)"]
    return sorted(pairs, key=lambda p: order.index(p.label))


def d_coefficients_from_angles(angles: WalkAngles) -> NDArray[np.float64]:
    """
    Coordinates of |D> in the reduced basis. With |K_j|/N_j = sin^2(theta_j/2)
    the coefficient sqrt(|S_i||S_j|)/sqrt(2 N1 N2) depends only on the angles.
    """
    s1, c1 = math.sin(angles.theta1 / 2), math.cos(angles.theta1 / 2)
    s2, c2 = math.sin(angles.theta2 / 2), math.cos(angles.theta2 / 2)
    return np.array([s1 * s2, s1 * c2, c1 * s2, c1 * c2, s2 * s1, s2 * c1, c2 * s1, c2 * c1]) / math.sqrt(2)


def reduced_operator(angles: WalkAngles) -> ReducedWalkSystem:
    """
    U' = [[0, U'(theta1)], [U'(theta2), 0]] together with its analytic
    eigenpairs and the overlaps of each eigenvector with |D>.
    """
    u_prime = np.zeros((8, 8), dtype=np.complex128)
    u_prime[:4, 4:] = block_operator(angles.theta1)
    u_prime[4:, :4] = block_operator(angles.theta2)
    pairs = _eigenpairs(angles)
    d = d_coefficients_from_angles(angles)
    d_coeffs = [complex(np.vdot(p.vector, d)) for p in pairs]
    return ReducedWalkSystem(angles, u_prime, BASIS_LABELS, pairs, d_coeffs)


def reduced_action(bm: BipartiteMarking) -> NDArray[np.float64]:
    """
    The 8x8 action of U on the reduced basis from class sizes alone: the coin
    sends a class of size s out of n to (2s/n - 1) times itself plus
    2 sqrt(s(n-s))/n times its complement, the shift swaps (S_i, S_j) to
    (S_j, S_i) and the oracle negates classes of marked vertices.
    """
    if not bm.nondegenerate:
        raise DegenerateMarkingError(f"Reduced action needs nondegenerate classes, got k1={bm.k1}, k2={bm.k2}")
    sizes = {"K1": bm.k1, "K1^C": bm.n1 - bm.k1, "K2": bm.k2, "K2^C": bm.n2 - bm.k2}
    side = {"K1": bm.n1, "K1^C": bm.n1, "K2": bm.n2, "K2^C": bm.n2}
    complement = {"K1": "K1^C", "K1^C": "K1", "K2": "K2^C", "K2^C": "K2"}
    index = {label: i for i, label in enumerate(BASIS_LABELS)}
    action = np.zeros((8, 8))
    for col, label in enumerate(BASIS_LABELS):
        si, sj = label.split(",")
        sign = -1.0 if si in ("K1", "K2") else 1.0
        s, n = sizes[sj], side[sj]
        action[index[f"{sj},{si}"], col] += sign * (2 * s / n - 1)
        action[index[f"{complement[sj]},{si}"], col] += sign * 2 * math.sqrt(s * (n - s)) / n
    return action


def verify_reduction(ws: WalkSpace, bm: BipartiteMarking) -> float:
    """
    max |<b_a|U|b_b> - U'_ab| over the reduced basis. Raises when U leaks a
    basis vector out of the reduced subspace.
    """
    basis = np.column_stack([b.amps for b in reduced_basis(ws, bm)])
    u = search_operator(ws, bm).entries
    image = u @ basis
    m = basis.conj().T @ image
    leakage = float(np.max(np.linalg.norm(image - basis @ m, axis=0)))
    if leakage > TOLERANCES.reduction:
        raise SubspaceLeakError(f"Reduced subspace leaks {leakage:.3e} under U")
    deviation = float(np.max(np.abs(m - reduced_operator(WalkAngles.of(bm)).u_prime)))
    logger.debug("reduction n=(%d, %d) k=(%d, %d): deviation %.3e leakage %.3e",
                 bm.n1, bm.n2, bm.k1, bm.k2, deviation, leakage)
    return deviation


def edge_superposition(ws: WalkSpace, bm: BipartiteMarking | None = None) -> StateVector:
    """|D>: the uniform superposition over every |v, c>"""
    if bm is not None:
        _check_partition(ws, bm)
    total = ws.dims.total
    return StateVector(ws.dims, np.full(total, 1.0 / math.sqrt(total), dtype=np.complex128))


def d_coefficients(ws: WalkSpace, bm: BipartiteMarking) -> NDArray[np.float64]:
    """sqrt(|S_i||S_j|) / sqrt(2 N1 N2) per reduced basis vector"""
    _check_partition(ws, bm)
    norm = math.sqrt(2 * bm.n1 * bm.n2)
    return np.array([math.sqrt(len(si) * len(sj)) / norm for si, sj in _class_pairs(bm)])


def projection_probabilities(angles: WalkAngles) -> list[tuple[str, float, float]]:
    """(label, eigenvalue angle, |<lambda|D>|^2) in closed form"""
    S, D = angles.Sigma, angles.Delta
    cd, sd = math.cos(D / 2) ** 2 / 4, math.sin(D / 2) ** 2 / 4
    cs, ss = math.cos(S / 2) ** 2 / 4, math.sin(S / 2) ** 2 / 4
    return [
        ("+Sigma", S, cd), ("-Sigma", -S, cd),
        ("+(Sigma+pi)", S + math.pi, sd), ("-(Sigma+pi)", -(S + math.pi), sd),
        ("+Delta", D, cs), ("-Delta", -D, cs),
        ("+(Delta+pi)", D + math.pi, ss), ("-(Delta+pi)", -(D + math.pi), ss),
    ]


def eigen_table(angles: WalkAngles) -> list[tuple[str, float, float, float]]:
    """(label, angle, re, im) of the eight eigenvalues of U'"""
    return [(p.label, p.angle, p.eigenvalue.real, p.eigenvalue.imag) for p in _eigenpairs(angles)]


def predicted_count_distribution(angles: WalkAngles, p: int) -> NDArray[np.float64]:
    """First-register distribution of phase estimation on |D> from the projection table"""
    table = projection_probabilities(angles)
    phases = [(angle / (2 * math.pi)) % 1.0 for _, angle, _ in table]
    weights = [prob for _, _, prob in table]
    return phase_distribution_from_spectrum(phases, weights, 2 ** p)


def bipartite_error_bound(N: int, k: int, P: int) -> tuple[float, float]:
    """
    (loose, tight): 2 pi sqrt(k(N-k))/P plus pi^2 N/P or pi^2 N/P^2
    respectively. Acceptance checks use the loose value.
    """
    if not 0 < k < N:
        raise DegenerateMarkingError(f"The counting bound needs 0 < k < N, got k={k}, N={N}")
    first = 2 * math.pi * math.sqrt(k * (N - k)) / P
    return first + math.pi ** 2 * N / P, first + math.pi ** 2 * N / P ** 2


def success_probability_bound(t: int) -> float:
    """(1 - 2^-t) 8/pi^2"""
    if t < 1:
        raise DomainError(f"Need at least one iteration, got {t}")
    return (1 - 2.0 ** -t) * EIGHT_OVER_PI_SQ


def count_from_outcome(N: int, outcome: int, P: int) -> tuple[float, float]:
    """theta1' = 2 pi outcome / P folded into [0, pi], and k' = N sin^2(theta1'/2)"""
    theta = 2 * math.pi * outcome / P
    if theta > math.pi:
        theta = 2 * math.pi - theta
    return theta, N * math.sin(theta / 2) ** 2


def check_count_scope(ws: WalkSpace, bm: BipartiteMarking, t: int):
    _check_partition(ws, bm)
    if not bm.restricted:
        raise ScopeError(f"Counting covers n1 = n2 and k1 = k2 only, got n=({bm.n1}, {bm.n2}), "
                         f"k=({bm.k1}, {bm.k2})")
    if t < 1:
        raise DomainError(f"Need at least one iteration, got {t}")


def run_count_loop(sample_outcome: Callable[[], int], N: int, p: int, t: int,
                   rng: Rng, oracle_probe: OracleProbe) -> CountEstimate:
    """
    Repeats phase estimation until the outcome is neither 0 nor P/2, at most
    t times; those two outcomes are the exact angles 0 and pi. If every run
    lands there one random vertex is probed classically.
    """
    P = 2 ** p
    outcome = 0
    used = 0
    for used in range(1, t + 1):
        outcome = sample_outcome()
        if outcome not in (0, P // 2):
            theta, k_est = count_from_outcome(N, outcome, P)
            return CountEstimate(k_est=k_est, theta_prime=theta, queries=used * (P - 1),
                                 success_bound=success_probability_bound(t), raw_outcome=outcome)
    vertex = rng.integer(N)
    marked = oracle_probe(vertex)
    return CountEstimate(k_est=float(N) if marked else 0.0,
                         theta_prime=math.pi if marked else 0.0,
                         queries=used * (P - 1) + 1,
                         success_bound=success_probability_bound(t),
                         raw_outcome=outcome, probed=True)


def bipartite_count(ws: WalkSpace, bm: BipartiteMarking, p: int, t: int, rng: Rng,
                    oracle_probe: OracleProbe | None = None) -> CountEstimate:
    """
    Estimate k = k1 + k2 on K_{n,n} from phase estimation of U on |D>.

    :param oracle_probe: classical membership query for one vertex; defaults
        to looking the vertex up in `bm`
    """
    check_count_scope(ws, bm, t)
    if oracle_probe is None:
        oracle_probe = bm.marked.__contains__
    u = search_operator(ws, bm)
    d = edge_superposition(ws, bm)
    return run_count_loop(lambda: phase_estimate(u, d, p, rng).raw_outcome,
                          ws.position_dim, p, t, rng, oracle_probe)


def count_distribution(ws: WalkSpace, bm: BipartiteMarking, p: int) -> NDArray[np.float64]:
    """Exact outcome distribution of one phase-estimation run on |D>"""
    u = search_operator(ws, bm)
    d = edge_superposition(ws, bm)
    return np.array([prob for _, prob in phase_estimate_distribution(u, d, p)])


def monte_carlo_count(ws: WalkSpace, bm: BipartiteMarking, p: int, t: int, trials: int, seed: int):
    """
    Runs `trials` independent counts, trial i on stream i of `seed`, and
    returns their `TrialMetrics`.
    """
    from .counters import BipartiteCounter

    return BipartiteCounter(ws, bm, p, t).run(trials, seed)
