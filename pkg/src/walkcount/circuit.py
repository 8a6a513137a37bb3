"""
Gate set, circuit plans and the circuit constructions built on them: the
recursive QFT, its inverse, controlled powers and phase estimation.

Qubit 0 is the most significant bit of a register, so the basis label
|d_0 d_1 ... d_{p-1}> has flat index sum_t d_t 2^(p-1-t).
"""
import functools
import logging
import math
from dataclasses import dataclass, field, replace
from enum import Enum, auto

import numpy as np
from numpy.typing import NDArray

from .config import CIRCUIT_OPTIONS, CircuitOptions
from .errors import DimensionMismatchError, DomainError
from .fourier import overlap_sq
from .qstate import (
    DenseUnitary,
    HilbertDims,
    Rng,
    StateVector,
    basis_state,
    measure_first_register,
    outcome_distribution,
    tensor,
)

logger = logging.getLogger(__name__)

_H = np.array([[1, 1], [1, -1]], dtype=np.complex128) / math.sqrt(2)
_X = np.array([[0, 1], [1, 0]], dtype=np.complex128)
_SWAP = np.array([[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]], dtype=np.complex128)


class GateKind(Enum):
    H = auto()
    X = auto()
    RF = auto()
    CONTROLLED_U = auto()
    SWAP = auto()


@dataclass(frozen=True)
class GateSpec:
    """
    One gate application. `controls` may be given for any kind; the gate then
    acts only on the part of the state where every control qubit is 1.
    """
    kind: GateKind
    targets: tuple[int, ...]
    controls: tuple[int, ...] = ()
    k: int | None = None
    """Exponent of R^F_k; only meaningful for `GateKind.RF`"""
    unitary: DenseUnitary | None = None
    """Target operator of `GateKind.CONTROLLED_U`"""
    inverse: bool = False

    def __post_init__(self):
        if self.kind == GateKind.RF and (self.k is None or self.k < 1):
            raise DomainError(f"R^F_k needs k >= 1, got {self.k}")
        if self.kind == GateKind.SWAP and len(self.targets) != 2:
            raise DomainError("SWAP acts on exactly two qubits")
        if self.kind == GateKind.CONTROLLED_U:
            if self.unitary is None:
                raise DomainError("A controlled-U gate needs its target unitary")
            if self.unitary.dims.total != 2 ** len(self.targets):
                raise DimensionMismatchError(
                    f"Target unitary of dimension {self.unitary.dims.total} "
                    f"on {len(self.targets)} qubits")
        qubits = self.controls + self.targets
        if len(set(qubits)) != len(qubits):
            raise DomainError(f"Repeated qubit in {qubits}")

    @classmethod
    def h(cls, q: int) -> "GateSpec":
        return cls(GateKind.H, (q,))

    @classmethod
    def x(cls, q: int) -> "GateSpec":
        return cls(GateKind.X, (q,))

    @classmethod
    def rf(cls, k: int, target: int, control: int | None = None) -> "GateSpec":
        controls = () if control is None else (control,)
        return cls(GateKind.RF, (target,), controls=controls, k=k)

    @classmethod
    def swap(cls, i: int, j: int) -> "GateSpec":
        return cls(GateKind.SWAP, (i, j))

    @classmethod
    def controlled(cls, u: DenseUnitary, controls: tuple[int, ...], targets: tuple[int, ...]) -> "GateSpec":
        return cls(GateKind.CONTROLLED_U, targets, controls=controls, unitary=u)

    @property
    def qubits(self) -> tuple[int, ...]:
        return self.controls + self.targets

    def dagger(self) -> "GateSpec":
        return replace(self, inverse=not self.inverse)


@dataclass(frozen=True)
class CircuitPlan:
    qubit_count: int
    gates: tuple[GateSpec, ...] = field(default_factory=tuple)

    def __post_init__(self):
        if self.qubit_count < 1:
            raise DomainError(f"A circuit needs at least one qubit, got {self.qubit_count}")
        object.__setattr__(self, "gates", tuple(self.gates))
        for g in self.gates:
            if any(not 0 <= q < self.qubit_count for q in g.qubits):
                raise DomainError(f"{g.kind.name} on {g.qubits} outside {self.qubit_count} qubits")

    def __len__(self) -> int:
        return len(self.gates)

    def then(self, other: "CircuitPlan") -> "CircuitPlan":
        """This plan followed by `other`"""
        return CircuitPlan(max(self.qubit_count, other.qubit_count), self.gates + other.gates)


@dataclass(frozen=True)
class PhaseEstimate:
    raw_outcome: int
    vartheta: float
    precision_bits: int

    def __post_init__(self):
        P = 2 ** self.precision_bits
        if not 0 <= self.raw_outcome < P:
            raise DomainError(f"Outcome {self.raw_outcome} outside [0, {P})")


def gate_matrix(g: GateSpec) -> DenseUnitary:
    """
    Local matrix of a gate on its own qubits, ordered (controls..., targets...).
    """
    match g.kind:
        case GateKind.H:
            base = _H
        case GateKind.X:
            base = _X
        case GateKind.RF:
            assert g.k is not None
            base = np.diag([1.0, np.exp(2j * np.pi / 2 ** g.k)]).astype(np.complex128)
        case GateKind.SWAP:
            base = _SWAP
        case GateKind.CONTROLLED_U:
            assert g.unitary is not None
            base = np.asarray(g.unitary.entries)
    if g.inverse:
        base = base.conj().T
    if g.controls:
        # block diag(I, ..., I, U): only the all-ones control pattern applies U
        n_ctrl = 2 ** len(g.controls)
        d = base.shape[0]
        full = np.eye(n_ctrl * d, dtype=np.complex128)
        full[-d:, -d:] = base
        base = full
    return DenseUnitary(HilbertDims.qubits(len(g.qubits)), base)


def _apply_local(columns: NDArray[np.complex128], local: NDArray[np.complex128],
                 qubits: tuple[int, ...], p: int) -> NDArray[np.complex128]:
    """Apply a local gate to every column of a (2^p, m) array"""
    m = columns.shape[1]
    tensor_view = columns.reshape((2,) * p + (m,))
    moved = np.moveaxis(tensor_view, qubits, range(len(qubits)))
    shape = moved.shape
    out = local @ moved.reshape(2 ** len(qubits), -1)
    out = np.moveaxis(out.reshape(shape), range(len(qubits)), qubits)
    return out.reshape(2 ** p, m)


@functools.cache
def plan_matrix(plan: CircuitPlan) -> DenseUnitary:
    """Dense matrix of a plan, gates applied in order"""
    p = plan.qubit_count
    m = np.eye(2 ** p, dtype=np.complex128)
    for g in plan.gates:
        m = _apply_local(m, np.asarray(gate_matrix(g).entries), g.qubits, p)
    logger.debug("evaluated plan of %d gates on %d qubits", len(plan), p)
    return DenseUnitary(HilbertDims.qubits(p), m)


def plan_dagger(plan: CircuitPlan) -> CircuitPlan:
    """The adjoint circuit: reversed order, each gate inverted"""
    return CircuitPlan(plan.qubit_count, tuple(g.dagger() for g in reversed(plan.gates)))


def hadamard_layer(p: int) -> CircuitPlan:
    return CircuitPlan(p, tuple(GateSpec.h(q) for q in range(p)))


def swap_prime(p: int) -> CircuitPlan:
    """Reverse the order of p qubits with floor(p/2) SWAPs"""
    if p < 2:
        raise DomainError(f"SWAP' needs at least two qubits, got {p}")
    return CircuitPlan(p, tuple(GateSpec.swap(t, p - 1 - t) for t in range(p // 2)))


def _qft_rec_gates(p: int, first: int) -> list[GateSpec]:
    gates = [GateSpec.h(first)]
    for k in range(2, p + 1):
        gates.append(GateSpec.rf(k, target=first, control=first + k - 1))
    if p > 1:
        gates.extend(_qft_rec_gates(p - 1, first + 1))
    return gates


def qft_rec(p: int) -> CircuitPlan:
    """
    The recursive QFT circuit without the final qubit reversal: H on the
    leading qubit, controlled-R^F_k from qubit k-1 onto it for k = 2..p, then
    the same construction on the remaining p-1 qubits.
    """
    if p < 1:
        raise DomainError(f"QFT needs at least one qubit, got {p}")
    return CircuitPlan(p, tuple(_qft_rec_gates(p, 0)))


def qft_circuit(p: int) -> CircuitPlan:
    """qft_rec followed by SWAP' (the full QFT as a circuit)"""
    rec = qft_rec(p)
    return rec if p == 1 else rec.then(swap_prime(p))


def qft_inverse_circuit(p: int) -> CircuitPlan:
    return plan_dagger(qft_circuit(p))


@functools.cache
def qft(p: int) -> DenseUnitary:
    """Analytic QFT matrix, <l|QFT|d> = exp(2 pi i d l / P) / sqrt(P)"""
    if p < 1:
        raise DomainError(f"QFT needs at least one qubit, got {p}")
    P = 2 ** p
    idx = np.arange(P)
    entries = np.exp(2j * np.pi * np.outer(idx, idx) / P) / math.sqrt(P)
    return DenseUnitary(HilbertDims.qubits(p), entries)


@functools.cache
def qft_inverse(p: int) -> DenseUnitary:
    return qft(p).dagger()


def controlled_powers(u: DenseUnitary, p: int) -> DenseUnitary:
    """
    Lambda_P(U)|b>|psi> = |b> U^b |psi>, built from the binary decomposition
    of b: control qubit t switches U^(2^(p-1-t)).
    """
    if p < 1:
        raise DomainError(f"Need at least one control qubit, got {p}")
    P, n = 2 ** p, u.dims.total
    b = np.arange(P)
    identity = np.eye(n, dtype=np.complex128)
    full = np.eye(P * n, dtype=np.complex128)
    power = np.asarray(u.entries)
    for t in reversed(range(p)):
        bit = ((b >> (p - 1 - t)) & 1).astype(np.float64)
        stage = np.kron(np.diag(1.0 - bit), identity) + np.kron(np.diag(bit), power)
        full = stage @ full
        power = power @ power
    return DenseUnitary(HilbertDims((P,) + u.dims.factors), full)


def controlled_powers_direct(u: DenseUnitary, p: int) -> DenseUnitary:
    """Block-diagonal definition of Lambda_P(U): block b is U^b"""
    P, n = 2 ** p, u.dims.total
    full = np.zeros((P * n, P * n), dtype=np.complex128)
    power = np.eye(n, dtype=np.complex128)
    for b in range(P):
        full[b * n:(b + 1) * n, b * n:(b + 1) * n] = power
        power = np.asarray(u.entries) @ power
    return DenseUnitary(HilbertDims((P,) + u.dims.factors), full)


def _control_preparation(p: int, options: CircuitOptions) -> NDArray[np.complex128]:
    zero = basis_state(HilbertDims.qubits(p), 0)
    prep = qft(p) if options.full_qft_prep else plan_matrix(hadamard_layer(p))
    return (prep @ zero).amps


def _check_operands(u: DenseUnitary, psi: StateVector, p: int):
    if u.dims.total != psi.dims.total:
        raise DimensionMismatchError(
            f"Operator of dimension {u.dims.total} with an input state of dimension {psi.dims.total}")
    if p < 1:
        raise DomainError(f"Need at least one precision bit, got {p}")


def phase_estimation_state(u: DenseUnitary, psi: StateVector, p: int,
                           options: CircuitOptions = CIRCUIT_OPTIONS) -> StateVector:
    """
    Final state of the phase-estimation circuit on [P] + dims(psi).

    Lambda_P(U) on (prep|0>) (x) psi is evaluated as the rows
    prep_b * U^b psi, which avoids building the (P N)-dimensional operator.
    """
    _check_operands(u, psi, p)
    P = 2 ** p
    prep = _control_preparation(p, options)
    rows = np.empty((P, psi.dims.total), dtype=np.complex128)
    current = np.array(psi.amps)
    for b in range(P):
        rows[b] = prep[b] * current
        current = u.entries @ current
    rows = qft_inverse(p).entries @ rows
    return StateVector(HilbertDims((P,) + psi.dims.factors), rows.reshape(-1))


def phase_estimation_state_dense(u: DenseUnitary, psi: StateVector, p: int,
                                 options: CircuitOptions = CIRCUIT_OPTIONS) -> StateVector:
    """The same state as `phase_estimation_state`, by full operator products"""
    _check_operands(u, psi, p)
    P = 2 ** p
    second = DenseUnitary.identity(psi.dims)
    prep = qft(p) if options.full_qft_prep else plan_matrix(hadamard_layer(p))
    state = tensor(basis_state(HilbertDims((P,)), 0), psi)
    state = tensor(DenseUnitary(HilbertDims((P,)), prep.entries), second) @ state
    state = controlled_powers(u, p) @ state
    state = tensor(DenseUnitary(HilbertDims((P,)), qft_inverse(p).entries), second) @ state
    return state


def phase_estimate_distribution(u: DenseUnitary, psi: StateVector, p: int) -> list[tuple[int, float]]:
    """Exact distribution of the first register of the phase-estimation circuit"""
    return outcome_distribution(phase_estimation_state(u, psi, p), register=0)


def phase_estimate(u: DenseUnitary, psi: StateVector, p: int, rng: Rng) -> PhaseEstimate:
    state = phase_estimation_state(u, psi, p)
    outcome = measure_first_register(state, 0, rng)
    P = 2 ** p
    return PhaseEstimate(raw_outcome=outcome.outcome_index,
                         vartheta=outcome.outcome_index / P,
                         precision_bits=p)


def phase_distribution_from_spectrum(phases: list[float], weights: list[float], P: int) -> NDArray[np.float64]:
    """
    Predicted first-register distribution for an input that decomposes into
    eigenvectors with eigenvalues exp(2 pi i lambda_l) and weights |alpha_l|^2:
    sum_l |alpha_l|^2 |<F_P(P lambda_l)|F_P(m)>|^2.
    """
    if len(phases) != len(weights):
        raise DimensionMismatchError(f"{len(phases)} phases and {len(weights)} weights")
    dist = np.zeros(P, dtype=np.float64)
    for lam, w in zip(phases, weights):
        omega = (lam % 1.0) * P
        for m in range(P):
            dist[m] += w * overlap_sq(P, omega, m)
    return dist
