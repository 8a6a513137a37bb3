"""
Dense state vectors and operators over mixed-radix composite Hilbert spaces.

Flat indices are most-significant-factor first: for dims [d1, d2, ..., dm]
the digit tuple (i1, ..., im) sits at index ((i1*d2 + i2)*d3 + ...) + im, which
is also the layout `numpy.kron` produces.
"""
import logging
import math
from dataclasses import dataclass, field
from typing import ClassVar, Sequence, overload

import numpy as np
from numpy.typing import ArrayLike, NDArray

from .config import TOLERANCES
from .errors import DimensionMismatchError, DomainError, NotUnitaryError

logger = logging.getLogger(__name__)

ComplexArray = NDArray[np.complex128]


@dataclass(frozen=True)
class HilbertDims:
    """The ordered subsystem dimensions of a composite space"""
    factors: tuple[int, ...]

    def __post_init__(self):
        factors = tuple(int(f) for f in self.factors)
        if len(factors) == 0:
            raise DomainError("A Hilbert space needs at least one factor")
        if any(f < 1 for f in factors):
            raise DomainError(f"Every factor must be >= 1, got {factors}")
        object.__setattr__(self, "factors", factors)

    @classmethod
    def of(cls, *factors: int) -> "HilbertDims":
        return cls(tuple(factors))

    @classmethod
    def qubits(cls, p: int) -> "HilbertDims":
        return cls((2,) * p)

    @property
    def total(self) -> int:
        return math.prod(self.factors)

    def __len__(self) -> int:
        return len(self.factors)

    def concat(self, other: "HilbertDims") -> "HilbertDims":
        return HilbertDims(self.factors + other.factors)

    def index(self, digits: Sequence[int]) -> int:
        """Flat index of a mixed-radix digit tuple"""
        if len(digits) != len(self.factors):
            raise DimensionMismatchError(
                f"Expected {len(self.factors)} digits, got {len(digits)}")
        return int(np.ravel_multi_index(tuple(int(d) for d in digits), self.factors))

    def digits(self, index: int) -> tuple[int, ...]:
        """Mixed-radix digit tuple of a flat index"""
        return tuple(int(d) for d in np.unravel_index(int(index), self.factors))


def _as_dims(dims: HilbertDims | Sequence[int] | int) -> HilbertDims:
    if isinstance(dims, HilbertDims):
        return dims
    if isinstance(dims, int):
        return HilbertDims((dims,))
    return HilbertDims(tuple(dims))


def _frozen(array: ArrayLike) -> ComplexArray:
    out = np.array(array, dtype=np.complex128)
    out.setflags(write=False)
    return out


@dataclass(frozen=True, eq=False)
class StateVector:
    """
    A complex amplitude vector. The plain constructor does not renormalize
    or check the norm (direct sums build non-unit vectors); use `checked`
    when a unit vector is required.
    """
    dims: HilbertDims
    amps: ComplexArray

    def __post_init__(self):
        object.__setattr__(self, "dims", _as_dims(self.dims))
        amps = _frozen(self.amps).reshape(-1)
        if amps.shape[0] != self.dims.total:
            raise DimensionMismatchError(
                f"{amps.shape[0]} amplitudes for a space of dimension {self.dims.total}")
        object.__setattr__(self, "amps", amps)

    @classmethod
    def checked(cls, dims: HilbertDims | Sequence[int] | int, amps: ArrayLike) -> "StateVector":
        state = cls(_as_dims(dims), np.asarray(amps))
        if abs(state.norm() - 1.0) > TOLERANCES.norm:
            raise DomainError(f"State norm is {state.norm()!r}, expected 1")
        return state

    def norm(self) -> float:
        return float(np.linalg.norm(self.amps))

    def normalized(self) -> "StateVector":
        n = self.norm()
        if n == 0.0:
            raise DomainError("Cannot normalize the zero vector")
        return StateVector(self.dims, self.amps / n)

    def probabilities(self) -> NDArray[np.float64]:
        return np.abs(self.amps) ** 2

    def tensor_view(self) -> ComplexArray:
        """Amplitudes reshaped with one axis per factor"""
        return self.amps.reshape(self.dims.factors)


@dataclass(frozen=True, eq=False)
class DenseUnitary:
    """
    A square complex matrix acting on `dims`. The plain constructor only
    checks the shape; `checked` also enforces unitarity.
    """
    dims: HilbertDims
    entries: ComplexArray

    def __post_init__(self):
        object.__setattr__(self, "dims", _as_dims(self.dims))
        entries = _frozen(self.entries)
        n = self.dims.total
        if entries.shape != (n, n):
            raise DimensionMismatchError(
                f"Matrix of shape {entries.shape} for a space of dimension {n}")
        object.__setattr__(self, "entries", entries)

    @classmethod
    def checked(cls, dims: HilbertDims | Sequence[int] | int, entries: ArrayLike) -> "DenseUnitary":
        u = cls(_as_dims(dims), np.asarray(entries))
        deviation = u.unitarity_deviation()
        if deviation > TOLERANCES.unitary:
            raise NotUnitaryError(f"max |U^dagger U - I| = {deviation:.3e}")
        return u

    @classmethod
    def identity(cls, dims: HilbertDims | Sequence[int] | int) -> "DenseUnitary":
        dims = _as_dims(dims)
        return cls(dims, np.eye(dims.total, dtype=np.complex128))

    def unitarity_deviation(self) -> float:
        n = self.dims.total
        gram = self.entries.conj().T @ self.entries
        return float(np.max(np.abs(gram - np.eye(n))))

    def is_unitary(self, tol: float | None = None) -> bool:
        return self.unitarity_deviation() <= (TOLERANCES.unitary if tol is None else tol)

    def dagger(self) -> "DenseUnitary":
        return DenseUnitary(self.dims, self.entries.conj().T)

    def compose(self, other: "DenseUnitary") -> "DenseUnitary":
        """The product self . other (other acts first)"""
        if self.dims.total != other.dims.total:
            raise DimensionMismatchError(
                f"Cannot compose dimensions {self.dims.total} and {other.dims.total}")
        return DenseUnitary(self.dims, self.entries @ other.entries)

    def power(self, b: int) -> "DenseUnitary":
        if b < 0:
            return self.dagger().power(-b)
        return DenseUnitary(self.dims, np.linalg.matrix_power(self.entries, b))

    @overload
    def __matmul__(self, other: "DenseUnitary") -> "DenseUnitary": ...
    @overload
    def __matmul__(self, other: StateVector) -> StateVector: ...

    def __matmul__(self, other):
        if isinstance(other, DenseUnitary):
            return self.compose(other)
        if isinstance(other, StateVector):
            return apply(self, other)
        return NotImplemented


@dataclass(frozen=True, eq=False)
class MeasurementOutcome:
    outcome_index: int
    probability: float
    post_state: StateVector


@dataclass
class Rng:
    """
    Seeded, counter-based random stream (Philox 4x64 through numpy).

    The same (seed, stream) pair yields the same draws on every platform.
    Independent Monte Carlo streams are obtained with `spawn`.
    """
    seed: int
    stream: int = 0
    algorithm: ClassVar[str] = "philox4x64"
    _generator: np.random.Generator = field(init=False, repr=False)

    def __post_init__(self):
        if not 0 <= self.seed < 2**64:
            raise DomainError(f"Seed must be an unsigned 64-bit integer, got {self.seed}")
        if self.stream < 0:
            raise DomainError(f"Stream id must be non-negative, got {self.stream}")
        sequence = np.random.SeedSequence(self.seed, spawn_key=(self.stream,))
        self._generator = np.random.Generator(np.random.Philox(sequence))

    def spawn(self, stream: int) -> "Rng":
        return Rng(self.seed, stream)

    def uniform(self) -> float:
        return float(self._generator.random())

    def integer(self, high: int) -> int:
        """Uniform integer in [0, high)"""
        return int(self._generator.integers(high))

    def sample_index(self, probabilities: ArrayLike) -> int:
        """Inverse-CDF draw from a (not necessarily normalized) probability vector"""
        cdf = np.cumsum(np.asarray(probabilities, dtype=np.float64))
        if cdf.size == 0 or cdf[-1] <= 0.0:
            raise DomainError("Cannot sample from an empty or all-zero distribution")
        u = self.uniform() * cdf[-1]
        return min(int(np.searchsorted(cdf, u, side="right")), cdf.size - 1)


def basis_state(dims: HilbertDims | Sequence[int] | int, digits: Sequence[int] | int) -> StateVector:
    """|digits> in `dims`; an int is taken as the flat index"""
    dims = _as_dims(dims)
    index = digits if isinstance(digits, int) else dims.index(digits)
    if not 0 <= index < dims.total:
        raise DomainError(f"Basis index {index} out of range for dimension {dims.total}")
    amps = np.zeros(dims.total, dtype=np.complex128)
    amps[index] = 1.0
    return StateVector(dims, amps)


def uniform_state(dims: HilbertDims | Sequence[int] | int) -> StateVector:
    dims = _as_dims(dims)
    return StateVector(dims, np.full(dims.total, 1.0 / math.sqrt(dims.total), dtype=np.complex128))


@overload
def tensor(a: StateVector, b: StateVector) -> StateVector: ...
@overload
def tensor(a: DenseUnitary, b: DenseUnitary) -> DenseUnitary: ...


def tensor(a, b):
    """Kronecker product; the factor lists are concatenated"""
    if isinstance(a, StateVector) and isinstance(b, StateVector):
        return StateVector(a.dims.concat(b.dims), np.kron(a.amps, b.amps))
    if isinstance(a, DenseUnitary) and isinstance(b, DenseUnitary):
        return DenseUnitary(a.dims.concat(b.dims), np.kron(a.entries, b.entries))
    raise TypeError(f"Cannot tensor {type(a).__name__} with {type(b).__name__}")


def apply(u: DenseUnitary, s: StateVector) -> StateVector:
    if u.dims.total != s.dims.total:
        raise DimensionMismatchError(
            f"Operator of dimension {u.dims.total} applied to a state of dimension {s.dims.total}")
    return StateVector(s.dims, u.entries @ s.amps)


def _register_marginal(s: StateVector, register: int) -> NDArray[np.float64]:
    if not 0 <= register < len(s.dims):
        raise DomainError(f"Register {register} out of range for {len(s.dims)} factors")
    probs = np.abs(s.tensor_view()) ** 2
    other_axes = tuple(i for i in range(len(s.dims)) if i != register)
    return np.sum(probs, axis=other_axes) if other_axes else probs


def outcome_distribution(s: StateVector, register: int = 0) -> list[tuple[int, float]]:
    """Exact outcome probabilities of measuring one factor of `s`"""
    marginal = _register_marginal(s, register)
    return [(m, float(p)) for m, p in enumerate(marginal)]


def measure_first_register(s: StateVector, register: int, rng: Rng) -> MeasurementOutcome:
    """
    Projective measurement of the factor `register` with M_m = |m><m| (x) I.
    The outcome is drawn by inverse CDF over the exact distribution.
    """
    marginal = _register_marginal(s, register)
    m = rng.sample_index(marginal)
    projected = np.zeros_like(s.tensor_view())
    selector: list[slice | int] = [slice(None)] * len(s.dims)
    selector[register] = m
    projected[tuple(selector)] = s.tensor_view()[tuple(selector)]
    p = float(marginal[m])
    post = StateVector(s.dims, projected.reshape(-1) / math.sqrt(p))
    logger.debug("measured register %d -> %d (p=%.6f)", register, m, p)
    return MeasurementOutcome(outcome_index=m, probability=p, post_state=post)


def inner(a: StateVector, b: StateVector) -> complex:
    """<a|b>, conjugate-linear in `a`"""
    if a.dims.total != b.dims.total:
        raise DimensionMismatchError(
            f"Inner product of dimensions {a.dims.total} and {b.dims.total}")
    return complex(np.vdot(a.amps, b.amps))


def direct_sum(a: StateVector, b: StateVector) -> StateVector:
    """a (+) b; the result is not renormalized"""
    return StateVector(HilbertDims((a.dims.total + b.dims.total,)),
                       np.concatenate([a.amps, b.amps]))
