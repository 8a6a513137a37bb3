"""
Closed-form analytics of Fourier states |F_P(omega)> for real omega.

Two normalizations of the boundary-probability function appear here:

* `f_of_w(P, w)` is the probability that phase estimation lands on one of
  the two grid points around a scaled phase with fractional part w. It
  carries the 1/P^2 factor and its minimum over w is f(1/2).
* `f_pi(P, theta)` is the same function shifted to w = 1/2 + theta/pi with
  the 1/P^2 factor removed, f_pi(theta) = P^2 f(1/2 + theta/pi). Its lower
  bound 2 csc^2(pi/2P) is therefore also un-normalized.
"""
import logging
import math
from dataclasses import dataclass, field

import numpy as np
from numpy.typing import ArrayLike, NDArray

from .config import TOLERANCES
from .errors import DomainError
from .qstate import HilbertDims, StateVector

logger = logging.getLogger(__name__)

EIGHT_OVER_PI_SQ = 8.0 / math.pi ** 2


@dataclass(frozen=True)
class FourierState:
    dim: int
    omega: float

    def __post_init__(self):
        if self.dim < 1:
            raise DomainError(f"Fourier dimension must be >= 1, got {self.dim}")
        if not 0.0 <= self.omega <= self.dim:
            raise DomainError(f"omega must lie in [0, {self.dim}], got {self.omega}")

    def amplitudes(self) -> NDArray[np.complex128]:
        ell = np.arange(self.dim)
        return np.exp(2j * np.pi * self.omega * ell / self.dim) / math.sqrt(self.dim)

    def realize(self) -> StateVector:
        return StateVector(HilbertDims((self.dim,)), self.amplitudes())


def fourier_state(P: int, omega: float) -> StateVector:
    """|F_P(omega)> = P^(-1/2) sum_l exp(2 pi i omega l / P) |l>"""
    return FourierState(P, omega).realize()


def _overlap_formula(P: int, delta: ArrayLike) -> NDArray[np.float64]:
    """
    sin^2(pi delta) / (P^2 sin^2(pi delta / P)), evaluated through its limit
    where the denominator vanishes (delta close to a multiple of P).
    """
    delta = np.asarray(delta, dtype=np.float64)
    den = np.sin(np.pi * delta / P)
    singular = np.abs(den) < TOLERANCES.singular
    safe_den = np.where(singular, 1.0, den)
    regular = np.sin(np.pi * delta) ** 2 / (P ** 2 * safe_den ** 2)

    # near delta = mP: sin(pi x)^2 / (pi x)^2 with x = delta - mP
    x = delta - np.round(delta / P) * P
    safe_x = np.where(x == 0.0, 1.0, x)
    limit = np.where(x == 0.0, 1.0, np.sin(np.pi * safe_x) ** 2 / (np.pi * safe_x) ** 2)
    return np.where(singular, limit, regular)


def overlap_sq(P: int, omega: float, omega_prime: float) -> float:
    """|<F_P(omega)|F_P(omega')>|^2"""
    if P < 1:
        raise DomainError(f"Fourier dimension must be >= 1, got {P}")
    if omega == omega_prime:
        return 1.0
    return float(_overlap_formula(P, omega_prime - omega))


def boundary_prob(P: int, omega: float) -> float:
    """
    Probability that measuring QFT^-1 |F_P(omega)> yields floor(omega) or
    ceil(omega). Outcome P is the same basis state as outcome 0.
    """
    FourierState(P, omega)
    outcomes = {math.floor(omega) % P, math.ceil(omega) % P}
    return sum(overlap_sq(P, omega, m) for m in outcomes)


def _f_vec(P: int, w: NDArray[np.float64]) -> NDArray[np.float64]:
    return _overlap_formula(P, w) + _overlap_formula(P, 1.0 - w)


def f_of_w(P: int, w: float) -> float:
    if P < 1:
        raise DomainError(f"Fourier dimension must be >= 1, got {P}")
    if not 0.0 < w < 1.0:
        raise DomainError(f"w must lie in (0, 1), got {w}")
    return float(_f_vec(P, np.asarray(w, dtype=np.float64)))


def _f_pi_vec(P: int, theta: NDArray[np.float64]) -> NDArray[np.float64]:
    a = np.pi / (2 * P)
    return np.cos(theta) ** 2 * (1.0 / np.sin(a + theta / P) ** 2 + 1.0 / np.sin(a - theta / P) ** 2)


def f_pi(P: int, theta: float) -> float:
    """cos^2(theta) (csc^2(pi/2P + theta/P) + csc^2(pi/2P - theta/P)) on (-pi/2, pi/2)"""
    if not -math.pi / 2 < theta < math.pi / 2:
        raise DomainError(f"theta must lie in (-pi/2, pi/2), got {theta}")
    return float(_f_pi_vec(P, np.asarray(theta, dtype=np.float64)))


def f_pi_bound(P: int) -> float:
    return 2.0 / math.sin(math.pi / (2 * P)) ** 2


def aux_sin_gap(P: int, theta: ArrayLike) -> NDArray[np.float64]:
    """sin(theta/P) - (2 theta/pi) sin(pi/2P), non-negative on [0, pi/2]"""
    theta = np.asarray(theta, dtype=np.float64)
    return np.sin(theta / P) - (2 * theta / np.pi) * math.sin(math.pi / (2 * P))


def aux_cos_ratio(theta: ArrayLike) -> NDArray[np.float64]:
    """(2 sqrt2 pi^2 theta^2 + pi^4) cos^2(theta) / (pi^2 - 4 theta^2)^2, at least 1 on (-pi/2, pi/2)"""
    theta = np.asarray(theta, dtype=np.float64)
    pi2 = np.pi ** 2
    return (2 * math.sqrt(2) * pi2 * theta ** 2 + pi2 ** 2) * np.cos(theta) ** 2 / (pi2 - 4 * theta ** 2) ** 2


def aux_cos_taylor_gap(theta: ArrayLike) -> NDArray[np.float64]:
    """cos(theta) - (1 - theta^2/2 + theta^4 (2 pi^2 - 16)/pi^4), non-negative on [0, pi/2]"""
    theta = np.asarray(theta, dtype=np.float64)
    quartic = (2 * np.pi ** 2 - 16) / np.pi ** 4
    return np.cos(theta) - (1 - theta ** 2 / 2 + quartic * theta ** 4)


@dataclass(frozen=True)
class SuiteRow:
    P: int
    check: str
    x: float
    lhs: float
    rhs: float
    passed: bool


@dataclass
class AppendixReport:
    """
    One row per (P, check) holding the tightest grid point, plus every
    violating grid point.
    """
    resolution: float
    rows: list[SuiteRow] = field(default_factory=list)
    violations: list[SuiteRow] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.violations

    def csv_rows(self) -> list[tuple]:
        return [(r.P, r.check, r.x, r.lhs, r.rhs, int(r.passed)) for r in self.rows]


def _grid(resolution: float) -> NDArray[np.float64]:
    """Interior points j * resolution of (0, 1)"""
    m = int(round(1.0 / resolution))
    return np.arange(1, m) / m


def _record(report: AppendixReport, P: int, check: str, x: NDArray[np.float64],
            lhs: NDArray[np.float64], rhs: NDArray[np.float64], tol: float):
    """Compare lhs >= rhs - tol pointwise and keep the tightest point"""
    lhs = np.broadcast_to(lhs, x.shape)
    rhs = np.broadcast_to(rhs, x.shape)
    margin = lhs - rhs
    ok = margin >= -tol
    worst = int(np.argmin(margin))
    report.rows.append(SuiteRow(P, check, float(x[worst]), float(lhs[worst]), float(rhs[worst]), bool(ok.all())))
    for i in np.flatnonzero(~ok):
        report.violations.append(SuiteRow(P, check, float(x[i]), float(lhs[i]), float(rhs[i]), False))


def appendix_a_suite(P_range: list[int], resolution: float = 1e-4) -> AppendixReport:
    """
    Grid verification of the boundary-probability minimum and the
    inequalities used to bound it, for every P in `P_range`.

    P <= 2 skips the argmin check: f is constant there.
    """
    if resolution > 1e-3:
        raise DomainError(f"resolution must be <= 1e-3, got {resolution}")
    report = AppendixReport(resolution)
    w = _grid(resolution)
    theta = np.pi * (w - 0.5)
    half = theta[theta >= 0.0]
    tol = 1e-12

    for P in P_range:
        if P < 1:
            raise DomainError(f"Fourier dimension must be >= 1, got {P}")
        f = _f_vec(P, w)
        f_mirror = _f_vec(P, 1.0 - w)
        symmetric = np.abs(f - f_mirror)
        _record(report, P, "symmetry", w, -symmetric, np.zeros_like(w), tol)

        if P >= 3:
            argmin = float(w[int(np.argmin(f))])
            ok = abs(argmin - 0.5) <= resolution
            row = SuiteRow(P, "argmin", argmin, argmin, 0.5, ok)
            report.rows.append(row)
            if not ok:
                report.violations.append(row)

        f_half = float(_f_vec(P, np.asarray(0.5)))
        row = SuiteRow(P, "min_bound", 0.5, f_half, EIGHT_OVER_PI_SQ, f_half >= EIGHT_OVER_PI_SQ - tol)
        report.rows.append(row)
        if not row.passed:
            report.violations.append(row)

        bound = f_pi_bound(P)
        _record(report, P, "f_pi", theta, _f_pi_vec(P, theta), np.full_like(theta, bound), tol * bound)
        _record(report, P, "aux_sin", half, np.sin(half / P),
                (2 * half / np.pi) * math.sin(math.pi / (2 * P)), tol)
        _record(report, P, "aux_cos_ratio", theta, aux_cos_ratio(theta), np.ones_like(theta), tol)
        _record(report, P, "aux_cos_taylor", half, np.cos(half),
                np.cos(half) - aux_cos_taylor_gap(half), tol)
        logger.debug("appendix suite P=%d done", P)

    if report.violations:
        logger.warning("appendix suite: %d violations", len(report.violations))
    return report


def fourier_amplitude_table(P: int, omega: float) -> list[tuple[int, float, float]]:
    """(l, re, im) of <l|F_P(omega)>"""
    amps = FourierState(P, omega).amplitudes()
    return [(ell, float(a.real), float(a.imag)) for ell, a in enumerate(amps)]


@dataclass(frozen=True)
class FCurve:
    P: int
    w: NDArray[np.float64]
    f: NDArray[np.float64]

    @property
    def argmin(self) -> float:
        return float(self.w[int(np.argmin(self.f))])

    @property
    def minimum(self) -> float:
        return float(np.min(self.f))


def f_curve(P: int, resolution: float = 1e-3) -> FCurve:
    w = _grid(resolution)
    return FCurve(P, w, _f_vec(P, w))
