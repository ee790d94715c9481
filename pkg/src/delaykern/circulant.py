"""Delay-aware H2 gain design for rings of agents coupled by symmetric
circulant matrices.

The DFT of the first row of a symmetric circulant matrix gives its (real)
eigenvalues, decoupling the N-agent loop into N scalar delayed subsystems.
Modes are designed individually (numerically optimal, small-delay
approximation, or delay-free) and the gain row is recovered by the inverse
DFT.  Real cosine sums are used in both directions so the symbols stay
exactly real, matching the symmetry assumption.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .asymptotic import delay_free_gain
from .errors import (DomainError, InstabilityError, SymmetryError,
                     UnstabilizableError)
from .scalar import ScalarPlant, is_stabilizing, optimal_gain, variance_integral

_SYMMETRY_TOL = 1e-12
_IMAG_RESIDUE_TOL = 1e-10


class DesignMethod(Enum):
    NUMERICAL_OPT = "numerical_opt"
    SMALL_DELAY = "small_delay"
    DELAY_FREE = "delay_free"


@dataclass(frozen=True)
class CirculantSystem:
    """n agents coupled through circ(a_row); a_row must be symmetric."""

    n: int
    a_row: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "a_row",
                           np.asarray(self.a_row, dtype=float))
        if self.n < 2:
            raise DomainError("need at least 2 agents")
        if self.a_row.shape != (self.n,):
            raise DomainError(
                f"a_row must have length n = {self.n}, got {self.a_row.shape}")


@dataclass(frozen=True)
class CirculantGains:
    k_row: np.ndarray
    k_modes: np.ndarray
    self_gain: float
    provenance: DesignMethod


def _check_symmetry(row: np.ndarray):
    n = row.size
    for i in range(1, n):
        if abs(row[i] - row[n - i]) > _SYMMETRY_TOL:
            raise SymmetryError(
                f"row[{i}] = {row[i]!r} != row[{n - i}] = {row[n - i]!r}")


def _cos_table(n: int) -> np.ndarray:
    j = np.arange(n)
    return np.cos(2.0 * math.pi * np.outer(j, j) / n)


def _sin_residue(row: np.ndarray) -> float:
    n = row.size
    j = np.arange(n)
    s = np.sin(2.0 * math.pi * np.outer(j, j) / n)
    return float(np.max(np.abs(s @ row)))


def modes_of(sys: CirculantSystem) -> np.ndarray:
    """Real eigenvalues of circ(a_row): the plain (unnormalized) DFT of the
    first row, computed as cosine sums; the sine part must vanish by
    symmetry and is checked before being discarded."""
    _check_symmetry(sys.a_row)
    residue = _sin_residue(sys.a_row)
    if residue > _IMAG_RESIDUE_TOL:
        raise SymmetryError(
            f"imaginary eigenvalue residue {residue:g} exceeds "
            f"{_IMAG_RESIDUE_TOL:g}")
    return _cos_table(sys.n) @ sys.a_row


def _modes_to_row(k_modes: np.ndarray) -> np.ndarray:
    # inverse DFT of a real even spectrum: cosine sum with 1/n
    n = k_modes.size
    return (_cos_table(n) @ k_modes) / n


def design_gains(sys: CirculantSystem, T: float, r: float,
                 method: DesignMethod | str) -> CirculantGains:
    """Per-mode gain design followed by inverse DFT to the gain row.

    Modes with a T >= 1 cannot be stabilized by any gain and raise
    UnstabilizableError naming the offending mode.  Symmetry halves the
    work: only the first floor(n/2)+1 modes are designed, the rest are
    mirrored.  For the small-delay method the row is also rebuilt through
    the matrix identity k_row = (I - A T) k0_row - (T/r) e0 as an internal
    cross-check of the mode-space formula.
    """
    method = DesignMethod(method)
    if T < 0 or r <= 0:
        raise DomainError("need T >= 0 and r > 0")
    modes = modes_of(sys)
    n = sys.n
    for lam in range(n):
        if modes[lam] * T >= 1.0:
            raise UnstabilizableError(
                f"mode {lam} has a = {modes[lam]:g} with a*T = "
                f"{modes[lam] * T:g} >= 1")

    half = n // 2 + 1
    k_half = np.empty(half)
    for lam in range(half):
        a = float(modes[lam])
        if method is DesignMethod.NUMERICAL_OPT:
            k_half[lam], _ = optimal_gain(ScalarPlant(a=a, T=T, r=r))
        elif method is DesignMethod.DELAY_FREE:
            k_half[lam] = delay_free_gain(a, r)
        else:
            k0 = delay_free_gain(a, r)
            k_half[lam] = (1.0 - a * T) * k0 - T / r
    k_modes = np.empty(n)
    k_modes[:half] = k_half
    for lam in range(half, n):
        k_modes[lam] = k_modes[n - lam]

    k_row = _modes_to_row(k_modes)

    if method is DesignMethod.SMALL_DELAY:
        k0_modes = np.array([delay_free_gain(float(a), r) for a in modes])
        k0_row = _modes_to_row(k0_modes)
        direct = k0_row - T * _circ_multiply(sys.a_row, k0_row)
        direct[0] -= T / r
        if np.max(np.abs(direct - k_row)) > 1e-8 * max(1.0, np.max(np.abs(k_row))):
            raise AssertionError(
                "mode-space and matrix-space small-delay rows disagree")

    return CirculantGains(k_row=k_row, k_modes=k_modes,
                          self_gain=float(k_row[0]), provenance=method)


def _circ_multiply(row: np.ndarray, v: np.ndarray) -> np.ndarray:
    """circ(row) @ v, i.e. the circular convolution of row and v."""
    n = row.size
    out = np.empty(n)
    for i in range(n):
        out[i] = np.dot(row, v[(i - np.arange(n)) % n])
    return out


def verify_closed_loop(sys: CirculantSystem, gains: CirculantGains,
                       T: float) -> bool:
    """Exact stability certificate: every mode gain strictly inside its
    scalar stability interval (a, k_u)."""
    modes = modes_of(sys)
    for lam in range(sys.n):
        plant = ScalarPlant(a=float(modes[lam]), T=T)
        if not is_stabilizing(plant, float(gains.k_modes[lam])):
            return False
    return True


def h2_cost(sys: CirculantSystem, gains: CirculantGains, T: float,
            r: float) -> float:
    """Total H2 cost: sum over modes of J_lambda(k(lambda))."""
    if not verify_closed_loop(sys, gains, T):
        raise InstabilityError("gains fail the closed-loop certificate")
    modes = modes_of(sys)
    total = 0.0
    for lam in range(sys.n):
        plant = ScalarPlant(a=float(modes[lam]), T=T, r=r)
        total += variance_integral(plant, float(gains.k_modes[lam])).j_value
    return total
