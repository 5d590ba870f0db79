"""Two-detector correlation measures from the 4x4 detector-detector covariance.

All quantities are in bits and follow the determinant-invariant formulas
for two-mode Gaussian states: logarithmic negativity from the partially
transposed spectrum, mutual information from marginal and joint entropies,
and Gaussian discord from the optimal single-mode Gaussian measurement.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import UnphysicalStateError
from .gaussian import (
    PHYSICALITY_TOL,
    entropy_kernel,
    symplectic_eigenvalues,
    validate_covariance,
)

# Results this far below zero are treated as roundoff and clamped to 0;
# anything lower aborts.
NEGATIVE_CLAMP = 1e-9


@dataclass(frozen=True)
class TwoModeBlocks:
    """2x2 blocks of a two-detector covariance matrix [[d1, cross], [cross^T, d2]]."""

    d1: np.ndarray
    d2: np.ndarray
    cross: np.ndarray

    @classmethod
    def from_cov(cls, sigma_dd: np.ndarray, validate: bool = True) -> "TwoModeBlocks":
        sigma_dd = np.asarray(sigma_dd, dtype=float)
        if sigma_dd.shape != (4, 4):
            raise ValueError(f"expected a 4x4 covariance, got {sigma_dd.shape}")
        if validate:
            validate_covariance(sigma_dd)
        return cls(
            d1=sigma_dd[:2, :2].copy(),
            d2=sigma_dd[2:, 2:].copy(),
            cross=sigma_dd[:2, 2:].copy(),
        )

    @property
    def full(self) -> np.ndarray:
        top = np.hstack([self.d1, self.cross])
        bottom = np.hstack([self.cross.T, self.d2])
        return np.vstack([top, bottom])

    def swapped(self) -> "TwoModeBlocks":
        """Relabel the detectors (1 <-> 2)."""
        return TwoModeBlocks(d1=self.d2.copy(), d2=self.d1.copy(), cross=self.cross.T.copy())


@dataclass(frozen=True)
class SymplecticInvariants:
    """Determinant invariants of a two-mode state."""

    alpha: float  # det d1
    beta: float   # det d2
    gamma: float  # det cross
    delta: float  # det of the full 4x4
    delta_tilde: float  # alpha + beta - 2 gamma (partial transpose)
    delta_plus: float   # alpha + beta + 2 gamma


def _det2(m: np.ndarray) -> float:
    return float(m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0])


def _det4(m: np.ndarray) -> float:
    """Laplace expansion over complementary 2x2 minors of rows (0,1)/(2,3).

    Exact for block-diagonal inputs, so product states satisfy
    delta = alpha * beta without roundoff (the discord branch condition
    degenerates to an equality there).
    """

    def minor(r0, r1, c0, c1):
        return m[r0, c0] * m[r1, c1] - m[r0, c1] * m[r1, c0]

    return float(
        minor(0, 1, 0, 1) * minor(2, 3, 2, 3)
        - minor(0, 1, 0, 2) * minor(2, 3, 1, 3)
        + minor(0, 1, 0, 3) * minor(2, 3, 1, 2)
        + minor(0, 1, 1, 2) * minor(2, 3, 0, 3)
        - minor(0, 1, 1, 3) * minor(2, 3, 0, 2)
        + minor(0, 1, 2, 3) * minor(2, 3, 0, 1)
    )


def block_determinants(blocks: TwoModeBlocks) -> SymplecticInvariants:
    alpha = _det2(blocks.d1)
    beta = _det2(blocks.d2)
    gamma = _det2(blocks.cross)
    delta = _det4(blocks.full)
    return SymplecticInvariants(
        alpha=alpha,
        beta=beta,
        gamma=gamma,
        delta=delta,
        delta_tilde=alpha + beta - 2.0 * gamma,
        delta_plus=alpha + beta + 2.0 * gamma,
    )


def _clamped(value: float, what: str) -> float:
    if value < -NEGATIVE_CLAMP:
        raise UnphysicalStateError(f"{what} = {value!r} is negative beyond roundoff")
    return max(value, 0.0)


def _entropy_of_nu(x: float) -> float:
    """entropy_kernel with the shared roundoff window below 1."""
    if x < 1.0:
        if x < 1.0 - PHYSICALITY_TOL:
            raise UnphysicalStateError(f"symplectic eigenvalue {x!r} below 1")
        x = 1.0
    return entropy_kernel(x)


def log_negativity(blocks: TwoModeBlocks) -> float:
    """Logarithmic negativity E_N = max(0, -log2 of the smaller PT eigenvalue)."""
    inv = block_determinants(blocks)
    disc = inv.delta_tilde**2 - 4.0 * inv.delta
    if disc < 0.0:
        if disc < -1e-10:
            raise UnphysicalStateError(
                f"partial-transpose discriminant {disc!r} negative beyond roundoff"
            )
        disc = 0.0
    nu_sq = 0.5 * (inv.delta_tilde - math.sqrt(disc))
    if nu_sq <= 0.0:
        raise UnphysicalStateError(
            f"partially transposed eigenvalue squared {nu_sq!r} not positive"
        )
    return max(0.0, -0.5 * math.log2(nu_sq))


def joint_symplectic_eigenvalues(inv: SymplecticInvariants) -> tuple[float, float]:
    """Symplectic eigenvalues of the 4x4 state from its invariants."""
    disc = inv.delta_plus**2 - 4.0 * inv.delta
    if disc < 0.0:
        if disc < -1e-10:
            raise UnphysicalStateError(f"joint discriminant {disc!r} negative")
        disc = 0.0
    root = math.sqrt(disc)
    lo = math.sqrt(max(0.5 * (inv.delta_plus - root), 0.0))
    hi = math.sqrt(max(0.5 * (inv.delta_plus + root), 0.0))
    return lo, hi


def mutual_information(blocks: TwoModeBlocks) -> float:
    """Total correlations S(d1) + S(d2) - S(d1 d2) in bits."""
    inv = block_determinants(blocks)
    nu_lo, nu_hi = joint_symplectic_eigenvalues(inv)
    total = (
        _entropy_of_nu(math.sqrt(inv.alpha))
        + _entropy_of_nu(math.sqrt(inv.beta))
        - _entropy_of_nu(nu_lo)
        - _entropy_of_nu(nu_hi)
    )
    return _clamped(total, "mutual information")


def _measured_determinant(inv: SymplecticInvariants, paper_literal: bool) -> float:
    """Minimal conditional determinant E over single-mode Gaussian measurements.

    The measured subsystem is the beta one.  The default branch formula is
    the corrected one (product states give exactly E = alpha, hence zero
    discord); the literal variant retains the uncorrected branch expressions
    for comparison and is known to violate the product-state null.
    """
    a, b, g, d = inv.alpha, inv.beta, inv.gamma, inv.delta
    if paper_literal:
        branch1 = (d - a * b) ** 2 <= (b - 1.0) * (a + d) * g * g
        if branch1 and abs(b - 1.0) > 1e-9:
            num = 2.0 * g * g + (b - 1.0) * (b - a)
            root = math.sqrt(max(g * g + (b - 1.0) * (b - a), 0.0))
            return (num + 2.0 * abs(g) * root) / (b - 1.0) ** 2
        root = math.sqrt(max(g**4 + (d - a * b) ** 2 - 2.0 * g * g * (a * b + d), 0.0))
        return (a * b - g * g + d - root) / (2.0 * b)

    branch1 = (d - a * b) ** 2 <= (1.0 + b) * (a + d) * g * g
    if branch1 and b - 1.0 > 1e-9:
        inner = g * g + (b - 1.0) * (d - a)
        root = math.sqrt(max(inner, 0.0))
        return (2.0 * g * g + (b - 1.0) * (d - a) + 2.0 * abs(g) * root) / (b - 1.0) ** 2
    # Measured mode pure (b -> 1) falls through to this limit as well.
    root = math.sqrt(max(g**4 + (d - a * b) ** 2 - 2.0 * g * g * (a * b + d), 0.0))
    return (a * b - g * g + d - root) / (2.0 * b)


def gaussian_discord(
    blocks: TwoModeBlocks, direction: str = "1:2", paper_literal: bool = False
) -> float:
    """Gaussian quantum discord in bits.

    ``direction="1:2"`` measures detector 2 (the beta subsystem);
    ``"2:1"`` swaps the detector roles.  ``paper_literal`` switches to the
    uncorrected branch formula for comparison; that variant is known to
    break the product-state null, so it skips the physicality guards and
    may return negative values (entropy terms below the pure bound are
    truncated to zero).
    """
    if direction == "2:1":
        blocks = blocks.swapped()
    elif direction != "1:2":
        raise ValueError(f"direction must be '1:2' or '2:1', got {direction!r}")
    inv = block_determinants(blocks)
    nu_lo, nu_hi = joint_symplectic_eigenvalues(inv)
    e_min = _measured_determinant(inv, paper_literal)
    if paper_literal:
        def term(x):
            return entropy_kernel(max(x, 1.0))
        return (
            term(math.sqrt(inv.beta))
            - term(nu_lo)
            - term(nu_hi)
            + term(math.sqrt(max(e_min, 0.0)))
        )
    value = (
        _entropy_of_nu(math.sqrt(inv.beta))
        - _entropy_of_nu(nu_lo)
        - _entropy_of_nu(nu_hi)
        + _entropy_of_nu(math.sqrt(max(e_min, 0.0)))
    )
    return _clamped(value, "gaussian discord")


def excitation_probability(sigma_d: np.ndarray) -> float:
    """Probability that a single detector is found outside its ground state."""
    sigma_d = np.asarray(sigma_d, dtype=float)
    if sigma_d.shape != (2, 2):
        raise ValueError(f"expected a single-mode 2x2 covariance, got {sigma_d.shape}")
    arg = float(np.linalg.det(sigma_d) + np.trace(sigma_d) + 1.0)
    if arg <= 0.0:
        raise UnphysicalStateError(f"excitation probability argument {arg!r} not positive")
    p = 1.0 - 2.0 / math.sqrt(arg)
    return _clamped(p, "excitation probability")


def symplectic_spectrum_4x4(sigma_dd: np.ndarray) -> np.ndarray:
    """Direct symplectic spectrum of the two-detector block (cross-check path)."""
    return symplectic_eigenvalues(np.asarray(sigma_dd, dtype=float))
