"""Gaussian-state linear algebra on phase-space covariance matrices.

Conventions: quadrature operators are normalised so that the vacuum
covariance matrix is the identity (a = (q + ip)/sqrt(2), hbar = 1), and
the phase-space vector orders subsystems as all detectors first, then all
field modes, with q before p inside each pair.  Entropies are in bits.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DegeneracyError, DriftError, UnphysicalStateError

# Symplectic eigenvalues this far below 1 are treated as roundoff and
# clamped; anything lower is rejected as unphysical.
PHYSICALITY_TOL = 1e-6
SYMMETRY_TOL = 1e-10
PAIRING_TOL = 1e-8
DRIFT_TOL = 1e-6


@dataclass(frozen=True)
class PhaseSpaceIndex:
    """Address of one subsystem (a detector or a field mode) in the global ordering."""

    kind: str  # "detector" or "mode"
    ordinal: int

    def __post_init__(self):
        if self.kind not in ("detector", "mode"):
            raise ValueError(f"unknown subsystem kind {self.kind!r}")
        if self.ordinal < 0:
            raise ValueError("subsystem ordinal must be nonnegative")

    def block(self, n_detectors: int) -> int:
        """Position of this subsystem's (q, p) pair, detectors first."""
        if self.kind == "detector":
            if self.ordinal >= n_detectors:
                raise IndexError(f"detector ordinal {self.ordinal} out of range")
            return self.ordinal
        return n_detectors + self.ordinal


def detector(ordinal: int) -> PhaseSpaceIndex:
    return PhaseSpaceIndex("detector", ordinal)


def field_mode(ordinal: int) -> PhaseSpaceIndex:
    return PhaseSpaceIndex("mode", ordinal)


def symplectic_form(n_modes: int) -> np.ndarray:
    """Block-diagonal symplectic form, one [[0, 1], [-1, 0]] block per mode."""
    if n_modes < 1:
        raise ValueError("mode count must be at least 1")
    delta = np.zeros((2 * n_modes, 2 * n_modes))
    for i in range(n_modes):
        delta[2 * i, 2 * i + 1] = 1.0
        delta[2 * i + 1, 2 * i] = -1.0
    return delta


def make_vacuum_cov(n_modes: int) -> np.ndarray:
    """Covariance matrix of the multimode vacuum (identity in this convention)."""
    if n_modes < 1:
        raise ValueError("mode count must be at least 1")
    return np.eye(2 * n_modes)


def thermal_variance(omega: float, temperature: float) -> float:
    """Per-mode quadrature variance (exp(w/T)+1)/(exp(w/T)-1); 1 at T=0."""
    if omega <= 0:
        raise ValueError(f"mode frequency must be positive, got {omega}")
    if temperature < 0:
        raise ValueError(f"temperature must be nonnegative, got {temperature}")
    if temperature == 0.0:
        return 1.0
    # coth saturates cleanly for large omega/T, unlike the exp ratio.
    return 1.0 / math.tanh(omega / (2.0 * temperature))


def make_thermal_cov(frequencies, temperature: float) -> np.ndarray:
    """Diagonal covariance of uncoupled modes in a common thermal state."""
    freqs = list(frequencies)
    if not freqs:
        raise ValueError("at least one mode frequency required")
    diag = np.empty(2 * len(freqs))
    for i, omega in enumerate(freqs):
        v = thermal_variance(omega, temperature)
        diag[2 * i] = v
        diag[2 * i + 1] = v
    return np.diag(diag)


def make_squeezed_cov(r: float) -> np.ndarray:
    """Single-mode squeezed vacuum, diag(e^{2r}, e^{-2r})."""
    return np.diag([math.exp(2.0 * r), math.exp(-2.0 * r)])


def validate_covariance(sigma: np.ndarray, tol: float = PHYSICALITY_TOL) -> None:
    """Raise if sigma is not a symmetric, physical covariance matrix."""
    sigma = np.asarray(sigma)
    if sigma.ndim != 2 or sigma.shape[0] != sigma.shape[1] or sigma.shape[0] % 2:
        raise ValueError(f"covariance matrix must be square 2K x 2K, got {sigma.shape}")
    asym = np.max(np.abs(sigma - sigma.T))
    if asym > SYMMETRY_TOL:
        raise ValueError(f"covariance matrix asymmetric by {asym:.3e}")
    symplectic_eigenvalues(sigma, clamp_tol=tol)


def symplectic_eigenvalues(
    sigma: np.ndarray,
    clamp_tol: float = PHYSICALITY_TOL,
    pairing_tol: float = PAIRING_TOL,
) -> np.ndarray:
    """Symplectic spectrum of a covariance matrix, ascending.

    The K values are the common moduli of the +/- eigenvalue pairs of
    i*Delta*sigma.  Values within ``clamp_tol`` below 1 are clamped up to
    exactly 1; anything below that window raises.
    """
    sigma = np.asarray(sigma, dtype=float)
    n = sigma.shape[0] // 2
    delta = symplectic_form(n)
    moduli = np.sort(np.abs(np.linalg.eigvals(1j * delta @ sigma)))
    nus = np.empty(n)
    for i in range(n):
        lo, hi = moduli[2 * i], moduli[2 * i + 1]
        if hi - lo > pairing_tol * max(1.0, hi):
            raise DegeneracyError(
                f"eigenvalue moduli {lo!r} and {hi!r} do not pair within {pairing_tol:g}"
            )
        nus[i] = 0.5 * (lo + hi)
    low = nus < 1.0
    if np.any(nus < 1.0 - clamp_tol):
        raise UnphysicalStateError(
            f"symplectic eigenvalue {nus.min()!r} below physical bound 1"
        )
    nus[low] = 1.0
    return nus


def entropy_kernel(x: float) -> float:
    """Entropy contribution in bits of one symplectic eigenvalue x >= 1."""
    if x < 1.0:
        raise ValueError(f"entropy kernel requires x >= 1, got {x!r}")
    if x == 1.0:
        return 0.0
    a = 0.5 * (x + 1.0)
    b = 0.5 * (x - 1.0)
    return a * math.log2(a) - b * math.log2(b)


def vn_entropy(sigma: np.ndarray, clamp_tol: float = PHYSICALITY_TOL) -> float:
    """Von Neumann entropy (bits) of a Gaussian state from its covariance matrix."""
    return float(sum(entropy_kernel(nu) for nu in symplectic_eigenvalues(sigma, clamp_tol)))


def reduce_cov(sigma: np.ndarray, subsystems, n_detectors: int) -> np.ndarray:
    """Reduced covariance of the selected subsystems, in the order given.

    ``subsystems`` is a sequence of PhaseSpaceIndex; duplicates or indices
    outside the matrix raise IndexError.
    """
    sigma = np.asarray(sigma)
    n = sigma.shape[0] // 2
    blocks = []
    for sub in subsystems:
        pos = sub.block(n_detectors)
        if pos >= n:
            raise IndexError(f"subsystem {sub} beyond matrix with {n} pairs")
        blocks.append(pos)
    if len(set(blocks)) != len(blocks):
        raise IndexError("duplicate subsystem in reduction")
    rows = []
    for pos in blocks:
        rows.extend((2 * pos, 2 * pos + 1))
    idx = np.asarray(rows)
    return sigma[np.ix_(idx, idx)]


def symplecticity_residual(s: np.ndarray) -> float:
    """Max-norm of S Delta S^T - Delta."""
    s = np.asarray(s)
    delta = symplectic_form(s.shape[0] // 2)
    return float(np.max(np.abs(s @ delta @ s.T - delta)))


def propagate_cov(
    s: np.ndarray, sigma0: np.ndarray, drift_tol: float = DRIFT_TOL, time: float = 0.0
) -> np.ndarray:
    """Evolve a covariance matrix by a symplectic propagator: S sigma S^T.

    The result is re-symmetrised to suppress roundoff; S is rejected if its
    symplecticity residual exceeds ``drift_tol``.
    """
    s = np.asarray(s, dtype=float)
    sigma0 = np.asarray(sigma0, dtype=float)
    if s.shape != sigma0.shape:
        raise ValueError(f"shape mismatch: S {s.shape} vs sigma {sigma0.shape}")
    residual = symplecticity_residual(s)
    if residual > drift_tol:
        raise DriftError(time, residual, drift_tol)
    out = s @ sigma0 @ s.T
    return 0.5 * (out + out.T)
