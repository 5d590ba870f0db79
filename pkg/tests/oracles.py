"""Independent oracles used to freeze expected test values.

Everything here is deliberately written against the defining formulas
instead of the library code paths it checks: the entropy kernel is
re-implemented, and discord is evaluated by explicit numerical
minimisation over single-mode Gaussian measurements (finite squeezing
plus the exact homodyne limits) rather than the closed-form branch
expressions.
"""

from __future__ import annotations

import math

import numpy as np
import scipy.linalg
import scipy.optimize


def entropy_bits(x: float) -> float:
    if x <= 1.0:
        return 0.0
    a = 0.5 * (x + 1.0)
    b = 0.5 * (x - 1.0)
    return a * math.log2(a) - b * math.log2(b)


def symplectic_eigenvalues_direct(sigma: np.ndarray) -> np.ndarray:
    """Spectrum via |eigenvalues of i Delta sigma|, no pairing shortcuts."""
    n = sigma.shape[0] // 2
    delta = np.zeros((2 * n, 2 * n))
    for i in range(n):
        delta[2 * i, 2 * i + 1] = 1.0
        delta[2 * i + 1, 2 * i] = -1.0
    moduli = np.sort(np.abs(np.linalg.eigvals(1j * delta @ sigma)))
    return moduli[::2].copy()


def vn_entropy_direct(sigma: np.ndarray) -> float:
    return float(sum(entropy_bits(nu) for nu in symplectic_eigenvalues_direct(sigma)))


class _ConditionalDeterminant:
    """Scalar 2x2 algebra for det of detector 1 after measuring detector 2."""

    def __init__(self, sigma_dd: np.ndarray):
        sigma_dd = np.asarray(sigma_dd, dtype=float)
        self.a11, self.a12 = sigma_dd[0, 0], sigma_dd[0, 1]
        self.a22 = sigma_dd[1, 1]
        self.b11, self.b12 = sigma_dd[2, 2], sigma_dd[2, 3]
        self.b22 = sigma_dd[3, 3]
        self.c11, self.c12 = sigma_dd[0, 2], sigma_dd[0, 3]
        self.c21, self.c22 = sigma_dd[1, 2], sigma_dd[1, 3]

    def finite(self, theta: float, log_s: float) -> float:
        cos, sin = math.cos(theta), math.sin(theta)
        e_plus, e_minus = math.exp(log_s), math.exp(-log_s)
        # measurement covariance e^l uu^T + e^-l vv^T, u = (cos, sin)
        m11 = self.b11 + e_plus * cos * cos + e_minus * sin * sin
        m22 = self.b22 + e_plus * sin * sin + e_minus * cos * cos
        m12 = self.b12 + (e_plus - e_minus) * cos * sin
        det_m = m11 * m22 - m12 * m12
        i11, i22, i12 = m22 / det_m, m11 / det_m, -m12 / det_m
        t11 = (
            self.c11 * (i11 * self.c11 + i12 * self.c12)
            + self.c12 * (i12 * self.c11 + i22 * self.c12)
        )
        t22 = (
            self.c21 * (i11 * self.c21 + i12 * self.c22)
            + self.c22 * (i12 * self.c21 + i22 * self.c22)
        )
        t12 = (
            self.c11 * (i11 * self.c21 + i12 * self.c22)
            + self.c12 * (i12 * self.c21 + i22 * self.c22)
        )
        return (self.a11 - t11) * (self.a22 - t22) - (self.a12 - t12) ** 2

    def homodyne(self, theta: float) -> float:
        cos, sin = math.cos(theta), math.sin(theta)
        ubu = self.b11 * cos * cos + 2.0 * self.b12 * cos * sin + self.b22 * sin * sin
        w1 = self.c11 * cos + self.c12 * sin
        w2 = self.c21 * cos + self.c22 * sin
        return (self.a11 - w1 * w1 / ubu) * (self.a22 - w2 * w2 / ubu) - (
            self.a12 - w1 * w2 / ubu
        ) ** 2

    def best_at_angle(self, theta: float, bound: float = 12.0) -> float:
        # optima can sit at extreme finite squeezing, dipping below the
        # homodyne limit, so refine every local basin of the inner grid
        grid = np.linspace(-bound, bound, 33)
        values = [self.finite(theta, ls) for ls in grid]
        n = len(grid)
        best = min(min(values), self.homodyne(theta))
        for i in range(n):
            left = values[i - 1] if i > 0 else math.inf
            right = values[i + 1] if i < n - 1 else math.inf
            if values[i] <= left and values[i] <= right:
                res = scipy.optimize.minimize_scalar(
                    lambda ls: self.finite(theta, ls),
                    bounds=(grid[max(i - 1, 0)], grid[min(i + 1, n - 1)]),
                    method="bounded",
                    options={"xatol": 1e-12},
                )
                best = min(best, float(res.fun))
        return best


def conditional_determinant(sigma_dd: np.ndarray, theta: float, log_s: float) -> float:
    return _ConditionalDeterminant(sigma_dd).finite(theta, log_s)


def homodyne_determinant(sigma_dd: np.ndarray, theta: float) -> float:
    return _ConditionalDeterminant(sigma_dd).homodyne(theta)


def minimal_conditional_determinant(sigma_dd: np.ndarray) -> float:
    """Global minimum over single-mode Gaussian measurements.

    Nested minimisation: for each measurement angle the squeezing is
    optimised in one dimension (finite window plus the exact homodyne
    limit); the angle landscape is periodic and multimodal, so every
    local basin of the angle grid is refined.
    """
    cond = _ConditionalDeterminant(sigma_dd)
    n_grid = 721
    thetas = np.linspace(0.0, math.pi, n_grid, endpoint=False)
    values = np.array([cond.best_at_angle(t) for t in thetas])
    step = thetas[1] - thetas[0]
    basins = [
        i
        for i in range(n_grid)
        if values[i] <= values[(i - 1) % n_grid] and values[i] <= values[(i + 1) % n_grid]
    ]
    best = float(values.min())
    for idx in basins:
        res = scipy.optimize.minimize_scalar(
            cond.best_at_angle,
            bounds=(thetas[idx] - step, thetas[idx] + step),
            method="bounded",
            options={"xatol": 1e-11},
        )
        best = min(best, float(res.fun))
    return best


def discord_by_measurement(sigma_dd: np.ndarray, direction: str = "1:2") -> float:
    """Gaussian discord from the defining extremisation.

    direction "1:2" measures subsystem 2; "2:1" swaps the roles first.
    """
    sigma_dd = np.asarray(sigma_dd, dtype=float)
    if direction == "2:1":
        swap = np.zeros((4, 4))
        swap[0, 2] = swap[1, 3] = swap[2, 0] = swap[3, 1] = 1.0
        sigma_dd = swap @ sigma_dd @ swap.T
    measured = sigma_dd[2:, 2:]
    e_min = minimal_conditional_determinant(sigma_dd)
    value = (
        entropy_bits(math.sqrt(float(np.linalg.det(measured))))
        - vn_entropy_direct(sigma_dd)
        + entropy_bits(math.sqrt(max(e_min, 1.0)))
    )
    return max(value, 0.0)


def random_physical_two_mode(rng: np.random.Generator, scale: float = 1.0) -> np.ndarray:
    """Random symplectic conjugation of a random two-mode thermal state."""
    nus = 1.0 + rng.uniform(0.0, 2.0, size=2)
    sigma = np.diag(np.repeat(nus, 2))
    m = rng.uniform(-scale, scale, size=(4, 4))
    m = 0.5 * (m + m.T)
    delta = np.zeros((4, 4))
    for i in range(2):
        delta[2 * i, 2 * i + 1] = 1.0
        delta[2 * i + 1, 2 * i] = -1.0
    s = scipy.linalg.expm(delta @ m)
    return s @ sigma @ s.T


def random_physical_single_mode(rng: np.random.Generator, scale: float = 1.0) -> np.ndarray:
    nu = 1.0 + rng.uniform(0.0, 2.0)
    sigma = nu * np.eye(2)
    m = rng.uniform(-scale, scale, size=(2, 2))
    m = 0.5 * (m + m.T)
    delta = np.array([[0.0, 1.0], [-1.0, 0.0]])
    s = scipy.linalg.expm(delta @ m)
    return s @ sigma @ s.T
