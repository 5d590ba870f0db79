"""Numerical integration of the propagator equation dS/dt = Delta F(t) S.

The default method is fixed-step RK4 running in the compiled kernel if it
was built (pure-Python fallback otherwise; ``UDW_SIM_PURE_PYTHON=1`` forces
the fallback).  Symplecticity is monitored at every retained sample and
drift beyond tolerance aborts the run.  For time-independent generators
``matrix_exponential_oracle`` provides an independent closed-form check.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field, replace

import numpy as np
import scipy.linalg

from . import _kernel_py
from .errors import DriftError, NumericalError
from .gaussian import propagate_cov, symplectic_form, symplecticity_residual
from .model import SystemSpec, assemble_f_sys


def _select_backend():
    if os.environ.get("UDW_SIM_PURE_PYTHON"):
        return _kernel_py
    try:
        from . import _kernel  # compiled extension, optional

        return _kernel
    except ImportError:
        return _kernel_py


_BACKEND = _select_backend()


def backend_name() -> str:
    return _BACKEND.BACKEND_NAME


@dataclass(frozen=True)
class IntegratorConfig:
    method: str = "rk4"  # or "rk45"
    step: float = 1e-3
    drift_tolerance: float = 1e-6
    sample_times: tuple[float, ...] = ()

    def __post_init__(self):
        if self.method not in ("rk4", "rk45"):
            raise ValueError(f"unknown integrator method {self.method!r}")
        if self.step <= 0:
            raise ValueError(f"integrator step must be positive, got {self.step}")
        if self.drift_tolerance <= 0:
            raise ValueError("drift tolerance must be positive")
        times = tuple(float(t) for t in self.sample_times)
        if any(t < 0 for t in times):
            raise ValueError("sample times must be nonnegative")
        if any(b < a for a, b in zip(times, times[1:])):
            raise ValueError("sample times must be nondecreasing")
        object.__setattr__(self, "sample_times", times)

    def with_samples(self, times) -> "IntegratorConfig":
        return replace(self, sample_times=tuple(float(t) for t in times))


@dataclass
class EvolutionTrace:
    """Propagator samples along one integration."""

    times: np.ndarray
    matrices: np.ndarray  # (n_samples, 2K, 2K)
    drift_residuals: np.ndarray
    drift_tolerance: float

    def __len__(self) -> int:
        return len(self.times)


def _lattice_samples(times: np.ndarray, h: float) -> tuple[np.ndarray, np.ndarray]:
    """Split sample times into (lattice index, partial step), delta in [0, h)."""
    ks = np.floor(times / h).astype(np.int64)
    deltas = times - ks * h
    high = deltas >= h
    ks[high] += 1
    low = (times - ks * h) < 0.0
    ks[low] -= 1
    deltas = times - ks * h
    np.clip(deltas, 0.0, None, out=deltas)
    return ks, deltas


def integrate_s(system: SystemSpec, config: IntegratorConfig) -> EvolutionTrace:
    """Integrate the propagator from S(0) = I, sampling at the configured times."""
    if not config.sample_times:
        raise ValueError("integrator config has an empty sample grid")
    times = np.asarray(config.sample_times)
    low = _kernel_py.lower_system(system)
    if config.method == "rk4":
        ks, deltas = _lattice_samples(times, config.step)
        matrices = _BACKEND.integrate_rk4(low, config.step, ks, deltas)
    else:
        matrices = _integrate_rk45(low, times)
    residuals = np.array([symplecticity_residual(s) for s in matrices])
    worst = int(np.argmax(residuals))
    if residuals[worst] > config.drift_tolerance:
        raise DriftError(float(times[worst]), float(residuals[worst]), config.drift_tolerance)
    return EvolutionTrace(
        times=times,
        matrices=matrices,
        drift_residuals=residuals,
        drift_tolerance=config.drift_tolerance,
    )


def _integrate_rk45(low: _kernel_py.LoweredSystem, times: np.ndarray) -> np.ndarray:
    from scipy.integrate import solve_ivp

    dim = low.dim
    rhs = _kernel_py.make_rhs(low)
    buf = np.empty((dim, dim))

    def fun(t, y):
        return rhs(t, y.reshape(dim, dim), buf).ravel().copy()

    t_end = float(times[-1]) if times[-1] > 0 else 1e-12
    sol = solve_ivp(
        fun,
        (0.0, t_end),
        np.eye(dim).ravel(),
        method="RK45",
        t_eval=np.clip(times, 0.0, t_end),
        rtol=1e-10,
        atol=1e-12,
    )
    if not sol.success:
        raise NumericalError(f"adaptive integration failed: {sol.message}")
    return sol.y.T.reshape(len(times), dim, dim).copy()


def matrix_exponential_oracle(f_sys: np.ndarray, t: float) -> np.ndarray:
    """exp(Delta F t) for a time-independent generator (scaling-and-squaring)."""
    f_sys = np.asarray(f_sys, dtype=float)
    delta = symplectic_form(f_sys.shape[0] // 2)
    return scipy.linalg.expm(delta @ f_sys * t)


def constant_f_sys(system: SystemSpec) -> np.ndarray:
    """F(t=0), valid for all t when worldlines are stationary and couplings constant."""
    return assemble_f_sys(0.0, system)


def evolve_covariance(trace: EvolutionTrace, sigma0: np.ndarray) -> list[tuple[float, np.ndarray]]:
    """Apply every sampled propagator to an initial covariance matrix."""
    sigma0 = np.asarray(sigma0, dtype=float)
    out = []
    for t, s in zip(trace.times, trace.matrices):
        out.append((float(t), propagate_cov(s, sigma0, trace.drift_tolerance, time=float(t))))
    return out
