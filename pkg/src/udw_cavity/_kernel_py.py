"""Pure-Python propagation backend (and shared system lowering).

The compiled extension in ``_kernel.pyx`` implements the same contract;
either backend integrates dS/dt = A(t) S with A = Delta F(t), stepping on
a fixed lattice t_k = k h and recording samples by short side-steps so
requested sample times never perturb the trajectory.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .model import (
    ConstantSwitching,
    GaussianSwitching,
    StationaryWorldline,
    SystemSpec,
    UniformAccelerationWorldline,
    cavity_modes,
)

BACKEND_NAME = "python"

WL_STATIONARY = 0
WL_UNIFORM_ACCELERATION = 1
SW_CONSTANT = 0
SW_GAUSSIAN = 1


@dataclass(frozen=True)
class LoweredSystem:
    """Flat numeric description of a SystemSpec, ready for the hot loop.

    The mode arrays cover the oscillator modes plus, for periodic
    cavities, one trailing zero-mode entry with k = 0, uniform amplitude
    1/sqrt(L), and free-particle diagonal (wq, wp) = (0, 1).
    """

    n_detectors: int
    n_modes: int  # including the zero-mode entry when present
    det_omega: np.ndarray
    wl_kind: np.ndarray
    wl_a: np.ndarray
    wl_x0: np.ndarray
    wl_dir: np.ndarray
    sw_kind: np.ndarray
    sw_l0: np.ndarray
    sw_tau0: np.ndarray
    sw_width: np.ndarray
    mode_k: np.ndarray
    mode_wq: np.ndarray
    mode_wp: np.ndarray
    mode_norm: np.ndarray
    reflecting: int

    @property
    def dim(self) -> int:
        return 2 * (self.n_detectors + self.n_modes)


def lower_system(system: SystemSpec) -> LoweredSystem:
    modes = cavity_modes(system.cavity)
    m = system.n_detectors
    det_omega = np.empty(m)
    wl_kind = np.zeros(m, dtype=np.int64)
    wl_a = np.zeros(m)
    wl_x0 = np.zeros(m)
    wl_dir = np.ones(m)
    sw_kind = np.zeros(m, dtype=np.int64)
    sw_l0 = np.zeros(m)
    sw_tau0 = np.zeros(m)
    sw_width = np.ones(m)
    for j, det in enumerate(system.detectors):
        det_omega[j] = det.frequency
        wl = det.worldline
        if isinstance(wl, StationaryWorldline):
            wl_kind[j] = WL_STATIONARY
            wl_x0[j] = wl.x0
        elif isinstance(wl, UniformAccelerationWorldline):
            wl_kind[j] = WL_UNIFORM_ACCELERATION
            wl_a[j] = wl.acceleration
            wl_x0[j] = wl.x0
            wl_dir[j] = float(wl.direction)
        else:
            raise TypeError(f"unsupported worldline type {type(wl).__name__}")
        sw = det.coupling
        if isinstance(sw, ConstantSwitching):
            sw_kind[j] = SW_CONSTANT
            sw_l0[j] = sw.lambda0
        elif isinstance(sw, GaussianSwitching):
            sw_kind[j] = SW_GAUSSIAN
            sw_l0[j] = sw.lambda0
            sw_tau0[j] = sw.tau0
            sw_width[j] = sw.width
        else:
            raise TypeError(f"unsupported switching type {type(sw).__name__}")
    length = system.cavity.length
    mode_k = [mode.wave_vector for mode in modes]
    mode_wq = [mode.frequency for mode in modes]
    mode_wp = [mode.frequency for mode in modes]
    mode_norm = [1.0 / math.sqrt(mode.frequency * length) for mode in modes]
    if system.cavity.has_zero_mode:
        mode_k.append(0.0)
        mode_wq.append(0.0)
        mode_wp.append(1.0)
        mode_norm.append(1.0 / math.sqrt(length))
    return LoweredSystem(
        n_detectors=m,
        n_modes=len(mode_k),
        det_omega=det_omega,
        wl_kind=wl_kind,
        wl_a=wl_a,
        wl_x0=wl_x0,
        wl_dir=wl_dir,
        sw_kind=sw_kind,
        sw_l0=sw_l0,
        sw_tau0=sw_tau0,
        sw_width=sw_width,
        mode_k=np.array(mode_k),
        mode_wq=np.array(mode_wq),
        mode_wp=np.array(mode_wp),
        mode_norm=np.array(mode_norm),
        reflecting=int(system.cavity.boundary == "reflecting"),
    )


def make_rhs(low: LoweredSystem):
    """Right-hand side A(t) S of the propagator equation, filled in place.

    A = Delta F has the sparsity of the coupling problem: detector q rows
    see only their own p, detector p rows gather all mode rows, and mode
    rows mix their partner quadrature with the detector q rows.
    """
    m, n = low.n_detectors, low.n_modes
    dim = low.dim
    qm = slice(2 * m, dim, 2)
    pm = slice(2 * m + 1, dim, 2)
    g = np.empty((m, n))
    hh = np.empty((m, n))
    diag = np.empty(m)

    def rhs(t: float, s: np.ndarray, out: np.ndarray) -> np.ndarray:
        for j in range(m):
            if low.wl_kind[j] == WL_UNIFORM_ACCELERATION:
                a = low.wl_a[j]
                u = a * t
                root = math.sqrt(1.0 + u * u)
                dtaudt = 1.0 / root
                tau = math.asinh(u) / a
                x = low.wl_x0[j] + low.wl_dir[j] * (root - 1.0) / a
            else:
                dtaudt = 1.0
                tau = t
                x = low.wl_x0[j]
            if low.sw_kind[j] == SW_GAUSSIAN:
                d = tau - low.sw_tau0[j]
                lam = low.sw_l0[j] * math.exp(-d * d / (2.0 * low.sw_width[j]))
            else:
                lam = low.sw_l0[j]
            c = 2.0 * lam * dtaudt
            diag[j] = dtaudt * low.det_omega[j]
            arg = low.mode_k * x
            if low.reflecting:
                g[j] = c * np.sin(arg) * low.mode_norm
                hh[j] = 0.0
            else:
                g[j] = c * np.cos(arg) * low.mode_norm
                hh[j] = -c * np.sin(arg) * low.mode_norm
        s_qm = s[qm]
        s_pm = s[pm]
        out[qm] = low.mode_wp[:, None] * s_pm
        out[pm] = -low.mode_wq[:, None] * s_qm
        for j in range(m):
            out[2 * j] = diag[j] * s[2 * j + 1]
            out[2 * j + 1] = -diag[j] * s[2 * j] - g[j] @ s_qm - hh[j] @ s_pm
            out[qm] += hh[j][:, None] * s[2 * j]
            out[pm] -= g[j][:, None] * s[2 * j]
        return out

    return rhs


def rk4_drive(rhs, dim: int, h: float, sample_ks: np.ndarray, sample_deltas: np.ndarray) -> np.ndarray:
    """Integrate from the identity on the lattice k h, recording each sample.

    A sample (k, delta) is taken by a single disposable RK4 step of size
    delta from the lattice state at t = k h, so coarse and fine sample
    grids sharing a time produce bit-identical matrices.
    """
    n_samples = len(sample_ks)
    out = np.empty((n_samples, dim, dim))
    s = np.eye(dim)
    k1 = np.empty((dim, dim))
    k2 = np.empty((dim, dim))
    k3 = np.empty((dim, dim))
    k4 = np.empty((dim, dim))
    ytmp = np.empty((dim, dim))

    def step(t: float, y: np.ndarray, dt: float) -> np.ndarray:
        rhs(t, y, k1)
        np.multiply(k1, 0.5 * dt, out=ytmp)
        np.add(ytmp, y, out=ytmp)
        rhs(t + 0.5 * dt, ytmp, k2)
        np.multiply(k2, 0.5 * dt, out=ytmp)
        np.add(ytmp, y, out=ytmp)
        rhs(t + 0.5 * dt, ytmp, k3)
        np.multiply(k3, dt, out=ytmp)
        np.add(ytmp, y, out=ytmp)
        rhs(t + dt, ytmp, k4)
        np.add(k2, k3, out=k2)
        np.multiply(k2, 2.0, out=k2)
        np.add(k1, k4, out=k1)
        np.add(k1, k2, out=k1)
        return y + (dt / 6.0) * k1

    ptr = 0
    last_k = int(sample_ks[-1]) if n_samples else 0
    for k in range(last_k + 1):
        t = k * h
        while ptr < n_samples and sample_ks[ptr] == k:
            delta = sample_deltas[ptr]
            if delta == 0.0:
                out[ptr] = s
            else:
                out[ptr] = step(t, s, delta)
            ptr += 1
        if k < last_k:
            s = step(t, s, h)
    return out


def integrate_rk4(
    low: LoweredSystem, h: float, sample_ks: np.ndarray, sample_deltas: np.ndarray
) -> np.ndarray:
    return rk4_drive(make_rhs(low), low.dim, h, sample_ks, sample_deltas)
