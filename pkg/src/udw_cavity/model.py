"""Physical model: cavity modes, detector worldlines, switching functions,
and assembly of the quadratic-Hamiltonian coefficient matrix.

Units are natural (hbar = c = 1).  The global phase-space ordering is
detectors first, then field modes, (q, p) within each pair; the coupling
is of the X-X type, so only detector q rows carry interaction entries.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .gaussian import make_squeezed_cov, thermal_variance


def unruh_temperature(acceleration: float) -> float:
    """Effective thermal temperature seen by a uniformly accelerated detector."""
    return acceleration / (2.0 * math.pi)


# ---------------------------------------------------------------------------
# Cavity and modes


@dataclass(frozen=True)
class CavitySpec:
    """A 1-D cavity for a massless scalar field.

    ``mode_count`` is the total number of retained oscillator modes.  With
    periodic boundaries and ``include_negative_modes`` the set is built as
    +/- wave-number pairs (plus one extra positive mode when the count is
    odd) so that both left- and right-movers are present.

    ``include_zero_mode`` adds the field's uniform (k = 0) component of a
    periodic cavity as a free-particle subsystem.  Without it the retained
    basis is causally incomplete: the detector-to-detector influence keeps
    an instantaneous piece of order t/L that no oscillator-mode refinement
    removes, which matters for light-cone checks.  It is off by default
    because the uniform channel is distance-independent and, under long
    constant coupling, grows ballistically, swamping the oscillator-sector
    correlations the sweep scenarios study.
    """

    length: float
    boundary: str = "periodic"  # or "reflecting"
    mode_count: int = 40
    include_negative_modes: bool = True
    include_zero_mode: bool = False

    def __post_init__(self):
        if self.length <= 0:
            raise ValueError(f"cavity length must be positive, got {self.length}")
        if self.boundary not in ("reflecting", "periodic"):
            raise ValueError(f"unknown boundary {self.boundary!r}")
        if self.mode_count < 1:
            raise ValueError(f"mode count must be at least 1, got {self.mode_count}")
        if self.boundary == "reflecting":
            if self.include_negative_modes:
                raise ValueError("reflecting cavities have no negative wave numbers")
            if self.include_zero_mode:
                raise ValueError("reflecting cavities have no zero mode")

    @property
    def has_zero_mode(self) -> bool:
        return self.include_zero_mode

    def mode_indices(self) -> list[int]:
        if self.boundary == "periodic" and self.include_negative_modes:
            indices = []
            n = 1
            while len(indices) < self.mode_count:
                indices.append(n)
                if len(indices) < self.mode_count:
                    indices.append(-n)
                n += 1
            return indices
        return list(range(1, self.mode_count + 1))


@dataclass(frozen=True)
class ModeSpec:
    """One retained field mode: integer index, wave vector, frequency."""

    index: int
    wave_vector: float
    frequency: float


def cavity_modes(cavity: CavitySpec) -> list[ModeSpec]:
    # k is built as n * (base wavenumber) so resonances like
    # 2*pi*3/(4*pi) = 3/2 come out exact in floating point.
    if cavity.boundary == "periodic":
        base = 2.0 * math.pi / cavity.length
    else:
        base = math.pi / cavity.length
    modes = []
    for n in cavity.mode_indices():
        k = n * base
        modes.append(ModeSpec(index=n, wave_vector=k, frequency=abs(k)))
    return modes


def mode_function(mode: ModeSpec, x: float, cavity: CavitySpec) -> complex:
    """Spatial mode amplitude at position x inside the cavity."""
    if not 0.0 <= x <= cavity.length:
        raise ValueError(f"position {x!r} outside cavity [0, {cavity.length}]")
    norm = 1.0 / math.sqrt(mode.frequency * cavity.length)
    if cavity.boundary == "reflecting":
        return complex(math.sin(mode.wave_vector * x) * norm, 0.0)
    return complex(
        math.cos(mode.wave_vector * x) * norm, math.sin(mode.wave_vector * x) * norm
    )


def wrap_position(x: float, cavity: CavitySpec) -> float:
    """Map a coordinate onto the cavity for periodic boundaries."""
    if cavity.boundary != "periodic":
        return x
    return x % cavity.length


# ---------------------------------------------------------------------------
# Worldlines


class Worldline:
    """Trajectory of a detector through flat space-time."""

    def position(self, t: float) -> float:
        raise NotImplementedError

    def proper_time(self, t: float) -> float:
        raise NotImplementedError

    def redshift(self, t: float) -> float:
        """d tau / d t at coordinate time t."""
        raise NotImplementedError

    def coordinate_time(self, tau: float) -> float:
        raise NotImplementedError


@dataclass(frozen=True)
class StationaryWorldline(Worldline):
    x0: float

    def position(self, t: float) -> float:
        return self.x0

    def proper_time(self, t: float) -> float:
        return t

    def redshift(self, t: float) -> float:
        return 1.0

    def coordinate_time(self, tau: float) -> float:
        return tau


@dataclass(frozen=True)
class UniformAccelerationWorldline(Worldline):
    """Hyperbolic motion with proper acceleration a, starting at rest at x0.

    ``direction`` is +1 or -1 and picks which way the detector moves.
    """

    acceleration: float
    x0: float
    direction: int = 1

    def __post_init__(self):
        if self.acceleration <= 0:
            raise ValueError(
                f"proper acceleration must be positive, got {self.acceleration}"
            )
        if self.direction not in (1, -1):
            raise ValueError(f"direction must be +1 or -1, got {self.direction}")

    def position(self, t: float) -> float:
        a = self.acceleration
        return self.x0 + self.direction * (math.sqrt(1.0 + (a * t) ** 2) - 1.0) / a

    def proper_time(self, t: float) -> float:
        a = self.acceleration
        return math.asinh(a * t) / a

    def redshift(self, t: float) -> float:
        return 1.0 / math.sqrt(1.0 + (self.acceleration * t) ** 2)

    def coordinate_time(self, tau: float) -> float:
        a = self.acceleration
        return math.sinh(a * tau) / a


def worldline_eval(w: Worldline, t: float) -> tuple[float, float, float]:
    """(position, proper time, d tau/d t) at coordinate time t."""
    return w.position(t), w.proper_time(t), w.redshift(t)


# ---------------------------------------------------------------------------
# Switching functions


class SwitchingFunction:
    def __call__(self, tau: float) -> float:
        raise NotImplementedError


@dataclass(frozen=True)
class ConstantSwitching(SwitchingFunction):
    lambda0: float

    def __call__(self, tau: float) -> float:
        return self.lambda0


@dataclass(frozen=True)
class GaussianSwitching(SwitchingFunction):
    """Coupling lambda0 * exp(-(tau - tau0)^2 / (2 width)) in proper time."""

    lambda0: float
    tau0: float
    width: float = 1.0

    def __post_init__(self):
        if self.width <= 0:
            raise ValueError(f"switching width must be positive, got {self.width}")

    def __call__(self, tau: float) -> float:
        return self.lambda0 * math.exp(-((tau - self.tau0) ** 2) / (2.0 * self.width))


# ---------------------------------------------------------------------------
# Detectors and the full system


@dataclass(frozen=True)
class DetectorSpec:
    """A harmonic-oscillator detector riding a worldline.

    The same switching function couples the detector to every retained
    mode (a per-mode profile would slot in here if ever needed).
    ``initial_squeezing`` replaces the detector's vacuum initial block by a
    squeezed one; 0 keeps the vacuum.
    """

    frequency: float
    worldline: Worldline
    coupling: SwitchingFunction
    initial_squeezing: float = 0.0

    def __post_init__(self):
        if self.frequency <= 0:
            raise ValueError(f"detector frequency must be positive, got {self.frequency}")


@dataclass(frozen=True)
class FieldInitial:
    kind: str = "vacuum"  # or "thermal"
    temperature: float = 0.0

    def __post_init__(self):
        if self.kind not in ("vacuum", "thermal"):
            raise ValueError(f"unknown field initial state {self.kind!r}")
        if self.kind == "thermal" and self.temperature < 0:
            raise ValueError(f"temperature must be nonnegative, got {self.temperature}")


@dataclass(frozen=True)
class SystemSpec:
    cavity: CavitySpec
    detectors: tuple[DetectorSpec, ...]
    field_initial: FieldInitial = field(default_factory=FieldInitial)

    def __post_init__(self):
        if not self.detectors:
            raise ValueError("at least one detector required")
        object.__setattr__(self, "detectors", tuple(self.detectors))

    @property
    def n_detectors(self) -> int:
        return len(self.detectors)

    @property
    def n_modes(self) -> int:
        """Oscillator modes; the zero mode, when present, sits after them."""
        return self.cavity.mode_count

    @property
    def n_field_subsystems(self) -> int:
        return self.n_modes + (1 if self.cavity.has_zero_mode else 0)

    @property
    def n_subsystems(self) -> int:
        return self.n_detectors + self.n_field_subsystems

    @property
    def dim(self) -> int:
        return 2 * self.n_subsystems


def validate_positions(system: SystemSpec, t_max: float) -> None:
    """Check every detector stays inside the cavity over [0, t_max].

    Periodic cavities wrap, so only reflecting ones can be violated.  The
    worldlines here are monotone in position, so endpoints suffice.
    """
    if system.cavity.boundary == "periodic":
        return
    length = system.cavity.length
    for j, det in enumerate(system.detectors):
        for t in (0.0, t_max):
            x = det.worldline.position(t)
            if not 0.0 <= x <= length:
                raise ValueError(
                    f"detector {j} leaves the cavity: x({t:g}) = {x:g} "
                    f"outside [0, {length:g}]"
                )


def assemble_f_sys(t: float, system: SystemSpec, modes: list[ModeSpec] | None = None) -> np.ndarray:
    """Symmetric coefficient matrix F(t) of H = (1/2) X^T F X at coordinate time t.

    Diagonal entries carry the (redshifted) detector and mode frequencies;
    the X-X interaction fills the detector-q rows and columns with
    2 lambda_j(tau_j) (d tau_j/d t) times the mode function at the
    detector's position.  The zero mode of a periodic cavity contributes a
    free-particle block diag(0, 1) and couples through the uniform
    amplitude 1/sqrt(L).
    """
    if modes is None:
        modes = cavity_modes(system.cavity)
    m = system.n_detectors
    zero = system.cavity.has_zero_mode
    n = len(modes) + (1 if zero else 0)
    dim = 2 * (m + n)
    f = np.zeros((dim, dim))
    for i, mode in enumerate(modes):
        f[2 * (m + i), 2 * (m + i)] = mode.frequency
        f[2 * (m + i) + 1, 2 * (m + i) + 1] = mode.frequency
    if zero:
        f[dim - 1, dim - 1] = 1.0
    zero_amp = 1.0 / math.sqrt(system.cavity.length)
    for j, det in enumerate(system.detectors):
        x, tau, dtaudt = worldline_eval(det.worldline, t)
        x = wrap_position(x, system.cavity)
        lam = det.coupling(tau)
        qd = 2 * j
        f[qd, qd] = dtaudt * det.frequency
        f[qd + 1, qd + 1] = dtaudt * det.frequency
        weight = 2.0 * lam * dtaudt
        for i, mode in enumerate(modes):
            v = mode_function(mode, x, system.cavity)
            qn = 2 * (m + i)
            f[qd, qn] = weight * v.real
            f[qn, qd] = f[qd, qn]
            f[qd, qn + 1] = -weight * v.imag
            f[qn + 1, qd] = f[qd, qn + 1]
        if zero:
            f[qd, dim - 2] = weight * zero_amp
            f[dim - 2, qd] = f[qd, dim - 2]
    return f


def initial_state(system: SystemSpec) -> np.ndarray:
    """Initial covariance: detector blocks (vacuum or squeezed) + field block.

    The zero mode of a periodic cavity has no normalisable vacuum or
    thermal state; it starts in the unit-covariance Gaussian.  Detector
    reduced states are insensitive to that choice at the influence level
    (the propagator, not the initial state, carries the channel).
    """
    dim = system.dim
    sigma = np.eye(dim)
    for j, det in enumerate(system.detectors):
        if det.initial_squeezing != 0.0:
            sigma[2 * j : 2 * j + 2, 2 * j : 2 * j + 2] = make_squeezed_cov(
                det.initial_squeezing
            )
    if system.field_initial.kind == "thermal":
        temperature = system.field_initial.temperature
        for i, mode in enumerate(cavity_modes(system.cavity)):
            v = thermal_variance(mode.frequency, temperature)
            pos = 2 * (system.n_detectors + i)
            sigma[pos, pos] = v
            sigma[pos + 1, pos + 1] = v
    return sigma
