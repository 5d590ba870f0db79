"""Exception types shared across the simulator.

Validation problems (bad dimensions, parameters out of range, malformed
configs) raise ``ValueError`` subclasses; failures detected during a
numerical run raise ``NumericalError`` subclasses so the CLI can map them
to a distinct exit code.
"""


class ConfigError(ValueError):
    """A configuration document or override is invalid; message names the key."""


class NumericalError(RuntimeError):
    """Base class for failures detected while evolving or analysing a state."""


class UnphysicalStateError(NumericalError):
    """A covariance matrix violates the Heisenberg bound beyond tolerance."""


class DegeneracyError(NumericalError):
    """Eigenvalue moduli of the spectrum could not be paired reliably."""


class DriftError(NumericalError):
    """Symplecticity of a propagator drifted beyond the configured tolerance."""

    def __init__(self, time: float, residual: float, tolerance: float):
        self.time = time
        self.residual = residual
        self.tolerance = tolerance
        super().__init__(
            f"symplectic drift {residual:.3e} exceeds tolerance "
            f"{tolerance:.3e} at t={time:.6f}"
        )
