"""Scenario catalog, sweep execution, CSV persistence, and validation harnesses.

Each catalog scenario mirrors one of the studied detector configurations:
equal accelerations against a vacuum (fig1a), stationary detectors in a
thermal field (fig1b), opposite accelerations (fig4), constant unequal
couplings (fig5a accelerated / fig5b thermal), unequal accelerations in
the faster detector's proper time (fig8) and in coordinate time (fig11),
and the stationary light-cone check setup (fig9).

Sweep output is one CorrelationRecord per (sweep value, time sample),
written as CSV with a fixed column schema; runs are deterministic for a
fixed configuration and build regardless of worker interleaving.
"""

from __future__ import annotations

import concurrent.futures
import math
from dataclasses import dataclass, replace

import numpy as np

from .errors import NumericalError
from .evolution import IntegratorConfig, evolve_covariance, integrate_s
from .gaussian import detector as detector_index
from .gaussian import reduce_cov, symplectic_eigenvalues
from .measures import (
    TwoModeBlocks,
    excitation_probability,
    gaussian_discord,
    log_negativity,
    mutual_information,
)
from .model import (
    CavitySpec,
    ConstantSwitching,
    DetectorSpec,
    FieldInitial,
    GaussianSwitching,
    StationaryWorldline,
    SystemSpec,
    UniformAccelerationWorldline,
    initial_state,
    validate_positions,
)

RECORD_COLUMNS = (
    "scenario",
    "sweep_param",
    "sweep_value",
    "time_kind",
    "time_value",
    "e_n",
    "mi",
    "d12",
    "d21",
    "purity",
    "drift",
)

CAUSALITY_COLUMNS = ("modes", "t_c", "max_pre_deviation", "first_post_crossing")
TRACE_COLUMNS = ("time_value", "t_over_tc", "p_vacuum", "p_squeezed")

# Fraction of t_c treated as safely before causal contact (the remaining
# band absorbs light-cone smearing from the finite mode basis).
PRE_CONTACT_FRACTION = 0.95


@dataclass(frozen=True)
class Scenario:
    name: str
    description: str
    template: SystemSpec
    sweep_param: str
    sweep_values: tuple[float, ...]
    time_kind: str  # "proper" or "coordinate"
    time_grid: tuple[float, ...]
    reference_detector: int = 0
    measures: tuple[str, ...] = ("e_n", "mi", "d12", "d21")

    def __post_init__(self):
        if self.time_kind not in ("proper", "coordinate"):
            raise ValueError(f"unknown time kind {self.time_kind!r}")
        values = tuple(float(v) for v in self.sweep_values)
        if any(b <= a for a, b in zip(values, values[1:])):
            raise ValueError("sweep values must be strictly increasing")
        object.__setattr__(self, "sweep_values", values)
        object.__setattr__(self, "time_grid", tuple(float(t) for t in self.time_grid))

    def system_for(self, sweep_value: float) -> SystemSpec:
        return apply_sweep(self.template, self.sweep_param, sweep_value)

    def coordinate_samples(self, system: SystemSpec) -> list[float]:
        if self.time_kind == "coordinate":
            return list(self.time_grid)
        wl = system.detectors[self.reference_detector].worldline
        return [wl.coordinate_time(tau) for tau in self.time_grid]


@dataclass(frozen=True)
class CorrelationRecord:
    scenario: str
    sweep_param: str
    sweep_value: float
    time_kind: str
    time_value: float
    e_n: float
    mi: float
    d12: float
    d21: float
    purity: float
    drift: float


@dataclass(frozen=True)
class PointFailure:
    scenario: str
    sweep_value: float
    error: str


@dataclass
class SweepResult:
    records: list[CorrelationRecord]
    failures: list[PointFailure]


@dataclass(frozen=True)
class CausalityReport:
    modes: int
    t_c: float
    max_pre_deviation: float
    first_post_crossing: float  # nan when the deviation never crosses

    def __post_init__(self):
        if self.t_c <= 0:
            raise ValueError("causal contact time must be positive")


@dataclass(frozen=True)
class CausalityTrace:
    modes: int
    t_c: float
    times: tuple[float, ...]
    p_vacuum: tuple[float, ...]
    p_squeezed: tuple[float, ...]


@dataclass
class ConvergenceResult:
    adequate: int | None
    reference: int
    measure_deviation: dict[int, float]
    causality_pre: dict[int, float]
    tolerance: float


def apply_sweep(template: SystemSpec, param: str, value: float) -> SystemSpec:
    """Return a copy of the template with one swept parameter applied."""
    if param == "acceleration":
        dets = []
        for det in template.detectors:
            wl = det.worldline
            if isinstance(wl, UniformAccelerationWorldline):
                wl = replace(wl, acceleration=value)
            dets.append(replace(det, worldline=wl))
        return replace(template, detectors=tuple(dets))
    if param == "temperature":
        return replace(template, field_initial=FieldInitial("thermal", value))
    if param == "coupling_difference":
        if len(template.detectors) != 2:
            raise ValueError("coupling_difference needs exactly two detectors")
        couplings = [det.coupling for det in template.detectors]
        if not all(isinstance(c, ConstantSwitching) for c in couplings):
            raise ValueError("coupling_difference sweeps constant couplings only")
        base = 0.5 * (couplings[0].lambda0 + couplings[1].lambda0)
        lams = (base + 0.5 * value, base - 0.5 * value)
        if lams[1] < 0:
            raise ValueError(f"coupling difference {value} exceeds the coupling sum")
        dets = tuple(
            replace(det, coupling=ConstantSwitching(lam))
            for det, lam in zip(template.detectors, lams)
        )
        return replace(template, detectors=dets)
    if param == "acceleration_difference":
        if len(template.detectors) != 2:
            raise ValueError("acceleration_difference needs exactly two detectors")
        first = template.detectors[0].worldline
        second = template.detectors[1].worldline
        if not (
            isinstance(first, UniformAccelerationWorldline)
            and isinstance(second, UniformAccelerationWorldline)
        ):
            raise ValueError("acceleration_difference needs accelerated worldlines")
        second = replace(second, acceleration=first.acceleration + value)
        dets = (
            template.detectors[0],
            replace(template.detectors[1], worldline=second),
        )
        return replace(template, detectors=dets)
    if param == "modes":
        count = int(round(value))
        if abs(value - count) > 1e-9 or count < 1:
            raise ValueError(f"mode count sweep needs positive integers, got {value}")
        return replace(template, cavity=replace(template.cavity, mode_count=count))
    raise ValueError(f"unknown sweep parameter {param!r}")


# ---------------------------------------------------------------------------
# Catalog

CAVITY_LENGTH = 4.0 * math.pi
DETECTOR_FREQUENCY = 1.5
GAUSSIAN_PEAK = 0.05
GAUSSIAN_CENTER = 1.5
# Light-cone harness coupling: weak enough that ten +/- mode pairs keep
# pre-contact influence below 1e-5 while the post-contact signal clears
# 1e-3 (the scenarios' default 0.05 needs ~40 modes for the same bound).
CAUSALITY_COUPLING = 0.013
CAUSALITY_SQUEEZING = 5.0


def _default_cavity(**overrides) -> CavitySpec:
    kwargs = dict(length=CAVITY_LENGTH, boundary="periodic", mode_count=40)
    kwargs.update(overrides)
    return CavitySpec(**kwargs)


def _gaussian_detector(x0: float, acceleration: float | None = None,
                       direction: int = 1, width: float = 1.0) -> DetectorSpec:
    if acceleration is None:
        worldline = StationaryWorldline(x0)
    else:
        worldline = UniformAccelerationWorldline(acceleration, x0, direction)
    return DetectorSpec(
        frequency=DETECTOR_FREQUENCY,
        worldline=worldline,
        coupling=GaussianSwitching(GAUSSIAN_PEAK, GAUSSIAN_CENTER, width),
    )


def _grid(lo: float, hi: float, n: int) -> tuple[float, ...]:
    return tuple(float(v) for v in np.linspace(lo, hi, n))


def catalog(sweep_points: int = 40, time_samples: int = 60) -> list[Scenario]:
    """Built-in scenarios sharing the reference cavity and detector parameters."""
    pi = math.pi
    scenarios = []

    scenarios.append(
        Scenario(
            name="fig1a",
            description="equal accelerations (swept from 0.1), separation pi, vacuum field",
            template=SystemSpec(
                cavity=_default_cavity(),
                detectors=(
                    _gaussian_detector(0.0, acceleration=0.1),
                    _gaussian_detector(pi, acceleration=0.1),
                ),
            ),
            sweep_param="acceleration",
            sweep_values=_grid(0.1, 1.0, sweep_points),
            time_kind="proper",
            time_grid=_grid(0.0, 6.0, time_samples),
        )
    )

    scenarios.append(
        Scenario(
            name="fig1b",
            description="stationary detectors at pi and 2pi in a thermal field (T swept from 0.1)",
            template=SystemSpec(
                cavity=_default_cavity(),
                detectors=(_gaussian_detector(pi), _gaussian_detector(2 * pi)),
                field_initial=FieldInitial("thermal", 0.1),
            ),
            sweep_param="temperature",
            sweep_values=_grid(0.1, 1.5, sweep_points),
            time_kind="proper",
            time_grid=_grid(0.0, 6.0, time_samples),
        )
    )

    scenarios.append(
        Scenario(
            name="fig4",
            description="opposite accelerations, both starting at 2pi, narrower switching",
            template=SystemSpec(
                cavity=_default_cavity(),
                detectors=(
                    _gaussian_detector(2 * pi, acceleration=0.1, direction=1, width=0.5),
                    _gaussian_detector(2 * pi, acceleration=0.1, direction=-1, width=0.5),
                ),
            ),
            sweep_param="acceleration",
            sweep_values=_grid(0.1, 1.0, sweep_points),
            time_kind="proper",
            time_grid=_grid(0.0, 6.0, time_samples),
        )
    )

    coupling_sum = 0.4
    for name, detectors, field, desc in (
        (
            "fig5a",
            (
                DetectorSpec(DETECTOR_FREQUENCY, UniformAccelerationWorldline(0.2, 0.0),
                             ConstantSwitching(coupling_sum / 2)),
                DetectorSpec(DETECTOR_FREQUENCY, UniformAccelerationWorldline(0.2, pi),
                             ConstantSwitching(coupling_sum / 2)),
            ),
            FieldInitial(),
            "equal accelerations 0.2, constant couplings, sweep of the coupling difference",
        ),
        (
            "fig5b",
            (
                DetectorSpec(DETECTOR_FREQUENCY, StationaryWorldline(pi),
                             ConstantSwitching(coupling_sum / 2)),
                DetectorSpec(DETECTOR_FREQUENCY, StationaryWorldline(2 * pi),
                             ConstantSwitching(coupling_sum / 2)),
            ),
            FieldInitial("thermal", 0.1),
            "stationary detectors in a T=0.1 field, constant couplings, coupling-difference sweep",
        ),
    ):
        scenarios.append(
            Scenario(
                name=name,
                description=desc,
                template=SystemSpec(
                    cavity=_default_cavity(), detectors=detectors, field_initial=field
                ),
                sweep_param="coupling_difference",
                sweep_values=_grid(0.0, 0.8 * coupling_sum, sweep_points),
                time_kind="proper",
                time_grid=_grid(0.0, 6.0, time_samples),
            )
        )

    fig8_template = SystemSpec(
        cavity=_default_cavity(),
        detectors=(
            _gaussian_detector(0.0, acceleration=0.1),
            _gaussian_detector(pi, acceleration=0.1),
        ),
    )
    scenarios.append(
        Scenario(
            name="fig8",
            description="unequal accelerations (0.1 vs 0.1 + difference), faster detector's proper time",
            template=fig8_template,
            sweep_param="acceleration_difference",
            sweep_values=_grid(0.0, 1.4, sweep_points),
            time_kind="proper",
            time_grid=_grid(0.0, 4.0, time_samples),
            reference_detector=1,
        )
    )

    scenarios.append(
        Scenario(
            name="fig9",
            description="stationary pair at pi and 3pi for the light-cone check (complete ring basis)",
            template=SystemSpec(
                cavity=_default_cavity(mode_count=10, include_zero_mode=True),
                detectors=(
                    DetectorSpec(DETECTOR_FREQUENCY, StationaryWorldline(pi),
                                 ConstantSwitching(CAUSALITY_COUPLING)),
                    DetectorSpec(DETECTOR_FREQUENCY, StationaryWorldline(3 * pi),
                                 ConstantSwitching(CAUSALITY_COUPLING)),
                ),
            ),
            sweep_param="modes",
            sweep_values=(7.0, 10.0),
            time_kind="coordinate",
            time_grid=_grid(0.0, 1.5 * 2 * pi, time_samples),
            measures=("p_excite",),
        )
    )

    scenarios.append(
        Scenario(
            name="fig11",
            description="unequal accelerations viewed in coordinate time (redshift-elongated)",
            template=fig8_template,
            sweep_param="acceleration_difference",
            sweep_values=_grid(0.0, 1.4, sweep_points),
            time_kind="coordinate",
            time_grid=_grid(0.0, 8.0, time_samples),
            reference_detector=1,
        )
    )
    return scenarios


def get_scenario(name: str, sweep_points: int = 40, time_samples: int = 60) -> Scenario:
    for scenario in catalog(sweep_points, time_samples):
        if scenario.name == name:
            return scenario
    raise ValueError(f"unknown scenario {name!r}")


# ---------------------------------------------------------------------------
# Sweep execution


def _point_records(
    scenario: Scenario,
    sweep_value: float,
    integrator: IntegratorConfig,
    paper_literal_discord: bool,
) -> list[CorrelationRecord]:
    system = scenario.system_for(sweep_value)
    if system.n_detectors != 2:
        raise ValueError("correlation sweeps need exactly two detectors")
    samples = scenario.coordinate_samples(system)
    validate_positions(system, max(samples))
    trace = integrate_s(system, integrator.with_samples(samples))
    sigma0 = initial_state(system)
    nu0 = symplectic_eigenvalues(sigma0)
    pair = [detector_index(0), detector_index(1)]
    records = []
    for i, (t, sigma) in enumerate(evolve_covariance(trace, sigma0)):
        blocks = TwoModeBlocks.from_cov(reduce_cov(sigma, pair, 2))
        purity = float(np.max(np.abs(symplectic_eigenvalues(sigma) - nu0)))
        records.append(
            CorrelationRecord(
                scenario=scenario.name,
                sweep_param=scenario.sweep_param,
                sweep_value=float(sweep_value),
                time_kind=scenario.time_kind,
                time_value=float(scenario.time_grid[i]),
                e_n=log_negativity(blocks),
                mi=mutual_information(blocks),
                d12=gaussian_discord(blocks, "1:2", paper_literal_discord),
                d21=gaussian_discord(blocks, "2:1", paper_literal_discord),
                purity=purity,
                drift=float(trace.drift_residuals[i]),
            )
        )
    return records


def _point_task(args):
    scenario, value, integrator, paper_literal = args
    try:
        return value, _point_records(scenario, value, integrator, paper_literal), None
    except (NumericalError, ValueError) as exc:
        return value, [], f"{type(exc).__name__}: {exc}"


def run_sweep(
    scenario: Scenario,
    integrator: IntegratorConfig | None = None,
    workers: int = 1,
    paper_literal_discord: bool = False,
    progress=None,
) -> SweepResult:
    """Run every sweep point, deterministically ordered by (value, time)."""
    integrator = integrator or IntegratorConfig()
    tasks = [
        (scenario, value, integrator, paper_literal_discord)
        for value in scenario.sweep_values
    ]
    outcomes = []
    if workers > 1 and len(tasks) > 1:
        with concurrent.futures.ProcessPoolExecutor(max_workers=workers) as pool:
            for done, outcome in enumerate(pool.map(_point_task, tasks), start=1):
                outcomes.append(outcome)
                if progress:
                    progress(done, len(tasks), outcome[0])
    else:
        for done, task in enumerate(tasks, start=1):
            outcome = _point_task(task)
            outcomes.append(outcome)
            if progress:
                progress(done, len(tasks), outcome[0])
    records: list[CorrelationRecord] = []
    failures: list[PointFailure] = []
    for value, point_records, error in outcomes:
        if error is None:
            records.extend(point_records)
        else:
            failures.append(PointFailure(scenario.name, float(value), error))
    records.sort(key=lambda r: (r.sweep_value, r.time_value))
    return SweepResult(records=records, failures=failures)


# ---------------------------------------------------------------------------
# CSV persistence


def _fmt(value) -> str:
    return repr(float(value))


def render_records_csv(records) -> str:
    lines = [",".join(RECORD_COLUMNS)]
    for r in records:
        lines.append(
            ",".join(
                (
                    r.scenario,
                    r.sweep_param,
                    _fmt(r.sweep_value),
                    r.time_kind,
                    _fmt(r.time_value),
                    _fmt(r.e_n),
                    _fmt(r.mi),
                    _fmt(r.d12),
                    _fmt(r.d21),
                    _fmt(r.purity),
                    _fmt(r.drift),
                )
            )
        )
    return "\n".join(lines) + "\n"


def write_records_csv(records, path) -> None:
    with open(path, "w", newline="") as fh:
        fh.write(render_records_csv(records))


def write_causality_csv(reports, path) -> None:
    lines = [",".join(CAUSALITY_COLUMNS)]
    for r in reports:
        lines.append(
            ",".join(
                (str(r.modes), _fmt(r.t_c), _fmt(r.max_pre_deviation), _fmt(r.first_post_crossing))
            )
        )
    with open(path, "w", newline="") as fh:
        fh.write("\n".join(lines) + "\n")


def write_trace_csv(trace: CausalityTrace, path) -> None:
    lines = [",".join(TRACE_COLUMNS)]
    for t, pv, ps in zip(trace.times, trace.p_vacuum, trace.p_squeezed):
        lines.append(",".join((_fmt(t), _fmt(t / trace.t_c), _fmt(pv), _fmt(ps))))
    with open(path, "w", newline="") as fh:
        fh.write("\n".join(lines) + "\n")


# ---------------------------------------------------------------------------
# Causality and convergence harnesses


def _stationary_harness(template: SystemSpec, squeezing: float) -> SystemSpec:
    """Pin both detectors at their initial positions; squeeze detector 2.

    For periodic cavities the uniform field mode is switched on so the
    retained basis is causally complete (its omission leaks an
    instantaneous channel that defeats the light-cone comparison).
    """
    dets = []
    for j, det in enumerate(template.detectors):
        worldline = StationaryWorldline(det.worldline.position(0.0))
        dets.append(
            replace(
                det,
                worldline=worldline,
                initial_squeezing=squeezing if j == 1 else 0.0,
            )
        )
    cavity = template.cavity
    if cavity.boundary == "periodic" and not cavity.include_zero_mode:
        cavity = replace(cavity, include_zero_mode=True)
    return replace(template, cavity=cavity, detectors=tuple(dets))


def contact_time(system: SystemSpec) -> float:
    """Light-travel time between the two detectors, shorter arc for rings."""
    x1 = system.detectors[0].worldline.position(0.0)
    x2 = system.detectors[1].worldline.position(0.0)
    d = abs(x2 - x1)
    if system.cavity.boundary == "periodic":
        d = min(d, system.cavity.length - d)
    if d <= 0:
        raise ValueError("detectors are co-located; no causal contact time")
    return d


def _excitation_trace(system: SystemSpec, times, integrator: IntegratorConfig) -> np.ndarray:
    trace = integrate_s(system, integrator.with_samples(times))
    sigma0 = initial_state(system)
    idx = [detector_index(0)]
    return np.array(
        [
            excitation_probability(reduce_cov(sigma, idx, system.n_detectors))
            for _, sigma in evolve_covariance(trace, sigma0)
        ]
    )


def causality_check(
    mode_counts,
    threshold: float,
    template: SystemSpec | None = None,
    squeezing: float = CAUSALITY_SQUEEZING,
    integrator: IntegratorConfig | None = None,
    time_samples: int = 301,
    horizon: float = 1.5,
) -> tuple[list[CausalityReport], list[CausalityTrace]]:
    """Excitation-leakage comparison for each mode count.

    Runs the stationary harness twice (detector 2 in vacuum vs squeezed)
    and reports the maximal |delta p| of detector 1 before causal contact
    plus the first post-contact time where it exceeds ``threshold``.
    """
    integrator = integrator or IntegratorConfig()
    base = template if template is not None else get_scenario("fig9").template
    harness = _stationary_harness(base, squeezing)
    t_c = contact_time(harness)
    times = [float(t) for t in np.linspace(0.0, horizon * t_c, time_samples)]
    reports = []
    traces = []
    for count in mode_counts:
        system = replace(
            harness, cavity=replace(harness.cavity, mode_count=int(count))
        )
        p_squeezed = _excitation_trace(system, times, integrator)
        system_vac = replace(
            system,
            detectors=tuple(replace(d, initial_squeezing=0.0) for d in system.detectors),
        )
        p_vacuum = _excitation_trace(system_vac, times, integrator)
        dp = np.abs(p_squeezed - p_vacuum)
        times_arr = np.asarray(times)
        pre = times_arr < PRE_CONTACT_FRACTION * t_c
        post = times_arr > t_c
        max_pre = float(dp[pre].max()) if pre.any() else 0.0
        crossing = float("nan")
        crossed = post & (dp > threshold)
        if crossed.any():
            crossing = float(times_arr[crossed][0])
        reports.append(
            CausalityReport(
                modes=int(count),
                t_c=t_c,
                max_pre_deviation=max_pre,
                first_post_crossing=crossing,
            )
        )
        traces.append(
            CausalityTrace(
                modes=int(count),
                t_c=t_c,
                times=tuple(times),
                p_vacuum=tuple(float(p) for p in p_vacuum),
                p_squeezed=tuple(float(p) for p in p_squeezed),
            )
        )
    return reports, traces


def convergence_check(
    scenario: Scenario,
    mode_counts,
    tolerance: float,
    integrator: IntegratorConfig | None = None,
) -> ConvergenceResult:
    """Smallest mode count that reproduces the largest-count final measures.

    A count is adequate when its final-time measures sit within
    ``tolerance`` of the largest tested count and the light-cone harness
    built from this scenario keeps pre-contact leakage under ``tolerance``.
    """
    counts = [int(c) for c in mode_counts]
    if sorted(counts) != counts or len(set(counts)) != len(counts):
        raise ValueError("mode counts must be strictly increasing")
    integrator = integrator or IntegratorConfig()
    value = scenario.sweep_values[0]

    def final_measures(count: int) -> np.ndarray:
        system = apply_sweep(scenario.system_for(value), "modes", count)
        samples = scenario.coordinate_samples(system)
        validate_positions(system, max(samples))
        trace = integrate_s(system, integrator.with_samples([samples[-1]]))
        sigma0 = initial_state(system)
        _, sigma = evolve_covariance(trace, sigma0)[0]
        blocks = TwoModeBlocks.from_cov(reduce_cov(sigma, [detector_index(0), detector_index(1)], 2))
        return np.array(
            [
                log_negativity(blocks),
                mutual_information(blocks),
                gaussian_discord(blocks, "1:2"),
                gaussian_discord(blocks, "2:1"),
            ]
        )

    reference = counts[-1]
    ref_measures = final_measures(reference)
    deviations: dict[int, float] = {}
    causality_pre: dict[int, float] = {}
    adequate = None
    for count in counts:
        deviations[count] = (
            0.0 if count == reference else float(np.max(np.abs(final_measures(count) - ref_measures)))
        )
        reports, _ = causality_check(
            [count],
            threshold=tolerance,
            template=scenario.system_for(value),
            integrator=integrator,
        )
        causality_pre[count] = reports[0].max_pre_deviation
        if (
            adequate is None
            and deviations[count] < tolerance
            and causality_pre[count] < tolerance
        ):
            adequate = count
    return ConvergenceResult(
        adequate=adequate,
        reference=reference,
        measure_deviation=deviations,
        causality_pre=causality_pre,
        tolerance=tolerance,
    )
