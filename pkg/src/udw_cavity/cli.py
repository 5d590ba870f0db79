"""Command-line front end: config parsing, scenario execution, CSV emission.

Subcommands: list-scenarios, run, sweep, causality-check, convergence-check.
Configs are YAML with a strict schema (unknown keys are rejected, every
error names the offending key).  Exit codes: 0 success, 1 configuration
error, 2 numerical failure.  Progress goes to standard error; only data
artifacts are written to the output path.
"""

from __future__ import annotations

import argparse
import os
import sys
import time
from dataclasses import dataclass, replace

import numpy as np
import yaml

from .errors import ConfigError, NumericalError
from .evolution import IntegratorConfig
from .model import (
    CavitySpec,
    ConstantSwitching,
    DetectorSpec,
    FieldInitial,
    GaussianSwitching,
    StationaryWorldline,
    SystemSpec,
    UniformAccelerationWorldline,
)
from .runner import (
    Scenario,
    catalog,
    causality_check,
    convergence_check,
    get_scenario,
    run_sweep,
    write_causality_csv,
    write_records_csv,
    write_trace_csv,
)

WORKERS_ENV = "UDW_SIM_WORKERS"


@dataclass(frozen=True)
class RunConfig:
    """Fully resolved run description."""

    scenario_name: str | None
    scenario: Scenario
    integrator: IntegratorConfig
    output_path: str | None
    workers: int
    paper_literal_discord: bool


# ---------------------------------------------------------------------------
# Strict schema walking


def _require_mapping(node, path: str) -> dict:
    if not isinstance(node, dict):
        raise ConfigError(f"{path}: expected a mapping, got {type(node).__name__}")
    return node


def _check_keys(node: dict, path: str, allowed) -> None:
    for key in node:
        if key not in allowed:
            raise ConfigError(f"unknown key: {path}{key}" if not path else f"unknown key: {path}.{key}")


def _get_number(node: dict, path: str, key: str, default=None):
    if key not in node:
        if default is not None:
            return default
        raise ConfigError(f"missing key: {path}.{key}")
    value = node[key]
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{path}.{key}: expected a number, got {value!r}")
    return float(value)


def _get_int(node: dict, path: str, key: str, default=None):
    if key not in node:
        if default is not None:
            return default
        raise ConfigError(f"missing key: {path}.{key}")
    value = node[key]
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigError(f"{path}.{key}: expected an integer, got {value!r}")
    return value

def _get_bool(node: dict, path: str, key: str, default: bool) -> bool:
    if key not in node:
        return default
    value = node[key]
    if not isinstance(value, bool):
        raise ConfigError(f"{path}.{key}: expected a boolean, got {value!r}")
    return value


def _get_str(node: dict, path: str, key: str, default=None):
    if key not in node:
        if default is not None:
            return default
        raise ConfigError(f"missing key: {path}.{key}")
    value = node[key]
    if not isinstance(value, str):
        raise ConfigError(f"{path}.{key}: expected a string, got {value!r}")
    return value


def _build_cavity(node, base: CavitySpec | None) -> CavitySpec:
    node = _require_mapping(node, "cavity")
    _check_keys(node, "cavity", {"length", "boundary", "modes", "negative_modes", "zero_mode"})
    base = base or CavitySpec(length=4.0 * np.pi)
    boundary = _get_str(node, "cavity", "boundary", base.boundary)
    negative_default = base.include_negative_modes if boundary == base.boundary else (
        boundary == "periodic"
    )
    try:
        return CavitySpec(
            length=_get_number(node, "cavity", "length", base.length),
            boundary=boundary,
            mode_count=_get_int(node, "cavity", "modes", base.mode_count),
            include_negative_modes=_get_bool(node, "cavity", "negative_modes", negative_default),
            include_zero_mode=_get_bool(node, "cavity", "zero_mode", base.include_zero_mode),
        )
    except ValueError as exc:
        raise ConfigError(f"cavity: {exc}") from exc


def _build_worldline(node, path: str):
    node = _require_mapping(node, path)
    _check_keys(node, path, {"type", "acceleration", "position", "direction"})
    kind = _get_str(node, path, "type")
    try:
        if kind == "stationary":
            for key in ("acceleration", "direction"):
                if key in node:
                    raise ConfigError(f"{path}.{key}: not valid for stationary worldlines")
            return StationaryWorldline(x0=_get_number(node, path, "position"))
        if kind == "uniform_acceleration":
            return UniformAccelerationWorldline(
                acceleration=_get_number(node, path, "acceleration"),
                x0=_get_number(node, path, "position"),
                direction=_get_int(node, path, "direction", 1),
            )
    except ValueError as exc:
        raise ConfigError(f"{path}: {exc}") from exc
    raise ConfigError(f"{path}.type: unknown worldline type {kind!r}")


def _build_coupling(node, path: str):
    node = _require_mapping(node, path)
    _check_keys(node, path, {"type", "lambda0", "tau0", "width"})
    kind = _get_str(node, path, "type")
    try:
        if kind == "constant":
            for key in ("tau0", "width"):
                if key in node:
                    raise ConfigError(f"{path}.{key}: not valid for constant couplings")
            return ConstantSwitching(lambda0=_get_number(node, path, "lambda0"))
        if kind == "gaussian":
            return GaussianSwitching(
                lambda0=_get_number(node, path, "lambda0"),
                tau0=_get_number(node, path, "tau0"),
                width=_get_number(node, path, "width", 1.0),
            )
    except ValueError as exc:
        raise ConfigError(f"{path}: {exc}") from exc
    raise ConfigError(f"{path}.type: unknown coupling type {kind!r}")


def _build_detectors(node) -> tuple[DetectorSpec, ...]:
    if not isinstance(node, list) or not node:
        raise ConfigError("detectors: expected a non-empty list")
    detectors = []
    for j, item in enumerate(node):
        path = f"detectors[{j}]"
        item = _require_mapping(item, path)
        _check_keys(item, path, {"frequency", "worldline", "coupling"})
        if "worldline" not in item:
            raise ConfigError(f"missing key: {path}.worldline")
        if "coupling" not in item:
            raise ConfigError(f"missing key: {path}.coupling")
        try:
            detectors.append(
                DetectorSpec(
                    frequency=_get_number(item, path, "frequency"),
                    worldline=_build_worldline(item["worldline"], f"{path}.worldline"),
                    coupling=_build_coupling(item["coupling"], f"{path}.coupling"),
                )
            )
        except ValueError as exc:
            raise ConfigError(f"{path}: {exc}") from exc
    return tuple(detectors)


def _build_field(node) -> FieldInitial:
    node = _require_mapping(node, "field")
    _check_keys(node, "field", {"initial", "temperature"})
    kind = _get_str(node, "field", "initial", "vacuum")
    try:
        if kind == "vacuum":
            if "temperature" in node:
                raise ConfigError("field.temperature: not valid for a vacuum field")
            return FieldInitial()
        return FieldInitial(kind, _get_number(node, "field", "temperature"))
    except ValueError as exc:
        raise ConfigError(f"field: {exc}") from exc


def parse_config(
    text: str,
    scenario_override: str | None = None,
    output_override: str | None = None,
    workers: int | None = None,
    paper_literal_discord: bool = False,
    sweep_points_override: int | None = None,
    time_samples_override: int | None = None,
) -> RunConfig:
    """Parse a YAML config document into a fully resolved RunConfig.

    A scenario name (from the document or the CLI) supplies catalog
    defaults; any inline keys override the corresponding scenario pieces.
    Without a scenario the document must describe the system completely.
    """
    try:
        doc = yaml.safe_load(text) if text.strip() else {}
    except yaml.YAMLError as exc:
        raise ConfigError(f"invalid YAML: {exc}") from exc
    if doc is None:
        doc = {}
    doc = _require_mapping(doc, "")
    _check_keys(
        doc, "", {"scenario", "cavity", "detectors", "field", "integrator", "sweep", "time", "output"}
    )

    scenario_name = scenario_override or (
        _get_str(doc, "", "scenario") if "scenario" in doc else None
    )

    sweep_node = _require_mapping(doc.get("sweep", {}), "sweep")
    _check_keys(sweep_node, "sweep", {"param", "min", "max", "points"})
    time_node = _require_mapping(doc.get("time", {}), "time")
    _check_keys(time_node, "time", {"kind", "max", "samples", "reference"})
    integ_node = _require_mapping(doc.get("integrator", {}), "integrator")
    _check_keys(integ_node, "integrator", {"method", "step", "tolerance"})
    output_node = _require_mapping(doc.get("output", {}), "output")
    _check_keys(output_node, "output", {"path"})

    sweep_points = sweep_points_override
    if sweep_points is None and "points" in sweep_node:
        sweep_points = _get_int(sweep_node, "sweep", "points")
    time_samples = time_samples_override
    if time_samples is None and "samples" in time_node:
        time_samples = _get_int(time_node, "time", "samples")

    if scenario_name is not None:
        try:
            base = get_scenario(
                scenario_name, sweep_points=sweep_points or 40, time_samples=time_samples or 60
            )
        except ValueError as exc:
            raise ConfigError(f"scenario: {exc}") from exc
        template = base.template
        if "cavity" in doc:
            template = replace(template, cavity=_build_cavity(doc["cavity"], base.template.cavity))
        if "detectors" in doc:
            template = replace(template, detectors=_build_detectors(doc["detectors"]))
        if "field" in doc:
            template = replace(template, field_initial=_build_field(doc["field"]))
        sweep_param = _get_str(sweep_node, "sweep", "param", base.sweep_param)
        sweep_lo = _get_number(sweep_node, "sweep", "min", base.sweep_values[0])
        sweep_hi = _get_number(sweep_node, "sweep", "max", base.sweep_values[-1])
        points = sweep_points if sweep_points is not None else len(base.sweep_values)
        time_kind = _get_str(time_node, "time", "kind", base.time_kind)
        time_max = _get_number(time_node, "time", "max", base.time_grid[-1])
        samples = time_samples if time_samples is not None else len(base.time_grid)
        reference = _get_int(time_node, "time", "reference", base.reference_detector + 1) - 1 \
            if "reference" in time_node else base.reference_detector
        name = base.name
        measures = base.measures
    else:
        for key in ("cavity", "detectors", "sweep", "time"):
            if key not in doc:
                raise ConfigError(f"missing key: {key} (required without a scenario)")
        template = SystemSpec(
            cavity=_build_cavity(doc["cavity"], None),
            detectors=_build_detectors(doc["detectors"]),
            field_initial=_build_field(doc["field"]) if "field" in doc else FieldInitial(),
        )
        sweep_param = _get_str(sweep_node, "sweep", "param")
        sweep_lo = _get_number(sweep_node, "sweep", "min")
        sweep_hi = _get_number(sweep_node, "sweep", "max")
        points = (
            sweep_points if sweep_points is not None else _get_int(sweep_node, "sweep", "points")
        )
        time_kind = _get_str(time_node, "time", "kind", "coordinate")
        time_max = _get_number(time_node, "time", "max")
        samples = (
            time_samples if time_samples is not None else _get_int(time_node, "time", "samples")
        )
        reference = _get_int(time_node, "time", "reference", 1) - 1
        name = "custom"
        measures = ("e_n", "mi", "d12", "d21")

    if points < 1:
        raise ConfigError("sweep.points: must be at least 1")
    if samples < 1:
        raise ConfigError("time.samples: must be at least 1")
    if not 0 <= reference < len(template.detectors):
        raise ConfigError("time.reference: detector index out of range")
    if points == 1:
        sweep_values = (float(sweep_lo),)
    else:
        if sweep_hi <= sweep_lo:
            raise ConfigError("sweep.max: must exceed sweep.min")
        sweep_values = tuple(float(v) for v in np.linspace(sweep_lo, sweep_hi, points))
    time_grid = tuple(float(t) for t in np.linspace(0.0, time_max, samples))

    try:
        scenario = Scenario(
            name=name,
            description=f"custom configuration ({name})" if scenario_name is None else name,
            template=template,
            sweep_param=sweep_param,
            sweep_values=sweep_values,
            time_kind=time_kind,
            time_grid=time_grid,
            reference_detector=reference,
            measures=measures,
        )
    except ValueError as exc:
        raise ConfigError(f"sweep/time: {exc}") from exc
    try:
        integrator = IntegratorConfig(
            method=_get_str(integ_node, "integrator", "method", "rk4"),
            step=_get_number(integ_node, "integrator", "step", 1e-3),
            drift_tolerance=_get_number(integ_node, "integrator", "tolerance", 1e-6),
        )
    except ValueError as exc:
        raise ConfigError(f"integrator: {exc}") from exc

    output_path = output_override or (
        _get_str(output_node, "output", "path") if "path" in output_node else None
    )
    resolved_workers = _resolve_workers(workers)
    if scenario_name is not None:
        scenario = replace(scenario, description=get_scenario(scenario_name).description)
    return RunConfig(
        scenario_name=scenario_name,
        scenario=scenario,
        integrator=integrator,
        output_path=output_path,
        workers=resolved_workers,
        paper_literal_discord=paper_literal_discord,
    )


def _resolve_workers(cli_value: int | None) -> int:
    env = os.environ.get(WORKERS_ENV)
    if env is not None:
        try:
            value = int(env)
        except ValueError as exc:
            raise ConfigError(f"{WORKERS_ENV}: expected an integer, got {env!r}") from exc
        if value < 1:
            raise ConfigError(f"{WORKERS_ENV}: must be at least 1")
        return value
    if cli_value is not None:
        if cli_value < 1:
            raise ConfigError("--workers: must be at least 1")
        return cli_value
    return 1


# ---------------------------------------------------------------------------
# Rendering (inverse of parse_config for resolved configs)


def _render_worldline(wl) -> dict:
    if isinstance(wl, StationaryWorldline):
        return {"type": "stationary", "position": wl.x0}
    return {
        "type": "uniform_acceleration",
        "acceleration": wl.acceleration,
        "position": wl.x0,
        "direction": wl.direction,
    }


def _render_coupling(sw) -> dict:
    if isinstance(sw, ConstantSwitching):
        return {"type": "constant", "lambda0": sw.lambda0}
    return {"type": "gaussian", "lambda0": sw.lambda0, "tau0": sw.tau0, "width": sw.width}


def render_config(config: RunConfig) -> str:
    """Serialise a RunConfig to YAML; parse_config(render_config(c)) == c."""
    scenario = config.scenario
    template = scenario.template
    doc: dict = {}
    if config.scenario_name:
        doc["scenario"] = config.scenario_name
    doc["cavity"] = {
        "length": template.cavity.length,
        "boundary": template.cavity.boundary,
        "modes": template.cavity.mode_count,
        "negative_modes": template.cavity.include_negative_modes,
        "zero_mode": template.cavity.include_zero_mode,
    }
    doc["detectors"] = [
        {
            "frequency": det.frequency,
            "worldline": _render_worldline(det.worldline),
            "coupling": _render_coupling(det.coupling),
        }
        for det in template.detectors
    ]
    field = {"initial": template.field_initial.kind}
    if template.field_initial.kind == "thermal":
        field["temperature"] = template.field_initial.temperature
    doc["field"] = field
    doc["integrator"] = {
        "method": config.integrator.method,
        "step": config.integrator.step,
        "tolerance": config.integrator.drift_tolerance,
    }
    doc["sweep"] = {
        "param": scenario.sweep_param,
        "min": scenario.sweep_values[0],
        "max": scenario.sweep_values[-1],
        "points": len(scenario.sweep_values),
    }
    doc["time"] = {
        "kind": scenario.time_kind,
        "max": scenario.time_grid[-1],
        "samples": len(scenario.time_grid),
        "reference": scenario.reference_detector + 1,
    }
    if config.output_path:
        doc["output"] = {"path": config.output_path}
    return yaml.safe_dump(doc, sort_keys=False)


# ---------------------------------------------------------------------------
# Subcommands


def _progress(stream):
    start = time.perf_counter()

    def report(done, total, value):
        elapsed = time.perf_counter() - start
        print(
            f"[udw-sim] point {done}/{total} (value {value:g}) done, {elapsed:.1f}s elapsed",
            file=stream,
        )

    return report


def _load_config(args, single_point: bool) -> RunConfig:
    text = ""
    if getattr(args, "config", None):
        with open(args.config) as fh:
            text = fh.read()
    config = parse_config(
        text,
        scenario_override=getattr(args, "scenario", None),
        output_override=getattr(args, "out", None),
        workers=getattr(args, "workers", None),
        paper_literal_discord=getattr(args, "paper_literal_discord", False),
        sweep_points_override=getattr(args, "sweep_points", None),
        time_samples_override=getattr(args, "time_samples", None),
    )
    if config.scenario_name is None and not text:
        raise ConfigError("either --scenario or --config is required")
    if single_point:
        value = getattr(args, "sweep_value", None)
        scenario = config.scenario
        chosen = float(value) if value is not None else scenario.sweep_values[0]
        scenario = replace(scenario, sweep_values=(chosen,))
        config = replace(config, scenario=scenario)
    return config


def _cmd_list_scenarios(_args) -> int:
    for scenario in catalog():
        print(f"{scenario.name:8s} {scenario.description}")
    return 0


def _cmd_sweep(args, single_point: bool) -> int:
    config = _load_config(args, single_point)
    if not config.output_path:
        raise ConfigError("output.path (or --out) is required")
    scenario = config.scenario
    print(
        f"[udw-sim] {scenario.name}: {len(scenario.sweep_values)} sweep point(s) x "
        f"{len(scenario.time_grid)} time samples, workers={config.workers}",
        file=sys.stderr,
    )
    result = run_sweep(
        scenario,
        config.integrator,
        workers=config.workers,
        paper_literal_discord=config.paper_literal_discord,
        progress=_progress(sys.stderr),
    )
    write_records_csv(result.records, config.output_path)
    print(f"[udw-sim] wrote {len(result.records)} records to {config.output_path}", file=sys.stderr)
    if result.failures:
        for failure in result.failures:
            print(
                f"[udw-sim] FAILED point {failure.sweep_value:g}: {failure.error}",
                file=sys.stderr,
            )
        return 2
    return 0


def _parse_modes(text: str) -> list[int]:
    try:
        modes = [int(part) for part in text.split(",") if part.strip()]
    except ValueError as exc:
        raise ConfigError(f"--modes: expected comma-separated integers, got {text!r}") from exc
    if not modes:
        raise ConfigError("--modes: at least one mode count required")
    return modes


def _cmd_causality(args) -> int:
    modes = _parse_modes(args.modes)
    template = None
    if args.scenario or args.config:
        config = _load_config(args, single_point=True)
        template = config.scenario.system_for(config.scenario.sweep_values[0])
    out = args.out or "causality.csv"
    reports, traces = causality_check(
        modes,
        threshold=args.threshold,
        template=template,
        squeezing=args.squeezing,
        time_samples=args.time_samples or 301,
    )
    write_causality_csv(reports, out)
    stem, dot, ext = out.rpartition(".")
    for trace in traces:
        trace_path = f"{stem}_trace_{trace.modes}.{ext}" if dot else f"{out}_trace_{trace.modes}"
        write_trace_csv(trace, trace_path)
        print(f"[udw-sim] wrote trace {trace_path}", file=sys.stderr)
    for report in reports:
        print(
            f"[udw-sim] modes={report.modes}: t_c={report.t_c:.6f} "
            f"max_pre={report.max_pre_deviation:.3e} first_crossing={report.first_post_crossing}",
            file=sys.stderr,
        )
    print(f"[udw-sim] wrote report {out}", file=sys.stderr)
    return 0


def _cmd_convergence(args) -> int:
    modes = sorted(_parse_modes(args.modes))
    config = _load_config(args, single_point=True)
    result = convergence_check(config.scenario, modes, tolerance=args.tolerance)
    for count in modes:
        print(
            f"[udw-sim] modes={count}: measure_dev={result.measure_deviation[count]:.3e} "
            f"causality_pre={result.causality_pre[count]:.3e}",
            file=sys.stderr,
        )
    if result.adequate is None:
        print(f"not converged within tolerance {result.tolerance:g} (tested {modes})")
    else:
        print(f"adequate_modes={result.adequate} tolerance={result.tolerance:g}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="udw-sim",
        description="Gaussian-state simulator of oscillator detectors in a 1-D cavity",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    sub.add_parser("list-scenarios", help="print the scenario catalog")

    def add_common(p, single_point: bool):
        p.add_argument("--config", help="YAML config file")
        p.add_argument("--scenario", help="catalog scenario name")
        p.add_argument("--out", help="output CSV path")
        p.add_argument("--workers", type=int, help="worker process count")
        p.add_argument(
            "--paper-literal-discord",
            action="store_true",
            help="use the uncorrected discord branch formula",
        )
        p.add_argument("--sweep-points", type=int, help="override sweep point count")
        p.add_argument("--time-samples", type=int, help="override time sample count")
        if single_point:
            p.add_argument("--sweep-value", type=float, help="single sweep value to run")

    add_common(sub.add_parser("run", help="run a single sweep point"), True)
    add_common(sub.add_parser("sweep", help="run the full sweep grid"), False)

    causality = sub.add_parser("causality-check", help="light-cone mode-cutoff check")
    causality.add_argument("--modes", required=True, help="comma-separated mode counts")
    causality.add_argument("--threshold", type=float, default=1e-3,
                           help="post-contact crossing threshold (default 1e-3)")
    causality.add_argument("--squeezing", type=float, default=5.0,
                           help="squeezing parameter of detector 2 (default 5)")
    causality.add_argument("--out", help="report CSV path (default causality.csv)")
    causality.add_argument("--scenario", help="derive the harness from this scenario")
    causality.add_argument("--config", help="derive the harness from this config")
    causality.add_argument("--time-samples", type=int, help="trace sample count (default 301)")

    convergence = sub.add_parser("convergence-check", help="smallest adequate mode count")
    convergence.add_argument("--modes", required=True, help="comma-separated mode counts")
    convergence.add_argument("--tolerance", type=float, default=1e-5,
                             help="observable tolerance (default 1e-5)")
    convergence.add_argument("--scenario", help="catalog scenario name")
    convergence.add_argument("--config", help="YAML config file")
    convergence.add_argument("--sweep-points", type=int, help="override sweep point count")
    convergence.add_argument("--time-samples", type=int, help="override time sample count")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "list-scenarios":
            return _cmd_list_scenarios(args)
        if args.command == "run":
            return _cmd_sweep(args, single_point=True)
        if args.command == "sweep":
            return _cmd_sweep(args, single_point=False)
        if args.command == "causality-check":
            return _cmd_causality(args)
        if args.command == "convergence-check":
            return _cmd_convergence(args)
        raise ConfigError(f"unknown command {args.command!r}")
    except ConfigError as exc:
        print(f"[udw-sim] config error: {exc}", file=sys.stderr)
        return 1
    except FileNotFoundError as exc:
        print(f"[udw-sim] config error: {exc}", file=sys.stderr)
        return 1
    except NumericalError as exc:
        print(f"[udw-sim] numerical failure: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
