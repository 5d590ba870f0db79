import math
from dataclasses import replace

import numpy as np
import pytest

from udw_cavity.evolution import IntegratorConfig
from udw_cavity.model import (
    ConstantSwitching,
    StationaryWorldline,
    UniformAccelerationWorldline,
)
from udw_cavity.runner import (
    RECORD_COLUMNS,
    Scenario,
    apply_sweep,
    catalog,
    causality_check,
    contact_time,
    convergence_check,
    get_scenario,
    render_records_csv,
    run_sweep,
    write_records_csv,
)

PI = math.pi


def tiny(scenario: Scenario, n_sweep=2, n_time=3, t_max=None) -> Scenario:
    """Shrink a catalog scenario to a fast grid."""
    values = np.linspace(scenario.sweep_values[0], scenario.sweep_values[-1], n_sweep)
    grid = np.linspace(0.0, t_max if t_max else scenario.time_grid[-1] / 4, n_time)
    return replace(scenario, sweep_values=tuple(values), time_grid=tuple(grid))


def zero_coupled(scenario: Scenario) -> Scenario:
    dets = tuple(
        replace(det, coupling=ConstantSwitching(0.0)) for det in scenario.template.detectors
    )
    return replace(scenario, template=replace(scenario.template, detectors=dets))


class TestCatalog:
    def test_names(self):
        names = [s.name for s in catalog()]
        assert names == ["fig1a", "fig1b", "fig4", "fig5a", "fig5b", "fig8", "fig9", "fig11"]

    def test_fig1a_parameters(self):
        s = get_scenario("fig1a")
        assert s.sweep_param == "acceleration"
        assert s.sweep_values[0] == pytest.approx(0.1)
        assert s.template.cavity.length == pytest.approx(4 * PI)
        assert s.template.cavity.mode_count == 40
        assert all(det.frequency == 1.5 for det in s.template.detectors)
        assert all(det.coupling.lambda0 == 0.05 for det in s.template.detectors)
        x0 = [det.worldline.x0 for det in s.template.detectors]
        assert x0[1] - x0[0] == pytest.approx(PI)

    def test_fig1b_thermal(self):
        s = get_scenario("fig1b")
        assert s.sweep_param == "temperature"
        assert s.sweep_values[0] == pytest.approx(0.1)
        assert s.template.field_initial.kind == "thermal"
        assert all(
            isinstance(det.worldline, StationaryWorldline) for det in s.template.detectors
        )

    def test_fig4_opposite_from_2pi(self):
        s = get_scenario("fig4")
        wls = [det.worldline for det in s.template.detectors]
        assert all(w.x0 == pytest.approx(2 * PI) for w in wls)
        assert {w.direction for w in wls} == {1, -1}
        assert all(det.coupling.width == 0.5 for det in s.template.detectors)

    def test_fig5_coupling_sum(self):
        for name in ("fig5a", "fig5b"):
            s = get_scenario(name)
            lams = [det.coupling.lambda0 for det in s.template.detectors]
            assert sum(lams) == pytest.approx(0.4)
            assert s.sweep_param == "coupling_difference"

    def test_fig8_reference_detector(self):
        s = get_scenario("fig8")
        assert s.reference_detector == 1
        assert s.time_kind == "proper"
        assert get_scenario("fig11").time_kind == "coordinate"

    def test_fig9_positions(self):
        s = get_scenario("fig9")
        positions = [det.worldline.x0 for det in s.template.detectors]
        assert positions == pytest.approx([PI, 3 * PI])
        assert s.template.cavity.include_zero_mode
        assert s.sweep_values == (7.0, 10.0)

    def test_grid_sizes(self):
        s = get_scenario("fig1a", sweep_points=10, time_samples=15)
        assert len(s.sweep_values) == 10
        assert len(s.time_grid) == 15

    def test_unknown_scenario(self):
        with pytest.raises(ValueError):
            get_scenario("fig99")


class TestApplySweep:
    def test_acceleration(self):
        s = get_scenario("fig1a")
        system = apply_sweep(s.template, "acceleration", 0.7)
        assert all(det.worldline.acceleration == 0.7 for det in system.detectors)

    def test_temperature(self):
        s = get_scenario("fig1b")
        system = apply_sweep(s.template, "temperature", 0.9)
        assert system.field_initial.temperature == 0.9

    def test_coupling_difference(self):
        s = get_scenario("fig5a")
        system = apply_sweep(s.template, "coupling_difference", 0.1)
        lams = [det.coupling.lambda0 for det in system.detectors]
        assert lams[0] - lams[1] == pytest.approx(0.1)
        assert sum(lams) == pytest.approx(0.4)
        with pytest.raises(ValueError):
            apply_sweep(s.template, "coupling_difference", 0.5)

    def test_acceleration_difference(self):
        s = get_scenario("fig8")
        system = apply_sweep(s.template, "acceleration_difference", 0.4)
        assert system.detectors[0].worldline.acceleration == pytest.approx(0.1)
        assert system.detectors[1].worldline.acceleration == pytest.approx(0.5)

    def test_modes(self):
        s = get_scenario("fig9")
        system = apply_sweep(s.template, "modes", 7.0)
        assert system.cavity.mode_count == 7
        with pytest.raises(ValueError):
            apply_sweep(s.template, "modes", 7.5)

    def test_unknown_parameter(self):
        with pytest.raises(ValueError):
            apply_sweep(get_scenario("fig1a").template, "couplings", 1.0)


class TestRunSweep:
    def test_zero_coupling_gives_zero_measures(self):
        scenario = tiny(zero_coupled(get_scenario("fig1a")), t_max=1.0)
        result = run_sweep(scenario)
        assert not result.failures
        assert len(result.records) == 6
        for record in result.records:
            assert record.e_n <= 1e-10
            assert record.mi <= 1e-10
            assert record.d12 <= 1e-10
            assert record.d21 <= 1e-10
            assert record.purity < 1e-9

    def test_initially_separable(self):
        scenario = replace(
            get_scenario("fig1a"),
            sweep_values=(0.1,),
            time_grid=(0.0, 0.05),
        )
        result = run_sweep(scenario)
        assert result.records[0].e_n == 0.0
        assert result.records[1].e_n == 0.0

    def test_deterministic_records(self):
        scenario = tiny(get_scenario("fig5a"), t_max=1.5)
        first = run_sweep(scenario)
        second = run_sweep(scenario)
        assert first.records == second.records
        assert render_records_csv(first.records) == render_records_csv(second.records)

    def test_record_ordering(self):
        scenario = tiny(get_scenario("fig1b"), n_sweep=3, n_time=2, t_max=1.0)
        result = run_sweep(scenario)
        keys = [(r.sweep_value, r.time_value) for r in result.records]
        assert keys == sorted(keys)

    def test_failures_are_collected(self):
        scenario = tiny(get_scenario("fig1b"), t_max=1.0)
        result = run_sweep(scenario, IntegratorConfig(drift_tolerance=1e-18))
        assert len(result.failures) == len(scenario.sweep_values)
        assert not result.records
        assert "DriftError" in result.failures[0].error

    def test_csv_schema(self, tmp_path):
        scenario = tiny(zero_coupled(get_scenario("fig1b")), t_max=1.0)
        result = run_sweep(scenario)
        path = tmp_path / "records.csv"
        write_records_csv(result.records, path)
        lines = path.read_text().splitlines()
        assert lines[0] == ",".join(RECORD_COLUMNS)
        assert len(lines) == 1 + len(result.records)
        parts = lines[1].split(",")
        assert parts[0] == "fig1b"
        assert parts[1] == "temperature"
        float(parts[4])  # time value parses

    def test_proper_time_mapping_uses_reference(self):
        scenario = replace(
            get_scenario("fig8"),
            sweep_values=(1.0,),
            time_grid=(0.0, 2.0),
        )
        system = scenario.system_for(1.0)
        samples = scenario.coordinate_samples(system)
        wl = system.detectors[1].worldline
        assert samples[1] == pytest.approx(wl.coordinate_time(2.0))
        assert samples[1] > 2.0  # dilated clock needs more coordinate time


class TestCausality:
    def test_contact_time_wraps(self):
        system = get_scenario("fig9").template
        assert contact_time(system) == pytest.approx(2 * PI)

    def test_contact_time_rejects_colocated(self):
        template = get_scenario("fig4").template  # both detectors at 2 pi
        with pytest.raises(ValueError):
            contact_time(template)

    def test_identical_initial_states_show_no_deviation(self):
        reports, traces = causality_check([5], threshold=1e-3, squeezing=0.0, time_samples=41)
        assert reports[0].max_pre_deviation == 0.0
        assert math.isnan(reports[0].first_post_crossing)
        assert traces[0].p_vacuum == traces[0].p_squeezed

    def test_report_fields(self):
        reports, traces = causality_check([5], threshold=1e-3, time_samples=61)
        report = reports[0]
        assert report.modes == 5
        assert report.t_c == pytest.approx(2 * PI)
        assert report.max_pre_deviation >= 0.0
        trace = traces[0]
        assert len(trace.times) == 61
        assert trace.times[-1] == pytest.approx(1.5 * 2 * PI)


class TestConvergence:
    def test_infinite_tolerance_returns_smallest(self):
        scenario = replace(get_scenario("fig9"), time_grid=(0.0, 1.0))
        result = convergence_check(scenario, [3, 5], tolerance=float("inf"))
        assert result.adequate == 3

    def test_free_system_trivially_adequate(self):
        scenario = zero_coupled(replace(get_scenario("fig9"), time_grid=(0.0, 1.0)))
        result = convergence_check(scenario, [2, 4], tolerance=1e-12)
        assert result.adequate == 2
        assert result.measure_deviation[2] == 0.0
        assert result.causality_pre[2] == 0.0

    def test_not_converged_is_explicit(self):
        scenario = replace(get_scenario("fig9"), time_grid=(0.0, 1.0))
        result = convergence_check(scenario, [1, 2], tolerance=1e-12)
        assert result.adequate is None
        assert result.reference == 2

    def test_counts_must_increase(self):
        scenario = get_scenario("fig9")
        with pytest.raises(ValueError):
            convergence_check(scenario, [10, 7], tolerance=1.0)
