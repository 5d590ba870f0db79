import math

import numpy as np
import pytest

from udw_cavity.model import (
    CavitySpec,
    ConstantSwitching,
    DetectorSpec,
    FieldInitial,
    GaussianSwitching,
    StationaryWorldline,
    SystemSpec,
    UniformAccelerationWorldline,
    assemble_f_sys,
    cavity_modes,
    initial_state,
    mode_function,
    unruh_temperature,
    validate_positions,
    worldline_eval,
    wrap_position,
)

PI = math.pi


def stationary_system(n_modes=3, boundary="periodic", lam=0.05, **cavity_kwargs):
    cavity = CavitySpec(
        length=4 * PI,
        boundary=boundary,
        mode_count=n_modes,
        include_negative_modes=(boundary == "periodic"),
        **cavity_kwargs,
    )
    dets = (
        DetectorSpec(1.5, StationaryWorldline(PI), ConstantSwitching(lam)),
        DetectorSpec(1.5, StationaryWorldline(2 * PI), ConstantSwitching(lam)),
    )
    return SystemSpec(cavity=cavity, detectors=dets)


class TestCavity:
    def test_validation(self):
        with pytest.raises(ValueError):
            CavitySpec(length=0.0)
        with pytest.raises(ValueError):
            CavitySpec(length=1.0, mode_count=0)
        with pytest.raises(ValueError):
            CavitySpec(length=1.0, boundary="reflecting", include_negative_modes=True)
        with pytest.raises(ValueError):
            CavitySpec(
                length=1.0,
                boundary="reflecting",
                include_negative_modes=False,
                include_zero_mode=True,
            )
        with pytest.raises(ValueError):
            CavitySpec(length=1.0, boundary="absorbing", include_negative_modes=False)

    def test_mode_indices_paired(self):
        cavity = CavitySpec(length=4 * PI, mode_count=6)
        assert cavity.mode_indices() == [1, -1, 2, -2, 3, -3]
        odd = CavitySpec(length=4 * PI, mode_count=7)
        assert odd.mode_indices() == [1, -1, 2, -2, 3, -3, 4]

    def test_mode_indices_one_sided(self):
        cavity = CavitySpec(length=4 * PI, mode_count=4, include_negative_modes=False)
        assert cavity.mode_indices() == [1, 2, 3, 4]
        reflecting = CavitySpec(
            length=4 * PI, boundary="reflecting", mode_count=3, include_negative_modes=False
        )
        assert reflecting.mode_indices() == [1, 2, 3]

    def test_resonance_is_exact(self):
        cavity = CavitySpec(length=4 * PI, mode_count=6)
        freqs = {mode.index: mode.frequency for mode in cavity_modes(cavity)}
        assert freqs[3] == 1.5
        assert freqs[-3] == 1.5

    def test_reflecting_wave_vectors(self):
        cavity = CavitySpec(
            length=4 * PI, boundary="reflecting", mode_count=2, include_negative_modes=False
        )
        modes = cavity_modes(cavity)
        assert modes[0].wave_vector == pytest.approx(0.25)
        assert modes[1].frequency == pytest.approx(0.5)


class TestModeFunction:
    def test_reflecting_value(self):
        cavity = CavitySpec(
            length=4 * PI, boundary="reflecting", mode_count=2, include_negative_modes=False
        )
        mode = cavity_modes(cavity)[1]  # n = 2
        value = mode_function(mode, PI, cavity)
        assert value.real == pytest.approx(0.39894228040143268, abs=1e-14)
        assert value.imag == 0.0

    def test_reflecting_node_at_wall(self):
        cavity = CavitySpec(
            length=4 * PI, boundary="reflecting", mode_count=3, include_negative_modes=False
        )
        for mode in cavity_modes(cavity):
            assert mode_function(mode, 0.0, cavity) == 0.0

    def test_periodic_modulus(self):
        cavity = CavitySpec(length=4 * PI, mode_count=4)
        for mode in cavity_modes(cavity):
            v = mode_function(mode, 1.234, cavity)
            assert abs(v) == pytest.approx(
                1.0 / math.sqrt(mode.frequency * cavity.length), rel=1e-12
            )

    def test_domain_check(self):
        cavity = CavitySpec(length=4 * PI, mode_count=2)
        with pytest.raises(ValueError):
            mode_function(cavity_modes(cavity)[0], -0.1, cavity)

    def test_wrap_position(self):
        cavity = CavitySpec(length=4 * PI, mode_count=2)
        assert wrap_position(4 * PI + 1.0, cavity) == pytest.approx(1.0)
        reflecting = CavitySpec(
            length=4 * PI, boundary="reflecting", mode_count=2, include_negative_modes=False
        )
        assert wrap_position(5 * PI, reflecting) == 5 * PI


class TestWorldlines:
    def test_stationary(self):
        wl = StationaryWorldline(PI)
        assert worldline_eval(wl, 3.7) == (PI, 3.7, 1.0)

    def test_uniform_acceleration_closed_form(self):
        wl = UniformAccelerationWorldline(0.1, 0.0)
        t = wl.coordinate_time(1.5)
        assert t == pytest.approx(1.5056313315161266, abs=1e-13)
        x, tau, dtaudt = worldline_eval(wl, t)
        assert x == pytest.approx(0.11271109576670465, abs=1e-13)
        assert tau == pytest.approx(1.5, abs=1e-12)

    def test_redshift(self):
        wl = UniformAccelerationWorldline(0.2, 0.0)
        t = wl.coordinate_time(2.0)
        assert 1.0 / wl.redshift(t) == pytest.approx(1.0810723718384548, abs=1e-13)

    def test_proper_time_normalisation(self):
        wl = UniformAccelerationWorldline(0.7, 1.0, direction=-1)
        dtau = 1e-6
        for tau in (0.3, 1.1, 2.9):
            t_hi, t_lo = wl.coordinate_time(tau + dtau), wl.coordinate_time(tau - dtau)
            x_hi, x_lo = wl.position(t_hi), wl.position(t_lo)
            dt_dtau = (t_hi - t_lo) / (2 * dtau)
            dx_dtau = (x_hi - x_lo) / (2 * dtau)
            assert dt_dtau**2 - dx_dtau**2 == pytest.approx(1.0, abs=1e-8)

    def test_small_acceleration_limit(self):
        a = 1e-4
        wl = UniformAccelerationWorldline(a, 2.0)
        for tau in (0.5, 1.5, 3.0):
            t = wl.coordinate_time(tau)
            assert abs(t - tau) < a * (1 + tau**3)
            assert abs(wl.position(t) - 2.0) < a * (1 + tau**2)
            assert abs(wl.redshift(t) - 1.0) < a * (1 + tau**2)

    def test_validation(self):
        with pytest.raises(ValueError):
            UniformAccelerationWorldline(0.0, 0.0)
        with pytest.raises(ValueError):
            UniformAccelerationWorldline(1.0, 0.0, direction=2)

    def test_unruh_temperature(self):
        assert unruh_temperature(2 * PI) == pytest.approx(1.0)


class TestSwitching:
    def test_constant(self):
        assert ConstantSwitching(0.05)(12.3) == 0.05

    def test_gaussian_peak_and_decay(self):
        sw = GaussianSwitching(0.05, 1.5, 1.0)
        assert sw(1.5) == 0.05
        offsets = [0.0, 0.5, 1.0, 2.0, 4.0]
        values = [sw(1.5 + w) for w in offsets]
        assert all(a > b for a, b in zip(values, values[1:]))
        assert sw(1.5 + 0.7) == pytest.approx(sw(1.5 - 0.7), rel=1e-12)

    def test_width_validation(self):
        with pytest.raises(ValueError):
            GaussianSwitching(0.05, 1.5, 0.0)


class TestAssembly:
    def test_symmetry(self):
        system = stationary_system()
        for t in (0.0, 0.7, 2.3):
            f = assemble_f_sys(t, system)
            assert np.array_equal(f, f.T)

    def test_zero_coupling_block_diagonal(self):
        system = stationary_system(lam=0.0)
        f = assemble_f_sys(1.0, system)
        expected = np.zeros_like(f)
        for j in range(2):
            expected[2 * j, 2 * j] = expected[2 * j + 1, 2 * j + 1] = 1.5
        for i, mode in enumerate(cavity_modes(system.cavity)):
            qn = 2 * (2 + i)
            expected[qn, qn] = expected[qn + 1, qn + 1] = mode.frequency
        assert np.array_equal(f, expected)

    def test_reflecting_modes_have_no_momentum_coupling(self):
        cavity = CavitySpec(
            length=4 * PI, boundary="reflecting", mode_count=3, include_negative_modes=False
        )
        system = SystemSpec(
            cavity=cavity,
            detectors=(DetectorSpec(1.5, StationaryWorldline(PI), ConstantSwitching(0.05)),),
        )
        f = assemble_f_sys(0.5, system)
        for i in range(3):
            assert f[0, 2 * (1 + i) + 1] == 0.0

    def test_coupling_entry_value(self):
        cavity = CavitySpec(
            length=4 * PI, boundary="reflecting", mode_count=2, include_negative_modes=False
        )
        system = SystemSpec(
            cavity=cavity,
            detectors=(DetectorSpec(1.5, StationaryWorldline(PI), ConstantSwitching(0.05)),),
        )
        f = assemble_f_sys(0.0, system)
        # n = 2 mode is the second mode block; q-q coupling entry
        assert f[0, 2 * (1 + 1)] == pytest.approx(0.039894228040143268, abs=1e-15)

    def test_matches_static_hamiltonian_matrix(self):
        system = stationary_system(n_modes=4)
        modes = cavity_modes(system.cavity)
        expected = np.zeros((system.dim, system.dim))
        for j, det in enumerate(system.detectors):
            expected[2 * j, 2 * j] = expected[2 * j + 1, 2 * j + 1] = det.frequency
            x = det.worldline.x0
            for i, mode in enumerate(modes):
                v = mode_function(mode, x, system.cavity)
                qn = 2 * (2 + i)
                expected[qn, qn] = expected[qn + 1, qn + 1] = mode.frequency
                expected[2 * j, qn] = expected[qn, 2 * j] = 2 * 0.05 * v.real
                expected[2 * j, qn + 1] = expected[qn + 1, 2 * j] = -2 * 0.05 * v.imag
        assert np.allclose(assemble_f_sys(0.0, system), expected, atol=1e-15)

    def test_redshift_scales_detector_rows(self):
        wl = UniformAccelerationWorldline(0.5, PI)
        system = SystemSpec(
            cavity=CavitySpec(length=4 * PI, mode_count=2),
            detectors=(DetectorSpec(1.5, wl, ConstantSwitching(0.05)),),
        )
        t = 2.0
        f = assemble_f_sys(t, system)
        assert f[0, 0] == pytest.approx(wl.redshift(t) * 1.5, rel=1e-14)

    def test_detector_outside_reflecting_cavity(self):
        cavity = CavitySpec(
            length=4 * PI, boundary="reflecting", mode_count=2, include_negative_modes=False
        )
        system = SystemSpec(
            cavity=cavity,
            detectors=(DetectorSpec(1.5, StationaryWorldline(5 * PI), ConstantSwitching(0.05)),),
        )
        with pytest.raises(ValueError):
            assemble_f_sys(0.0, system)

    def test_zero_mode_block(self):
        system = stationary_system(n_modes=2, include_zero_mode=True)
        f = assemble_f_sys(0.0, system)
        dim = system.dim
        assert dim == 2 * (2 + 2 + 1)
        assert f[dim - 2, dim - 2] == 0.0
        assert f[dim - 1, dim - 1] == 1.0
        expected = 2 * 0.05 / math.sqrt(system.cavity.length)
        assert f[0, dim - 2] == pytest.approx(expected, rel=1e-14)
        assert f[1, dim - 2] == 0.0


class TestInitialState:
    def test_vacuum_identity(self):
        system = stationary_system(n_modes=3)
        assert np.array_equal(initial_state(system), np.eye(10))

    def test_thermal_blocks(self):
        cavity = CavitySpec(length=4 * PI, mode_count=2, include_negative_modes=False)
        system = SystemSpec(
            cavity=cavity,
            detectors=stationary_system().detectors,
            field_initial=FieldInitial("thermal", 0.1),
        )
        sigma = initial_state(system)
        v1 = 1.0 / math.tanh(2.5)  # omega = 0.5
        v2 = 1.0 / math.tanh(5.0)  # omega = 1.0
        expected = np.diag([1.0, 1.0, 1.0, 1.0, v1, v1, v2, v2])
        assert np.allclose(sigma, expected, atol=1e-14)

    def test_squeezed_detector_block(self):
        dets = (
            DetectorSpec(1.5, StationaryWorldline(PI), ConstantSwitching(0.05)),
            DetectorSpec(
                1.5, StationaryWorldline(3 * PI), ConstantSwitching(0.05), initial_squeezing=5.0
            ),
        )
        system = SystemSpec(cavity=CavitySpec(length=4 * PI, mode_count=2), detectors=dets)
        sigma = initial_state(system)
        assert sigma[2, 2] == pytest.approx(math.exp(10.0))
        assert sigma[3, 3] == pytest.approx(math.exp(-10.0))

    def test_zero_mode_starts_at_unit_covariance(self):
        system = SystemSpec(
            cavity=CavitySpec(length=4 * PI, mode_count=2, include_zero_mode=True),
            detectors=stationary_system().detectors,
            field_initial=FieldInitial("thermal", 0.5),
        )
        sigma = initial_state(system)
        assert sigma[-1, -1] == 1.0
        assert sigma[-2, -2] == 1.0


class TestPositionValidation:
    def test_reflecting_exit_rejected(self):
        cavity = CavitySpec(
            length=4 * PI, boundary="reflecting", mode_count=2, include_negative_modes=False
        )
        wl = UniformAccelerationWorldline(0.5, 2 * PI)
        system = SystemSpec(
            cavity=cavity, detectors=(DetectorSpec(1.5, wl, ConstantSwitching(0.05)),)
        )
        with pytest.raises(ValueError):
            validate_positions(system, t_max=50.0)
        validate_positions(system, t_max=0.5)

    def test_periodic_always_valid(self):
        system = SystemSpec(
            cavity=CavitySpec(length=4 * PI, mode_count=2),
            detectors=(
                DetectorSpec(
                    1.5, UniformAccelerationWorldline(0.5, 2 * PI), ConstantSwitching(0.05)
                ),
            ),
        )
        validate_positions(system, t_max=1e4)

    def test_detector_validation(self):
        with pytest.raises(ValueError):
            DetectorSpec(-1.0, StationaryWorldline(0.0), ConstantSwitching(0.05))
        with pytest.raises(ValueError):
            SystemSpec(cavity=CavitySpec(length=1.0, mode_count=1), detectors=())
        with pytest.raises(ValueError):
            FieldInitial("thermal", -1.0)
        with pytest.raises(ValueError):
            FieldInitial("coherent")
