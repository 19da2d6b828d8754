"""Tests for focal/amplitude sweeps, resolution, and reflection studies.

Numeric reference values were measured with an independent composition
of the same primitives (spectral synthesis + batched two-level
propagation assembled outside the experiments module) and frozen here.
The unit workhorse is a small map: sigma_f = 2 cm, one qubit at
z_q = 0.15 m, focal points 0..0.30 m in 1 cm steps, and 7 amplitudes
log-spaced 0.6 decades around 2*pi*2.5 GHz (the small case's revival).
"""

import math

import numpy as np
import pytest

from wgfocus.channel import ReflectionSpec
from wgfocus.dynamics import TransmonSpec
from wgfocus.errors import (
    EvanescentFrequencyError,
    IntegrationError,
    NoContrastError,
    NoRevivalError,
)
from wgfocus import experiments as X

TWO_PI = 2.0 * math.pi

# --- frozen reference values (independent composition oracle) ----------
# small map: contrast curve over the 7 amplitudes, optimum at index 3
SMALL_C = np.array(
    [-0.03796424, 0.22961049, 0.66093370, 0.97359382,
     0.91332982, 0.87300990, 0.96188208]
)
SMALL_SIGMA_Q = 0.08890891825770071  # m, at the optimal amplitude
SMALL_SIGMA_Q_REFINED = 0.08863831117266913  # m, 5 mm focal step
SMALL_ROW_PEAK = 0.98289782  # P_g at d_f = z_q = 0.15 m
SMALL_ROW_EDGES = (0.00488479, 0.00488405)  # P_g at d_f = 0 and 0.30 m
# reflection r = 0.316 on the small map (mirror at z_r = 0.25 m)
REFL_OPT_SHIFT_INDEX = 2  # optimum moves from index 3 to 2
REFL_DISTORTION_316 = 2.979817018340304
REFL_PG_FOCUS_316 = 0.714526
# compression (same pulse values as the synthesis-level tests)
FOCAL_FWHM_35 = 7.374790e-10
INPUT_FWHM_35 = 6.452544e-9
FOCAL_FWHM_70 = 1.3569312647830365e-09
INPUT_FWHM_70 = 3.8013679643289175e-09
NARROWBAND_RATIO = 1.000092  # sigma_f = 1 m


def small_amplitudes():
    return TWO_PI * 2.5e9 * np.logspace(-0.3, 0.3, 7)


@pytest.fixture(scope="module")
def small_grid():
    return X.SweepGrid(
        focal_points=0.01 * np.arange(31),
        amplitudes=small_amplitudes(),
        spot_sizes=np.array([0.02]),
    )


@pytest.fixture(scope="module")
def small_map(small_grid):
    scn = X.single_qubit_scenario(spot_size=0.02)
    return X.sweep_focal_amplitude(scn, small_grid)


@pytest.fixture(scope="module")
def refl_entries(small_grid):
    scn = X.single_qubit_scenario(
        spot_size=0.02, reflection=ReflectionSpec(0.1, 0.25)
    )
    return X.reflection_study(
        scn, (0.0, math.sqrt(0.10)), grid=small_grid
    )


def tiny_map(spot_size=0.05, focal_points=None, amplitudes=(1e3, 1e4),
             scenario=None, workers=1):
    """A very coarse sweep for limit and plumbing tests."""
    if focal_points is None:
        focal_points = 0.05 * np.arange(7)
    if scenario is None:
        scenario = X.single_qubit_scenario(spot_size=spot_size)
    grid = X.SweepGrid(
        focal_points=np.asarray(focal_points),
        amplitudes=np.asarray(amplitudes, dtype=float),
        spot_sizes=np.array([spot_size]),
    )
    return X.sweep_focal_amplitude(scenario, grid, workers=workers)


class TestScenario:
    def test_single_qubit_defaults(self):
        scn = X.single_qubit_scenario()
        assert scn.qubits[0].position == 0.15
        assert scn.qubits[0].transition_frequency == scn.carrier == TWO_PI * 7.2e9
        assert scn.spot_size == 0.035
        assert scn.evolution_model == "rwa"
        assert scn.reflections is None

    def test_two_qubit_defaults(self):
        scn = X.two_qubit_scenario()
        assert scn.carrier == TWO_PI * 7.28e9
        assert tuple(q.position for q in scn.qubits) == (0.15, 0.20)
        assert all(q.transition_frequency == scn.carrier for q in scn.qubits)

    def test_pulse_template(self):
        scn = X.single_qubit_scenario(spot_size=0.05)
        spec = scn.pulse_template(0.37)
        assert spec.spot_size == 0.05
        assert spec.focal_point == 0.37
        assert spec.amplitude == 1.0
        assert spec.highpass_enabled is True

    def test_needs_a_qubit(self):
        with pytest.raises(ValueError, match="at least one qubit"):
            X.Scenario(qubits=())

    def test_position_inside_guide(self):
        qubit = TransmonSpec(transition_frequency=TWO_PI * 7.2e9, position=1.5)
        with pytest.raises(ValueError, match="outside"):
            X.Scenario(qubits=(qubit,), length=1.03)

    def test_carrier_must_propagate(self):
        qubit = TransmonSpec(transition_frequency=TWO_PI * 5e9, position=0.15)
        with pytest.raises(EvanescentFrequencyError):
            X.Scenario(qubits=(qubit,), carrier=TWO_PI * 5e9)

    def test_model_name_checked(self):
        qubit = TransmonSpec(transition_frequency=TWO_PI * 7.2e9, position=0.15)
        with pytest.raises(ValueError, match="evolution_model"):
            X.Scenario(qubits=(qubit,), evolution_model="heisenberg")

    def test_reflection_count_matches_qubits(self):
        qubit = TransmonSpec(transition_frequency=TWO_PI * 7.2e9, position=0.15)
        with pytest.raises(ValueError, match="one reflection entry per qubit"):
            X.Scenario(
                qubits=(qubit,),
                reflections=(None, ReflectionSpec(0.1, 0.25)),
            )

    def test_qubit_before_mirror(self):
        with pytest.raises(ValueError, match="before its reflection point"):
            X.single_qubit_scenario(
                position=0.30, reflection=ReflectionSpec(0.1, 0.25)
            )


class TestSweepGrid:
    def test_default_axes(self):
        grid = X.SweepGrid.default()
        assert grid.focal_points.size == 81
        assert grid.focal_points[0] == 0.0
        assert grid.focal_points[-1] == pytest.approx(0.40, abs=1e-12)
        assert np.allclose(np.diff(grid.focal_points), 0.005)
        assert grid.amplitudes.size == 21
        assert grid.amplitudes[10] == pytest.approx(TWO_PI * 1.5e9, rel=1e-12)
        span = grid.amplitudes[-1] / grid.amplitudes[0]
        assert span == pytest.approx(10.0**1.5, rel=1e-12)
        assert tuple(grid.spot_sizes) == X.DEFAULT_SPOT_SIZES

    def test_axes_read_only(self):
        grid = X.SweepGrid.default()
        with pytest.raises(ValueError):
            grid.focal_points[0] = 1.0

    @pytest.mark.parametrize(
        "bad",
        [
            dict(focal_points=np.array([])),
            dict(focal_points=np.array([0.2, 0.1])),
            dict(focal_points=np.array([0.1, 0.1])),
            dict(amplitudes=np.array([-1.0, 1.0])),
            dict(amplitudes=np.array([1.0, np.nan])),
            dict(spot_sizes=np.array([0.0])),
        ],
    )
    def test_axis_validation(self, bad):
        good = dict(
            focal_points=np.array([0.1, 0.2]),
            amplitudes=np.array([1.0, 2.0]),
            spot_sizes=np.array([0.02]),
        )
        good.update(bad)
        with pytest.raises(ValueError):
            X.SweepGrid(**good)


class TestPopulationMap:
    @staticmethod
    def make(pg, pe=None):
        pg = np.asarray(pg, dtype=float)
        pe = 1.0 - pg if pe is None else np.asarray(pe, dtype=float)
        centre = float(pg.shape[0] // 2)  # qubit sits mid-axis
        return X.PopulationMap(
            focal_points=np.arange(pg.shape[0], dtype=float),
            amplitudes=1.0 + np.arange(pg.shape[1], dtype=float),
            spot_size=0.02,
            qubit_positions=(centre,) * pg.shape[2],
            pg=pg,
            pe=pe,
            pf=np.zeros_like(pg),
            leak=np.zeros_like(pg),
        )

    def test_valid_map(self):
        pmap = self.make(np.full((3, 2, 1), 0.25))
        assert pmap.n_qubits == 1

    def test_closure_enforced(self):
        with pytest.raises(ValueError, match="close to 1"):
            self.make(np.full((2, 2, 1), 0.3), pe=np.full((2, 2, 1), 0.3))

    def test_range_enforced(self):
        with pytest.raises(ValueError, match="lie in"):
            self.make(np.full((2, 2, 1), -0.1), pe=np.full((2, 2, 1), 1.1))

    def test_shape_enforced(self):
        with pytest.raises(ValueError, match="shape"):
            X.PopulationMap(
                focal_points=np.arange(3.0),
                amplitudes=np.arange(2.0),
                spot_size=0.02,
                qubit_positions=(0.15,),
                pg=np.zeros((2, 2, 1)),
                pe=np.ones((2, 2, 1)),
                pf=np.zeros((2, 2, 1)),
                leak=np.zeros((2, 2, 1)),
            )


class TestSweepMap:
    def test_shape_and_closure(self, small_map):
        assert small_map.pg.shape == (31, 7, 1)
        total = small_map.pg + small_map.pe + small_map.pf + small_map.leak
        assert np.max(np.abs(total - 1.0)) < 1e-6
        assert np.all(small_map.pf == 0.0)  # two-level model
        assert np.all(small_map.leak == 0.0)

    def test_contrast_curve_frozen(self, small_map):
        curve = X.contrast_curve(small_map)
        np.testing.assert_allclose(curve, SMALL_C, atol=1e-6)

    def test_row_frozen(self, small_map):
        row = small_map.pg[:, 3, 0]
        assert row[15] == pytest.approx(SMALL_ROW_PEAK, abs=1e-6)
        assert row[0] == pytest.approx(SMALL_ROW_EDGES[0], abs=1e-6)
        assert row[-1] == pytest.approx(SMALL_ROW_EDGES[1], abs=1e-6)

    def test_revival_sits_on_the_qubit(self, small_map):
        row = small_map.pg[:, 3, 0]
        d_peak = small_map.focal_points[int(np.argmax(row))]
        assert abs(d_peak - 0.15) <= SMALL_SIGMA_Q / 2.0

    def test_tiny_amplitude_leaves_ground_state(self):
        pmap = tiny_map()
        assert np.max(np.abs(1.0 - pmap.pg)) < 1e-9

    def test_deterministic_and_worker_independent(self):
        focals = np.array([0.10, 0.15, 0.20])
        amps = small_amplitudes()[2:5]
        first = tiny_map(focal_points=focals, amplitudes=amps)
        again = tiny_map(focal_points=focals, amplitudes=amps)
        np.testing.assert_array_equal(first.pg, again.pg)
        np.testing.assert_array_equal(first.pe, again.pe)
        forked = tiny_map(focal_points=focals, amplitudes=amps, workers=2)
        np.testing.assert_array_equal(first.pg, forked.pg)
        np.testing.assert_array_equal(first.pe, forked.pe)

    def test_two_qubit_rows_match_single_qubit_rows(self):
        # same shared field: each qubit of a two-qubit run must reproduce
        # the single-qubit computation exactly (no coupling is modeled)
        focals = np.array([0.10, 0.15, 0.20])
        amps = small_amplitudes()[2:5]
        grid = X.SweepGrid(
            focal_points=focals, amplitudes=amps, spot_sizes=np.array([0.05])
        )
        duo = X.two_qubit_scenario(spot_size=0.05)
        setup = X._plan_fields(duo, focals)
        solos = [
            X.single_qubit_scenario(
                spot_size=0.05, carrier=duo.carrier, position=q.position
            )
            for q in duo.qubits
        ]
        for i in range(focals.size):
            pair = X._sweep_row(duo, grid, setup, i)
            for q, solo in enumerate(solos):
                alone = X._sweep_row(solo, grid, setup, i)
                assert np.max(np.abs(pair[q] - alone[0])) <= 1e-12

    def test_two_qubit_map_close_to_single_qubit_maps(self):
        # public path: separately planned windows differ only at the
        # grid-discretization level
        focals = np.array([0.10, 0.15, 0.20])
        amps = small_amplitudes()[2:5]
        duo_map = tiny_map(
            focal_points=focals,
            amplitudes=amps,
            scenario=X.two_qubit_scenario(spot_size=0.05),
        )
        for q, position in enumerate((0.15, 0.20)):
            solo_map = tiny_map(
                focal_points=focals,
                amplitudes=amps,
                scenario=X.single_qubit_scenario(
                    spot_size=0.05, carrier=TWO_PI * 7.28e9, position=position
                ),
            )
            diff = np.max(np.abs(duo_map.pg[:, :, q] - solo_map.pg[:, :, 0]))
            assert diff < 5e-4

    def test_failure_names_the_grid_point(self):
        with pytest.raises(IntegrationError, match=r"d_f = 0\.1.*qubit 0"):
            tiny_map(focal_points=np.array([0.1, 0.2]), amplitudes=(1e15,))

    def test_grid_type_checked(self):
        scn = X.single_qubit_scenario()
        with pytest.raises(TypeError):
            X.sweep_focal_amplitude(scn, "not a grid")


class TestOptimalAmplitude:
    def test_small_map_optimum(self, small_map):
        best = X.optimal_amplitude(small_map)
        assert best == pytest.approx(TWO_PI * 2.5e9, rel=1e-12)
        assert best == small_map.amplitudes[int(np.argmax(SMALL_C))]

    def test_zero_amplitude_row_has_zero_contrast(self):
        pg = np.full((12, 3, 1), 0.4)
        pg[:, 1, 0] = 0.4  # flat row: C = 0
        pg[6, 2, 0] = 0.9  # revival row: C > 0
        pmap = TestPopulationMap.make(pg)
        curve = X.contrast_curve(pmap, exclusion=2.0)
        assert curve[0] == pytest.approx(0.0, abs=1e-15)
        assert curve[2] > 0.0

    def test_ties_break_toward_lower_amplitude(self):
        pg = np.full((12, 3, 1), 0.2)
        pg[6, 1, 0] = 0.9
        pg[6, 2, 0] = 0.9  # same contrast as column 1
        pmap = TestPopulationMap.make(pg)
        best = X.optimal_amplitude(pmap, exclusion=2.0)
        assert best == pmap.amplitudes[1]

    def test_constant_map_has_no_contrast(self):
        pmap = TestPopulationMap.make(np.full((12, 3, 1), 0.5))
        with pytest.raises(NoContrastError):
            X.optimal_amplitude(pmap)

    def test_exclusion_cannot_cover_everything(self, small_map):
        with pytest.raises(ValueError, match="exclusion"):
            X.contrast_curve(small_map, exclusion=10.0)


class TestSpatialResolution:
    def test_synthetic_gaussian(self):
        d = np.linspace(0.0, 0.6, 601)
        s = 0.04
        row = 0.1 + 0.8 * np.exp(-((d - 0.3) ** 2) / (2.0 * s**2))
        width = X.spatial_resolution(d, row)
        assert width == pytest.approx(2.0 * math.sqrt(2.0 * math.log(2.0)) * s,
                                      rel=0.02)

    def test_small_map_sigma_q_frozen(self, small_map):
        width = X.spatial_resolution(small_map.focal_points,
                                     small_map.pg[:, 3, 0])
        assert width == pytest.approx(SMALL_SIGMA_Q, rel=1e-6)

    def test_focal_grid_refinement_stable(self, small_grid):
        scn = X.single_qubit_scenario(spot_size=0.02)
        fine = X.SweepGrid(
            focal_points=0.005 * np.arange(61),
            amplitudes=small_grid.amplitudes,
            spot_sizes=small_grid.spot_sizes,
        )
        pmap = X.sweep_focal_amplitude(scn, fine)
        width = X.spatial_resolution(pmap.focal_points, pmap.pg[:, 3, 0])
        assert width == pytest.approx(SMALL_SIGMA_Q_REFINED, rel=1e-6)
        assert abs(width - SMALL_SIGMA_Q) / SMALL_SIGMA_Q < 0.05

    def test_flat_row_has_no_revival(self):
        d = np.linspace(0.0, 0.4, 41)
        with pytest.raises(NoRevivalError):
            X.spatial_resolution(d, np.full(41, 0.3))

    def test_short_row_rejected(self):
        with pytest.raises(ValueError, match="at least 8"):
            X.spatial_resolution(np.arange(4.0), np.arange(4.0))

    def test_mismatched_shapes_rejected(self):
        with pytest.raises(ValueError):
            X.spatial_resolution(np.arange(10.0), np.arange(9.0))


class TestCompression:
    def test_default_scenario_frozen(self):
        report = X.compression_experiment(X.single_qubit_scenario())
        assert report.focal_fwhm == pytest.approx(FOCAL_FWHM_35, abs=2e-12)
        assert report.input_fwhm == pytest.approx(INPUT_FWHM_35, abs=2e-11)
        assert report.ratio == report.input_fwhm / report.focal_fwhm
        assert report.focal_fwhm < 1e-9
        assert report.entrance.position == pytest.approx(0.0, abs=1e-12)
        assert report.focal.position == pytest.approx(1.03)

    def test_narrowband_limit(self):
        report = X.compression_experiment(
            X.single_qubit_scenario(spot_size=1.0)
        )
        assert report.ratio == pytest.approx(NARROWBAND_RATIO, abs=1e-3)
        assert report.ratio < 1.05

    def test_smaller_spot_focuses_tighter(self):
        report = X.compression_experiment(
            X.single_qubit_scenario(spot_size=0.07)
        )
        assert report.focal_fwhm == pytest.approx(FOCAL_FWHM_70, rel=1e-6)
        assert report.input_fwhm == pytest.approx(INPUT_FWHM_70, rel=1e-6)
        assert FOCAL_FWHM_35 < report.focal_fwhm  # halve sigma_f: tighter focus


class TestResolutionCurve:
    def test_single_point_matches_small_map(self, small_grid):
        scn = X.single_qubit_scenario(spot_size=0.02)
        points = X.resolution_curve(scn, grid=small_grid)
        assert len(points) == 1
        point = points[0]
        assert point.spot_size == 0.02
        assert point.amplitude[0] == pytest.approx(TWO_PI * 2.5e9, rel=1e-12)
        assert point.sigma_q[0] == pytest.approx(SMALL_SIGMA_Q, rel=1e-6)
        assert point.map.pg.shape == (31, 7, 1)


class TestReflectionStudy:
    def test_zero_reflectance_is_the_baseline(self, refl_entries):
        base = refl_entries[0]
        assert base.reflectance == 0.0
        assert base.distortion == (0.0,)

    def test_distortion_frozen_and_increasing(self, refl_entries):
        strong = refl_entries[1]
        assert strong.reflectance == pytest.approx(math.sqrt(0.10), rel=1e-12)
        assert strong.distortion[0] == pytest.approx(REFL_DISTORTION_316,
                                                     rel=1e-6)
        assert strong.distortion[0] > refl_entries[0].distortion[0]

    def test_reflection_distorts_the_row(self, refl_entries):
        row = refl_entries[1].map.pg[:, 3, 0]
        assert row[15] == pytest.approx(REFL_PG_FOCUS_316, abs=1e-4)

    def test_reflection_shifts_the_optimum(self, refl_entries):
        base_best = X.optimal_amplitude(refl_entries[0].map)
        strong_best = X.optimal_amplitude(refl_entries[1].map)
        assert strong_best != base_best
        amps = refl_entries[1].map.amplitudes
        assert strong_best == amps[REFL_OPT_SHIFT_INDEX]

    def test_needs_reflection_geometry(self, small_grid):
        scn = X.single_qubit_scenario(spot_size=0.02)
        with pytest.raises(ValueError, match="reflection geometry"):
            X.reflection_study(scn, (0.0, 0.1), grid=small_grid)

    def test_reflectance_range_checked(self, small_grid):
        scn = X.single_qubit_scenario(
            spot_size=0.02, reflection=ReflectionSpec(0.1, 0.25)
        )
        with pytest.raises(ValueError, match=r"\[0, 1\)"):
            X.reflection_study(scn, (0.0, 1.5), grid=small_grid)


class TestWriters:
    def test_map_csv_exact_bytes(self, tmp_path):
        pg = np.array([[[0.25], [0.5]], [[0.75], [1.0]]])
        pmap = X.PopulationMap(
            focal_points=np.array([0.1, 0.2]),
            amplitudes=np.array([1.0, 2.0]),
            spot_size=0.02,
            qubit_positions=(0.15,),
            pg=pg,
            pe=1.0 - pg,
            pf=np.zeros_like(pg),
            leak=np.zeros_like(pg),
        )
        path = tmp_path / "map.csv"
        X.write_map_csv(pmap, path)
        expected = (
            "d_f_m,amplitude,sigma_f_m,qubit,pg,pe,pf,leak\n"
            "0.1,1.0,0.02,0,0.25,0.75,0.0,0.0\n"
            "0.1,2.0,0.02,0,0.5,0.5,0.0,0.0\n"
            "0.2,1.0,0.02,0,0.75,0.25,0.0,0.0\n"
            "0.2,2.0,0.02,0,1.0,0.0,0.0,0.0\n"
        )
        assert path.read_text() == expected

    def test_map_csv_deterministic(self, tmp_path, small_map):
        first = tmp_path / "a.csv"
        second = tmp_path / "b.csv"
        X.write_map_csv(small_map, first)
        X.write_map_csv(small_map, second)
        assert first.read_bytes() == second.read_bytes()

    def test_resolution_csv(self, tmp_path, small_map):
        point = X.ResolutionPoint(
            spot_size=0.02, sigma_q=(0.089,), amplitude=(1.0,), map=small_map
        )
        path = tmp_path / "resolution.csv"
        X.write_resolution_csv([point], path)
        assert path.read_text() == "sigma_f_m,sigma_q_m\n0.02,0.089\n"

    def test_envelope_csv(self, tmp_path):
        report = X.compression_experiment(
            X.single_qubit_scenario(spot_size=1.0)
        )
        path = tmp_path / "wave.csv"
        X.write_envelope_csv(report.focal, path)
        lines = path.read_text().splitlines()
        assert lines[0] == "t_ns,field,envelope"
        assert len(lines) == report.focal.grid.count + 1
        t_ns, field, env = (float(v) for v in lines[1].split(","))
        assert t_ns == report.focal.grid.times[0] * 1e9
        assert abs(field) <= env + 1e-12
