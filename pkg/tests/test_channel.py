"""Tests for the single-bounce output-reflection channel."""

import math

import numpy as np
import pytest

from wgfocus.channel import ReflectionSpec, field_with_reflection, image_position
from wgfocus.pulse import (
    analytic_signal,
    field_at_position,
    plan_synthesis,
    pulse_for_frequency,
    signal_energy,
    synthesize_at_focus,
)
from wgfocus.waveguide import WaveguideSpec, cutoff_from_geometry, group_velocity

TWO_PI = 2.0 * math.pi
W0 = TWO_PI * 7.2e9
MODEL = cutoff_from_geometry(WaveguideSpec())
Z_Q = 0.25
Z_R = 0.40
R316 = 0.316


def envelope_peak_time(wave):
    env = analytic_signal(wave).envelope
    i = int(np.argmax(env))
    y0, y1, y2 = env[i - 1 : i + 2]
    frac = 0.5 * (y0 - y2) / (y0 - 2 * y1 + y2)
    return wave.grid.times[i] + frac * wave.grid.step


@pytest.fixture(scope="module")
def bounce():
    """Direct, echo, and composite fields for a focal qubit 15 cm before z_r."""
    spec = pulse_for_frequency(MODEL, W0, spot_size=0.10, focal_point=Z_Q)
    refl = ReflectionSpec(amplitude=R316, reflection_point=Z_R)
    profile, grid = plan_synthesis(
        spec, MODEL, z_min=Z_Q, z_max=image_position(Z_Q, refl)
    )
    focal = synthesize_at_focus(spec, MODEL, grid, profile=profile)
    direct = field_at_position(spec, MODEL, Z_Q, grid, focal=focal)
    echo = field_at_position(spec, MODEL, image_position(Z_Q, refl), grid, focal=focal)
    total = field_with_reflection(spec, MODEL, Z_Q, refl, grid)
    return spec, refl, grid, direct, echo, total


class TestReflectionSpec:
    def test_amplitude_range(self):
        with pytest.raises(ValueError):
            ReflectionSpec(amplitude=-0.1, reflection_point=1.0)
        with pytest.raises(ValueError):
            ReflectionSpec(amplitude=1.0, reflection_point=1.0)

    def test_phase_values(self):
        assert ReflectionSpec(0.1, 1.0, phase=-1).phase == -1
        with pytest.raises(ValueError, match="phase"):
            ReflectionSpec(0.1, 1.0, phase=0)

    def test_power_percent_aliases(self):
        ten = ReflectionSpec.from_power_percent(10.0, 1.0)
        assert ten.amplitude == pytest.approx(math.sqrt(0.10), rel=1e-15)
        assert ten.amplitude == pytest.approx(0.316, abs=5e-4)
        three = ReflectionSpec.from_power_percent(3.0, 1.0)
        assert three.amplitude == pytest.approx(0.17320508075688773, rel=1e-15)

    def test_return_loss_aliases(self):
        # -10 dB return loss is exactly the 10% power case
        db10 = ReflectionSpec.from_return_loss_db(-10.0, 1.0)
        assert db10.amplitude == ReflectionSpec.from_power_percent(10.0, 1.0).amplitude
        db15 = ReflectionSpec.from_return_loss_db(-15.0, 1.0)
        assert db15.amplitude == pytest.approx(0.1778279410038923, rel=1e-12)
        # sign convention of the quoted dB value does not matter
        assert ReflectionSpec.from_return_loss_db(15.0, 1.0).amplitude == db15.amplitude

    def test_constructor_validation(self):
        with pytest.raises(ValueError):
            ReflectionSpec.from_power_percent(100.0, 1.0)
        with pytest.raises(ValueError):
            ReflectionSpec.from_return_loss_db(0.0, 1.0)

    def test_image_position(self):
        refl = ReflectionSpec(0.1, 0.40)
        assert image_position(0.25, refl) == pytest.approx(0.55, rel=1e-15)


class TestFieldWithReflection:
    def test_zero_reflection_is_direct_field(self, bounce):
        spec, _, grid, direct, _, _ = bounce
        r0 = field_with_reflection(
            spec, MODEL, Z_Q, ReflectionSpec(0.0, Z_R), grid
        )
        assert np.array_equal(r0.samples, direct.samples)
        assert r0.position == direct.position

    def test_qubit_must_precede_mirror(self, bounce):
        spec, refl, grid, *_ = bounce
        with pytest.raises(ValueError, match="before the reflection point"):
            field_with_reflection(spec, MODEL, 0.45, refl, grid)
        with pytest.raises(ValueError, match="before the reflection point"):
            field_with_reflection(spec, MODEL, Z_R, refl, grid)

    def test_echo_delay_matches_group_delay(self, bounce):
        _, refl, _, direct, echo, _ = bounce
        delay = envelope_peak_time(echo) - envelope_peak_time(direct)
        expected = 2.0 * (Z_R - Z_Q) / group_velocity(MODEL, W0)
        assert delay == pytest.approx(expected, rel=0.02)  # measured 0.7%

    def test_linear_in_reflection_amplitude(self, bounce):
        spec, _, grid, direct, echo, total = bounce
        residual = (total.samples - direct.samples) - R316 * echo.samples
        assert np.max(np.abs(residual)) < 1e-14
        half = field_with_reflection(
            spec, MODEL, Z_Q, ReflectionSpec(R316 / 2, Z_R), grid
        )
        doubled = 2.0 * (half.samples - direct.samples)
        assert np.allclose(
            doubled, total.samples - direct.samples, rtol=0, atol=1e-14
        )

    def test_energy_bound(self, bounce):
        *_, direct, _, total = bounce
        limit = (1.0 + R316) ** 2 * signal_energy(direct)
        assert signal_energy(total) <= limit * (1.0 + 1e-12)

    def test_post_peak_structure(self, bounce):
        _, _, grid, direct, _, total = bounce
        t_pk = envelope_peak_time(direct)
        after = grid.times > t_pk + 1e-9
        env_direct = analytic_signal(direct).envelope
        env_total = analytic_signal(total).envelope
        frac_direct = np.sum(env_direct[after] ** 2) / np.sum(env_direct**2)
        frac_total = np.sum(env_total[after] ** 2) / np.sum(env_total**2)
        assert frac_total > 2.0 * frac_direct  # measured 3.7x

    def test_phase_flip_subtracts_echo(self, bounce):
        spec, _, grid, direct, echo, _ = bounce
        flipped = field_with_reflection(
            spec, MODEL, Z_Q, ReflectionSpec(R316, Z_R, phase=-1), grid
        )
        assert np.allclose(
            flipped.samples,
            direct.samples - R316 * echo.samples,
            rtol=0,
            atol=1e-14,
        )

    def test_auto_planned_grid_covers_echo(self, bounce):
        spec, refl, *_ = bounce
        total = field_with_reflection(spec, MODEL, Z_Q, refl)
        echo_tail = envelope_peak_time(total) + 2.0 * (Z_R - Z_Q) / group_velocity(
            MODEL, W0
        )
        assert total.grid.times[-1] > echo_tail
        assert total.position == Z_Q
