"""Direct field plus a single point-like broadband output reflection.

The waveguide output reflects every frequency with the same amplitude r
and phase, so the echo seen at a qubit position z_q is the forward field
evaluated at the image position 2 z_r - z_q: the extra round trip
2 (z_r - z_q) picks up the full dispersive transfer of the guide.  One
bounce only; multi-bounce ringing between couplers is out of scope.

    E_tot(t) = E(t, z_q) + phase * r * E(t, 2 z_r - z_q)
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .pulse import (
    PulseSpec,
    SampledWaveform,
    TimeGrid,
    field_at_position,
    plan_synthesis,
    synthesize_at_focus,
)
from .waveguide import DispersionModel


@dataclass(frozen=True)
class ReflectionSpec:
    """Point-like reflection of amplitude r at z_r (0 <= r < 1).

    `phase` selects whether the bounce preserves (+1) or inverts (-1)
    the field sign; the physical default is +1 (same amplitude and
    phase at every frequency).
    """

    amplitude: float
    reflection_point: float  # z_r, metres
    phase: int = 1

    def __post_init__(self):
        if not 0.0 <= self.amplitude < 1.0:
            raise ValueError("reflection amplitude must satisfy 0 <= r < 1")
        if self.phase not in (1, -1):
            raise ValueError("reflection phase must be +1 or -1")

    @classmethod
    def from_power_percent(
        cls, percent: float, reflection_point: float, phase: int = 1
    ) -> "ReflectionSpec":
        """Reflection from the reflected power fraction in percent.

        10% -> r = sqrt(0.10) ~ 0.316; 3% -> r ~ 0.173.
        """
        if not 0.0 <= percent < 100.0:
            raise ValueError("reflected power must satisfy 0 <= percent < 100")
        return cls(
            amplitude=math.sqrt(percent / 100.0),
            reflection_point=reflection_point,
            phase=phase,
        )

    @classmethod
    def from_return_loss_db(
        cls, decibels: float, reflection_point: float, phase: int = 1
    ) -> "ReflectionSpec":
        """Reflection from a return loss in dB (sign-insensitive).

        -10 dB -> r = 0.316 (10% power); -15 dB -> r = 0.178.
        """
        if decibels == 0.0:
            raise ValueError("zero return loss means total reflection (r = 1)")
        return cls(
            amplitude=10.0 ** (-abs(decibels) / 20.0),
            reflection_point=reflection_point,
            phase=phase,
        )


def image_position(z_q: float, refl: ReflectionSpec) -> float:
    """Mirror image of the qubit position across the reflection point."""
    return 2.0 * refl.reflection_point - z_q


def combine_with_echo(
    direct: SampledWaveform, echo: SampledWaveform, refl: ReflectionSpec
) -> SampledWaveform:
    """Superpose the direct wave with a scaled echo on the same grid.

    For r = 0 the direct waveform is returned unchanged (bit-identical).
    """
    if refl.amplitude == 0.0:
        return direct
    total = direct.samples + (refl.phase * refl.amplitude) * echo.samples
    return SampledWaveform(grid=direct.grid, samples=total, position=direct.position)


def field_with_reflection(
    spec: PulseSpec,
    model: DispersionModel,
    z_q: float,
    refl: ReflectionSpec,
    time_grid: TimeGrid | None = None,
) -> SampledWaveform:
    """Total field at z_q: direct wave plus one dispersive output echo.

    With time_grid omitted, a window covering both the direct arrival at
    z_q and the echo from the image position is planned automatically.
    For r = 0 the result is identical to field_at_position.
    """
    if z_q >= refl.reflection_point:
        raise ValueError(
            f"qubit position {z_q} m must lie before the reflection point "
            f"{refl.reflection_point} m"
        )
    z_img = image_position(z_q, refl)
    profile = None
    if time_grid is None:
        profile, time_grid = plan_synthesis(spec, model, z_min=z_q, z_max=z_img)
    focal = synthesize_at_focus(spec, model, time_grid, profile=profile)
    direct = field_at_position(spec, model, z_q, time_grid, focal=focal)
    if refl.amplitude == 0.0:
        return direct
    echo = field_at_position(spec, model, z_img, time_grid, focal=focal)
    return combine_with_echo(direct, echo, refl)
