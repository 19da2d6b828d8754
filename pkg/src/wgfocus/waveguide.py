"""TE10 dispersion model of a hollow rectangular waveguide.

The fundamental TE10 mode of a rectangular guide with broad inner wall a
and narrow inner wall b < a propagates above the cutoff

    omega_c = pi * c / a,        c = 1 / sqrt(mu * eps),

with dispersion relation

    omega(k) = c * sqrt(k**2 + k_c**2),        k_c = omega_c / c,

so that

    k(omega)  = sqrt(omega**2 - omega_c**2) / c,
    v_g       = d omega / d k = c * sqrt(1 - (omega_c/omega)**2),
    v_p       = omega / k = c**2 / v_g,
    lambda_g  = 2 pi / k.

All quantities are SI: angular frequencies in rad/s, wavenumbers in
rad/m, lengths in metres, velocities in m/s.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import EvanescentFrequencyError

SPEED_OF_LIGHT = 299_792_458.0  # m/s, vacuum


@dataclass(frozen=True)
class WaveguideSpec:
    """Inner geometry and filling of a rectangular waveguide.

    Parameters
    ----------
    broad : float
        Broad inner wall dimension a in metres.
    narrow : float
        Narrow inner wall dimension b in metres.
    length : float
        Guide length in metres (z runs from 0 at the input to `length`).
    epsilon_r, mu_r : float
        Relative permittivity and permeability of the filling.
    """

    broad: float = 0.0229
    narrow: float = 0.0102
    length: float = 0.25
    epsilon_r: float = 1.0
    mu_r: float = 1.0

    def __post_init__(self):
        if not 0.0 < self.narrow < self.broad:
            raise ValueError(
                f"need broad > narrow > 0, got a={self.broad}, b={self.narrow}"
            )
        if self.length <= 0.0:
            raise ValueError(f"guide length must be positive, got {self.length}")
        if self.epsilon_r <= 0.0 or self.mu_r <= 0.0:
            raise ValueError("relative permittivity/permeability must be positive")

    @property
    def medium_speed(self) -> float:
        """Wave speed 1/sqrt(mu*eps) in the filling, m/s."""
        return SPEED_OF_LIGHT / math.sqrt(self.epsilon_r * self.mu_r)


@dataclass(frozen=True)
class DispersionModel:
    """TE10 dispersion fixed by a cutoff frequency and a medium speed."""

    omega_c: float  # rad/s
    c: float = SPEED_OF_LIGHT  # m/s

    def __post_init__(self):
        if self.omega_c <= 0.0:
            raise ValueError(f"cutoff must be positive, got {self.omega_c}")
        if self.c <= 0.0:
            raise ValueError(f"medium speed must be positive, got {self.c}")

    @property
    def k_c(self) -> float:
        """Cutoff wavevector omega_c / c, rad/m."""
        return self.omega_c / self.c

    @property
    def cutoff_frequency(self) -> float:
        """Cutoff in cyclic units, Hz."""
        return self.omega_c / (2.0 * math.pi)


def cutoff_from_geometry(spec: WaveguideSpec) -> DispersionModel:
    """TE10 dispersion model from guide geometry: omega_c = pi*c/a."""
    return DispersionModel(omega_c=mode_cutoff(spec, 1, 0), c=spec.medium_speed)


def mode_cutoff(spec: WaveguideSpec, m: int, n: int) -> float:
    """Cutoff angular frequency of the TE_mn mode.

    omega_c = c * sqrt((m*pi/a)**2 + (n*pi/b)**2).  TE10 is the
    fundamental; TE20 sits at exactly twice its cutoff and TE01 at
    (a/b) times it, bounding the single-mode band.
    """
    if m < 0 or n < 0 or (m == 0 and n == 0):
        raise ValueError(f"invalid mode indices ({m}, {n})")
    c = spec.medium_speed
    return c * math.hypot(m * math.pi / spec.broad, n * math.pi / spec.narrow)


def single_mode_band(spec: WaveguideSpec) -> tuple[float, float]:
    """Angular-frequency band (omega_c10, omega of next mode)."""
    lo = mode_cutoff(spec, 1, 0)
    hi = min(mode_cutoff(spec, 2, 0), mode_cutoff(spec, 0, 1))
    return lo, hi


def _as_array(x):
    arr = np.asarray(x, dtype=float)
    return arr, arr.ndim == 0


def omega_of_k(model: DispersionModel, k) -> np.ndarray | float:
    """Angular frequency of TE10 at wavenumber k: c*sqrt(k^2 + k_c^2).

    Accepts scalars or arrays; k must be >= 0 (propagation toward +z is
    taken care of elsewhere, so no negative branch exists here).
    """
    karr, scalar = _as_array(k)
    if np.any(karr < 0.0):
        raise ValueError("negative wavenumber; omega(k) is defined for k >= 0")
    # hypot(c*k, omega_c) rather than c*hypot(k, k_c): exact at k = 0
    omega = np.hypot(model.c * karr, model.omega_c)
    return float(omega) if scalar else omega


def k_of_omega(model: DispersionModel, omega) -> np.ndarray | float:
    """Propagation constant sqrt(omega^2 - omega_c^2)/c, inverse of omega_of_k."""
    warr, scalar = _as_array(omega)
    if np.any(warr < model.omega_c):
        raise EvanescentFrequencyError(
            f"frequency below cutoff {model.omega_c:.6e} rad/s; "
            "only propagating TE10 fields are modeled"
        )
    k = np.sqrt((warr - model.omega_c) * (warr + model.omega_c)) / model.c
    return float(k) if scalar else k


def group_velocity(model: DispersionModel, omega) -> np.ndarray | float:
    """Envelope speed v_g = c*sqrt(1 - (omega_c/omega)^2); zero at cutoff."""
    warr, scalar = _as_array(omega)
    if np.any(warr < model.omega_c):
        raise EvanescentFrequencyError("group velocity undefined below cutoff")
    ratio = model.omega_c / warr
    vg = model.c * np.sqrt(np.maximum(0.0, (1.0 - ratio) * (1.0 + ratio)))
    return float(vg) if scalar else vg


def phase_velocity(model: DispersionModel, omega) -> np.ndarray | float:
    """Phase speed omega/k(omega) >= c; diverges at cutoff."""
    warr, scalar = _as_array(omega)
    if np.any(warr <= model.omega_c):
        raise EvanescentFrequencyError("phase velocity diverges at/below cutoff")
    vp = warr / k_of_omega(model, warr)
    return float(vp) if scalar else vp


def guide_wavelength(model: DispersionModel, omega) -> np.ndarray | float:
    """Guided wavelength 2*pi/k(omega); longer than the free-space wavelength."""
    warr, scalar = _as_array(omega)
    if np.any(warr <= model.omega_c):
        raise EvanescentFrequencyError("guide wavelength diverges at/below cutoff")
    lam = 2.0 * math.pi / k_of_omega(model, warr)
    return float(lam) if scalar else lam
