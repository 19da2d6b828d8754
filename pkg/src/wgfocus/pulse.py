"""Self-focusing chirped pulses on the TE10 mode.

A pulse is defined in wavenumber space by a Gaussian profile

    E(k) = exp(-sigma_f**2 (k - k0)**2 / 2) * exp(-eta * k_c**2 / k**2)

(the second factor is an optional smooth high-pass that suppresses
near-cutoff components).  The focal waveform is the cosine transform

    E_f(t) = E0 * integral dk E(k) cos(omega(k) t),

which peaks at t = 0 where all spectral components are in phase.  The
field anywhere else follows from the one-sided spectral transfer
exp(-i k(omega) dz) (per positive-frequency component, with the
e^{+i omega t} synthesis convention), so envelopes at omega move by
dz / v_g(omega): the waveform at the waveguide input z = 0 is the
stretched ascending chirp that recompresses at z = d_f.

Time grids are uniform and must comfortably contain the signal; every
synthesis/propagation checks that the first and last 1% of the window
stay below 1e-4 of the peak and raises WindowingError otherwise.
"""

from __future__ import annotations

import math
import struct
from dataclasses import dataclass

import numpy as np
import scipy.fft
import scipy.signal

from .errors import (
    AliasingError,
    ConfigurationError,
    FileFormatError,
    UnboundedWidthError,
    WindowingError,
)
from .waveguide import DispersionModel, group_velocity, k_of_omega, omega_of_k

EDGE_FRACTION = 0.01  # window share inspected at each end
EDGE_LIMIT = 1e-4  # max |edge| / |peak| before a WindowingError
SPECTRAL_EDGE_LIMIT = 1e-6  # max edge amplitude of a spectral profile
ENVELOPE_FLOOR = 1e-3  # below this fraction of peak the phase is masked


@dataclass(frozen=True)
class TimeGrid:
    """Uniform time grid: count samples from start with spacing step."""

    start: float
    step: float
    count: int

    def __post_init__(self):
        if self.step <= 0.0:
            raise ValueError(f"time step must be positive, got {self.step}")
        if self.count < 2:
            raise ValueError("need at least two samples")

    @property
    def times(self) -> np.ndarray:
        return self.start + self.step * np.arange(self.count)

    @property
    def span(self) -> float:
        return self.step * (self.count - 1)

    @property
    def sample_rate(self) -> float:
        return 1.0 / self.step


@dataclass(frozen=True, eq=False)
class SpectralField:
    """One-sided spectrum on a uniform k grid (all k > 0)."""

    k: np.ndarray  # rad/m, strictly increasing, uniform
    amplitude: np.ndarray  # complex, dimensionless

    def __post_init__(self):
        k = np.asarray(self.k, dtype=float)
        amp = np.asarray(self.amplitude, dtype=complex)
        if k.ndim != 1 or k.shape != amp.shape or k.size < 2:
            raise ValueError("k and amplitude must be matching 1-D arrays")
        if k[0] <= 0.0:
            raise ValueError("spectral grid must satisfy k > 0")
        dk = np.diff(k)
        if np.any(dk <= 0) or not np.allclose(dk, dk[0], rtol=1e-9, atol=0.0):
            raise ValueError("spectral grid must be uniform and increasing")
        mag = np.abs(amp)
        peak = mag.max()
        if peak > 0 and max(mag[0], mag[-1]) > SPECTRAL_EDGE_LIMIT * peak:
            raise ValueError(
                "spectral amplitude does not decay at the grid edges "
                f"(edge/peak = {max(mag[0], mag[-1]) / peak:.2e})"
            )
        object.__setattr__(self, "k", k)
        object.__setattr__(self, "amplitude", amp)

    @property
    def dk(self) -> float:
        return float(self.k[1] - self.k[0])


@dataclass(frozen=True, eq=False)
class SampledWaveform:
    """Real field samples at one position along the guide."""

    grid: TimeGrid
    samples: np.ndarray
    position: float  # metres

    def __post_init__(self):
        s = np.asarray(self.samples, dtype=float)
        if s.ndim != 1 or s.size != self.grid.count:
            raise ValueError("samples must be 1-D and match the grid")
        if not np.all(np.isfinite(s)):
            raise ValueError("samples must be finite")
        object.__setattr__(self, "samples", s)


@dataclass(frozen=True, eq=False)
class AnalyticSignal:
    """Envelope / unwrapped phase / instantaneous frequency of a waveform.

    `frequency` is NaN (and `valid` False) where the envelope sits below
    ENVELOPE_FLOOR of its peak; the phase of a near-zero signal is noise.
    """

    grid: TimeGrid
    envelope: np.ndarray
    phase: np.ndarray
    frequency: np.ndarray  # rad/s, NaN where invalid
    valid: np.ndarray  # bool


@dataclass(frozen=True)
class PulseSpec:
    """Spectral definition of one self-focusing pulse.

    amplitude is the target focal envelope peak (the synthesis output is
    normalized to it); spot_size is the k-space Gaussian width parameter
    sigma_f; focal_point d_f is where/when (t = 0) the pulse compresses.
    """

    spot_size: float  # sigma_f, metres
    central_wavevector: float  # k0, rad/m
    focal_point: float  # d_f, metres
    amplitude: float = 1.0  # E0
    highpass_coefficient: float = 0.01  # eta
    highpass_enabled: bool = True

    def __post_init__(self):
        if self.spot_size <= 0.0:
            raise ValueError(f"spot size must be positive, got {self.spot_size}")
        if self.central_wavevector <= 0.0:
            raise ValueError("central wavevector must be positive")
        if self.focal_point < 0.0:
            raise ValueError(f"focal point must be >= 0, got {self.focal_point}")
        if self.highpass_coefficient < 0.0:
            raise ValueError("high-pass coefficient must be >= 0")


def pulse_for_frequency(
    model: DispersionModel,
    omega0: float,
    spot_size: float,
    focal_point: float,
    **kwargs,
) -> PulseSpec:
    """PulseSpec whose central wavevector matches carrier omega0 (rad/s)."""
    k0 = k_of_omega(model, omega0)
    if k0 <= 0.0:
        raise ConfigurationError("carrier must lie strictly above the cutoff")
    return PulseSpec(
        spot_size=spot_size, central_wavevector=k0, focal_point=focal_point, **kwargs
    )


def spectral_amplitude(spec: PulseSpec, model: DispersionModel, k) -> np.ndarray:
    """Spectral envelope at wavenumber k (> 0): Gaussian times high-pass."""
    k = np.asarray(k, dtype=float)
    amp = np.exp(-0.5 * spec.spot_size**2 * (k - spec.central_wavevector) ** 2)
    if spec.highpass_enabled and spec.highpass_coefficient > 0.0:
        with np.errstate(divide="ignore"):
            amp = amp * np.exp(-spec.highpass_coefficient * (model.k_c / k) ** 2)
    return amp


def spectral_profile(
    spec: PulseSpec, model: DispersionModel, n_points: int = 4096
) -> SpectralField:
    """Sample the pulse spectrum on a uniform grid spanning k0 +- 6/sigma_f.

    The grid is clipped to k > 0; if the clipped-away region would carry
    non-negligible amplitude the spot size is too small for the carrier
    and a ConfigurationError is raised.
    """
    if n_points < 16:
        raise ValueError("spectral grid needs at least 16 points")
    span = 6.0 / spec.spot_size
    hi = spec.central_wavevector + span
    lo = spec.central_wavevector - span
    if lo > 0.0:
        k = np.linspace(lo, hi, n_points)
    else:
        # keep spacing uniform while excluding k = 0 itself
        k = np.linspace(0.0, hi, n_points + 1)[1:]
    amp = spectral_amplitude(spec, model, k)
    peak = amp.max()
    if max(amp[0], amp[-1]) > SPECTRAL_EDGE_LIMIT * peak:
        raise ConfigurationError(
            "spectral amplitude is non-negligible at k -> 0: spot size "
            f"{spec.spot_size} m is too small for central wavevector "
            f"{spec.central_wavevector} rad/m (enable the high-pass filter "
            "or increase the spot size)"
        )
    return SpectralField(k=k, amplitude=amp.astype(complex))


def _check_window(samples: np.ndarray, context: str) -> None:
    peak = np.max(np.abs(samples))
    if peak == 0.0:
        return
    m = max(1, int(round(EDGE_FRACTION * samples.size)))
    edge = max(np.max(np.abs(samples[:m])), np.max(np.abs(samples[-m:])))
    if edge > EDGE_LIMIT * peak:
        raise WindowingError(
            f"{context}: signal reaches the window edge "
            f"(edge/peak = {edge / peak:.2e} > {EDGE_LIMIT:.0e}); "
            "use a wider time window"
        )


def _envelope_pad(
    prof: SpectralField,
    model: DispersionModel,
    floor: float = 1e-5,
    t_step: float = 0.25e-9,
) -> float | None:
    """Half-duration of the focal envelope down to `floor` of its peak.

    Probes |sum_k amp e^{i omega t} dk| on a coarse one-sided t grid (the
    focal waveform of a real spectrum is even in t).  The probe cannot
    see past the alias horizon pi/(v_g_max dk) of the discrete spectrum;
    returns None if the envelope has not decayed by then, signalling
    that a denser spectral grid is needed.
    """
    omega = omega_of_k(model, prof.k)
    v_fast = group_velocity(model, float(omega[-1]))
    t_alias = math.pi / (v_fast * prof.dk)
    t = np.arange(0.0, 0.9 * t_alias, t_step)
    env = np.empty(t.size)
    block = max(1, int(8e6 // prof.k.size))
    for i in range(0, t.size, block):
        env[i : i + block] = np.abs(
            np.exp(1j * np.outer(t[i : i + block], omega)) @ prof.amplitude
        )
    peak = env.max()
    if env[-1] >= floor * peak:
        return None
    last = int(np.nonzero(env >= floor * peak)[0][-1])
    return float(t[last]) + max(1e-9, 8.0 * t_step)


def suggest_time_grid(
    spec: PulseSpec,
    model: DispersionModel,
    z_min: float | None = None,
    z_max: float | None = None,
    *,
    points_per_cycle: float = 32.0,
    tail_floor: float = 1e-7,
    profile: SpectralField | None = None,
) -> TimeGrid:
    """Time window sized for the pulse observed anywhere in [z_min, z_max].

    The slowest spectral component carrying more than tail_floor of the
    peak amplitude bounds the arrival-time spread (z - d_f)/v_g; the
    window covers that spread for the requested positions plus a padding
    measured from the focal envelope itself (near-cutoff components ring
    far beyond the Gaussian core).  t = 0 (the focal instant) is always
    a sample.  The step resolves the highest grid frequency with
    points_per_cycle samples per cycle, dense enough for phase
    unwrapping and carrier-resolved integration.
    """
    prof = profile if profile is not None else spectral_profile(spec, model)
    mag = np.abs(prof.amplitude)
    sig = np.nonzero(mag >= tail_floor * mag.max())[0]
    k_slow = prof.k[sig[0]]
    v_slow = group_velocity(model, omega_of_k(model, k_slow))
    pad = _envelope_pad(prof, model)
    if pad is None:
        raise WindowingError(
            "envelope ringing outlives the alias horizon of the spectral "
            "grid; increase the number of spectral points"
        )

    dz_lo = min(0.0, (z_min if z_min is not None else spec.focal_point) - spec.focal_point)
    dz_hi = max(0.0, (z_max if z_max is not None else spec.focal_point) - spec.focal_point)
    t_lo = dz_lo / v_slow - pad
    t_hi = dz_hi / v_slow + pad

    f_max = omega_of_k(model, prof.k[-1]) / (2.0 * math.pi)
    dt = 1.0 / (points_per_cycle * f_max)
    n_neg = int(math.ceil(-t_lo / dt))
    n_pos = int(math.ceil(t_hi / dt))
    count = 4 * scipy.fft.next_fast_len(
        int(math.ceil((n_neg + n_pos + 1) / 4)), real=True
    )
    return TimeGrid(start=-n_neg * dt, step=dt, count=count)


def plan_synthesis(
    spec: PulseSpec,
    model: DispersionModel,
    z_min: float | None = None,
    z_max: float | None = None,
    *,
    n_points: int = 4096,
    max_points: int = 1 << 18,
    points_per_cycle: float = 32.0,
) -> tuple[SpectralField, TimeGrid]:
    """Spectral grid and time window that can hold the pulse over [z_min, z_max].

    Doubles the spectral point count until the window fits inside the
    discrete spectrum's alias horizon (phase advance between adjacent k
    samples below 0.9 pi anywhere on the window).
    """
    n = max(16, n_points)
    while True:
        prof = spectral_profile(spec, model, n)
        grid = None
        if _envelope_pad(prof, model) is not None:
            grid = suggest_time_grid(
                spec, model, z_min, z_max,
                points_per_cycle=points_per_cycle, profile=prof,
            )
            t_reach = max(abs(grid.start), abs(grid.start + grid.span))
            v_fast = group_velocity(model, omega_of_k(model, prof.k[-1]))
            if v_fast * prof.dk * t_reach < 0.9 * math.pi:
                return prof, grid
        if n >= max_points:
            raise WindowingError(
                f"no spectral grid up to {max_points} points covers the "
                "requested position range without aliasing"
            )
        n *= 2


def _ksum_field(prof: SpectralField, model: DispersionModel, times: np.ndarray) -> np.ndarray:
    """Direct evaluation of Re sum_k amp(k) e^{i omega(k) t} dk, chunked in t."""
    omega = omega_of_k(model, prof.k)
    re = np.ascontiguousarray(prof.amplitude.real)
    im = prof.amplitude.imag
    has_imag = bool(np.any(im != 0.0))
    out = np.empty(times.size)
    block = max(1, int(4e6 // prof.k.size))
    buf = np.empty((min(block, times.size), prof.k.size))
    for i in range(0, times.size, block):
        m = min(block, times.size - i)
        phases = np.multiply(times[i : i + m, None], omega[None, :], out=buf[:m])
        if has_imag:
            out[i : i + m] = np.cos(phases) @ re - np.sin(phases) @ im
        else:
            np.cos(phases, out=phases)
            np.matmul(phases, re, out=out[i : i + m])
    return out * prof.dk


def _refine(samples: np.ndarray, factor: int) -> np.ndarray:
    """Exact band-limited interpolation onto a factor-times-finer step."""
    n = samples.size
    spectrum = np.fft.rfft(samples)
    if n % 2 == 0:
        spectrum[-1] *= 0.5
    padded = np.zeros(factor * n // 2 + 1, dtype=complex)
    padded[: spectrum.size] = spectrum
    return np.fft.irfft(padded, factor * n) * factor


def synthesize_at_focus(
    spec: PulseSpec,
    model: DispersionModel,
    grid: TimeGrid | None = None,
    *,
    profile: SpectralField | None = None,
) -> SampledWaveform:
    """Focal waveform: k-integral of the spectrum, peaking at t = 0.

    Normalized so the envelope peak equals spec.amplitude (the integral's
    proportionality constant is not physical; drive strength enters
    through the qubit dipole scale).  The sum is evaluated directly at
    >= 4 samples per cycle of the highest spectral frequency (twice the
    Nyquist rate, which exact band-limited interpolation requires) and
    then refined to the grid step.
    """
    prof = profile if profile is not None else spectral_profile(spec, model)
    if grid is None:
        grid = suggest_time_grid(spec, model, profile=prof)
    f_max = omega_of_k(model, prof.k[-1]) / (2.0 * math.pi)
    if grid.step > 1.0 / (8.0 * f_max):
        raise ValueError(
            f"time step {grid.step:.3e} s too coarse for spectral content up "
            f"to {f_max:.3e} Hz (need at least 8 samples per cycle)"
        )
    # k-grid resolution bound: between adjacent k samples the phase
    # omega(k) t must advance by < pi anywhere on the window, or the
    # discrete sum aliases spurious copies into the grid
    t_reach = max(abs(grid.start), abs(grid.start + grid.span))
    v_fast = group_velocity(model, omega_of_k(model, prof.k[-1]))
    if v_fast * prof.dk * t_reach >= math.pi:
        raise WindowingError(
            "spectral grid too coarse for this window "
            f"(v_g*dk*t = {v_fast * prof.dk * t_reach:.2f} rad >= pi); "
            "increase the number of spectral points"
        )
    factor = int(1.0 / (4.0 * f_max * grid.step))
    while factor > 1 and grid.count % factor:
        factor -= 1
    if factor > 1:
        # evaluate on a margin-extended coarse grid so the periodic wrap
        # of the interpolation stays inside the cropped-away margins
        margin = 128
        step_c = factor * grid.step
        coarse = TimeGrid(
            grid.start - margin * step_c, step_c, grid.count // factor + 2 * margin
        )
        fine = _refine(_ksum_field(prof, model, coarse.times), factor)
        raw = fine[margin * factor : margin * factor + grid.count]
    else:
        raw = _ksum_field(prof, model, grid.times)
    env_peak = np.max(np.abs(scipy.signal.hilbert(raw)))
    if env_peak == 0.0:
        raise ValueError("degenerate spectrum: synthesized field is zero")
    samples = (spec.amplitude / env_peak) * raw
    wave = SampledWaveform(grid=grid, samples=samples, position=spec.focal_point)
    _check_window(wave.samples, "synthesize_at_focus")
    return wave


def _synthesize_via_fft(
    spec: PulseSpec,
    model: DispersionModel,
    grid: TimeGrid,
) -> np.ndarray:
    """Independent synthesis route: the same k-integral rewritten as a
    frequency integral (dk = domega/v_g) and assembled with an inverse
    DFT.  Returns unnormalized samples; cross-checks _ksum_field.
    """
    n = grid.count
    omega = 2.0 * math.pi * np.fft.rfftfreq(n, grid.step)
    spectrum = np.zeros(omega.size, dtype=complex)
    band = omega > model.omega_c
    kk = k_of_omega(model, omega[band])
    good = kk > 0.0
    amp = np.zeros(kk.size)
    amp[good] = spectral_amplitude(spec, model, kk[good])
    vg = group_velocity(model, omega[band])
    weight = np.zeros(kk.size)
    nz = vg > 0.0
    weight[nz] = amp[nz] / vg[nz]
    d_omega = 2.0 * math.pi / (n * grid.step)
    spectrum[band] = 0.5 * n * d_omega * weight * np.exp(1j * omega[band] * grid.start)
    if n % 2 == 0:
        spectrum[-1] = 0.0
    return np.fft.irfft(spectrum, n)


def propagate(wave: SampledWaveform, model: DispersionModel, dz: float) -> SampledWaveform:
    """Shift a waveform along the guide by dz (negative = toward the input).

    Each positive-frequency component above cutoff acquires the phase
    -k(omega) dz; magnitudes are untouched (unitary all-pass), so energy
    is conserved exactly and propagate(-dz) inverts propagate(+dz).
    Sub-cutoff bins carry only windowing noise and get zero phase.
    """
    n = wave.grid.count
    spectrum = np.fft.rfft(wave.samples)
    omega = 2.0 * math.pi * np.fft.rfftfreq(n, wave.grid.step)
    band = omega > model.omega_c
    spectrum[band] *= np.exp(-1j * k_of_omega(model, omega[band]) * dz)
    out = np.fft.irfft(spectrum, n)
    shifted = SampledWaveform(grid=wave.grid, samples=out, position=wave.position + dz)
    _check_window(shifted.samples, f"propagate(dz={dz:+.4g} m)")
    return shifted


def field_at_position(
    spec: PulseSpec,
    model: DispersionModel,
    z: float,
    grid: TimeGrid | None = None,
    *,
    profile: SpectralField | None = None,
    focal: SampledWaveform | None = None,
) -> SampledWaveform:
    """Field at position z of the pulse focusing at spec.focal_point.

    Synthesizes the focal waveform (or reuses a precomputed one) and
    applies the spectral transfer over z - d_f.
    """
    if z < 0.0:
        raise ValueError(f"position must be >= 0 (guide input is z = 0), got {z}")
    if focal is None:
        if grid is None and profile is None:
            profile, grid = plan_synthesis(
                spec, model, min(z, spec.focal_point), max(z, spec.focal_point)
            )
        elif grid is None:
            grid = suggest_time_grid(
                spec, model, z_min=min(z, spec.focal_point),
                z_max=max(z, spec.focal_point), profile=profile,
            )
        focal = synthesize_at_focus(spec, model, grid, profile=profile)
    return propagate(focal, model, z - spec.focal_point)


def analytic_signal(wave: SampledWaveform) -> AnalyticSignal:
    """One-sided spectral projection: envelope, phase, instantaneous frequency.

    Negative-frequency content is zeroed and positive content doubled;
    the envelope is the magnitude of the result and the phase its
    unwrapped argument.  Instantaneous frequency (centered differences
    of the phase) is masked where the envelope falls below
    ENVELOPE_FLOOR of its peak.
    """
    z = scipy.signal.hilbert(wave.samples)
    envelope = np.abs(z)
    phase = np.unwrap(np.angle(z))
    peak = envelope.max()
    valid = envelope >= ENVELOPE_FLOOR * peak if peak > 0 else np.zeros(wave.grid.count, bool)
    frequency = np.gradient(phase, wave.grid.step)
    frequency = np.where(valid, frequency, np.nan)
    return AnalyticSignal(
        grid=wave.grid, envelope=envelope, phase=phase, frequency=frequency, valid=valid
    )


def fwhm(x, y) -> float:
    """Full width at half maximum between the outermost half crossings.

    x is the (increasing) axis, y the non-negative curve.  Crossings are
    linearly interpolated; if the curve never falls below half its peak
    on one side the width is unbounded and an error is raised.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.ndim != 1 or x.shape != y.shape or x.size < 3:
        raise ValueError("need matching 1-D arrays with at least 3 points")
    half = y.max() / 2.0
    above = y >= half
    i_first = int(np.argmax(above))
    i_last = int(y.size - 1 - np.argmax(above[::-1]))
    if i_first == 0 or i_last == y.size - 1:
        raise UnboundedWidthError(
            "curve does not fall below half maximum inside the grid"
        )
    x_left = x[i_first - 1] + (half - y[i_first - 1]) * (
        x[i_first] - x[i_first - 1]
    ) / (y[i_first] - y[i_first - 1])
    x_right = x[i_last] + (y[i_last] - half) * (x[i_last + 1] - x[i_last]) / (
        y[i_last] - y[i_last + 1]
    )
    return float(x_right - x_left)


def signal_energy(wave: SampledWaveform) -> float:
    """Discrete signal energy sum(samples^2) * dt."""
    return float(np.sum(wave.samples**2) * wave.grid.step)


def resample(wave: SampledWaveform, sample_rate: float) -> SampledWaveform:
    """Band-limited resampling onto a new rate over the same span.

    Evaluates the trigonometric interpolant of the original samples at
    the new sample times; requires the rate to exceed 2.5x the highest
    spectral content (bins above 1e-6 of the spectral peak).
    """
    if sample_rate <= 0.0:
        raise ValueError("sample rate must be positive")
    n = wave.grid.count
    spectrum = np.fft.rfft(wave.samples)
    mag = np.abs(spectrum)
    occupied = np.nonzero(mag >= 1e-6 * mag.max())[0]
    f_content = occupied[-1] / (n * wave.grid.step)
    if sample_rate < 2.5 * f_content:
        raise AliasingError(
            f"rate {sample_rate:.4g} S/s below 2.5x the spectral content "
            f"({f_content:.4g} Hz); raise the rate"
        )
    coef = spectrum / n
    coef[1:] *= 2.0
    if n % 2 == 0:
        coef[-1] *= 0.5
    omega = 2.0 * math.pi * np.fft.rfftfreq(n, wave.grid.step)
    dt2 = 1.0 / sample_rate
    count2 = int(math.floor(wave.grid.span / dt2)) + 1
    tau = dt2 * np.arange(count2)  # relative to the window start
    out = np.empty(count2)
    block = max(1, int(4e6 // omega.size))
    for i in range(0, count2, block):
        out[i : i + block] = (
            np.exp(1j * np.outer(tau[i : i + block], omega)) @ coef
        ).real
    grid2 = TimeGrid(start=wave.grid.start, step=dt2, count=count2)
    return SampledWaveform(grid=grid2, samples=out, position=wave.position)


def export_awg(
    wave: SampledWaveform,
    sample_rate: float,
    path,
    *,
    binary: bool = False,
) -> SampledWaveform:
    """Resample onto an AWG rate and write the waveform file format."""
    res = resample(wave, sample_rate)
    write_waveform(res, path, binary=binary)
    return res


# ---------------------------------------------------------------------------
# external waveform formats: text header + one float per line, and a
# little-endian binary twin (3 float64 header fields + uint64 count)

_HEADER_KEYS = ("sample_rate", "t0", "position_m", "count")


def write_waveform(wave: SampledWaveform, path, *, binary: bool = False) -> None:
    if binary:
        with open(path, "wb") as fh:
            fh.write(
                struct.pack(
                    "<3dQ",
                    wave.grid.sample_rate,
                    wave.grid.start,
                    wave.position,
                    wave.grid.count,
                )
            )
            fh.write(np.ascontiguousarray(wave.samples, dtype="<f8").tobytes())
        return
    lines = [
        f"sample_rate {float(wave.grid.sample_rate)!r}",
        f"t0 {float(wave.grid.start)!r}",
        f"position_m {float(wave.position)!r}",
        f"count {int(wave.grid.count)}",
    ]
    lines.extend(repr(float(v)) for v in wave.samples)
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def read_waveform(path, *, binary: bool = False) -> SampledWaveform:
    if binary:
        with open(path, "rb") as fh:
            head = fh.read(struct.calcsize("<3dQ"))
            if len(head) != struct.calcsize("<3dQ"):
                raise FileFormatError(f"{path}: truncated binary header")
            rate, t0, position, count = struct.unpack("<3dQ", head)
            data = np.frombuffer(fh.read(), dtype="<f8")
        if data.size != count:
            raise FileFormatError(
                f"{path}: header promises {count} samples, found {data.size}"
            )
    else:
        with open(path) as fh:
            header = {}
            for key in _HEADER_KEYS:
                line = fh.readline().split()
                if len(line) != 2 or line[0] != key:
                    raise FileFormatError(
                        f"{path}: expected header line '{key} <value>'"
                    )
                header[key] = line[1]
            try:
                rate = float(header["sample_rate"])
                t0 = float(header["t0"])
                position = float(header["position_m"])
                count = int(header["count"])
                data = np.array([float(s) for s in fh.read().split()])
            except ValueError as exc:
                raise FileFormatError(f"{path}: {exc}") from exc
        if data.size != count:
            raise FileFormatError(
                f"{path}: header promises {count} samples, found {data.size}"
            )
    if rate <= 0.0:
        raise FileFormatError(f"{path}: non-positive sample rate")
    grid = TimeGrid(start=t0, step=1.0 / rate, count=int(count))
    return SampledWaveform(grid=grid, samples=data.astype(float), position=position)


def write_spectrum_csv(field: SpectralField, model: DispersionModel, path) -> None:
    """Diagnostic dump: k_rad_per_m, f_GHz, re, im."""
    omega = omega_of_k(model, field.k)
    with open(path, "w", newline="") as fh:
        fh.write("k_rad_per_m,f_GHz,re,im\n")
        for k, w, a in zip(field.k, omega, field.amplitude):
            fh.write(
                f"{float(k)!r},{float(w) / (2e9 * math.pi)!r},"
                f"{float(a.real)!r},{float(a.imag)!r}\n"
            )
