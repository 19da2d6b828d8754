"""Focal-point sweeps, addressing maps, and resolution/reflection studies.

A scenario fixes the guide, the pulse template (spot size, carrier,
spectral filter) and the qubits sitting in it; a sweep grid fixes the
focal-point and amplitude axes.  For every focal point d_f and every
qubit the local drive is built from one shared focal waveform: the
waveform at the focus depends only on the k-space profile, never on
where the focus is placed, so a single synthesis plus one spectral
propagation per (d_f, qubit) covers the whole map.  Amplitudes enter
linearly and ride the batched two-level propagator in one shot.

Derived quantities follow the population maps:

* contrast C(a) = P_g at the focal point nearest the qubit minus the
  mean P_g over focal points outside an exclusion window around it;
  the optimal amplitude maximizes C (ties toward lower amplitude),
* spatial resolution sigma_q = interpolated FWHM of P_g versus d_f
  measured above the off-focus baseline (median of the outer
  quartiles of the row),
* reflection distortion = L2 distance of the optimal-amplitude P_g
  row from its r = 0 counterpart.

All sweep points are independent; with workers > 1 the focal axis is
distributed over processes and gathered back in index order, so the
output never depends on scheduling.
"""

from __future__ import annotations

import concurrent.futures
import math
from dataclasses import dataclass, field, replace

import numpy as np

from .channel import ReflectionSpec, combine_with_echo, image_position
from .dynamics import (
    TransmonSpec,
    drive_signals,
    evolve_lab_frame,
    evolve_rwa_sweep,
)
from .errors import (
    EvanescentFrequencyError,
    IntegrationError,
    NoContrastError,
    NoRevivalError,
)
from .pulse import (
    PulseSpec,
    SampledWaveform,
    analytic_signal,
    fwhm,
    plan_synthesis,
    propagate,
    pulse_for_frequency,
    synthesize_at_focus,
)
from .waveguide import DispersionModel, WaveguideSpec, cutoff_from_geometry

TWO_PI = 2.0 * math.pi

# Default sweep axes.  The amplitude axis is 21 points log-spaced over
# 1.5 decades around the a-priori optimum 2*pi*1.5e9 rad/s: the peak
# focal Rabi rate of the first full ground-state revival of the default
# single-qubit scenario, located by a dense brute-force amplitude scan.
DEFAULT_FOCAL_STEP = 0.005
DEFAULT_FOCAL_SPAN = (0.0, 0.40)
DEFAULT_AMPLITUDE_CENTER = TWO_PI * 1.5e9
DEFAULT_AMPLITUDE_DECADES = 1.5
DEFAULT_AMPLITUDE_COUNT = 21
DEFAULT_SPOT_SIZES = (0.02, 0.035, 0.05, 0.07, 0.10)
# Contrast baseline exclusion half-width (metres): focal points closer
# than this to the qubit belong to the revival peak, not the baseline.
# Matches the ideal-simulation resolution scale (sigma_q ~ 0.15 m).
DEFAULT_EXCLUSION = 0.10
# Default reflectance ladder: r = 0, then 1%, 3%, 10% reflected power.
DEFAULT_REFLECTANCES = (0.0, 0.1, math.sqrt(0.03), math.sqrt(0.10))


def default_focal_points() -> np.ndarray:
    """Focal-point axis d_f = 0 .. 0.40 m in 5 mm steps."""
    lo, hi = DEFAULT_FOCAL_SPAN
    count = int(round((hi - lo) / DEFAULT_FOCAL_STEP)) + 1
    return lo + DEFAULT_FOCAL_STEP * np.arange(count)


def default_amplitudes(center: float = DEFAULT_AMPLITUDE_CENTER) -> np.ndarray:
    """Peak focal Rabi axis log-spaced around the a-priori optimum."""
    half = DEFAULT_AMPLITUDE_DECADES / 2.0
    return center * np.logspace(-half, half, DEFAULT_AMPLITUDE_COUNT)


def _frozen_axis(values, name: str, *, minimum: float = 0.0) -> np.ndarray:
    values = np.asarray(values, dtype=float)
    if values.ndim != 1 or values.size == 0:
        raise ValueError(f"{name} must be a non-empty 1-D array")
    if not np.all(np.isfinite(values)):
        raise ValueError(f"{name} must be finite")
    if np.any(values < minimum):
        raise ValueError(f"{name} must be >= {minimum}")
    if values.size > 1 and np.any(np.diff(values) <= 0.0):
        raise ValueError(f"{name} must be strictly increasing")
    values.flags.writeable = False
    return values


@dataclass(frozen=True)
class Scenario:
    """A guide, a pulse template, and the qubits it addresses.

    The pulse template fixes the k-space Gaussian (spot_size), carrier
    frequency and sub-cutoff filter; the focal point and amplitude come
    from the sweep grid.  Reflections, when given, hold one optional
    ReflectionSpec per qubit (same output connector, so usually the same
    mirror).  evolution_model selects the two-level RWA propagator
    ("rwa") or the N-level drive-resolved integrator ("lab_frame").
    """

    name: str = "scenario"
    waveguide: WaveguideSpec = field(default_factory=WaveguideSpec)
    qubits: tuple[TransmonSpec, ...] = ()
    spot_size: float = 0.035
    carrier: float = TWO_PI * 7.2e9  # rad/s
    length: float = 1.03  # metres of guide the qubits live in
    reflections: tuple[ReflectionSpec | None, ...] | None = None
    evolution_model: str = "rwa"
    highpass_coefficient: float = 0.01
    highpass_enabled: bool = True
    substeps: int = 4  # lab-frame integrator refinement

    def __post_init__(self) -> None:
        if not self.qubits:
            raise ValueError("scenario needs at least one qubit")
        if self.spot_size <= 0.0:
            raise ValueError("spot_size must be positive")
        if self.length <= 0.0:
            raise ValueError("guide length must be positive")
        model = self.model
        if self.carrier <= model.omega_c:
            raise EvanescentFrequencyError(
                f"carrier {self.carrier / TWO_PI:.4e} Hz does not propagate: "
                f"cutoff is {model.omega_c / TWO_PI:.4e} Hz"
            )
        for q, qubit in enumerate(self.qubits):
            if not 0.0 <= qubit.position <= self.length:
                raise ValueError(
                    f"qubit {q} position {qubit.position} m outside "
                    f"[0, {self.length}] m"
                )
        if self.reflections is not None:
            if len(self.reflections) != len(self.qubits):
                raise ValueError("need one reflection entry per qubit (or None)")
            for q, refl in enumerate(self.reflections):
                if refl is None:
                    continue
                if self.qubits[q].position >= refl.reflection_point:
                    raise ValueError(
                        f"qubit {q} at {self.qubits[q].position} m must lie "
                        f"before its reflection point {refl.reflection_point} m"
                    )
        if self.evolution_model not in ("rwa", "lab_frame"):
            raise ValueError("evolution_model must be 'rwa' or 'lab_frame'")
        if self.substeps < 1:
            raise ValueError("substeps must be >= 1")

    @property
    def model(self) -> DispersionModel:
        return cutoff_from_geometry(self.waveguide)

    def pulse_template(self, focal_point: float) -> PulseSpec:
        """The unit-amplitude pulse spec with the focus at focal_point."""
        spec = pulse_for_frequency(
            self.model, self.carrier, spot_size=self.spot_size,
            focal_point=focal_point,
        )
        return replace(
            spec,
            highpass_coefficient=self.highpass_coefficient,
            highpass_enabled=self.highpass_enabled,
        )

    def reflection_for(self, qubit_index: int) -> ReflectionSpec | None:
        if self.reflections is None:
            return None
        return self.reflections[qubit_index]


def single_qubit_scenario(
    name: str = "single_qubit",
    *,
    spot_size: float = 0.035,
    carrier: float = TWO_PI * 7.2e9,
    position: float = 0.15,
    reflection: ReflectionSpec | None = None,
    evolution_model: str = "rwa",
) -> Scenario:
    """One qubit tuned to the pulse carrier at position (default 15 cm)."""
    qubit = TransmonSpec(
        transition_frequency=carrier, dipole_scale=1.0, position=position
    )
    return Scenario(
        name=name,
        qubits=(qubit,),
        spot_size=spot_size,
        carrier=carrier,
        reflections=None if reflection is None else (reflection,),
        evolution_model=evolution_model,
    )


def two_qubit_scenario(
    name: str = "two_qubit",
    *,
    spot_size: float = 0.035,
    carrier: float = TWO_PI * 7.28e9,
    positions: tuple[float, float] = (0.15, 0.20),
    reflections: tuple[ReflectionSpec | None, ...] | None = None,
    evolution_model: str = "rwa",
) -> Scenario:
    """Two qubits tuned to a common carrier (default 7.28 GHz)."""
    qubits = tuple(
        TransmonSpec(transition_frequency=carrier, dipole_scale=1.0, position=z)
        for z in positions
    )
    return Scenario(
        name=name,
        qubits=qubits,
        spot_size=spot_size,
        carrier=carrier,
        reflections=reflections,
        evolution_model=evolution_model,
    )


@dataclass(frozen=True, eq=False)
class SweepGrid:
    """Axes of a sweep: focal points, amplitudes, spot sizes.

    Amplitudes are peak focal Rabi rates (rad/s) for a unit dipole
    scale: the focal envelope is normalized to 1, so amplitude a drives
    a qubit with peak Rabi a * dipole_scale when its position coincides
    with the focus.  All axes are strictly increasing.
    """

    focal_points: np.ndarray
    amplitudes: np.ndarray
    spot_sizes: np.ndarray

    def __post_init__(self) -> None:
        object.__setattr__(
            self, "focal_points", _frozen_axis(self.focal_points, "focal_points")
        )
        object.__setattr__(
            self, "amplitudes", _frozen_axis(self.amplitudes, "amplitudes")
        )
        object.__setattr__(
            self,
            "spot_sizes",
            _frozen_axis(self.spot_sizes, "spot_sizes", minimum=1e-6),
        )

    @classmethod
    def default(cls) -> "SweepGrid":
        return cls(
            focal_points=default_focal_points(),
            amplitudes=default_amplitudes(),
            spot_sizes=np.asarray(DEFAULT_SPOT_SIZES),
        )


@dataclass(frozen=True, eq=False)
class PopulationMap:
    """Terminal populations over (focal point, amplitude, qubit).

    Arrays have shape (n_focal, n_amplitude, n_qubit); pf and leakage
    are zero for the two-level RWA model.  Every entry lies in
    [0, 1 + 1e-6] and pg+pe+pf+leak closes to 1 within 1e-6.
    """

    focal_points: np.ndarray
    amplitudes: np.ndarray
    spot_size: float
    qubit_positions: tuple[float, ...]
    pg: np.ndarray
    pe: np.ndarray
    pf: np.ndarray
    leak: np.ndarray

    def __post_init__(self) -> None:
        shape = (
            np.asarray(self.focal_points).size,
            np.asarray(self.amplitudes).size,
            len(self.qubit_positions),
        )
        for name in ("pg", "pe", "pf", "leak"):
            arr = np.asarray(getattr(self, name), dtype=float)
            if arr.shape != shape:
                raise ValueError(
                    f"{name} has shape {arr.shape}, expected {shape}"
                )
            if not np.all(np.isfinite(arr)):
                raise ValueError(f"{name} must be finite")
            if arr.min() < 0.0 or arr.max() > 1.0 + 1e-6:
                raise ValueError(f"{name} entries must lie in [0, 1 + 1e-6]")
        closure = self.pg + self.pe + self.pf + self.leak
        worst = float(np.max(np.abs(closure - 1.0)))
        if worst > 1e-6:
            raise ValueError(
                f"populations do not close to 1 (worst deviation {worst:.2e})"
            )

    @property
    def n_qubits(self) -> int:
        return len(self.qubit_positions)


@dataclass(frozen=True)
class _SweepSetup:
    """Shared per-sweep field data: one focal waveform covers all points."""

    model: DispersionModel
    focal: SampledWaveform


def _plan_fields(scenario: Scenario, focal_points: np.ndarray) -> _SweepSetup:
    """Plan one time window and synthesize the shared focal waveform.

    The window must hold the arrival at every offset z - d_f that the
    sweep visits, including echo image positions.
    """
    model = scenario.model
    d0 = float(np.max(focal_points))
    spec = scenario.pulse_template(d0)
    offsets = []
    for q, qubit in enumerate(scenario.qubits):
        offsets.append(qubit.position - focal_points)
        refl = scenario.reflection_for(q)
        if refl is not None and refl.amplitude > 0.0:
            offsets.append(image_position(qubit.position, refl) - focal_points)
    lo = min(float(np.min(o)) for o in offsets)
    hi = max(float(np.max(o)) for o in offsets)
    profile, grid = plan_synthesis(spec, model, z_min=d0 + lo, z_max=d0 + hi)
    focal = synthesize_at_focus(spec, model, grid, profile=profile)
    return _SweepSetup(model=model, focal=focal)


def _qubit_field(
    scenario: Scenario, setup: _SweepSetup, qubit_index: int, d_f: float
) -> SampledWaveform:
    """Unit-amplitude drive field at one qubit for one focal point."""
    qubit = scenario.qubits[qubit_index]
    direct = propagate(setup.focal, setup.model, qubit.position - d_f)
    refl = scenario.reflection_for(qubit_index)
    if refl is None or refl.amplitude == 0.0:
        return direct
    echo = propagate(
        setup.focal, setup.model, image_position(qubit.position, refl) - d_f
    )
    return combine_with_echo(direct, echo, refl)


def _sweep_row(
    scenario: Scenario, grid: SweepGrid, setup: _SweepSetup, i_df: int
) -> np.ndarray:
    """Populations (n_qubit, n_amplitude, 4) at one focal point."""
    d_f = float(grid.focal_points[i_df])
    amplitudes = grid.amplitudes
    out = np.zeros((len(scenario.qubits), amplitudes.size, 4))
    for q, qubit in enumerate(scenario.qubits):
        try:
            wave = _qubit_field(scenario, setup, q, d_f)
            if scenario.evolution_model == "rwa":
                drive = drive_signals(analytic_signal(wave), qubit)
                pops = evolve_rwa_sweep(drive, amplitudes)
                out[q, :, 0] = pops[:, 0]
                out[q, :, 1] = pops[:, 1]
            else:
                for j, a in enumerate(amplitudes):
                    scaled = SampledWaveform(
                        grid=wave.grid,
                        samples=a * wave.samples,
                        position=wave.position,
                    )
                    res = evolve_lab_frame(
                        qubit, scaled, substeps=scenario.substeps
                    )
                    out[q, j] = (res.pg, res.pe, res.pf, res.leakage)
        except Exception as err:
            raise IntegrationError(
                f"sweep point failed at d_f = {d_f:.6g} m "
                f"(index {i_df}), qubit {q}: {err}"
            ) from err
    return out


_WORKER_STATE: tuple[Scenario, SweepGrid, _SweepSetup] | None = None


def _init_sweep_worker(state: tuple[Scenario, SweepGrid, _SweepSetup]) -> None:
    global _WORKER_STATE
    _WORKER_STATE = state


def _sweep_row_by_index(i_df: int) -> np.ndarray:
    assert _WORKER_STATE is not None
    scenario, grid, setup = _WORKER_STATE
    return _sweep_row(scenario, grid, setup, i_df)


def sweep_focal_amplitude(
    scenario: Scenario, grid: SweepGrid, *, workers: int = 1
) -> PopulationMap:
    """Terminal-population map over the focal-point x amplitude grid.

    Uses the scenario's spot size (grid.spot_sizes feeds the spot-size
    scans, not this map).  With workers > 1 the focal axis is
    distributed over processes; rows are gathered in index order so the
    result is identical for any worker count.
    """
    if not isinstance(grid, SweepGrid):
        raise TypeError("grid must be a SweepGrid")
    setup = _plan_fields(scenario, grid.focal_points)
    n_df = grid.focal_points.size
    if workers > 1:
        state = (scenario, grid, setup)
        with concurrent.futures.ProcessPoolExecutor(
            max_workers=workers,
            initializer=_init_sweep_worker,
            initargs=(state,),
        ) as pool:
            rows = list(pool.map(_sweep_row_by_index, range(n_df)))
    else:
        rows = [_sweep_row(scenario, grid, setup, i) for i in range(n_df)]
    stack = np.stack(rows)  # (n_df, n_q, n_amp, 4)
    data = np.moveaxis(stack, 1, 2)  # (n_df, n_amp, n_q, 4)
    return PopulationMap(
        focal_points=grid.focal_points,
        amplitudes=grid.amplitudes,
        spot_size=scenario.spot_size,
        qubit_positions=tuple(q.position for q in scenario.qubits),
        pg=data[..., 0],
        pe=data[..., 1],
        pf=data[..., 2],
        leak=data[..., 3],
    )


def contrast_curve(
    pmap: PopulationMap, qubit: int = 0, *, exclusion: float = DEFAULT_EXCLUSION
) -> np.ndarray:
    """Addressing contrast versus amplitude for one qubit.

    C(a) = P_g at the focal point nearest the qubit minus the mean P_g
    over focal points farther than the exclusion half-width from it.
    """
    d_f = pmap.focal_points
    z_q = pmap.qubit_positions[qubit]
    i_zq = int(np.argmin(np.abs(d_f - z_q)))
    far = np.abs(d_f - z_q) > exclusion
    if not far.any():
        raise ValueError(
            "exclusion window covers the whole focal axis; shrink it"
        )
    return pmap.pg[i_zq, :, qubit] - pmap.pg[far, :, qubit].mean(axis=0)


def _optimal_index(
    pmap: PopulationMap, qubit: int, exclusion: float
) -> int:
    if float(np.ptp(pmap.pg[:, :, qubit])) < 1e-9:
        raise NoContrastError(
            "population map is constant; no contrast to optimize"
        )
    curve = contrast_curve(pmap, qubit, exclusion=exclusion)
    # np.argmax takes the first maximum: ties resolve toward the lower
    # amplitude because the axis is strictly increasing
    return int(np.argmax(curve))


def optimal_index(
    pmap: PopulationMap, qubit: int = 0, *, exclusion: float = DEFAULT_EXCLUSION
) -> int:
    """Index into pmap.amplitudes of maximum addressing contrast."""
    return _optimal_index(pmap, qubit, exclusion)


def optimal_amplitude(
    pmap: PopulationMap, qubit: int = 0, *, exclusion: float = DEFAULT_EXCLUSION
) -> float:
    """Amplitude of maximum addressing contrast for one qubit."""
    return float(pmap.amplitudes[_optimal_index(pmap, qubit, exclusion)])


def spatial_resolution(focal_points, row) -> float:
    """sigma_q: FWHM of the P_g revival versus focal point.

    The baseline is the median of the outer quartiles of the row (the
    off-focus floor); the width is the interpolated FWHM of the peak
    measured above that baseline.
    """
    focal_points = np.asarray(focal_points, dtype=float)
    row = np.asarray(row, dtype=float)
    if focal_points.shape != row.shape or row.ndim != 1:
        raise ValueError("focal_points and row must be matching 1-D arrays")
    if row.size < 8:
        raise ValueError("need at least 8 focal points to size a revival")
    quart = max(1, row.size // 4)
    baseline = float(np.median(np.concatenate([row[:quart], row[-quart:]])))
    if float(row.max()) < baseline + 0.1:
        raise NoRevivalError(
            f"no revival: peak {row.max():.3f} is within 0.1 of the "
            f"baseline {baseline:.3f}"
        )
    return fwhm(focal_points, row - baseline)


@dataclass(frozen=True)
class CompressionReport:
    """Input-versus-focus envelope widths for one pulse template."""

    input_fwhm: float  # seconds, envelope at z = 0
    focal_fwhm: float  # seconds, envelope at the focus
    ratio: float
    entrance: SampledWaveform
    focal: SampledWaveform


def compression_experiment(
    scenario: Scenario, length: float = 1.03
) -> CompressionReport:
    """Compare envelope widths at the guide entrance and at the focus."""
    model = scenario.model
    spec = scenario.pulse_template(length)
    profile, grid = plan_synthesis(spec, model, z_min=0.0, z_max=length)
    focal = synthesize_at_focus(spec, model, grid, profile=profile)
    entrance = propagate(focal, model, -length)
    times = grid.times
    focal_fwhm = fwhm(times, analytic_signal(focal).envelope)
    input_fwhm = fwhm(times, analytic_signal(entrance).envelope)
    return CompressionReport(
        input_fwhm=input_fwhm,
        focal_fwhm=focal_fwhm,
        ratio=input_fwhm / focal_fwhm,
        entrance=entrance,
        focal=focal,
    )


@dataclass(frozen=True)
class ResolutionPoint:
    """sigma_q at one spot size, with the map it came from."""

    spot_size: float
    sigma_q: tuple[float, ...]  # per qubit, metres
    amplitude: tuple[float, ...]  # optimal amplitude per qubit, rad/s
    map: PopulationMap


def resolution_curve(
    scenario: Scenario,
    spot_sizes=None,
    *,
    grid: SweepGrid | None = None,
    exclusion: float = DEFAULT_EXCLUSION,
    workers: int = 1,
) -> list[ResolutionPoint]:
    """sigma_q at the optimal amplitude for each spot size."""
    if grid is None:
        grid = SweepGrid.default()
    if spot_sizes is None:
        spot_sizes = grid.spot_sizes
    points = []
    for sigma_f in np.asarray(spot_sizes, dtype=float):
        scn = replace(scenario, spot_size=float(sigma_f))
        pmap = sweep_focal_amplitude(scn, grid, workers=workers)
        sigmas = []
        bests = []
        for q in range(pmap.n_qubits):
            j = _optimal_index(pmap, q, exclusion)
            bests.append(float(pmap.amplitudes[j]))
            sigmas.append(
                spatial_resolution(pmap.focal_points, pmap.pg[:, j, q])
            )
        points.append(
            ResolutionPoint(
                spot_size=float(sigma_f),
                sigma_q=tuple(sigmas),
                amplitude=tuple(bests),
                map=pmap,
            )
        )
    return points


@dataclass(frozen=True)
class ReflectionEntry:
    """One reflectance step of a reflection study."""

    reflectance: float
    map: PopulationMap
    distortion: tuple[float, ...]  # per qubit, L2 vs the r = 0 row


def _with_reflectance(scenario: Scenario, r: float) -> Scenario:
    refls = tuple(
        None if base is None else replace(base, amplitude=r)
        for base in scenario.reflections
    )
    return replace(scenario, reflections=refls)


def reflection_study(
    scenario: Scenario,
    reflectances=DEFAULT_REFLECTANCES,
    *,
    grid: SweepGrid | None = None,
    exclusion: float = DEFAULT_EXCLUSION,
    workers: int = 1,
) -> list[ReflectionEntry]:
    """Population maps and lineshape distortion over output reflectance.

    The scenario's reflection entries fix the mirror geometry; their
    amplitude is replaced by each study value in turn.  Distortion is
    measured against the r = 0 map at the r = 0 optimal amplitude.
    """
    if scenario.reflections is None or all(
        r is None for r in scenario.reflections
    ):
        raise ValueError(
            "scenario has no reflection geometry to vary; set reflections"
        )
    reflectances = [float(r) for r in reflectances]
    if any(not 0.0 <= r < 1.0 for r in reflectances):
        raise ValueError("reflectances must lie in [0, 1)")
    if grid is None:
        grid = SweepGrid.default()
    base_map = sweep_focal_amplitude(
        _with_reflectance(scenario, 0.0), grid, workers=workers
    )
    best = [
        _optimal_index(base_map, q, exclusion) for q in range(base_map.n_qubits)
    ]
    entries = []
    for r in reflectances:
        pmap = (
            base_map
            if r == 0.0
            else sweep_focal_amplitude(
                _with_reflectance(scenario, r), grid, workers=workers
            )
        )
        dist = tuple(
            float(
                np.linalg.norm(
                    pmap.pg[:, best[q], q] - base_map.pg[:, best[q], q]
                )
            )
            for q in range(pmap.n_qubits)
        )
        entries.append(
            ReflectionEntry(reflectance=r, map=pmap, distortion=dist)
        )
    return entries


def _fmt(value) -> str:
    """Shortest round-trip decimal form of a float (plain, no numpy repr)."""
    return repr(float(value))


def write_map_csv(pmap: PopulationMap, path) -> None:
    """Long-format CSV: d_f_m, amplitude, sigma_f_m, qubit, pg, pe, pf, leak.

    Rows iterate focal points, then amplitudes, then qubits.  Floats are
    written with repr so identical maps serialize byte-identically.
    """
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("d_f_m,amplitude,sigma_f_m,qubit,pg,pe,pf,leak\n")
        for i, d_f in enumerate(pmap.focal_points):
            for j, a in enumerate(pmap.amplitudes):
                for q in range(pmap.n_qubits):
                    fh.write(
                        f"{_fmt(d_f)},{_fmt(a)},{_fmt(pmap.spot_size)},{q},"
                        f"{_fmt(pmap.pg[i, j, q])},{_fmt(pmap.pe[i, j, q])},"
                        f"{_fmt(pmap.pf[i, j, q])},{_fmt(pmap.leak[i, j, q])}\n"
                    )


def write_resolution_csv(points: list[ResolutionPoint], path, qubit: int = 0) -> None:
    """Two-column CSV of the resolution curve: sigma_f_m, sigma_q_m."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("sigma_f_m,sigma_q_m\n")
        for point in points:
            fh.write(f"{_fmt(point.spot_size)},{_fmt(point.sigma_q[qubit])}\n")


def write_envelope_csv(wave: SampledWaveform, path) -> None:
    """CSV of a waveform and its envelope: t_ns, field, envelope."""
    env = analytic_signal(wave).envelope
    times = wave.grid.times
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("t_ns,field,envelope\n")
        for t, x, e in zip(times, wave.samples, env):
            fh.write(f"{_fmt(t * 1e9)},{_fmt(x)},{_fmt(e)}\n")
