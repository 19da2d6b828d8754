"""Command-line front end: scenario configs in, CSV/JSON products out.

Subcommands
-----------
synth        synthesize the pulse waveform at a position (default: the focus)
propagate    shift a stored waveform along the guide
compress     entrance-versus-focus envelope widths and compression ratio
sweep-focal  ground-state population over (focal point, amplitude)
sweep-spot   the same map, once per configured spot size
resolution   excitation-spot width sigma_q versus pulse spot size sigma_f
reflections  population maps and lineshape distortion over reflectance
export-awg   resample a waveform onto an AWG rate and write its file
validate     run the numeric invariant suite on the configured scenario

Every subcommand writes its products plus a run manifest
(``meta_<subcommand>_<name>.json``) into one output directory and writes
nowhere else.  The directory is picked from ``--output-dir``, else the
``WGFOCUS_OUTPUT_DIR`` environment variable, else ``./runs``.

Sweep subcommands accept ``--from-manifest meta.json`` instead of a
config file: the run is rebuilt from the manifest's resolved config, so
its CSV products come out byte-identical to the original run, whatever
``--workers`` says (parallel sweep points are gathered in index order).

Exit codes: 0 success, 2 configuration error, 3 numeric failure,
4 I/O or file-format error.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import math
import os
import sys
from dataclasses import dataclass, replace
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from . import __version__
from .config import (
    build_grid,
    build_scenario,
    exclusion_width,
    load_config,
    parse_config,
    serialize_config,
    study_reflectances,
)
from .errors import (
    AliasingError,
    ConfigurationError,
    EvanescentFrequencyError,
    FileFormatError,
    IntegrationError,
    MetricError,
    WindowingError,
)
from .experiments import (
    SweepGrid,
    compression_experiment,
    contrast_curve,
    optimal_index,
    reflection_study,
    resolution_curve,
    sweep_focal_amplitude,
    write_envelope_csv,
    write_map_csv,
    write_resolution_csv,
)
from .pulse import (
    export_awg,
    plan_synthesis,
    propagate,
    read_waveform,
    signal_energy,
    synthesize_at_focus,
    write_waveform,
)
from .waveguide import group_velocity, guide_wavelength, k_of_omega, omega_of_k

TWO_PI = 2.0 * math.pi

_NUMERIC_ERRORS = (IntegrationError, MetricError, WindowingError, AliasingError)


# ---------------------------------------------------------------------------
# run manifest


@dataclass(frozen=True)
class RunManifest:
    """Provenance record serialized alongside every output set.

    The ``config`` field holds the resolved canonical INI text, so a run
    rebuilt from its manifest sees exactly the inputs of the original.
    """

    tool: str
    version: str
    subcommand: str
    name: str
    command: tuple[str, ...]
    output_dir: str
    timestamp: str
    config: str
    derived: dict


def _make_manifest(subcommand, args, doc, scenario, out_dir) -> RunManifest:
    model = scenario.model
    derived = {
        "cutoff_frequency_ghz": model.cutoff_frequency / 1e9,
        "carrier_ghz": scenario.carrier / (TWO_PI * 1e9),
        "group_velocity_m_per_s": float(group_velocity(model, scenario.carrier)),
        "guide_wavelength_m": float(guide_wavelength(model, scenario.carrier)),
    }
    return RunManifest(
        tool="wgfocus",
        version=__version__,
        subcommand=subcommand,
        name=scenario.name,
        command=tuple(args.argv),
        output_dir=str(out_dir),
        timestamp=datetime.now(timezone.utc).isoformat(),
        config=serialize_config(doc),
        derived=derived,
    )


def _write_json(payload, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _write_manifest(manifest: RunManifest, out_dir: Path) -> Path:
    path = out_dir / f"meta_{manifest.subcommand}_{manifest.name}.json"
    _write_json(dataclasses.asdict(manifest), path)
    return path


def _load_manifest(path) -> dict:
    with open(path, "r", encoding="utf-8") as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as err:
            raise FileFormatError(f"manifest {path} is not valid JSON: {err}") from err
    if not isinstance(data, dict) or "config" not in data:
        raise FileFormatError(f"manifest {path} has no 'config' entry")
    return data


# ---------------------------------------------------------------------------
# shared plumbing


def _output_dir(args) -> Path:
    if args.output_dir is not None:
        base = Path(args.output_dir)
    else:
        env = os.environ.get("WGFOCUS_OUTPUT_DIR")
        base = Path(env) if env else Path("runs")
    base.mkdir(parents=True, exist_ok=True)
    return base


def _resolve_doc(args, subcommand: str) -> dict:
    """The config document, from the config file or from a manifest."""
    from_manifest = getattr(args, "from_manifest", None)
    if from_manifest is not None:
        if args.config is not None:
            raise ConfigurationError(
                "give either a config file or --from-manifest, not both"
            )
        data = _load_manifest(from_manifest)
        recorded = data.get("subcommand")
        if recorded != subcommand:
            raise ConfigurationError(
                f"manifest records subcommand {recorded!r}; rerun it with "
                f"that subcommand, not {subcommand!r}"
            )
        return parse_config(data["config"])
    if args.config is None:
        raise ConfigurationError("a config file is required (or --from-manifest)")
    return load_config(args.config)


def _workers(args) -> int:
    count = args.workers if args.workers is not None else (os.cpu_count() or 1)
    if count < 1:
        raise ConfigurationError("--workers must be at least 1")
    return count


def _synthesized_wave(scenario, focal_point: float, position: float):
    model = scenario.model
    spec = scenario.pulse_template(focal_point)
    lo = min(position, focal_point)
    hi = max(position, focal_point)
    profile, grid = plan_synthesis(spec, model, z_min=lo, z_max=hi)
    wave = synthesize_at_focus(spec, model, grid, profile=profile)
    if position != focal_point:
        wave = propagate(wave, model, position - focal_point)
    return wave


# ---------------------------------------------------------------------------
# subcommands


def _cmd_synth(args) -> None:
    doc = _resolve_doc(args, "synth")
    scenario = build_scenario(doc)
    d_f = args.focal_point_cm * 1e-2
    z = d_f if args.at_cm is None else args.at_cm * 1e-2
    wave = _synthesized_wave(scenario, d_f, z)
    out = _output_dir(args)
    write_envelope_csv(wave, out / f"synth_{scenario.name}_envelope.csv")
    write_waveform(wave, out / f"synth_{scenario.name}_wave.csv")
    _write_manifest(_make_manifest("synth", args, doc, scenario, out), out)
    print(
        f"synth: waveform at z = {z:g} m for focus d_f = {d_f:g} m "
        f"({wave.grid.count} samples) -> {out}"
    )


def _cmd_propagate(args) -> None:
    doc = _resolve_doc(args, "propagate")
    scenario = build_scenario(doc)
    wave = read_waveform(args.input, binary=args.binary)
    moved = propagate(wave, scenario.model, args.by_cm * 1e-2)
    out = _output_dir(args)
    write_waveform(
        moved, out / f"propagate_{scenario.name}_wave.csv", binary=args.binary
    )
    write_envelope_csv(moved, out / f"propagate_{scenario.name}_envelope.csv")
    _write_manifest(_make_manifest("propagate", args, doc, scenario, out), out)
    print(
        f"propagate: shifted by {args.by_cm:g} cm to z = {moved.position:g} m "
        f"-> {out}"
    )


def _cmd_compress(args) -> None:
    doc = _resolve_doc(args, "compress")
    scenario = build_scenario(doc)
    report = compression_experiment(scenario, length=scenario.length)
    out = _output_dir(args)
    _write_json(
        {
            "input_fwhm_s": report.input_fwhm,
            "focal_fwhm_s": report.focal_fwhm,
            "ratio": report.ratio,
            "spot_size_m": scenario.spot_size,
            "guide_length_m": scenario.length,
            "carrier_ghz": scenario.carrier / (TWO_PI * 1e9),
        },
        out / f"compress_{scenario.name}.json",
    )
    write_envelope_csv(report.entrance, out / f"compress_{scenario.name}_entrance.csv")
    write_envelope_csv(report.focal, out / f"compress_{scenario.name}_focal.csv")
    _write_manifest(_make_manifest("compress", args, doc, scenario, out), out)
    print(
        f"compress: input FWHM {report.input_fwhm * 1e9:.4f} ns, focal FWHM "
        f"{report.focal_fwhm * 1e9:.4f} ns, ratio {report.ratio:.3f} -> {out}"
    )


def _optima_payload(pmap, exclusion: float) -> list[dict]:
    rows = []
    for q in range(pmap.n_qubits):
        j = optimal_index(pmap, q, exclusion=exclusion)
        curve = contrast_curve(pmap, q, exclusion=exclusion)
        rows.append(
            {
                "qubit": q,
                "position_m": float(pmap.qubit_positions[q]),
                "amplitude_rad_per_s": float(pmap.amplitudes[j]),
                "amplitude_ghz": float(pmap.amplitudes[j] / (TWO_PI * 1e9)),
                "contrast": float(curve[j]),
            }
        )
    return rows


def _cmd_sweep_focal(args) -> None:
    doc = _resolve_doc(args, "sweep-focal")
    scenario = build_scenario(doc)
    grid = build_grid(doc)
    pmap = sweep_focal_amplitude(scenario, grid, workers=_workers(args))
    out = _output_dir(args)
    write_map_csv(pmap, out / f"map_{scenario.name}.csv")
    _write_json(
        {"qubits": _optima_payload(pmap, exclusion_width(doc))},
        out / f"optimal_{scenario.name}.json",
    )
    _write_manifest(_make_manifest("sweep-focal", args, doc, scenario, out), out)
    print(
        f"sweep-focal: {pmap.pg.shape[0]} focal points x "
        f"{pmap.pg.shape[1]} amplitudes x {pmap.n_qubits} qubit(s) -> {out}"
    )


def _spot_tag(spot_size: float) -> str:
    return f"{spot_size * 100.0:g}cm"


def _cmd_sweep_spot(args) -> None:
    doc = _resolve_doc(args, "sweep-spot")
    scenario = build_scenario(doc)
    grid = build_grid(doc)
    workers = _workers(args)
    out = _output_dir(args)
    for sigma_f in grid.spot_sizes:
        scn = replace(scenario, spot_size=float(sigma_f))
        pmap = sweep_focal_amplitude(scn, grid, workers=workers)
        write_map_csv(pmap, out / f"map_{scenario.name}_spot{_spot_tag(sigma_f)}.csv")
    _write_manifest(_make_manifest("sweep-spot", args, doc, scenario, out), out)
    print(
        f"sweep-spot: {grid.spot_sizes.size} spot sizes "
        f"({', '.join(_spot_tag(s) for s in grid.spot_sizes)}) -> {out}"
    )


def _cmd_resolution(args) -> None:
    doc = _resolve_doc(args, "resolution")
    scenario = build_scenario(doc)
    grid = build_grid(doc)
    points = resolution_curve(
        scenario, grid=grid, exclusion=exclusion_width(doc), workers=_workers(args)
    )
    out = _output_dir(args)
    write_resolution_csv(points, out / f"resolution_{scenario.name}.csv")
    _write_json(
        {
            "points": [
                {
                    "spot_size_m": point.spot_size,
                    "sigma_q_m": list(point.sigma_q),
                    "amplitude_rad_per_s": list(point.amplitude),
                }
                for point in points
            ]
        },
        out / f"resolution_{scenario.name}.json",
    )
    _write_manifest(_make_manifest("resolution", args, doc, scenario, out), out)
    widths = ", ".join(f"{p.sigma_q[0] * 100:.2f}" for p in points)
    print(f"resolution: sigma_q = [{widths}] cm -> {out}")


def _cmd_reflections(args) -> None:
    doc = _resolve_doc(args, "reflections")
    scenario = build_scenario(doc)
    grid = build_grid(doc)
    try:
        entries = reflection_study(
            scenario,
            study_reflectances(doc),
            grid=grid,
            exclusion=exclusion_width(doc),
            workers=_workers(args),
        )
    except ValueError as err:
        # missing mirror geometry / out-of-range reflectance ladder come
        # straight from the config
        raise ConfigurationError(str(err)) from err
    out = _output_dir(args)
    with open(
        out / f"distortion_{scenario.name}.csv", "w", encoding="utf-8", newline="\n"
    ) as fh:
        fh.write("reflectance,qubit,distortion_l2\n")
        for entry in entries:
            for q, value in enumerate(entry.distortion):
                fh.write(f"{entry.reflectance!r},{q},{value!r}\n")
    for k, entry in enumerate(entries):
        write_map_csv(entry.map, out / f"refl_{scenario.name}_{k}.csv")
    _write_manifest(_make_manifest("reflections", args, doc, scenario, out), out)
    print(
        f"reflections: {len(entries)} reflectance steps "
        f"({', '.join(f'{e.reflectance:g}' for e in entries)}) -> {out}"
    )


def _cmd_export_awg(args) -> None:
    doc = _resolve_doc(args, "export-awg")
    scenario = build_scenario(doc)
    if args.input is not None:
        wave = read_waveform(args.input, binary=args.binary)
    elif args.focal_point_cm is not None:
        d_f = args.focal_point_cm * 1e-2
        z = d_f if args.at_cm is None else args.at_cm * 1e-2
        wave = _synthesized_wave(scenario, d_f, z)
    else:
        raise ConfigurationError("export-awg needs --input or --focal-point-cm")
    out = _output_dir(args)
    suffix = "bin" if args.binary else "csv"
    path = out / f"awg_{scenario.name}.{suffix}"
    res = export_awg(wave, args.rate_gsps * 1e9, path, binary=args.binary)
    _write_manifest(_make_manifest("export-awg", args, doc, scenario, out), out)
    print(
        f"export-awg: {res.grid.count} samples at {args.rate_gsps:g} GS/s -> {path}"
    )


# ---------------------------------------------------------------------------
# validate: numeric invariant suite


def _check_dispersion_identity(scenario) -> tuple[float, float]:
    model = scenario.model
    omega = model.omega_c * np.linspace(1.001, 10.0, 513)
    k = k_of_omega(model, omega)
    v_p = omega / k
    v_g = group_velocity(model, omega)
    return float(np.max(np.abs(v_p * v_g / model.c**2 - 1.0))), 1e-9


def _check_group_velocity(scenario) -> tuple[float, float]:
    model = scenario.model
    omega = model.omega_c * np.linspace(1.001, 10.0, 513)
    k = k_of_omega(model, omega)
    h = 1e-6 * k
    v_fd = (omega_of_k(model, k + h) - omega_of_k(model, k - h)) / (2.0 * h)
    v_g = group_velocity(model, omega)
    return float(np.max(np.abs(v_fd / v_g - 1.0))), 1e-6


def _check_energy_and_roundtrip(scenario) -> list[tuple[str, float, float]]:
    model = scenario.model
    d_f = scenario.length / 2.0
    spec = scenario.pulse_template(d_f)
    profile, grid = plan_synthesis(spec, model, z_min=d_f, z_max=d_f + 0.35)
    wave = synthesize_at_focus(spec, model, grid, profile=profile)
    shifted = propagate(wave, model, 0.35)
    back = propagate(shifted, model, -0.35)
    drift = abs(signal_energy(shifted) / signal_energy(wave) - 1.0)
    mismatch = float(
        np.max(np.abs(back.samples - wave.samples)) / np.max(np.abs(wave.samples))
    )
    return [
        ("energy_conservation", drift, 1e-9),
        ("propagation_roundtrip", mismatch, 1e-8),
    ]


def _check_population_closure(scenario) -> list[tuple[str, float, float]]:
    z_q = scenario.qubits[0].position
    grid = SweepGrid(
        focal_points=np.array([z_q]),
        amplitudes=np.array([1e3, TWO_PI * 1.5e9]),
        spot_sizes=np.array([scenario.spot_size]),
    )
    pmap = sweep_focal_amplitude(scenario, grid)
    ground = float(np.max(np.abs(1.0 - pmap.pg[:, 0, :])))
    closure = float(
        np.max(np.abs(pmap.pg + pmap.pe + pmap.pf + pmap.leak - 1.0))
    )
    return [
        ("weak_drive_identity", ground, 1e-9),
        ("population_closure", closure, 1e-9),
    ]


def _check_config_roundtrip(doc) -> tuple[float, float]:
    text = serialize_config(doc)
    again = serialize_config(parse_config(text))
    return (0.0 if text == again else 1.0), 0.0


def _cmd_validate(args) -> None:
    doc = _resolve_doc(args, "validate")
    scenario = build_scenario(doc)
    checks: list[tuple[str, float, float]] = []
    checks.append(("dispersion_identity", *_check_dispersion_identity(scenario)))
    checks.append(("group_velocity_fd", *_check_group_velocity(scenario)))
    checks.extend(_check_energy_and_roundtrip(scenario))
    checks.extend(_check_population_closure(scenario))
    checks.append(("config_roundtrip", *_check_config_roundtrip(doc)))
    failures = []
    report = []
    for name, metric, tolerance in checks:
        passed = metric <= tolerance
        report.append(
            {"name": name, "metric": metric, "tolerance": tolerance, "passed": passed}
        )
        print(f"{'ok  ' if passed else 'FAIL'} {name}: {metric:.3e} <= {tolerance:g}")
        if not passed:
            failures.append(name)
    out = _output_dir(args)
    _write_json(
        {"checks": report, "passed": not failures},
        out / f"validate_{scenario.name}.json",
    )
    _write_manifest(_make_manifest("validate", args, doc, scenario, out), out)
    if failures:
        raise MetricError(f"validation failed: {', '.join(failures)}")
    print(f"validate: {len(checks)} checks passed -> {out}")


# ---------------------------------------------------------------------------
# parser and entry point


def _add_common(sub, *, manifest: bool = False, workers: bool = False) -> None:
    sub.add_argument(
        "config",
        nargs="?",
        default=None,
        help="scenario config file (INI with unit-suffixed keys)",
    )
    sub.add_argument(
        "--output-dir",
        default=None,
        help="where products go (default: $WGFOCUS_OUTPUT_DIR or ./runs)",
    )
    if manifest:
        sub.add_argument(
            "--from-manifest",
            default=None,
            help="rebuild the run from a meta_*.json manifest instead of a config",
        )
    if workers:
        sub.add_argument(
            "--workers",
            type=int,
            default=None,
            help="parallel sweep workers (default: all CPUs; output independent)",
        )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="wgfocus",
        description=(
            "Dispersive self-focusing of chirped pulses in a rectangular "
            "waveguide and position-selective transmon addressing."
        ),
    )
    parser.add_argument(
        "--version", action="version", version=f"wgfocus {__version__}"
    )
    subs = parser.add_subparsers(dest="subcommand", required=True)

    sub = subs.add_parser("synth", help="synthesize the waveform at a position")
    _add_common(sub)
    sub.add_argument(
        "--focal-point-cm", type=float, required=True, help="focal point d_f"
    )
    sub.add_argument(
        "--at-cm", type=float, default=None, help="observation position z (default: d_f)"
    )
    sub.set_defaults(func=_cmd_synth)

    sub = subs.add_parser("propagate", help="shift a stored waveform along the guide")
    _add_common(sub)
    sub.add_argument("--input", required=True, help="waveform file to shift")
    sub.add_argument("--by-cm", type=float, required=True, help="signed shift")
    sub.add_argument(
        "--binary", action="store_true", help="read/write the binary waveform format"
    )
    sub.set_defaults(func=_cmd_propagate)

    sub = subs.add_parser("compress", help="entrance vs focus envelope widths")
    _add_common(sub)
    sub.set_defaults(func=_cmd_compress)

    sub = subs.add_parser(
        "sweep-focal", help="P_g over (focal point, amplitude) at one spot size"
    )
    _add_common(sub, manifest=True, workers=True)
    sub.set_defaults(func=_cmd_sweep_focal)

    sub = subs.add_parser(
        "sweep-spot", help="P_g maps for each configured spot size"
    )
    _add_common(sub, manifest=True, workers=True)
    sub.set_defaults(func=_cmd_sweep_spot)

    sub = subs.add_parser(
        "resolution", help="excitation width sigma_q versus spot size sigma_f"
    )
    _add_common(sub, manifest=True, workers=True)
    sub.set_defaults(func=_cmd_resolution)

    sub = subs.add_parser(
        "reflections", help="maps and distortion over output reflectance"
    )
    _add_common(sub, manifest=True, workers=True)
    sub.set_defaults(func=_cmd_reflections)

    sub = subs.add_parser("export-awg", help="resample onto an AWG rate and export")
    _add_common(sub)
    sub.add_argument("--input", default=None, help="waveform file to export")
    sub.add_argument(
        "--focal-point-cm",
        type=float,
        default=None,
        help="synthesize at this focal point instead of reading --input",
    )
    sub.add_argument(
        "--at-cm", type=float, default=None, help="observation position z (default: d_f)"
    )
    sub.add_argument(
        "--rate-gsps", type=float, default=65.0, help="AWG sample rate in GS/s"
    )
    sub.add_argument(
        "--binary", action="store_true", help="read/write the binary waveform format"
    )
    sub.set_defaults(func=_cmd_export_awg)

    sub = subs.add_parser("validate", help="run the numeric invariant suite")
    _add_common(sub)
    sub.set_defaults(func=_cmd_validate)

    return parser


def main(argv=None) -> int:
    if argv is None:
        argv = sys.argv[1:]
    parser = build_parser()
    args = parser.parse_args(argv)
    args.argv = tuple(argv)
    try:
        args.func(args)
    except ConfigurationError as err:
        print(f"error: {err}", file=sys.stderr)
        return 2
    except EvanescentFrequencyError as err:
        print(f"error: {err}", file=sys.stderr)
        return 2
    except _NUMERIC_ERRORS as err:
        print(f"error: {err}", file=sys.stderr)
        return 3
    except (OSError, FileFormatError) as err:
        print(f"error: {err}", file=sys.stderr)
        return 4
    return 0


if __name__ == "__main__":
    sys.exit(main())
