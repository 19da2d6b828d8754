"""INI scenario configuration with explicit unit suffixes.

Sections: [waveguide], [pulse], [qubits.N] (N = 1, 2, ...),
[reflection], [sweep], [run].  Every physical key carries its unit as a
suffix (width_mm, carrier_ghz, spot_size_cm, ...); a bare physical key
is rejected, as is any key the schema does not know.  Frequencies are
cyclic in the file (GHz/MHz) and become angular (rad/s) only when the
scenario object is built.

Parsing canonicalizes to one unit per dimension (metres, GHz,
nanoseconds), so parse -> serialize -> parse is an exact fixed point:
the serialized text stores repr() of the canonical floats and the
canonical suffixes convert with factor one.

Sweep axes accept three list syntaxes, all in the key's unit:

    focal_points_m = lin:0:0.4:81        inclusive linear spacing
    amplitudes_ghz = log:0.2667:8.434:21 log10 spacing
    spot_sizes_cm  = 2, 3.5, 5, 7, 10    explicit values
"""

from __future__ import annotations

import configparser
import io
import math

import numpy as np

from .channel import ReflectionSpec
from .dynamics import TransmonSpec
from .errors import ConfigurationError
from .experiments import (
    DEFAULT_EXCLUSION,
    DEFAULT_REFLECTANCES,
    Scenario,
    SweepGrid,
    default_amplitudes,
    default_focal_points,
    DEFAULT_SPOT_SIZES,
)
from .waveguide import WaveguideSpec

TWO_PI = 2.0 * math.pi

# accepted suffix -> factor into the canonical unit of its dimension
_LENGTH = {"m": 1.0, "cm": 1e-2, "mm": 1e-3}
_FREQ = {"ghz": 1.0, "mhz": 1e-3}  # canonical: cyclic GHz
_TIME = {"ns": 1.0, "us": 1e3}  # canonical: nanoseconds

# value kinds for bare (dimensionless) keys
_FLOAT, _INT, _BOOL, _STR, _FLOATLIST = "float", "int", "bool", "str", "floatlist"

# schema: section -> base key -> dimension dict or bare kind
_SCHEMA: dict[str, dict[str, object]] = {
    "waveguide": {"width": _LENGTH, "height": _LENGTH},
    "pulse": {
        "carrier": _FREQ,
        "spot_size": _LENGTH,
        "highpass_coefficient": _FLOAT,
        "highpass_enabled": _BOOL,
    },
    "qubits": {
        "position": _LENGTH,
        "transition": _FREQ,
        "anharmonicity": _FREQ,
        "dipole": _FLOAT,
        "levels": _INT,
    },
    "reflection": {
        "power_percent": _FLOAT,
        "return_loss_db": _FLOAT,
        "reflection_point": _LENGTH,
        "phase": _INT,
        "study_reflectances": _FLOATLIST,
    },
    "sweep": {
        "focal_points": (_FLOATLIST, _LENGTH),
        "amplitudes": (_FLOATLIST, _FREQ),
        "spot_sizes": (_FLOATLIST, _LENGTH),
    },
    "run": {
        "name": _STR,
        "model": _STR,
        "length": _LENGTH,
        "substeps": _INT,
        "exclusion": _LENGTH,
        "workers": None,  # recognized so the error can say why it is rejected
    },
}

_CANONICAL_SUFFIX = {id(_LENGTH): "m", id(_FREQ): "ghz", id(_TIME): "ns"}


def _split_suffix(key: str, units: dict) -> tuple[str, float] | None:
    """Match key = <base>_<suffix> against a unit family; None if no match."""
    for suffix, factor in units.items():
        if key.endswith("_" + suffix):
            return key[: -(len(suffix) + 1)], factor
    return None


def _parse_number(text: str, key: str, section: str) -> float:
    try:
        return float(text)
    except ValueError as err:
        raise ConfigurationError(
            f"key '{key}' in [{section}] is not a number: {text!r}"
        ) from err


def _parse_list(text: str, key: str, section: str) -> tuple[float, ...]:
    text = text.strip()
    if text.startswith(("lin:", "log:")):
        kind, *rest = text.split(":")
        if len(rest) != 3:
            raise ConfigurationError(
                f"key '{key}' in [{section}]: expected {kind}:start:stop:count"
            )
        start = _parse_number(rest[0], key, section)
        stop = _parse_number(rest[1], key, section)
        try:
            count = int(rest[2])
        except ValueError as err:
            raise ConfigurationError(
                f"key '{key}' in [{section}]: count must be an integer"
            ) from err
        if count < 1:
            raise ConfigurationError(
                f"key '{key}' in [{section}]: count must be >= 1"
            )
        if kind == "lin":
            values = np.linspace(start, stop, count)
        else:
            if start <= 0.0 or stop <= 0.0:
                raise ConfigurationError(
                    f"key '{key}' in [{section}]: log endpoints must be > 0"
                )
            values = np.logspace(math.log10(start), math.log10(stop), count)
        return tuple(float(v) for v in values)
    return tuple(
        _parse_number(part, key, section) for part in text.split(",") if part.strip()
    )


def _parse_bool(text: str, key: str, section: str) -> bool:
    lowered = text.strip().lower()
    if lowered in ("1", "true", "yes", "on"):
        return True
    if lowered in ("0", "false", "no", "off"):
        return False
    raise ConfigurationError(
        f"key '{key}' in [{section}] is not a boolean: {text!r}"
    )


def _parse_section(section: str, schema_name: str, items) -> dict:
    """Resolve one section's raw items against the schema."""
    schema = _SCHEMA[schema_name]
    out: dict[str, object] = {}
    for raw_key, raw_value in items:
        matched = False
        for base, kind in schema.items():
            if kind is None and raw_key == base:
                raise ConfigurationError(
                    f"key '{raw_key}' in [{section}] is not configurable here "
                    "(worker count is a command-line flag so output never "
                    "depends on it)"
                )
            if isinstance(kind, dict):
                if raw_key == base:
                    raise ConfigurationError(
                        f"key '{raw_key}' in [{section}] is missing its unit "
                        f"suffix (one of: "
                        f"{', '.join(base + '_' + s for s in kind)})"
                    )
                split = _split_suffix(raw_key, kind)
                if split is not None and split[0] == base:
                    factor = split[1]
                    canon = base + "_" + _CANONICAL_SUFFIX[id(kind)]
                    out[canon] = _parse_number(raw_value, raw_key, section) * factor
                    matched = True
                    break
            elif isinstance(kind, tuple):  # dimensioned list
                _, units = kind
                if raw_key == base:
                    raise ConfigurationError(
                        f"key '{raw_key}' in [{section}] is missing its unit "
                        f"suffix (one of: "
                        f"{', '.join(base + '_' + s for s in units)})"
                    )
                split = _split_suffix(raw_key, units)
                if split is not None and split[0] == base:
                    factor = split[1]
                    canon = base + "_" + _CANONICAL_SUFFIX[id(units)]
                    values = _parse_list(raw_value, raw_key, section)
                    out[canon] = tuple(v * factor for v in values)
                    matched = True
                    break
            elif raw_key == base:
                if kind == _FLOAT:
                    out[base] = _parse_number(raw_value, raw_key, section)
                elif kind == _INT:
                    try:
                        out[base] = int(raw_value)
                    except ValueError as err:
                        raise ConfigurationError(
                            f"key '{raw_key}' in [{section}] is not an "
                            f"integer: {raw_value!r}"
                        ) from err
                elif kind == _BOOL:
                    out[base] = _parse_bool(raw_value, raw_key, section)
                elif kind == _FLOATLIST:
                    out[base] = _parse_list(raw_value, raw_key, section)
                else:
                    out[base] = raw_value.strip()
                matched = True
                break
        if not matched:
            raise ConfigurationError(
                f"unknown key '{raw_key}' in [{section}]"
            )
    return out


def parse_config(text: str) -> dict:
    """Parse INI text into a canonical nested document.

    Returns {"waveguide": {...}, "pulse": {...}, "qubits": [{...}, ...],
    "reflection": {...} | None, "sweep": {...}, "run": {...}} with all
    values in canonical units (metres, cyclic GHz, nanoseconds).
    """
    parser = configparser.ConfigParser(interpolation=None)
    try:
        parser.read_string(text)
    except configparser.Error as err:
        raise ConfigurationError(f"malformed config: {err}") from err
    doc: dict = {
        "waveguide": {},
        "pulse": {},
        "qubits": [],
        "reflection": None,
        "sweep": {},
        "run": {},
    }
    qubit_sections: dict[int, dict] = {}
    for section in parser.sections():
        if section.startswith("qubits."):
            tag = section.split(".", 1)[1]
            try:
                index = int(tag)
            except ValueError as err:
                raise ConfigurationError(
                    f"qubit section [{section}] needs an integer tag"
                ) from err
            if index < 1:
                raise ConfigurationError(
                    f"qubit section [{section}] must be numbered from 1"
                )
            qubit_sections[index] = _parse_section(
                section, "qubits", parser.items(section)
            )
        elif section in ("waveguide", "pulse", "sweep", "run"):
            doc[section] = _parse_section(section, section, parser.items(section))
        elif section == "reflection":
            doc["reflection"] = _parse_section(
                section, "reflection", parser.items(section)
            )
        else:
            raise ConfigurationError(f"unknown section [{section}]")
    for expected, index in enumerate(sorted(qubit_sections), start=1):
        if index != expected:
            raise ConfigurationError(
                f"qubit sections must be contiguous from 1; missing "
                f"[qubits.{expected}]"
            )
        doc["qubits"].append(qubit_sections[index])
    if doc["reflection"] is not None:
        refl = doc["reflection"]
        has_power = "power_percent" in refl
        has_db = "return_loss_db" in refl
        if has_power and has_db:
            raise ConfigurationError(
                "give either power_percent or return_loss_db, not both"
            )
        if (has_power or has_db) and "reflection_point_m" not in refl:
            raise ConfigurationError(
                "reflection needs a reflection_point (e.g. reflection_point_cm)"
            )
    return doc


def _format_value(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, tuple):
        return ", ".join(repr(v) for v in value)
    if isinstance(value, float):
        return repr(value)
    return str(value)


def serialize_config(doc: dict) -> str:
    """Render a parsed document back to canonical INI text."""
    out = io.StringIO()

    def emit(section: str, mapping: dict) -> None:
        if not mapping:
            return
        out.write(f"[{section}]\n")
        for key in sorted(mapping):
            out.write(f"{key} = {_format_value(mapping[key])}\n")
        out.write("\n")

    emit("waveguide", doc.get("waveguide", {}))
    emit("pulse", doc.get("pulse", {}))
    for n, qubit in enumerate(doc.get("qubits", []), start=1):
        emit(f"qubits.{n}", qubit)
    if doc.get("reflection"):
        emit("reflection", doc["reflection"])
    emit("sweep", doc.get("sweep", {}))
    emit("run", doc.get("run", {}))
    return out.getvalue().rstrip("\n") + "\n"


def _reflection_from_doc(refl: dict, reflection_point: float) -> ReflectionSpec:
    if "power_percent" in refl:
        return ReflectionSpec.from_power_percent(
            refl["power_percent"], reflection_point, phase=refl.get("phase", 1)
        )
    if "return_loss_db" in refl:
        return ReflectionSpec.from_return_loss_db(
            refl["return_loss_db"], reflection_point, phase=refl.get("phase", 1)
        )
    return ReflectionSpec(
        amplitude=0.0, reflection_point=reflection_point, phase=refl.get("phase", 1)
    )


def build_scenario(doc: dict) -> Scenario:
    """Construct the Scenario a parsed document describes."""
    wg = doc.get("waveguide", {})
    waveguide = WaveguideSpec(
        **{
            field: wg[key]
            for field, key in (("broad", "width_m"), ("narrow", "height_m"))
            if key in wg
        }
    )
    pulse = doc.get("pulse", {})
    carrier_ghz = pulse.get("carrier_ghz", 7.2)
    carrier = TWO_PI * 1e9 * carrier_ghz
    run = doc.get("run", {})
    if not doc.get("qubits"):
        raise ConfigurationError("config needs at least one [qubits.N] section")
    qubits = []
    for n, q in enumerate(doc["qubits"], start=1):
        if "position_m" not in q:
            raise ConfigurationError(f"[qubits.{n}] needs a position (position_cm)")
        try:
            qubits.append(
                TransmonSpec(
                    transition_frequency=TWO_PI
                    * 1e9
                    * q.get("transition_ghz", carrier_ghz),
                    anharmonicity=TWO_PI * 1e9 * q.get("anharmonicity_ghz", 0.0),
                    dipole_scale=q.get("dipole", 1.0),
                    position=q["position_m"],
                    level_count=q.get("levels", 5),
                )
            )
        except ValueError as err:
            raise ConfigurationError(f"[qubits.{n}]: {err}") from err
    reflections = None
    if doc.get("reflection"):
        refl_doc = doc["reflection"]
        if "reflection_point_m" in refl_doc:
            spec = _reflection_from_doc(refl_doc, refl_doc["reflection_point_m"])
            reflections = tuple(spec for _ in qubits)
    try:
        return Scenario(
            name=run.get("name", "run"),
            waveguide=waveguide,
            qubits=tuple(qubits),
            spot_size=pulse.get("spot_size_m", 0.035),
            carrier=carrier,
            length=run.get("length_m", 1.03),
            reflections=reflections,
            evolution_model=run.get("model", "rwa"),
            highpass_coefficient=pulse.get("highpass_coefficient", 0.01),
            highpass_enabled=pulse.get("highpass_enabled", True),
            substeps=run.get("substeps", 4),
        )
    except ValueError as err:
        raise ConfigurationError(str(err)) from err


def build_grid(doc: dict) -> SweepGrid:
    """Construct the SweepGrid, falling back to the default axes."""
    sweep = doc.get("sweep", {})
    focal = sweep.get("focal_points_m")
    amps = sweep.get("amplitudes_ghz")
    spots = sweep.get("spot_sizes_m")
    try:
        return SweepGrid(
            focal_points=(
                default_focal_points() if focal is None else np.asarray(focal)
            ),
            amplitudes=(
                default_amplitudes()
                if amps is None
                else TWO_PI * 1e9 * np.asarray(amps)
            ),
            spot_sizes=(
                np.asarray(DEFAULT_SPOT_SIZES) if spots is None else np.asarray(spots)
            ),
        )
    except ValueError as err:
        raise ConfigurationError(str(err)) from err


def study_reflectances(doc: dict) -> tuple[float, ...]:
    """The reflectance ladder for reflection studies."""
    refl = doc.get("reflection") or {}
    values = refl.get("study_reflectances")
    if values is None:
        return DEFAULT_REFLECTANCES
    return tuple(float(v) for v in values)


def exclusion_width(doc: dict) -> float:
    """Contrast-baseline exclusion half-width (metres)."""
    return doc.get("run", {}).get("exclusion_m", DEFAULT_EXCLUSION)


def load_config(path) -> dict:
    """Read and parse a config file.

    OSError propagates (missing file is an I/O problem, not a content
    problem); malformed content raises ConfigurationError.
    """
    with open(path, "r", encoding="utf-8") as fh:
        text = fh.read()
    return parse_config(text)
