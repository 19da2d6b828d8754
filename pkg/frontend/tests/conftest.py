"""Shared builders for fabricated products with the documented schemas."""

import json
import math

import pytest

TWO_PI = 2.0 * math.pi


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    """Repeat the acceptance test's criterion line at the end of the run."""
    lines = set()
    for reports in terminalreporter.stats.values():
        for report in reports:
            if getattr(report, "when", None) != "call":
                continue
            for line in getattr(report, "capstdout", "").splitlines():
                if line.startswith("criterion "):
                    lines.add(line)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines):
            terminalreporter.write_line(line)


def write_map(path, *, focal=(0.0, 0.1, 0.2), amps_ghz=(1.0, 2.0), n_qubits=1, pg=None):
    """Long-format population map; pg may override single cells via dict."""
    pg = pg or {}
    lines = ["d_f_m,amplitude,sigma_f_m,qubit,pg,pe,pf,leak"]
    for i, d in enumerate(focal):
        for a in amps_ghz:
            for q in range(n_qubits):
                value = pg.get((i, a, q), 0.4)
                lines.append(
                    f"{d},{a * TWO_PI * 1e9},0.035,{q},{value},0.3,0.05,0.01"
                )
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path


def write_optima(path, entries):
    """optimal_*.json: object with a qubits list of optimum records."""
    doc = {
        "qubits": [
            {
                "qubit": q,
                "position_m": 0.15 + 0.05 * q,
                "amplitude_rad_per_s": ghz * TWO_PI * 1e9,
                "amplitude_ghz": ghz,
                "contrast": 0.9,
            }
            for q, ghz in entries
        ]
    }
    path.write_text(json.dumps(doc, indent=2) + "\n", encoding="utf-8")
    return path


def write_envelope(path, *, carrier_ghz=7.2, sigma_ns=2.0):
    lines = ["t_ns,field,envelope"]
    for i in range(-50, 51):
        t = 0.1 * i
        env = math.exp(-(t * t) / (2.0 * sigma_ns**2))
        lines.append(f"{t},{env * math.cos(TWO_PI * carrier_ghz * t)},{env}")
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path


def write_resolution(path, rows=((0.02, 0.089), (0.035, 0.155), (0.05, 0.192))):
    lines = ["sigma_f_m,sigma_q_m"]
    lines += [f"{sf},{sq}" for sf, sq in rows]
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path


def write_distortion(path, n_qubits=2):
    lines = ["reflectance,qubit,distortion_l2"]
    for r in (0.0, 0.1, 0.316):
        for q in range(n_qubits):
            lines.append(f"{r},{q},{r * 10 * (q + 1)}")
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path


@pytest.fixture
def products(tmp_path):
    """One of each fabricated product, keyed by kind of file."""
    return {
        "map": write_map(tmp_path / "map_demo.csv", n_qubits=2),
        "optima": write_optima(tmp_path / "optimal_demo.json", [(0, 2.0), (1, 1.0)]),
        "envelope": write_envelope(tmp_path / "env_demo.csv"),
        "resolution": write_resolution(tmp_path / "resolution_demo.csv"),
        "distortion": write_distortion(tmp_path / "distortion_demo.csv"),
        "dir": tmp_path,
    }
