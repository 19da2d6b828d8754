"""Dispersion-engineered pulse focusing in a rectangular waveguide.

Simulates self-focusing chirped pulses on the TE10 mode of a rectangular
waveguide and the position-selective excitation of multi-level transmon
qubits driven by the local field, including point-like output reflections
and the parameter sweeps built on top (focal-point x amplitude maps, spot
size scans, spatial-resolution extraction).
"""

__version__ = "0.1.0"
