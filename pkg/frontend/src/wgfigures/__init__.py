"""Figure regeneration from wgfocus CSV/JSON products.

Renders the standard visualization set — population heatmaps over
(focal point, amplitude), linecuts at a fixed drive amplitude, waveform
and envelope overlays, and summary curves (spatial resolution,
reflection distortion) — from the CSV and JSON files the ``wgfocus``
command line writes.  The renderer is read-only with respect to its
inputs and never touches the simulator's internals: the documented file
schemas are the only interface.
"""

__version__ = "0.1.0"
