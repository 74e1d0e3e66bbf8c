"""Pulse-level simulator and waveform synthesizer for superadiabatic
parametric two-qubit gates on coupled transmons."""

__version__ = "0.1.0"
