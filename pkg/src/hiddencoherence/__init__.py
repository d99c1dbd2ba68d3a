"""Subsystem coherence and CHSH violation of two-qubit states under global unitaries."""

__version__ = "0.1.0"
