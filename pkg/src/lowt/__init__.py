"""Low-T-count mixed Clifford+T circuits for Boolean functions via random parity sketches."""

__version__ = "0.1.0"
