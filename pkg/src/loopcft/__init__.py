"""loopcft: exact Virasoro representations on coefficient rings, SLE loop
measure spectra, and chordal Loewner evolution utilities."""

__version__ = "0.1.0"
