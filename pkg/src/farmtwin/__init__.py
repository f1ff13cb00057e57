"""Digital twin of a drone-surveyed farm with explainable dispatch decisions."""

__version__ = "0.1.0"
