"""Simulation and analysis of RIS-assisted code index modulation links."""
from .params import ConfigError, Scheme, SystemConfig

__version__ = "0.1.0"

__all__ = ["ConfigError", "Scheme", "SystemConfig", "__version__"]
