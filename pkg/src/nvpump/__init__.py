"""nvpump - recursive 14N nuclear spin pumping in NV centers, simulated."""

__version__ = "0.1.0"
