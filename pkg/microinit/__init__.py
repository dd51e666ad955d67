"""
microinit - latent microstate initialization
Infers the initial microstate of a known deterministic system from short,
aggregated and possibly noisy scalar observation series.
"""

__version__ = "0.1.0"
