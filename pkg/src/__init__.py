"""
Noncolliding Extremes

Exact and Monte Carlo extreme-value laws of noncolliding Brownian
systems: bridges, motions, Bessel bridges and the meander.
"""

__version__ = "0.1.0"
