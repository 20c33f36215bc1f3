"""
Monte Carlo Module

Independent sampling oracle for the extreme-value laws:
- entrance: matrix-ensemble samplers for configurations at a single time
- mc_oracle: rejection sampling of discretized noncolliding paths
"""

from src.montecarlo import entrance
from src.montecarlo.mc_oracle import (
    EmpiricalCdf,
    PathEnsemble,
    Statistic,
    empirical_cdf,
    empirical_joint_lr,
    sample_bridge_ensemble,
)

__all__ = [
    "EmpiricalCdf",
    "PathEnsemble",
    "Statistic",
    "empirical_cdf",
    "empirical_joint_lr",
    "entrance",
    "sample_bridge_ensemble",
]
