"""Simulation and realized-volatility toolkit for the second-kind fractional
Ornstein-Uhlenbeck driver.

The heavy lifting lives in the compiled extension ``fou2._fou2``; this package
re-exports its public surface.
"""

from ._fou2 import (
    fbm_cov,
    fbm_variance_benchmark,
    holder_seminorm,
    inverse_time_change,
    kernel_k,
    ks_distance,
    p_variation,
    run_clt,
    run_consistency,
    run_variance_constant,
    sample_fbm,
    sample_y1,
    scaled_qv,
    solve_fou2,
    time_change,
    v_n,
    variogram,
    variogram_bruteforce,
    young_integral,
)

__all__ = [
    "fbm_cov",
    "fbm_variance_benchmark",
    "holder_seminorm",
    "inverse_time_change",
    "kernel_k",
    "ks_distance",
    "p_variation",
    "run_clt",
    "run_consistency",
    "run_variance_constant",
    "sample_fbm",
    "sample_y1",
    "scaled_qv",
    "solve_fou2",
    "time_change",
    "v_n",
    "variogram",
    "variogram_bruteforce",
    "young_integral",
]

__version__ = "0.1.0"
