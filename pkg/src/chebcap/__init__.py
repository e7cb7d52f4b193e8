"""chebcap: equilibrium measures, logarithmic capacity, Green functions,
slit-strip data and monic Chebyshev polynomials on compact planar sets,
with an experiment harness for Widom-factor growth laws."""

__version__ = "0.1.0"

from ._kernels import BACKEND as KERNEL_BACKEND
from .diagnostics import (HolderFit, PerfectnessReport, holder_fit,
                          holder_probes_real, lemma31_integral,
                          perfectness_check)
from .equilibrium import (BoundaryDensity, EquilibriumReal,
                          boundary_potential_residual, capacity,
                          frostman_residual, green_complex, green_eval,
                          solve_real_equilibrium, solve_symm)
from .errors import ChebcapError, SolverError, ValidationError
from .geometry import (AffineMap, CantorSpec, DiscretizedCurve, Disk, Polygon,
                       RealIntervalUnion, Segment, ShapeSet, build_cantor,
                       discretize_boundary, gaps, normalize_to_I)
from .levin import LevinStrip, Slit, build_levin, crosscut_ratios, sublevel_truncate
from .minimax import (MonicChebyshev, SolverOptions, eval_poly,
                      solve_complex_monic, solve_real_monic)
from .widom import (BoundReport, GrowthFit, GrowthReport, SeriesResult,
                    SeriesRow, fit_growth, run_series, verify_bound_49)

__all__ = [
    "KERNEL_BACKEND", "__version__",
    "AffineMap", "CantorSpec", "DiscretizedCurve", "Disk", "Polygon",
    "RealIntervalUnion", "Segment", "ShapeSet",
    "build_cantor", "discretize_boundary", "gaps", "normalize_to_I",
    "BoundaryDensity", "EquilibriumReal", "capacity", "frostman_residual",
    "boundary_potential_residual", "green_complex", "green_eval",
    "solve_real_equilibrium", "solve_symm",
    "LevinStrip", "Slit", "build_levin", "crosscut_ratios", "sublevel_truncate",
    "MonicChebyshev", "SolverOptions", "eval_poly", "solve_complex_monic",
    "solve_real_monic",
    "BoundReport", "GrowthFit", "GrowthReport", "SeriesResult", "SeriesRow",
    "fit_growth", "run_series", "verify_bound_49",
    "HolderFit", "PerfectnessReport", "holder_fit", "holder_probes_real",
    "lemma31_integral", "perfectness_check",
    "ChebcapError", "SolverError", "ValidationError",
]
