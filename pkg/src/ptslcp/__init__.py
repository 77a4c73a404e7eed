"""Parabolic target-space interior-point solver for monotone LCPs.

Core library: problem instances and the random generator, the lifted
target-space machinery, predictor/corrector steps, the solve driver with
audit oracles, terminal diagnostics, and a benchmark runner. An HTTP
facade lives in ptslcp.service and a thin-client CLI in ptslcp.cli.
"""

from .bench import (AccuracyTrace, BatchSpec, BenchReport, InstanceResult,
                    run_batch, run_trace)
from .directions import (DirectionKind, SearchDirection, direction_bounds,
                         solve_newton)
from .errors import PtsLcpError
from .problem import (FeasiblePair, GeneratorConfig, LcpProblem,
                      generate_random, read_problem, write_problem)
from .solver import (LocalDiagnostics, SolveTrace, SolverConfig, Termination,
                     local_diagnostics, solve, theory_tau)
from .target_space import (Iterate, ProximityReport, TargetPoint, lift_start,
                           merit, omega, omega_star, proximities)

__version__ = "0.1.0"

__all__ = [
    "AccuracyTrace", "BatchSpec", "BenchReport", "DirectionKind",
    "FeasiblePair", "GeneratorConfig", "InstanceResult", "Iterate",
    "LcpProblem", "LocalDiagnostics", "ProximityReport", "PtsLcpError",
    "SearchDirection", "SolveTrace", "SolverConfig", "TargetPoint",
    "Termination", "__version__", "direction_bounds", "generate_random",
    "lift_start", "local_diagnostics", "merit", "omega", "omega_star",
    "proximities", "read_problem", "run_batch", "run_trace", "solve",
    "solve_newton", "theory_tau", "write_problem",
]
