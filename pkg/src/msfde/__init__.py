"""Mean-square stability analysis of perturbed linear stochastic delay equations."""

from .errors import (
    AliasingError,
    ConsistencyError,
    DomainError,
    GridAlignmentError,
    InsufficientHorizonError,
    MsfdeError,
    PreconditionError,
    StepSizeError,
)
from .grid import FunctionTable, Grid
from .kernels import critical_rate, diffusion_kernel, gamma_transform, renewal_rho
from .measures import FiniteSignedMeasure, convolve_measure, measure_transform, total_variation
from .montecarlo import McConfig, McEstimate, compare, simulate
from .perturb import ForcingSpec, StabilityReport, Verdict, classify, exp_filter, sectional_average
from .resolvent import estimate_v0, homogeneous_x0, solve_resolvent
from .volterra_ms import ProblemInstance, consistency_check, mean_square

__version__ = "0.1.0"
