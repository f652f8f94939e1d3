"""Gaussian coherent-state least squares for the 1D high-frequency Helmholtz
problem with perfectly matched layers."""

from .phase_space import (
    LatticeSpec,
    IndexPair,
    IndexSet,
    lattice_point,
    build_ball_set,
    build_symbol_set,
    build_planewave_rhs_set,
    search_bounds_from_symbol,
)
from .gaussian_states import (
    CoherentState,
    SecondOrderOperator,
    constant_operator,
    eval_state,
    eval_derivative,
    overlap,
    apply_operator,
    residual_factor,
    iterated_residual_norm,
)
from .problem_model import (
    ProblemCase,
    CoefficientModel,
    bridge_eval,
    pml_sigma,
    cutoff_phi,
    mu_heterogeneous,
)
from .quadrature import QuadratureRule, build_rule, inner_product, support_window
from .assembly_solver import DesignSystem, SolveReport, assemble, solve, reconstruct
from .reference_fem import FemMesh, FemSolution, fem_solve, fem_eval
from .analysis import ErrorReport, FrameDiagnostics, h1k_error, frame_bounds
from .experiments import ExperimentConfig, ExperimentRecord, run_case, scaling_study, emit

__version__ = "0.1.0"
