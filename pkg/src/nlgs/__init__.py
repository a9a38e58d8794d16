"""Nonlocal two-species reaction-diffusion simulator.

Core objects: grids and fields, integrable interaction kernels and their
scaled families, the nonlocal diffusion operator with two boundary modes, the
classical reference solver, explicit/IMEX time stepping with invariant
monitors, and a scale-ladder study against the local limit.
"""

from .grid import (
    Field,
    Grid,
    constant_field,
    field_from_function,
    field_from_values,
    inner_product,
    load_field,
    make_grid,
    norm,
    save_field,
)
from .kernels import (
    DIRICHLET,
    NEUMANN,
    KernelSpec,
    KernelTable,
    RadialProfile,
    ball_indicator_profile,
    build_kernel_table,
    bump_profile,
    kernel_moments,
    table_second_moment,
)
from .operator import (
    NonlocalOperator,
    apply,
    apply_dense,
    apply_values,
    build_dense,
    dissipation,
    dissipation_fast,
    make_operator,
    operator_norm_estimate,
    seminorm_lambda,
)
from .model import (
    ModelParams,
    SteadyStateReport,
    classify_stability_homogeneous,
    discriminant,
    reaction,
    steady_states,
)
from .integrator import (
    IntegrationError,
    IntegratorConfig,
    State,
    Trajectory,
    integrate,
    nonlocal_term,
    stability_bound,
)
from .local import (
    DiscreteLaplacian,
    apply_laplacian,
    effective_laplacians,
    integrate_local,
    laplacian_term,
    weak_residual,
)
from .limit import LimitStudyConfig, LimitStudyReport, effective_diffusivity, run_limit_study
from .presets import PRESETS, make_initial
from .config import ConfigError, RunConfig, load_run_config, parse_run_config

__version__ = "0.1.0"

__all__ = [
    "DIRICHLET",
    "NEUMANN",
    "PRESETS",
    "ConfigError",
    "DiscreteLaplacian",
    "Field",
    "Grid",
    "IntegrationError",
    "IntegratorConfig",
    "KernelSpec",
    "KernelTable",
    "LimitStudyConfig",
    "LimitStudyReport",
    "ModelParams",
    "NonlocalOperator",
    "RadialProfile",
    "RunConfig",
    "State",
    "SteadyStateReport",
    "Trajectory",
    "apply",
    "apply_dense",
    "apply_laplacian",
    "apply_values",
    "ball_indicator_profile",
    "build_dense",
    "build_kernel_table",
    "bump_profile",
    "classify_stability_homogeneous",
    "constant_field",
    "discriminant",
    "dissipation",
    "dissipation_fast",
    "effective_diffusivity",
    "effective_laplacians",
    "field_from_function",
    "field_from_values",
    "inner_product",
    "integrate",
    "integrate_local",
    "kernel_moments",
    "laplacian_term",
    "load_field",
    "load_run_config",
    "make_grid",
    "make_initial",
    "make_operator",
    "nonlocal_term",
    "norm",
    "operator_norm_estimate",
    "parse_run_config",
    "reaction",
    "run_limit_study",
    "save_field",
    "seminorm_lambda",
    "stability_bound",
    "steady_states",
    "table_second_moment",
    "weak_residual",
]
