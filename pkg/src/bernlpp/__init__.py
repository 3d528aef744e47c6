"""Last-passage percolation laboratory for the Bernoulli corner-growth model.

An analytic engine for the closed-form shape functions, rate functions and
limiting log-moment generating functions of the model, and a deterministic
parallel Monte Carlo engine that verifies them at desk scale.
"""

__version__ = "0.1.0"

from .burke import exact_burke_factorization, mc_stationarity_check
from .errors import (
    BernlppError,
    ConfigError,
    DomainError,
    FlatRegimeError,
    GridMismatchError,
    MissingBoundaryParamError,
    NonFiniteError,
    OutOfRangeError,
    TooLargeError,
)
from .lattice import (
    BurkeTriple,
    EnvironmentGrid,
    ExactLaw,
    PassageField,
    brute_force_passage,
    burke_step,
    corner_passage_time,
    env_from_json,
    env_to_json,
    exact_law,
    increment_fields,
    passage_time,
    restricted_passage_time,
    sample_environment,
)
from .ldp import (
    H_rate,
    inf_convolution,
    istar,
    jstar,
    kappa_dual,
    kappa_rate,
    m_kappa,
    rate_I,
    rlem_gap,
    ustar,
)
from .lmgf import LmgfResult, ell_threshold, k_threshold, lambda_boundary, pole_xi
from .mc import (
    McEstimate,
    estimate_growth,
    estimate_lmgf,
    estimate_tail,
    left_tail_diagnostic,
    simulate_corners,
)
from .params import (
    ModelParams,
    bernoulli_cgf,
    bernoulli_rate,
    geometric_cgf,
    geometric_rate,
    validate_params,
)
from .shapes import (
    ShapeResult,
    characteristic_direction,
    gpp,
    gpp_boundary,
    gpp_restricted,
    minimize_scalarized,
    translate_first_passage,
    variational_gpp,
)
