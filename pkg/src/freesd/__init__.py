"""Densities of freely selfdecomposable laws.

A law in the class is given by a free triplet ``(a, k(t)/|t| dt, eta)`` with
``k`` unimodal about 0.  Its density is traced along the curve ``v_k`` where
``F_k(x + i v) = 1``: at ``xi = P_k(x)`` it equals
``v_k(x) / (pi (x^2 + v_k(x)^2))``.
"""

from .config import RunConfig, load_config, parse_config
from .cumulants import CumulantList, cumulants_from_k, moments_from_cumulants
from .density import (
    DensityCurve,
    GridSpec,
    build_density,
    cauchy_from_curve,
    check_cdf_shape,
    check_unimodal,
    crossvalidate,
    density_at,
    density_at_xi,
    mode,
    moments_from_density,
    write_csv,
)
from .errors import (
    BracketError,
    ConfigError,
    DivergentIntegralError,
    FreeSDError,
    MassDeficitError,
    MonotonicityError,
    NonConvergenceError,
)
from .levy import (
    CauchyType,
    FreeTriplet,
    GaussScaled,
    GeneratingPair,
    HalfExp,
    LevyDensity,
    Sum,
    SymExp,
    Table,
    make_family,
    validate_conditions,
)
from .mollify import MollifiedDensity, mollify_k, sigma_distance
from .quad import QuadSpec
from .report import CheckResult, ValidationReport
from .transforms import (
    TransformContext,
    cauchy_oracle,
    f_transform,
    free_cumulant_transform,
    h_transform,
    invert_h,
    voiculescu_transform,
)
from .vcurve import angular_profile, curve_grid, default_domain, p_map, solve_v

__version__ = "0.1.0"
