"""Cantor-set fractal uncertainty bounds for time-frequency localization."""
from .bounds import build_schedule, cantor_fup_table, check_improvement, local_density_bound
from .cantor import (
    CantorSpec,
    GrowthCondition,
    IntervalUnion,
    RadialCantorSpec,
    build_iterate,
    cantor_function,
    square_product,
)
from .density import check_weak_subadditivity, rho_exact_1d, rho_product_bound, rho_radial_bound
from .porosity import certify_cantor_porosity, verify_porosity_1d
from .special import kappa

__version__ = "0.1.0"
