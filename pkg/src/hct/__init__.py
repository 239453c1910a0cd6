"""Noncommutative Laplace, two-sided Laplace, and Mellin transforms over
Cayley-Dickson algebras, with quadrature evaluation, Bromwich/residue/series
inversion, a machine-checked catalog of transform pairs and operational rules,
and an operational-calculus ODE solver."""

from .algebra import (
    CDNumber,
    PolarForm,
    cd_component,
    cd_conj,
    cd_exp,
    cd_inverse,
    cd_ln_principal,
    cd_mul,
    cd_norm,
    cd_polar,
    cd_pow_real,
    format_cd,
    parse_cd_literal,
)
from .kernel import LINEAR, SPHERICAL, KernelSpec, imag_phase, kernel_weight, phase
from .quadrature import (
    IntegrandProfile,
    QuadratureResult,
    integrate_bromwich_line,
    integrate_interval,
    integrate_semi_axis,
)
from .transforms import (
    Original,
    TransformRequest,
    estimate_growth,
    laplace_one_sided,
    laplace_two_sided,
    mellin_forward,
)
from .inversion import (
    LaurentTail,
    RationalImage,
    bromwich_invert,
    mellin_invert,
    residue_invert_rational,
    series_invert,
)
from .catalog import TransformPair, catalog_list, get_pair, verify_pair
from .rules import OperationalRule, all_rules, get_rule, verify_rule
from .ode import ODEProblem, build_image_equation, solve_image, solve_ode

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
