"""Moment-derivative Cauchy problems: formal solutions, growth and summation."""

__version__ = "0.1.0"

from .errors import (
    DivergentIntegralError,
    DomainError,
    MathDomainError,
    MomentSumError,
    NumericalError,
    PadeError,
    QuadratureError,
    SingularDirectionError,
    TruncationError,
)
from .sequences import (
    MomentSequence,
    StronglyRegularSequence,
    custom_moments,
    gevrey_moments,
    gevrey_sequence,
    product_moments,
    q_factorial_moments,
)
from .series import (
    TruncatedSeries1D,
    TruncatedSeries2D,
    formal_borel,
    formal_laplace,
    moment_antiderivative,
    moment_derivative,
)
from .solver import CauchyProblem, FormalSolution, fixed_point_solution, residual, solve_formal
from .growth import GrowthReport, fit_moment_order, predicted_order, radius_estimate
from .kernels import GevreyKernel, kernel_E, kernel_e, moment_check
from .transforms import borel_transform_along, laplace_along, moment_derivative_integral_disc
from .pade import PadeApproximant, pade_continue
from .summation import SummationResult, singular_directions, sum_series
from .dsl import ParseError, parse_problem, parse_problem_file
