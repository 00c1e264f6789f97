"""Nonlinear Green's functions of ``w'' + N(w', w, t) = f(t)``.

Closed-form kernel catalogue, numerical construction from the homogeneous
Cauchy problem, short-time-expansion solvers, scale calibration, spectra
and traveling-wave PDE reductions.
"""

from .calibrate import CalibrationResult, calibrate, log_error, table2_harness
from .cauchy import (
    CauchyProblem,
    SampledTrajectory,
    check_multiplicativity,
    integrate,
    numeric_green,
    verify_green,
)
from .errors import (
    AccuracyError,
    BlowUpError,
    CalibrationError,
    DomainError,
    EvaluationError,
    NLGreenError,
    NumericalError,
    PoleError,
    ShapeError,
)
from .kernels import KernelSpec, eval_kernel, get_kernel, kernel_jump, kernel_nonlinearity, kernel_window, list_kernels
from .reduce import TravelingWaveMap, closed_green, lift_to_xt, pde_residual, reduce_traveling
from .solver import (
    ExpansionCoefficients,
    SourceFunction,
    convolve_first_order,
    reference_solution,
    short_time_expansion,
)
from .spectrum import SpectrumSet, analytic_spectrum, fft_peaks

__version__ = "0.1.0"
