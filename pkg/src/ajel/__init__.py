"""Jackknife and adjusted jackknife empirical likelihood for U-statistics."""

__version__ = "0.1.0"

from .elsolver import (ELSolution, Status, ajel_statistic, default_a_n,
                       el_solution, jel_statistic, solve_lambda)
from .errors import (AJELError, DataFormatError, NumericError, ParameterError,
                     SizeError, SolverFailure)
from .inference import (ConfidenceInterval, Method, TestResult, chi2_df1_cdf, chi2_df1_sf,
                        chi2_df1_quantile, confidence_interval, test_theta)
from .ustat import (KERNELS, Kernel, PseudoValueSet, Sample, eval_u_statistic,
                    eval_u_statistic_two, get_kernel, jackknife_pseudo_values,
                    register_kernel)
