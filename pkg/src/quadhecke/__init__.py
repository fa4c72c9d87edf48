"""quadhecke: arithmetic of the nine class-number-one imaginary quadratic
fields (and the rationals), quadratic Hecke characters of prime-related
conductor, their L-functions, and desk-scale numerical verification of
the shifted-ratio, moment and one-level-density asymptotics for that
family."""

from .characters import (GaussSum, QuadraticCharacter, gauss_sum,
                         reciprocity_defect, symbol, symbol_prime)
from .density import (DensityReport, TestFunction, default_test_function,
                      density_report, family_size, one_level_asym,
                      one_level_lhs, one_level_main, smooth_test_function)
from .fields import (ALL_FIELDS, CLASS_NUMBER_ONE_D, RATIONAL, FieldParams,
                     field_constants, gamma_K)
from .lfunctions import (LEvaluation, L_chi, L_logderiv, NearZeroError,
                         fe_residual, gr_bound_check, residue_rK)
from .moments import (E_exponent, FamilySweep, MomentReport, ShiftPoint,
                      WeightFunction, central_moment, first_moment,
                      fit_error_exponent, logderiv_moment, mellin_w,
                      negative_moment, ratio_lhs, ratio_main, ratio_moment)
from .ring import (PrimaryPrime, QuadInt, cornacchia, is_primary, lambda_K,
                   mu_K, powmod, primary_primes_up_to, reduce_mod,
                   splitting_type, to_primary)
from .zetas import zeta_K2

__version__ = "1.0.0"
