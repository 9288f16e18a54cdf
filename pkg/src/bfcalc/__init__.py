"""Bernstein functions, sectorial matrix calculi and sampled bound checks."""

from .bernstein import (Affine, AssociatedCBF, BernsteinFn, Compose, LevyBernstein, Log1p,
                        OneMinusExp, PotentialFn, Power, StieltjesCBF, Sum, associated_cbf,
                        from_spec, ratio_cbf, resolvent_diff_scalar)
from .bounds import aesa_constant, aest_constant, bound_suite, m_tilde, shift_identity_check
from .calculus import (contour_apply, eigen_oracle, fractional_power, hirsch_apply,
                       kato_fracpow_resolvent, levy_apply, resolvent,
                       resolvent_identity_parts, resolvent_identity_residual)
from .cm import bernstein_test, cm_test
from .errors import (AdmissibilityError, BfcalcError, ContourError, ConvergenceError,
                     DomainError, NearSpectrumError, NotSectorialError, SpecError,
                     UnsupportedRepresentation)
from .geometry import (CheckReport, SamplingPlan, Sector, carasso_kato_check, cbf_sector_check,
                       check_inequality, contour_bound_check, fujita_ratio_probe)
from .measures import RadonMeasure
from .sectorial import SectorialMatrix, make_sectorial
from .subordination import (GammaFamily, PoissonFamily, StableHalfFamily, compose_subordinator,
                            density, family_from_spec, semigroup_property_check,
                            subordinate_matrix, t1_diagnostic)
from .suites import SuiteConfig, SuiteReport, run_suite

__version__ = "0.1.0"
