"""Relative entropy against symmetric references, and the Cramer transform of (Z, Z^2)."""
from .entropy import EntropyResult, blm_bound, dv_lower_bound, jensen_bound, relative_entropy
from .errors import (
    ConfigError, DegenerateMeasureError, DomainError, EntroboundError, PreconditionError,
    SpecParseError,
)
from .kernels import BACKEND
from .measures import (
    DiscreteMeasure, MomentPair, is_dirac_at_zero, is_symmetric, moments, parse_spec, symmetrize,
)
from .tilt import (
    BOUNDARY_DIVERGENCE, CgfEval, CramerResult, TiltParams, cgf, cramer_transform,
    realizable_region, symmetrized_integrand_identity_check, witness_bound, witness_integral,
)
from .verify import (
    SuiteConfig, TheoremCheck, check_proposition, check_theorem, run_suite,
    search_counterexample_asymmetric, sweep_min_g,
)

__version__ = "0.1.0"
