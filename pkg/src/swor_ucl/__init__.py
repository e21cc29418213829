"""Upper confidence limits for sampling without replacement through a lossy channel."""

__version__ = "0.1.0"

from .errors import (
    DomainError,
    InfeasibleError,
    InfiniteDivergenceError,
    ScaleError,
    SingularInputError,
)
from .exact import ConfidenceBound, TestDesign, ucl_exact, ucl_iid_exact, ucl_lambda0
from .oracle import simulate_protocol, ucl_oracle_lp
from .planners import max_failures_exact, min_n_constant_exact, min_n_linear_exact, plan_asymptotics

__all__ = [
    "ConfidenceBound",
    "DomainError",
    "InfeasibleError",
    "InfiniteDivergenceError",
    "ScaleError",
    "SingularInputError",
    "TestDesign",
    "max_failures_exact",
    "min_n_constant_exact",
    "min_n_linear_exact",
    "plan_asymptotics",
    "simulate_protocol",
    "ucl_exact",
    "ucl_iid_exact",
    "ucl_lambda0",
    "ucl_oracle_lp",
]
