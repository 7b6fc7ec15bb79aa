"""Performance analysis of multi-antenna selective-combining decode-and-forward
relay networks over Nakagami-m fading."""

from .analytic import (
    BranchDistribution,
    ExpPolyMixture,
    ExpPolyTerm,
    avg_capacity,
    branch_cdf,
    branch_distribution,
    branch_pdf,
    mgf,
    outage_probability,
    sc_mixture_for_config,
    sc_pdf_mixture,
    sep_mpsk,
)
from .channel import (
    BranchParams,
    IidCheck,
    LinkParams,
    SystemConfig,
    asymmetric_preset,
    link_rate,
    symmetric_preset,
    validate_config,
)
from .errors import ConfigError, InfeasibleError, NumericalError, ResourceError, UnsupportedError
from .montecarlo import McEstimate, simulate_capacity, simulate_outage, simulate_sep, simulate_sweep
from .power import (
    PowerSplit,
    adaptive_split,
    equal_split,
    numeric_split,
    rayleigh_optimal_split,
    solve_cubic,
)

__version__ = "0.1.0"
