"""Entropic optimal transport: Schrödinger potentials, Sinkhorn divergence,
entropic maps and resampling-based inference."""

__version__ = "0.1.0"

from ._backend import BACKEND
from .costs import CostSpec, get_cost, quadratic_cost
from .divergence import (
    DivergenceBundle,
    asymptotic_variance,
    sinkhorn_divergence,
    sinkhorn_divergence_dual,
)
from .independence import (
    IndependenceResult,
    SampleTooLargeError,
    independence_statistic,
    independence_test,
    ustat_decomposition_check,
)
from .inference import (
    CltInterval,
    ConfidenceBand,
    ResampleReport,
    clt_interval,
    map_confidence_band,
    mn_bootstrap_null,
    pp_sup_deviation,
)
from .measures import (
    DiscreteMeasure,
    PairedSample,
    ProductMeasure,
    from_samples,
    pool,
    product_marginals,
    sample_uniform_box,
)
from .potentials import barycentric_map, entropic_map, extend_potential, grad_potential_1
from .sinkhorn import (
    EotSolution,
    NumericalError,
    SinkhornConfig,
    SinkhornConvergenceError,
    marginal_violation,
    plan_matrix,
    primal_dual_values,
    solve_schrodinger,
)

__all__ = [
    "BACKEND",
    "CltInterval",
    "ConfidenceBand",
    "CostSpec",
    "DiscreteMeasure",
    "DivergenceBundle",
    "EotSolution",
    "IndependenceResult",
    "NumericalError",
    "PairedSample",
    "ProductMeasure",
    "ResampleReport",
    "SampleTooLargeError",
    "SinkhornConfig",
    "SinkhornConvergenceError",
    "asymptotic_variance",
    "barycentric_map",
    "clt_interval",
    "entropic_map",
    "extend_potential",
    "from_samples",
    "get_cost",
    "grad_potential_1",
    "independence_statistic",
    "independence_test",
    "map_confidence_band",
    "marginal_violation",
    "mn_bootstrap_null",
    "plan_matrix",
    "pool",
    "pp_sup_deviation",
    "primal_dual_values",
    "product_marginals",
    "quadratic_cost",
    "sample_uniform_box",
    "sinkhorn_divergence",
    "sinkhorn_divergence_dual",
    "solve_schrodinger",
    "ustat_decomposition_check",
]
