"""Sinkhorn divergence and the plug-in asymptotic variance."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .costs import CostSpec
from .measures import DiscreteMeasure
from .sinkhorn import EotSolution, SinkhornConfig, solve_schrodinger


@dataclass(frozen=True)
class DivergenceBundle:
    s12: float
    s11: float
    s22: float
    sbar: float
    sol12: EotSolution
    sol11: EotSolution
    sol22: EotSolution

    @property
    def solutions(self):
        return self.sol12, self.sol11, self.sol22

    def dual_sbar(self) -> float:
        return dual_from_solutions(self.sol12, self.sol11, self.sol22)

    def variance(self) -> float:
        return variance_from_solutions(self.sol12, self.sol11, self.sol22)


def _self_config(config: SinkhornConfig) -> SinkhornConfig:
    # same reference on both sides of a self-problem
    return SinkhornConfig(
        epsilon=config.epsilon, tol=config.tol, max_iter=config.max_iter,
        reference_index_1=0, reference_index_2=0,
    )


def solve_triplet(mu1, mu2, cost, config=None, backend=None):
    """Solve (mu1, mu2), (mu1, mu1) and (mu2, mu2) with a shared configuration."""
    config = config or SinkhornConfig()
    self_cfg = _self_config(config)
    sol11 = solve_schrodinger(mu1, mu1, cost, self_cfg, symmetric=True, backend=backend)
    if mu1.same_as(mu2):
        # identical inputs: reuse the self-problem so the three costs cancel exactly
        return sol11, sol11, sol11
    sol22 = solve_schrodinger(mu2, mu2, cost, self_cfg, symmetric=True, backend=backend)
    sol12 = solve_schrodinger(mu1, mu2, cost, config, symmetric=False, backend=backend)
    return sol12, sol11, sol22


def sinkhorn_divergence(
    mu1: DiscreteMeasure,
    mu2: DiscreteMeasure,
    cost: CostSpec,
    config: Optional[SinkhornConfig] = None,
    backend: Optional[str] = None,
) -> DivergenceBundle:
    """S(mu1, mu2) - (S(mu1, mu1) + S(mu2, mu2)) / 2 with all three solves kept."""
    sol12, sol11, sol22 = solve_triplet(mu1, mu2, cost, config, backend)
    s12, s11, s22 = sol12.value(), sol11.value(), sol22.value()
    return DivergenceBundle(
        s12=s12, s11=s11, s22=s22, sbar=s12 - (s11 + s22) / 2,
        sol12=sol12, sol11=sol11, sol22=sol22,
    )


def dual_from_solutions(sol12, sol11, sol22) -> float:
    """Divergence from potentials: int (phi1 - phi_11) dmu1 + int (phi2 - phi_22) dmu2."""
    w1 = sol12.mu1.weights
    w2 = sol12.mu2.weights
    return float(w1 @ (sol12.phi1 - sol11.phi1) + w2 @ (sol12.phi2 - sol22.phi2))


def sinkhorn_divergence_dual(mu1, mu2, cost, config=None, backend=None) -> float:
    return dual_from_solutions(*solve_triplet(mu1, mu2, cost, config, backend))


def _weighted_var(w, x):
    mean = w @ x
    return float(w @ (x - mean) ** 2)


def variance_from_solutions(sol12, sol11, sol22) -> float:
    """Var_mu1(phi1 - phi_11) + Var_mu2(phi2 - phi_22), population (not sample) variances."""
    v1 = _weighted_var(sol12.mu1.weights, sol12.phi1 - sol11.phi1)
    v2 = _weighted_var(sol12.mu2.weights, sol12.phi2 - sol22.phi2)
    return v1 + v2


def asymptotic_variance(mu1, mu2, cost, config=None, backend=None) -> float:
    return variance_from_solutions(*solve_triplet(mu1, mu2, cost, config, backend))
