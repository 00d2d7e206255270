"""Null-distribution experiment: n * Sbar under equal uniform populations and
its m-out-of-n bootstrap calibration."""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path
from typing import Optional, Tuple

import numpy as np

from ._parallel import pool_map
from .costs import get_cost
from .divergence import sinkhorn_divergence
from .inference import mn_bootstrap_null, pp_sup_deviation
from .io import write_csv
from .measures import from_samples, sample_uniform_box
from .sinkhorn import SinkhornConfig

HIST_BINS = 40


@dataclass
class ExperimentConfig:
    lower: Tuple[float, ...] = (0.0, 0.0)
    upper: Tuple[float, ...] = (0.5, 0.5)
    n: int = 1000
    m_fractions: Tuple[float, ...] = (0.1,)
    outer_reps: int = 200
    bootstrap_reps: int = 500
    epsilon: float = 1.0
    tol: float = 1e-9
    seed: int = 0
    cost: str = "quadratic"
    output_dir: str = "experiment_out"

    def __post_init__(self):
        self.lower = tuple(float(v) for v in self.lower)
        self.upper = tuple(float(v) for v in self.upper)
        if isinstance(self.m_fractions, (int, float)):
            self.m_fractions = (self.m_fractions,)
        self.m_fractions = tuple(float(v) for v in self.m_fractions)
        for name in ("n", "outer_reps", "bootstrap_reps"):
            if int(getattr(self, name)) < 1:
                raise ValueError(f"{name} must be >= 1")
        if not self.m_fractions or not all(0 < f <= 0.5 for f in self.m_fractions):
            raise ValueError("m_fractions must lie in (0, 0.5]")
        if not self.epsilon > 0:
            raise ValueError("epsilon must be positive")
        if len(self.lower) != len(self.upper):
            raise ValueError("lower and upper must have the same length")

    def m_values(self):
        return [max(2, int(round(f * self.n))) for f in self.m_fractions]

    @classmethod
    def from_dict(cls, d: dict) -> "ExperimentConfig":
        known = {f.name for f in fields(cls)}
        unknown = set(d) - known
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        return cls(**d)

    @classmethod
    def from_json(cls, path) -> "ExperimentConfig":
        return cls.from_dict(json.loads(Path(path).read_text()))

    def to_dict(self) -> dict:
        return asdict(self)


def stream_seed(base: int, *keys: int) -> int:
    """63-bit seed for the stream identified by ``keys`` under ``base``."""
    ss = np.random.SeedSequence([int(base), *[int(k) for k in keys]])
    return int(ss.generate_state(1, dtype=np.uint64)[0] >> np.uint64(1))


@dataclass
class ExperimentResult:
    statistics: np.ndarray  # n * Sbar per outer repetition
    ranks: dict  # m -> array of ranks per repetition
    config: ExperimentConfig
    pp_deviation: dict = field(default_factory=dict)


def _one_rep(args):
    cfg, rep = args
    cost = get_cost(cfg.cost)
    scfg = SinkhornConfig(epsilon=cfg.epsilon, tol=cfg.tol)
    x1 = sample_uniform_box(cfg.lower, cfg.upper, cfg.n, stream_seed(cfg.seed, rep, 0))
    x2 = sample_uniform_box(cfg.lower, cfg.upper, cfg.n, stream_seed(cfg.seed, rep, 1))
    stat = cfg.n * sinkhorn_divergence(from_samples(x1), from_samples(x2), cost, scfg).sbar
    ranks = []
    for k, m in enumerate(cfg.m_values()):
        report = mn_bootstrap_null(
            x1, x2, m, cfg.bootstrap_reps, cost, scfg,
            seed=stream_seed(cfg.seed, rep, 2 + k), observed=stat, threads=1,
        )
        ranks.append(report.rank_of_observed)
    return stat, ranks


def run_null_experiment(cfg: ExperimentConfig, threads: Optional[int] = None) -> ExperimentResult:
    """Run all outer repetitions; nothing is written to disk."""
    import warnings

    with warnings.catch_warnings():
        # m = 0.2 n is a deliberate setting here
        warnings.simplefilter("ignore")
        out = pool_map(
            _one_rep, [(cfg, r) for r in range(cfg.outer_reps)],
            threads=threads, label="outer repetition", as_array=False,
        )
    stats = np.array([o[0] for o in out])
    ranks = {m: np.array([o[1][k] for o in out]) for k, m in enumerate(cfg.m_values())}
    dev = {m: pp_sup_deviation(r) for m, r in ranks.items()}
    return ExperimentResult(statistics=stats, ranks=ranks, config=cfg, pp_deviation=dev)


def histogram(values, bins: int = HIST_BINS):
    """Equal-width bins over [0, max(values)]."""
    values = np.asarray(values, dtype=np.float64)
    top = float(values.max()) if values.size else 1.0
    if not top > 0:
        top = 1.0
    counts, edges = np.histogram(values, bins=bins, range=(0.0, top))
    return counts, edges


def write_outputs(result: ExperimentResult, output_dir) -> dict:
    out = Path(output_dir)
    out.mkdir(parents=True, exist_ok=True)
    ms = list(result.ranks)
    write_csv(
        out / "statistics.csv",
        ["rep", "n_sbar"] + [f"rank_m{m}" for m in ms],
        [[i, s] + [result.ranks[m][i] for m in ms] for i, s in enumerate(result.statistics)],
    )
    counts, edges = histogram(result.statistics)
    total = counts.sum()
    width = edges[1] - edges[0]
    write_csv(
        out / "histogram.csv",
        ["bin_left", "bin_right", "count", "density"],
        [
            [edges[k], edges[k + 1], int(counts[k]), counts[k] / (total * width)]
            for k in range(len(counts))
        ],
    )
    reps = len(result.statistics)
    sorted_ranks = {m: np.sort(result.ranks[m]) for m in ms}
    write_csv(
        out / "ppdata.csv",
        ["k", "uniform"] + [f"sorted_rank_m{m}" for m in ms],
        [[k + 1, (k + 1) / reps] + [sorted_ranks[m][k] for m in ms] for k in range(reps)],
    )
    summary = {
        "n": result.config.n,
        "outer_reps": reps,
        "bootstrap_reps": result.config.bootstrap_reps,
        "m_values": ms,
        "pp_sup_deviation": {str(m): result.pp_deviation[m] for m in ms},
        "median_n_sbar": float(np.median(result.statistics)),
        "mean_n_sbar": float(np.mean(result.statistics)),
    }
    return summary


def median_scaled_null(n: int, trials: int, seed: int, epsilon: float = 1.0, tol: float = 1e-9,
                       lower=(0.0, 0.0), upper=(0.5, 0.5)) -> float:
    """Median over seeded trials of n * Sbar between two independent uniform samples."""
    cost = get_cost("quadratic")
    scfg = SinkhornConfig(epsilon=epsilon, tol=tol)
    vals = []
    for t in range(trials):
        x1 = sample_uniform_box(lower, upper, n, stream_seed(seed, n, t, 0))
        x2 = sample_uniform_box(lower, upper, n, stream_seed(seed, n, t, 1))
        vals.append(n * sinkhorn_divergence(from_samples(x1), from_samples(x2), cost, scfg).sbar)
    return float(np.median(vals))
