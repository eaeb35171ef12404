"""Monte Carlo estimator study with box-plot summaries."""

from __future__ import annotations

import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .estimate import FitOptions, fit
from .model import ModelFamily, ModelSpec
from .simulate import SimulationConfig, simulate, stream_seed

__all__ = ["BoxStats", "MonteCarloSummary", "box_stats", "monte_carlo", "worker_count"]

PARAMS = ("d", "lambda", "u")


@dataclass(frozen=True)
class BoxStats:
    """Tukey five-number box-plot statistics (hinges as quartiles, 1.5 IQR whiskers)."""

    q1: float
    median: float
    q3: float
    whisker_lo: float
    whisker_hi: float
    n_outliers: int

    def to_dict(self) -> dict:
        return dict(self.__dict__)


def box_stats(values) -> BoxStats:
    x = np.sort(np.asarray(values, dtype=float))
    x = x[np.isfinite(x)]
    n = x.size
    if n == 0:
        nan = float("nan")
        return BoxStats(nan, nan, nan, nan, nan, 0)
    # Tukey hinges: medians of the lower and upper halves, median shared when n is odd
    half = (n + 1) // 2
    q1 = float(np.median(x[:half]))
    q3 = float(np.median(x[n - half:]))
    med = float(np.median(x))
    iqr = q3 - q1
    lo_fence, hi_fence = q1 - 1.5 * iqr, q3 + 1.5 * iqr
    inside = x[(x >= lo_fence) & (x <= hi_fence)]
    outliers = int(n - inside.size)
    return BoxStats(q1, med, q3, float(inside.min()), float(inside.max()), outliers)


@dataclass
class MonteCarloSummary:
    true_spec: ModelSpec
    estimator: str
    n: int
    base_seed: int
    seeds: list
    estimates: dict
    stats: dict
    failures: int = 0
    failure_messages: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "true": self.true_spec.to_dict(),
            "estimator": self.estimator,
            "n": self.n,
            "replications": len(self.seeds),
            "base_seed": self.base_seed,
            "failures": self.failures,
            "stats": {k: v.to_dict() for k, v in self.stats.items()},
        }


def worker_count(requested: Optional[int] = None) -> int:
    """Parallelism cap: explicit argument, else ``GARTFIMA_THREADS`` (0 = all cores)."""
    if requested is None:
        requested = int(os.environ.get("GARTFIMA_THREADS", "1") or 1)
    if requested <= 0:
        requested = os.cpu_count() or 1
    return requested


def _one(args):
    spec, n, seed, estimator, p, q, family, options, burnin, trunc = args
    try:
        x = simulate(spec, SimulationConfig(n, seed=seed, burnin=burnin, trunc_len=trunc))
        res = fit(x, p, q, estimator, family, options)
    except Exception as exc:  # one bad replication must not sink the study
        return seed, None, f"{type(exc).__name__}: {exc}"
    row = {"d": res.effective_d, "lambda": res.lambda_hat, "u": res.u_hat,
           "sigma2": res.sigma2_hat, "converged": res.converged}
    for i, a in enumerate(res.ar_hat):
        row[f"ar{i + 1}"] = a
    for i, b in enumerate(res.ma_hat):
        row[f"ma{i + 1}"] = b
    return seed, row, None


def monte_carlo(true_spec: ModelSpec, n: int, replications: int, estimator: str = "nls",
                base_seed: int = 0, p: Optional[int] = None, q: Optional[int] = None,
                family=ModelFamily.GARTFIMA, options: Optional[FitOptions] = None,
                burnin: int = 500, trunc_len: int = 1000,
                workers: Optional[int] = None) -> MonteCarloSummary:
    """Simulate ``replications`` series, fit each, and summarise the estimates.

    Replication ``r`` uses seed ``base_seed ^ r``.  ``d`` is reported in the
    family's own parametrisation (the ARTFIMA order for ``u = 1`` families).
    """
    if replications < 2:
        raise ValueError("replications must be >= 2")
    family = ModelFamily.parse(family)
    p = true_spec.p if p is None else p
    q = true_spec.q if q is None else q
    options = options or FitOptions()
    seeds = [stream_seed(base_seed, r) for r in range(replications)]
    jobs = [(true_spec, n, s, estimator, p, q, family, options, burnin, trunc_len) for s in seeds]
    nw = worker_count(workers)
    if nw > 1:
        with ProcessPoolExecutor(max_workers=nw) as ex:
            results = list(ex.map(_one, jobs))
    else:
        results = [_one(j) for j in jobs]

    rows = [r for _, r, _ in results if r is not None]
    failures = [(s, msg) for s, r, msg in results if r is None]
    keys = list(rows[0].keys()) if rows else list(PARAMS)
    estimates = {k: np.array([row.get(k, math.nan) for row in rows], dtype=float) for k in keys}
    stats = {k: box_stats(estimates[k]) for k in keys if k != "converged"}
    return MonteCarloSummary(
        true_spec=true_spec, estimator=estimator, n=n, base_seed=base_seed,
        seeds=[s for s, r, _ in results if r is not None], estimates=estimates,
        stats=stats, failures=len(failures),
        failure_messages=[f"seed {s}: {m}" for s, m in failures],
    )
