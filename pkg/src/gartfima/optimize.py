"""Box-constrained Nelder-Mead with deterministic multi-starts.

Each coordinate is mapped to an unconstrained one: a logistic map for finite
intervals, a log map for half-lines.  Start points come from an unscrambled
Halton sequence, so repeated runs give identical results.  A coordinate with
a closed lower end on a half-line (``lambda >= 0``) is also tried exactly at
that end, since the log map can only approach it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np
from scipy.optimize import minimize
from scipy.special import expit, logit
from scipy.stats import qmc

from .errors import DomainError

__all__ = ["OptimizeResult", "optimize", "PENALTY"]

PENALTY = 1e12
_LOGISTIC_START = (-2.5, 2.5)
_LOG_START = (math.log(0.05), math.log(2.0))
_FREE_START = (-1.0, 1.0)


@dataclass
class OptimizeResult:
    x: np.ndarray
    fun: float
    converged: bool
    nfev: int
    restarts_used: int
    boundary: list = field(default_factory=list)


class _Transform:
    def __init__(self, bounds):
        self.bounds = [(float(lo), float(hi)) for lo, hi in bounds]
        for lo, hi in self.bounds:
            if not lo < hi:
                raise DomainError(f"empty interval ({lo}, {hi})")
        self.kind = []
        for lo, hi in self.bounds:
            if math.isfinite(lo) and math.isfinite(hi):
                self.kind.append("logistic")
            elif math.isfinite(lo):
                self.kind.append("log_lo")
            elif math.isfinite(hi):
                self.kind.append("log_hi")
            else:
                self.kind.append("free")

    def to_x(self, z):
        x = np.empty(len(z))
        for i, (k, (lo, hi)) in enumerate(zip(self.kind, self.bounds)):
            if k == "logistic":
                x[i] = lo + (hi - lo) * expit(z[i])
            elif k == "log_lo":
                x[i] = lo + math.exp(min(z[i], 700.0))
            elif k == "log_hi":
                x[i] = hi - math.exp(min(z[i], 700.0))
            else:
                x[i] = z[i]
        return x

    def to_z(self, x):
        z = np.empty(len(x))
        for i, (k, (lo, hi)) in enumerate(zip(self.kind, self.bounds)):
            if k == "logistic":
                t = (x[i] - lo) / (hi - lo)
                z[i] = logit(min(max(t, 1e-9), 1 - 1e-9))
            elif k == "log_lo":
                z[i] = math.log(max(x[i] - lo, 1e-12))
            elif k == "log_hi":
                z[i] = math.log(max(hi - x[i], 1e-12))
            else:
                z[i] = x[i]
        return z

    def start_box(self):
        ranges = {"logistic": _LOGISTIC_START, "log_lo": _LOG_START,
                  "log_hi": _LOG_START, "free": _FREE_START}
        return np.array([ranges[k] for k in self.kind])


def _safe(objective):
    def wrapped(x):
        try:
            val = float(objective(x))
        except (DomainError, FloatingPointError, ZeroDivisionError, OverflowError):
            return PENALTY
        return val if math.isfinite(val) else PENALTY
    return wrapped


def _nelder_mead(fz, z0, max_evals, tol, step=0.5):
    k = z0.size
    simplex = np.vstack([z0] + [z0 + step * e for e in np.eye(k)])
    res = minimize(fz, z0, method="Nelder-Mead",
                   options={"initial_simplex": simplex, "maxfev": max_evals,
                            "maxiter": max_evals, "xatol": tol, "fatol": np.inf,
                            "adaptive": k > 2})
    return res.x, float(res.fun), bool(res.success), int(res.nfev)


def optimize(objective: Callable[[np.ndarray], float], bounds: Sequence[tuple],
             restarts: int = 4, max_evals: int = 2000, tol: float = 1e-8,
             x0: Optional[Sequence[float]] = None) -> OptimizeResult:
    """Minimise ``objective`` over a box.

    Parameters
    ----------
    objective : callable
        Maps a parameter vector to a float.  Domain errors and non-finite
        values are replaced by a large finite penalty.
    bounds : sequence of (lo, hi)
        Either end may be infinite.
    restarts : int
        Number of Nelder-Mead starts (the first one is ``x0`` when given,
        otherwise the centre of the start box), followed by one polishing run
        from the best point.
    max_evals : int
        Evaluation budget for each run.
    tol : float
        Simplex diameter, in transformed coordinates, at which a run stops.
    """
    f = _safe(objective)
    tr = _Transform(bounds)
    k = len(tr.bounds)
    if k == 0:
        return OptimizeResult(np.empty(0), f(np.empty(0)), True, 1, 0)
    fz = lambda z: f(tr.to_x(z))  # noqa: E731

    box = tr.start_box()
    starts = []
    if x0 is not None:
        starts.append(tr.to_z(np.asarray(x0, dtype=float)))
    else:
        starts.append(box.mean(axis=1))
    n_more = max(restarts - 1, 0)
    if n_more:
        pts = qmc.Halton(d=k, scramble=False).random(n_more + 1)[1:]
        starts.extend(box[:, 0] + pts * (box[:, 1] - box[:, 0]))

    best = None
    nfev = 0
    for z0 in starts:
        z, val, ok, ne = _nelder_mead(fz, z0, max_evals, tol)
        nfev += ne
        if best is None or val < best[1]:
            best = (z, val, ok)
    z, val, ok, ne = _nelder_mead(fz, best[0], max_evals, tol, step=0.1)
    nfev += ne
    if val <= best[1]:
        best = (z, val, ok)
    x_best, f_best, converged = tr.to_x(best[0]), best[1], best[2]

    boundary = []
    for i, (kind, (lo, _)) in enumerate(zip(tr.kind, tr.bounds)):
        if kind != "log_lo":
            continue
        others = [j for j in range(k) if j != i]

        def pinned(zz, i=i, others=others):
            x = x_best.copy()
            x[i] = lo
            x[others] = tr.to_x(np.insert(zz, i, 0.0))[others] if others else x[others]
            return f(x)

        if others:
            zz, bval, bok, ne = _nelder_mead(pinned, tr.to_z(x_best)[others], max_evals, tol, step=0.1)
            nfev += ne
        else:
            zz, bval, bok = np.empty(0), pinned(np.empty(0)), True
        # ties go to the exact boundary point
        if bval <= f_best:
            x_new = x_best.copy()
            x_new[i] = lo
            if others:
                x_new[others] = tr.to_x(np.insert(zz, i, 0.0))[others]
            x_best, f_best, converged = x_new, bval, bok
            boundary.append(i)
    return OptimizeResult(x_best, f_best, converged, nfev, len(starts), boundary)
