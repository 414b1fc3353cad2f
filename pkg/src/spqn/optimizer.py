"""Seeded multistart Nelder-Mead maximization of the CHSH value."""

from __future__ import annotations

import logging
import math
import os
import time
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np
from joblib import Parallel, delayed
from scipy.optimize import minimize

from .fock import DEFAULT_CUTOFF
from .scenario import (
    TSIRELSON,
    Scenario,
    _check_eta_p,
    chsh_objective,
    converged_cutoff_for,
    known_optimum,
)

logger = logging.getLogger(__name__)

_MASK64 = (1 << 64) - 1

# Random starts are drawn from this sub-box of the search bounds. Starts with
# large displacement or squeezing land on the flat S ~ 2 plateau (detectors
# that always click) where the simplex stalls.
_START_BOX = {
    "alpha_re": (-0.7, 0.7),
    "alpha_im": (-0.7, 0.7),
    "r": (-0.5, 0.5),
    "phi_xi": (-math.pi, math.pi),
    "theta": (-math.pi, math.pi),
    "center": (-3.0, 3.0),
    "width": (0.1, 12.0),
}


def worker_count() -> int:
    """Worker cap from ``SPQN_THREADS``; defaults to the available CPUs."""
    env = os.environ.get("SPQN_THREADS")
    if env:
        return max(1, int(env))
    try:
        return max(1, len(os.sched_getaffinity(0)))
    except AttributeError:
        return os.cpu_count() or 1


@dataclass(frozen=True)
class OptimizerConfig:
    restarts: int = 200
    seed: int = 0
    cutoff: int = DEFAULT_CUTOFF
    tol: float = 1e-7
    max_iter: int = 2000
    n_jobs: Optional[int] = None

    def __post_init__(self):
        if self.restarts < 0:
            raise ValueError("restarts must be nonnegative")
        if not 0 <= self.seed <= _MASK64:
            raise ValueError("seed must be a 64-bit unsigned integer")


@dataclass
class OptimizationResult:
    scenario: str
    variant: str
    eta: float
    p: float
    best_S: float
    best_params: np.ndarray
    per_restart_S: list[float]
    start_labels: list[str]
    seed: int
    cutoff: int
    wall_time: float
    failures: list[tuple[int, str]] = field(default_factory=list)

    @property
    def best_index(self) -> int:
        return int(np.argmax(self.per_restart_S))

    @property
    def violates(self) -> bool:
        return self.best_S > 2.0


def _splitmix64(z: int) -> int:
    z = (z + 0x9E3779B97F4A7C15) & _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return z ^ (z >> 31)


def restart_seeds(seed: int, restarts: int) -> list[int]:
    """Per-restart seeds, ``splitmix64(seed + golden * i)``; a prefix never depends on ``restarts``."""
    base = _splitmix64(seed & _MASK64)
    return [_splitmix64((base + i * 0xD1B54A32D192ED03) & _MASK64) for i in range(restarts)]


def local_refine(
    objective: Callable[[np.ndarray], float],
    start,
    bounds,
    tol: float = 1e-7,
    max_iter: int = 2000,
) -> tuple[np.ndarray, float]:
    """Maximize ``objective`` by bounded Nelder-Mead.

    The simplex is rebuilt around the current best point after each run and
    the search stops once a whole run gains less than ``tol``, or after
    ``max_iter`` simplex iterations in total. Returns the best point seen,
    clipped into ``bounds``, and its value.
    """
    bounds = np.asarray(bounds, dtype=float)
    x = np.clip(np.asarray(start, dtype=float), bounds[:, 0], bounds[:, 1])
    best = objective(x)
    used = 0
    while used < max_iter:
        options = {"maxiter": max_iter - used, "xatol": 1e-6, "fatol": tol, "adaptive": x.size > 4}
        res = minimize(lambda v: -objective(v), x, method="Nelder-Mead", bounds=bounds, options=options)
        used += max(res.nit, 1)
        cand = np.clip(res.x, bounds[:, 0], bounds[:, 1])
        value = objective(cand)
        gain = value - best
        if gain > 0:
            x, best = cand, value
        if gain < tol:
            break
    return x, best


def start_box(scenario: Scenario) -> np.ndarray:
    return np.array([_START_BOX[label] for _, label in scenario.labels])


def random_start(scenario: Scenario, seed: int) -> np.ndarray:
    box = start_box(scenario)
    rng = np.random.default_rng(seed)
    return rng.uniform(box[:, 0], box[:, 1])


def _run_start(scenario, start, eta, p, config):
    objective = lambda x: chsh_objective(scenario, x, eta, p, config.cutoff)  # noqa: E731
    try:
        x, value = local_refine(objective, start, scenario.bounds(), config.tol, config.max_iter)
    except Exception as exc:  # a failed restart is recorded, not fatal
        return None, -math.inf, f"{type(exc).__name__}: {exc}"
    return x, value, None


def optimize_scenario(
    scenario: Scenario,
    eta: float = 1.0,
    p: float = 1.0,
    config: Optional[OptimizerConfig] = None,
    warm_starts: Sequence[np.ndarray] = (),
) -> OptimizationResult:
    """Maximize S over the scenario's parameters.

    Starts, in order: the projected all-zeros point, the known optimum (where
    one is tabulated), ``warm_starts``, then ``config.restarts`` random starts.
    The result depends only on the arguments, not on ``n_jobs``.
    """
    config = config or OptimizerConfig()
    _check_eta_p(eta, p)
    t0 = time.perf_counter()
    bounds = scenario.bounds()

    starts = [np.clip(np.zeros(scenario.n_params), bounds[:, 0], bounds[:, 1])]
    labels = ["zeros"]
    known = known_optimum(scenario)
    if known is not None:
        starts.append(known)
        labels.append("known")
    for i, w in enumerate(warm_starts):
        starts.append(np.asarray(w, dtype=float))
        labels.append(f"warm{i}")
    for i, s in enumerate(restart_seeds(config.seed, config.restarts)):
        starts.append(random_start(scenario, s))
        labels.append(f"random{i}")

    n_jobs = min(config.n_jobs or worker_count(), len(starts))
    if n_jobs > 1:
        runs = Parallel(n_jobs=n_jobs)(delayed(_run_start)(scenario, s, eta, p, config) for s in starts)
    else:
        runs = [_run_start(scenario, s, eta, p, config) for s in starts]

    per_restart = [float(v) for _, v, _ in runs]
    failures = [(i, msg) for i, (_, _, msg) in enumerate(runs) if msg is not None]
    for i, msg in failures:
        logger.warning("restart %s failed: %s", labels[i], msg)
    if len(failures) == len(runs):
        raise RuntimeError("every optimizer restart failed")
    best_i = int(np.argmax(per_restart))  # first maximum wins ties
    best_x = runs[best_i][0]
    best_s = per_restart[best_i]

    cutoff = converged_cutoff_for(scenario, best_x, eta, start=config.cutoff)
    if cutoff != config.cutoff:
        best_s = chsh_objective(scenario, best_x, eta, p, cutoff)
        per_restart[best_i] = best_s
    assert best_s <= TSIRELSON + 1e-6

    return OptimizationResult(
        scenario=scenario.name,
        variant=scenario.variant,
        eta=float(eta),
        p=float(p),
        best_S=float(best_s),
        best_params=best_x,
        per_restart_S=per_restart,
        start_labels=labels,
        seed=config.seed,
        cutoff=cutoff,
        wall_time=time.perf_counter() - t0,
        failures=failures,
    )
