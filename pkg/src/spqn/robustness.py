"""Maximized CHSH value over detector efficiency ``eta`` and source efficiency ``p``.

:func:`sweep` fills a rectangular grid, warm-starting every point from an
already solved neighbour. :func:`find_threshold` locates the efficiency at
which the maximized value drops to the classical bound 2, with the other
imperfection switched off.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field, replace
from typing import Optional, Sequence

import numpy as np

from .exceptions import InvalidParameterError, NoViolationError
from .optimizer import OptimizationResult, OptimizerConfig, optimize_scenario
from .scenario import Scenario

logger = logging.getLogger(__name__)

LOCAL_BOUND = 2.0
# S must clear the local bound by this much to count as a violation, so that
# rounding at exactly S = 2 (e.g. all-homodyne settings) is not a violation.
VIOLATION_MARGIN = 1e-6
AXES = ("eta", "p")


def violates(s: float) -> bool:
    return s > LOCAL_BOUND + VIOLATION_MARGIN


@dataclass
class SweepGrid:
    scenario: str
    variant: str
    eta_axis: list[float]
    p_axis: list[float]
    values: np.ndarray  # values[i, j] at (eta_axis[i], p_axis[j])
    params: list[list[np.ndarray]]
    lineage: list[list[Optional[tuple[int, int]]]]  # grid point each entry was warm-started from
    config: OptimizerConfig

    def rows(self):
        """Yield ``(eta, p, S, params)`` in eta-major order."""
        for i, eta in enumerate(self.eta_axis):
            for j, p in enumerate(self.p_axis):
                yield eta, p, float(self.values[i, j]), self.params[i][j]

    def violating(self) -> np.ndarray:
        return self.values > LOCAL_BOUND + VIOLATION_MARGIN

    def contour_points(self, level: float = LOCAL_BOUND) -> list[tuple[float, float]]:
        """Linear-interpolated crossings of ``level`` along grid rows and columns."""
        pts = []
        v = self.values
        for i, eta in enumerate(self.eta_axis):
            for j in range(len(self.p_axis) - 1):
                a, b = v[i, j] - level, v[i, j + 1] - level
                if a * b < 0:
                    t = a / (a - b)
                    pts.append((eta, self.p_axis[j] + t * (self.p_axis[j + 1] - self.p_axis[j])))
        for j, p in enumerate(self.p_axis):
            for i in range(len(self.eta_axis) - 1):
                a, b = v[i, j] - level, v[i + 1, j] - level
                if a * b < 0:
                    t = a / (a - b)
                    pts.append((self.eta_axis[i] + t * (self.eta_axis[i + 1] - self.eta_axis[i]), p))
        return sorted(pts)


@dataclass
class Threshold:
    scenario: str
    variant: str
    axis: str
    value: float
    bracket: tuple[float, float]
    fixed: float = 1.0
    evidence: list[tuple[float, float]] = field(default_factory=list)  # (axis value, best S)

    def as_dict(self) -> dict:
        return {
            "scenario": self.scenario,
            "variant": self.variant,
            "axis": self.axis,
            "threshold": self.value,
            "bracket": list(self.bracket),
            "fixed_other_axis": self.fixed,
            "evidence": [{self.axis: a, "S": s} for a, s in self.evidence],
        }


def _check_axis(values: Sequence[float], name: str) -> list[float]:
    out = [float(v) for v in values]
    if not out:
        raise InvalidParameterError(f"{name} axis is empty")
    if any(not math.isfinite(v) for v in out) or any(b <= a for a, b in zip(out, out[1:])):
        raise InvalidParameterError(f"{name} axis must be strictly increasing")
    if out[0] <= 0.0 or out[-1] > 1.0:
        raise InvalidParameterError(f"{name} axis must lie in (0, 1]")
    return out


def sweep(
    scenario: Scenario,
    eta_axis: Sequence[float],
    p_axis: Sequence[float],
    config: Optional[OptimizerConfig] = None,
    fresh_restarts: int = 50,
) -> SweepGrid:
    """Maximize S on every point of the ``eta_axis`` x ``p_axis`` grid.

    The grid is traversed from the most efficient corner downwards. The first
    point gets ``config.restarts`` random starts; every later point is
    warm-started from its solved neighbours (towards higher efficiency) plus
    ``fresh_restarts`` random starts.
    """
    config = config or OptimizerConfig()
    etas = _check_axis(eta_axis, "eta")
    ps = _check_axis(p_axis, "p")
    ne, np_ = len(etas), len(ps)
    values = np.full((ne, np_), np.nan)
    params: list[list] = [[None] * np_ for _ in range(ne)]
    lineage: list[list] = [[None] * np_ for _ in range(ne)]
    fresh = replace(config, restarts=fresh_restarts)

    for i in range(ne - 1, -1, -1):
        for j in range(np_ - 1, -1, -1):
            neighbours = [(i + 1, j), (i, j + 1)]
            warm = [(a, b) for a, b in neighbours if a < ne and b < np_]
            if not warm:
                res = optimize_scenario(scenario, etas[i], ps[j], config)
            else:
                res = optimize_scenario(scenario, etas[i], ps[j], fresh, [params[a][b] for a, b in warm])
            values[i, j] = res.best_S
            params[i][j] = res.best_params
            label = res.start_labels[res.best_index]
            lineage[i][j] = warm[int(label[4:])] if label.startswith("warm") else None
            logger.info("sweep eta=%.4f p=%.4f S=%.6f", etas[i], ps[j], res.best_S)
    return SweepGrid(scenario.name, scenario.variant, etas, ps, values, params, lineage, config)


def _optimize_at(scenario, axis, value, config, warm):
    eta, p = (value, 1.0) if axis == "eta" else (1.0, value)
    return optimize_scenario(scenario, eta, p, config, warm)


def find_threshold(
    scenario: Scenario,
    axis: str,
    config: Optional[OptimizerConfig] = None,
    fresh_restarts: int = 20,
    step: float = 0.05,
    width: float = 0.005,
    ideal: Optional[OptimizationResult] = None,
) -> Threshold:
    """Smallest ``axis`` value (other axis fixed at 1) where max S exceeds 2.

    Steps down from 1 by ``step`` until the maximized S no longer exceeds 2,
    then bisects the bracket to ``width``. Every point is warm-started from
    the best parameters on both sides of the bracket and also gets
    ``fresh_restarts`` random starts. ``ideal`` may carry an already computed
    optimum at (1, 1).
    """
    if axis not in AXES:
        raise InvalidParameterError(f"axis must be one of {AXES}, got {axis!r}")
    if not 0 < step < 1 or not 0 < width < step:
        raise InvalidParameterError("need 0 < width < step < 1")
    config = config or OptimizerConfig()
    fresh = replace(config, restarts=fresh_restarts)

    if ideal is None:
        ideal = optimize_scenario(scenario, 1.0, 1.0, config)
    if not violates(ideal.best_S):
        raise NoViolationError(
            f"{scenario.name} {scenario.variant}: max S = {ideal.best_S:.6f} does not exceed 2 at eta = p = 1"
        )
    evidence = [(1.0, ideal.best_S)]
    hi, hi_x = 1.0, ideal.best_params
    lo, lo_x = None, None
    k = 1
    while lo is None:
        value = round(1.0 - k * step, 12)
        if value <= 0:
            lo, lo_x = 0.0, None
            break
        res = _optimize_at(scenario, axis, value, fresh, [hi_x])
        evidence.append((value, res.best_S))
        if violates(res.best_S):
            hi, hi_x = value, res.best_params
        else:
            lo, lo_x = value, res.best_params
        k += 1

    while hi - lo > width:
        mid = 0.5 * (lo + hi)
        warm = [hi_x] if lo_x is None else [hi_x, lo_x]
        res = _optimize_at(scenario, axis, mid, fresh, warm)
        evidence.append((mid, res.best_S))
        if violates(res.best_S):
            hi, hi_x = mid, res.best_params
        else:
            lo, lo_x = mid, res.best_params
    evidence.sort()
    return Threshold(scenario.name, scenario.variant, axis, 0.5 * (lo + hi), (lo, hi), 1.0, evidence)
