"""scikit-learn style front end to the CHSH optimizer.

``fit`` maximizes S for one scenario at fixed efficiencies; ``predict``
then evaluates the fitted measurement settings at other ``(eta, p)`` pairs.
There is no training data, so ``X`` and ``y`` are accepted and ignored by
``fit`` to keep pipeline tooling happy.
"""

from __future__ import annotations

from typing import Optional

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from .optimizer import OptimizerConfig, optimize_scenario
from .scenario import get_scenario, scenario_evaluate, unpack_params
from .validation import (
    check_efficiency,
    check_efficiency_pairs,
    check_positive_int,
    check_scenario_name,
    check_variant,
)


class ChshMaximizer(BaseEstimator):
    """Maximize the CHSH value of a measurement scenario.

    Parameters
    ----------
    scenario : str
        Catalog name, one of ``4h, 3h, 2h-i, 2h-ii, 1h, 0h``.
    variant : str
        ``do``, ``sdo`` or ``squeeze-only``.
    eta, p : float
        Detection and source efficiency used while fitting.
    restarts, seed, cutoff, n_jobs
        Passed to :class:`~spqn.optimizer.OptimizerConfig`.

    Attributes
    ----------
    result_ : OptimizationResult
    best_S_ : float
    best_params_ : ndarray
    structured_params_ : dict
    """

    def __init__(
        self,
        scenario: str = "0h",
        variant: str = "sdo",
        eta: float = 1.0,
        p: float = 1.0,
        restarts: int = 200,
        seed: int = 0,
        cutoff: int = 40,
        n_jobs: Optional[int] = None,
    ):
        self.scenario = scenario
        self.variant = variant
        self.eta = eta
        self.p = p
        self.restarts = restarts
        self.seed = seed
        self.cutoff = cutoff
        self.n_jobs = n_jobs

    def _scenario(self):
        return get_scenario(check_scenario_name(self.scenario), check_variant(self.variant))

    def fit(self, X=None, y=None):
        sc = self._scenario()
        eta = check_efficiency(self.eta, "eta")
        p = check_efficiency(self.p, "p", allow_zero=True)
        config = OptimizerConfig(
            restarts=check_positive_int(self.restarts, "restarts", minimum=0),
            seed=int(self.seed),
            cutoff=check_positive_int(self.cutoff, "cutoff", minimum=2),
            n_jobs=self.n_jobs,
        )
        self.result_ = optimize_scenario(sc, eta, p, config)
        self.best_S_ = self.result_.best_S
        self.best_params_ = self.result_.best_params
        self.structured_params_ = unpack_params(sc, self.best_params_)
        self.n_features_in_ = 2
        return self

    def predict(self, X) -> np.ndarray:
        """S at the fitted settings for each ``(eta, p)`` row of ``X``."""
        check_is_fitted(self, "best_params_")
        X = check_efficiency_pairs(X)
        sc = self._scenario()
        return np.array([scenario_evaluate(sc, self.best_params_, eta, p) for eta, p in X])

    def score(self, X=None, y=None) -> float:
        """The fitted maximum (higher is better)."""
        check_is_fitted(self, "best_S_")
        return float(self.best_S_)
