"""Truncated Fock-space operators.

Everything here works on the photon-number basis ``|0>, ..., |dim-1>`` and
returns plain complex :class:`numpy.ndarray` matrices indexed ``[m, n]`` by
photon number. Conventions:

* ``D(alpha) = exp(alpha a^dag - conj(alpha) a)``
* ``S(xi) = exp((conj(xi) a^2 - xi a^dag^2) / 2)`` with ``xi = r exp(i phi)``
  and ``r`` allowed to be negative
* quadrature ``x_theta = (a exp(-i theta) + a^dag exp(i theta)) / sqrt(2)``,
  vacuum variance 1/2
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Any, Callable

import numpy as np
import scipy.linalg

from .exceptions import ConvergenceError, InvalidDimensionError, NumericInputError

DEFAULT_CUTOFF = 40
MAX_CUTOFF = 1024
CUTOFF_TOL = 1e-8


@dataclass(frozen=True)
class GaussianParams:
    """Displacement amplitude and squeezing ``xi = r * exp(1j * phi)``."""

    alpha: complex = 0j
    r: float = 0.0
    phi: float = 0.0

    @property
    def xi(self) -> complex:
        return self.r * complex(math.cos(self.phi), math.sin(self.phi))

    def is_identity(self) -> bool:
        return self.alpha == 0 and self.r == 0


def _check_dim(dim: int) -> int:
    if int(dim) != dim or dim < 2:
        raise InvalidDimensionError(f"Fock cutoff must be an integer >= 2, got {dim!r}")
    return int(dim)


def annihilation_matrix(dim: int) -> np.ndarray:
    dim = _check_dim(dim)
    return np.diag(np.sqrt(np.arange(1, dim, dtype=float)), 1).astype(complex)


def matrix_exponential(op: np.ndarray) -> np.ndarray:
    """Matrix exponential by Pade scaling-and-squaring (``scipy.linalg.expm``)."""
    op = np.asarray(op, dtype=complex)
    if op.ndim != 2 or op.shape[0] != op.shape[1]:
        raise InvalidDimensionError(f"expected a square matrix, got shape {op.shape}")
    if not np.all(np.isfinite(op)):
        raise NumericInputError("matrix exponential of a non-finite matrix")
    return scipy.linalg.expm(op)


def displacement_matrix(alpha: complex, dim: int) -> np.ndarray:
    a = annihilation_matrix(dim)
    alpha = complex(alpha)
    return matrix_exponential(alpha * a.conj().T - alpha.conjugate() * a)


def squeezing_matrix(xi: complex, dim: int) -> np.ndarray:
    a = annihilation_matrix(dim)
    xi = complex(xi)
    a2 = a @ a
    return matrix_exponential((xi.conjugate() * a2 - xi * a2.conj().T) / 2)


def gaussian_unitary(gauss: GaussianParams, dim: int) -> np.ndarray:
    """``D(-alpha) S(xi)``: squeeze first, then displace."""
    return displacement_matrix(-gauss.alpha, dim) @ squeezing_matrix(gauss.xi, dim)


def cutoff_converged(
    build: Callable[[Any, int], np.ndarray], params: Any, dim: int, tol: float = CUTOFF_TOL
) -> bool:
    """True if the top-left 2x2 block of ``build(params, dim)`` is stable under doubling ``dim``."""
    if tol <= 0:
        raise ValueError("tol must be positive")
    small = np.asarray(build(params, dim))[:2, :2]
    large = np.asarray(build(params, 2 * dim))[:2, :2]
    return bool(np.max(np.abs(small - large)) <= tol)


def converged_cutoff(
    build: Callable[[Any, int], np.ndarray],
    params: Any,
    start: int = DEFAULT_CUTOFF,
    tol: float = CUTOFF_TOL,
    max_dim: int = MAX_CUTOFF,
) -> int:
    """Smallest ``start * 2**k`` cutoff passing :func:`cutoff_converged`."""
    dim = _check_dim(start)
    while dim < max_dim:
        if cutoff_converged(build, params, dim, tol):
            return dim
        dim *= 2
    raise ConvergenceError(f"no convergence to {tol:g} below cutoff {max_dim}")


def hermite_wavefunction(n: int, x):
    """Normalized quadrature wavefunction ``psi_n(x)`` (vectorized over ``x``).

    Uses the three-term recurrence
    ``psi_{k+1} = sqrt(2/(k+1)) x psi_k - sqrt(k/(k+1)) psi_{k-1}``,
    which stays finite where the bare Hermite polynomials overflow.
    """
    if n < 0:
        raise ValueError("n must be nonnegative")
    x = np.asarray(x, dtype=float)
    prev = np.zeros_like(x)
    cur = np.pi ** -0.25 * np.exp(-x * x / 2)
    for k in range(n):
        prev, cur = cur, math.sqrt(2 / (k + 1)) * x * cur - math.sqrt(k / (k + 1)) * prev
    return cur if cur.ndim else float(cur)
