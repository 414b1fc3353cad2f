"""Dichotomic (+1/-1) local observables on the {|0>, |1>} manifold.

Two detector families:

* on-off detection after a Gaussian unitary ``U = D(-alpha) S(xi)``, with
  finite efficiency ``eta`` (no-click element ``sum_n (1-eta)^n |n><n|``);
  click is +1.
* homodyne detection of ``x_theta`` binned to +1 on ``[z1, z2]``, -1 elsewhere.

Homodyne eigenstates follow ``<n|x_theta> = exp(i n theta) psi_n(x)``, which
is what the quadrature ``(a e^{-i theta} + a^dag e^{i theta}) / sqrt(2)``
implies. A Gaussian unitary in front of a homodyne detector is equivalent to a
plain homodyne measurement at another phase and interval; see
:func:`gaussian_homodyne_remap`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Union

import numpy as np

from . import _spectral
from .exceptions import ConvergenceError, InvalidIntervalError, InvalidParameterError
from .fock import CUTOFF_TOL, DEFAULT_CUTOFF, MAX_CUTOFF, GaussianParams, gaussian_unitary

Z_MAX = 12.0
_SQRT2 = math.sqrt(2.0)
_INV_SQRT_2PI = 1.0 / math.sqrt(2.0 * math.pi)
_INV_SQRT_PI = 1.0 / math.sqrt(math.pi)


def clamp_endpoint(z: float) -> float:
    return min(max(float(z), -Z_MAX), Z_MAX)


@dataclass(frozen=True)
class HomodyneParams:
    theta: float
    z1: float
    z2: float

    def __post_init__(self):
        _check_interval(self.z1, self.z2)
        object.__setattr__(self, "z1", clamp_endpoint(self.z1))
        object.__setattr__(self, "z2", clamp_endpoint(self.z2))


@dataclass(frozen=True)
class OnOffParams:
    gauss: GaussianParams = field(default_factory=GaussianParams)
    eta: float = 1.0

    def __post_init__(self):
        if not 0.0 < self.eta <= 1.0:
            raise InvalidParameterError(f"detection efficiency must lie in (0, 1], got {self.eta}")


@dataclass(frozen=True)
class HomodyneRemap:
    """``U^dag x_theta U = scale * x_phase - shift`` for ``U = D(-alpha) S(xi)``."""

    shift: float
    scale: float
    phase: float


@dataclass(frozen=True)
class LocalObservable:
    matrix: np.ndarray
    provenance: Union[HomodyneParams, OnOffParams, None] = None

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=complex)
        if m.shape != (2, 2):
            raise ValueError(f"observable must be 2x2, got {m.shape}")
        if np.max(np.abs(m - m.conj().T)) > 1e-12:
            raise ValueError("observable is not Hermitian")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    def eigenvalues(self) -> np.ndarray:
        return np.linalg.eigvalsh(self.matrix)


def _check_interval(z1: float, z2: float) -> None:
    if math.isnan(z1) or math.isnan(z2) or not z1 < z2:
        raise InvalidIntervalError(f"need z1 < z2, got ({z1}, {z2})")


def _clamped_integrals(z1: float, z2: float) -> tuple[float, float, float]:
    # An interval lying wholly beyond one clamp collapses to z1 == z2 and
    # correctly gets zero weight.
    z1 = clamp_endpoint(z1)
    z2 = clamp_endpoint(z2)
    g1 = math.exp(-z1 * z1)
    g2 = math.exp(-z2 * z2)
    i00 = 0.5 * (math.erf(z2) - math.erf(z1))
    i01 = _INV_SQRT_2PI * (g1 - g2)
    i11 = i00 - _INV_SQRT_PI * (z2 * g2 - z1 * g1)
    return i00, i01, i11


def homodyne_interval_integrals(z1: float, z2: float) -> tuple[float, float, float]:
    """Overlaps ``I_mn = int_{z1}^{z2} psi_m psi_n dx`` for ``m, n`` in {0, 1}."""
    _check_interval(z1, z2)
    return _clamped_integrals(z1, z2)


def _homodyne_matrix(theta: float, z1: float, z2: float) -> np.ndarray:
    i00, i01, i11 = _clamped_integrals(z1, z2)
    m01 = 2.0 * i01 * complex(math.cos(theta), -math.sin(theta))
    return np.array([[2.0 * i00 - 1.0, m01], [m01.conjugate(), 2.0 * i11 - 1.0]])


def homodyne_matrix(theta: float, z1: float, z2: float) -> np.ndarray:
    """Raw 2x2 matrix of ``2 int_{z1}^{z2} |x_theta><x_theta| dx - I``."""
    _check_interval(z1, z2)
    return _homodyne_matrix(theta, z1, z2)


def homodyne_observable(params: HomodyneParams) -> LocalObservable:
    # params were validated before their endpoints were clamped
    return LocalObservable(_homodyne_matrix(params.theta, params.z1, params.z2), params)


def homodyne_remap_coefficients(gauss: GaussianParams, theta: float) -> HomodyneRemap:
    # U^dag a U = a cosh r - a^dag e^{i phi} sinh r - alpha
    ch, sh = math.cosh(gauss.r), math.sinh(gauss.r)
    w = ch * complex(math.cos(theta), -math.sin(theta)) - sh * complex(
        math.cos(theta - gauss.phi), math.sin(theta - gauss.phi)
    )
    alpha = complex(gauss.alpha)
    shift = _SQRT2 * (alpha * complex(math.cos(theta), -math.sin(theta))).real
    scale = abs(w)
    assert scale > 0.0, "squeezing scale must be positive"
    return HomodyneRemap(shift=shift, scale=scale, phase=-math.atan2(w.imag, w.real))


def gaussian_homodyne_remap(gauss: GaussianParams, theta: float, z1: float, z2: float) -> HomodyneParams:
    """Plain homodyne settings equivalent to ``U^dag X_theta[z1, z2] U``.

    Endpoints at or beyond ``+-Z_MAX`` stand for infinity and stay there.
    """
    _check_interval(z1, z2)
    remap = homodyne_remap_coefficients(gauss, theta)

    def move(z):
        if abs(z) >= Z_MAX:
            return math.copysign(Z_MAX, z)
        return (z + remap.shift) / remap.scale

    lo, hi = move(z1), move(z2)
    phase = math.remainder(remap.phase, 2 * math.pi)
    if not lo < hi:
        # both endpoints pushed past the clamp: interval carries no weight
        hi = math.nextafter(lo, math.inf)
    return HomodyneParams(phase, lo, hi)


def _onoff_dense(params: OnOffParams, dim: int) -> np.ndarray:
    u = gaussian_unitary(params.gauss, dim)[:, :2]
    weights = (1.0 - params.eta) ** np.arange(dim)
    return np.eye(2) - 2.0 * u.conj().T @ (weights[:, None] * u)


def _onoff_spectral(params: OnOffParams, dim: int) -> np.ndarray:
    g = params.gauss
    return _spectral.onoff_block(g.alpha, g.r, g.phi, params.eta, dim)


def onoff_matrix(
    params: OnOffParams,
    dim: Optional[int] = None,
    tol: float = CUTOFF_TOL,
    method: str = "spectral",
) -> np.ndarray:
    """Raw 2x2 on-off matrix; with ``dim=None`` the cutoff is doubled from 40 until stable."""
    build = {"spectral": _onoff_spectral, "expm": _onoff_dense}[method]
    if dim is not None:
        return build(params, dim)
    dim = DEFAULT_CUTOFF
    current = build(params, dim)
    while dim < MAX_CUTOFF:
        doubled = build(params, 2 * dim)
        if np.max(np.abs(doubled - current)) <= tol:
            return current
        dim, current = 2 * dim, doubled
    raise ConvergenceError(f"on-off observable not converged to {tol:g} below cutoff {MAX_CUTOFF}")


def onoff_observable(params: OnOffParams, dim: Optional[int] = None, method: str = "spectral") -> LocalObservable:
    return LocalObservable(onoff_matrix(params, dim, method=method), params)


def vacuum_overlap_oracle(gauss: GaussianParams, n: int) -> complex:
    """Closed form of ``<0|D(-alpha) S(xi)|n>`` for ``n`` in {0, 1}.

    ``<0|D(-alpha) = <alpha|`` and the squeezed-vacuum generating function give
    ``<alpha|S|0> = exp(-|alpha|^2/2 - e^{i phi} tanh(r) conj(alpha)^2 / 2) / sqrt(cosh r)``
    and ``<alpha|S|1> = conj(alpha) <alpha|S|0> / cosh r``.
    """
    if n not in (0, 1):
        raise ValueError("closed form only for n in {0, 1}")
    alpha = complex(gauss.alpha)
    ac = alpha.conjugate()
    ch = math.cosh(gauss.r)
    t = math.tanh(gauss.r) * complex(math.cos(gauss.phi), math.sin(gauss.phi))
    v0 = np.exp(-abs(alpha) ** 2 / 2 - t * ac * ac / 2) / math.sqrt(ch)
    return complex(v0 if n == 0 else ac * v0 / ch)


def squeezing_db(r: float) -> float:
    return 20.0 * abs(r) / math.log(10.0)
