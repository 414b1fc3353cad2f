"""Fast on-off detector observables for the optimizer's inner loop.

``D(x)`` and ``S(r)`` for real ``x, r`` are exponentials of fixed real
antisymmetric generators, so one Hermitian eigendecomposition per cutoff
turns every later exponential into a diagonal phase. Complex phases of
``alpha`` and ``xi`` are moved onto the number basis by rotations
``exp(i t n)``. Only the two columns ``U|0>, U|1>`` are ever formed.

The result equals ``onoff_observable`` built from dense ``expm`` matrices to
rounding (~1e-13); the test-suite checks this.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np
from numba import njit

from .fock import annihilation_matrix


@lru_cache(maxsize=16)
def spectral_basis(dim: int):
    """Eigen-decompositions of ``i(a^dag - a)`` and, per parity, of ``i(a^2 - a^dag^2)/2``."""
    a = annihilation_matrix(dim).real
    gen_d = a.T - a
    gen_s = (a @ a - a.T @ a.T) / 2
    w_d, v_d = np.linalg.eigh(1j * gen_d)
    even = np.arange(0, dim, 2)
    odd = np.arange(1, dim, 2)
    w_se, v_se = np.linalg.eigh(1j * gen_s[np.ix_(even, even)])
    w_so, v_so = np.linalg.eigh(1j * gen_s[np.ix_(odd, odd)])
    c = np.ascontiguousarray
    return (
        c(w_d), c(v_d), c(v_d.conj().T),
        c(w_se), c(v_se[0].conj()),
        c(w_so), c(v_so[0].conj()),
        c(v_se), c(v_so),
    )


@njit(cache=True)
def _onoff_kernel(alpha, r, phi, eta, w_d, v_d, v_dh, w_se, v_se0, w_so, v_so0, v_se, v_so, out):
    n = w_d.shape[0]
    q = np.empty(n)
    q[0] = 1.0
    rows = 1
    if eta < 1.0:
        for j in range(1, n):
            q[j] = q[j - 1] * (1.0 - eta)
            if q[j] < 1e-20:
                break
            rows += 1

    b = -alpha
    x = abs(b)
    chi = np.angle(b)
    # rotation phases exp(-i chi k) and exp(i phi k / 2) by recurrence
    rot = np.empty(n, np.complex128)
    sq = np.empty(n, np.complex128)
    z_rot = np.exp(-1j * chi)
    z_sq = np.exp(0.5j * phi)
    rot[0] = 1.0
    sq[0] = 1.0
    for k in range(1, n):
        rot[k] = rot[k - 1] * z_rot
        sq[k] = sq[k - 1] * z_sq
    e_d = np.empty(n, np.complex128)
    if x != 0.0:
        for l in range(n):
            e_d[l] = np.exp(-1j * x * w_d[l])

    cols = np.zeros((n, 2), np.complex128)
    tmp = np.empty(n, np.complex128)
    for c in range(2):
        # S(xi)|c> = exp(i phi k/2) S(r)|c> exp(-i phi c/2); S(r) keeps parity
        if r == 0.0:
            cols[c, c] = 1.0
        else:
            if c == 0:
                w_s, v_s, v_s0 = w_se, v_se, v_se0
            else:
                w_s, v_s, v_s0 = w_so, v_so, v_so0
            m = w_s.shape[0]
            for l in range(m):
                tmp[l] = np.exp(-1j * r * w_s[l]) * v_s0[l]
            for i in range(m):
                acc = 0j
                for l in range(m):
                    acc += v_s[i, l] * tmp[l]
                k = 2 * i + c
                cols[k, c] = acc * sq[k] * np.conj(sq[c])
        if x == 0.0:
            continue
        # D(x e^{i chi}) = R D(x) R^dag with R = exp(i chi n)
        for l in range(n):
            acc = 0j
            for k in range(n):
                acc += v_dh[l, k] * (rot[k] * cols[k, c])
            tmp[l] = acc * e_d[l]
        for k in range(rows):
            acc = 0j
            for l in range(n):
                acc += v_d[k, l] * tmp[l]
            cols[k, c] = acc * np.conj(rot[k])

    p00 = 0.0
    p11 = 0.0
    p01 = 0j
    for k in range(rows):
        u0 = cols[k, 0]
        u1 = cols[k, 1]
        p00 += q[k] * (u0.real * u0.real + u0.imag * u0.imag)
        p11 += q[k] * (u1.real * u1.real + u1.imag * u1.imag)
        p01 += q[k] * np.conj(u0) * u1
    out[0, 0] = 1.0 - 2.0 * p00
    out[1, 1] = 1.0 - 2.0 * p11
    out[0, 1] = -2.0 * p01
    out[1, 0] = -2.0 * np.conj(p01)


def onoff_block(alpha: complex, r: float, phi: float, eta: float, dim: int) -> np.ndarray:
    """2x2 matrix ``I - 2 <m|U^dag (1-eta)^n U|n>`` with ``U = D(-alpha) S(r e^{i phi})``."""
    out = np.empty((2, 2), np.complex128)
    _onoff_kernel(complex(alpha), float(r), float(phi), float(eta), *spectral_basis(dim), out)
    return out
