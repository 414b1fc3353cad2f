import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from oracles import fock_homodyne_observable, quad_interval_integrals
from spqn.exceptions import ConvergenceError, InvalidIntervalError, InvalidParameterError
from spqn.fock import GaussianParams
from spqn.measurement import (
    HomodyneParams,
    LocalObservable,
    OnOffParams,
    gaussian_homodyne_remap,
    homodyne_interval_integrals,
    homodyne_matrix,
    homodyne_observable,
    homodyne_remap_coefficients,
    onoff_matrix,
    onoff_observable,
    squeezing_db,
    vacuum_overlap_oracle,
)

SIGN_MAG = math.sqrt(2 / math.pi)
phases = st.floats(-math.pi, math.pi)
amps = st.floats(-2, 2)
squeeze = st.floats(-1, 1)


def gauss_from(re, im, r, phi):
    return GaussianParams(complex(re, im), r, phi)


def test_interval_integrals_examples():
    assert homodyne_interval_integrals(-math.inf, math.inf) == pytest.approx((1, 0, 1), abs=1e-15)
    assert homodyne_interval_integrals(-1.3, 1.3)[1] == 0.0
    got = homodyne_interval_integrals(-math.inf, 0.0)
    assert got == pytest.approx((0.5, -1 / math.sqrt(2 * math.pi), 0.5), abs=1e-15)
    assert np.allclose(got, quad_interval_integrals(-np.inf, 0.0), atol=1e-10, rtol=0)


@pytest.mark.parametrize("z1,z2", [(0.0, 0.0), (1.0, -1.0), (math.nan, 1.0)])
def test_interval_rejects_bad(z1, z2):
    with pytest.raises(InvalidIntervalError):
        homodyne_interval_integrals(z1, z2)
    with pytest.raises(InvalidIntervalError):
        HomodyneParams(0.0, z1, z2)


@pytest.mark.parametrize("z1,z2", [(12.3, 12.9), (-20.0, -13.0), (12.0, 50.0)])
def test_interval_beyond_clamp_has_no_weight(z1, z2):
    assert homodyne_interval_integrals(z1, z2) == pytest.approx((0.0, 0.0, 0.0), abs=1e-30)
    m = homodyne_observable(HomodyneParams(0.7, z1, z2)).matrix
    assert np.allclose(m, -np.eye(2), atol=1e-15)


def test_remap_past_clamp_gives_minus_identity():
    # the displacement pushes both endpoints past +12
    g = GaussianParams(alpha=5.0, r=0.3, phi=0.0)
    remapped = gaussian_homodyne_remap(g, 0.0, 9.0, 11.0)
    assert remapped.z1 == remapped.z2 == 12.0
    ref = fock_homodyne_observable(g, 0.0, 9.0, 11.0)
    got = homodyne_observable(remapped).matrix
    assert np.max(np.abs(got - ref)) <= 1e-6
    assert np.allclose(got, -np.eye(2), atol=1e-6)


def test_interval_integrals_vs_quadrature(rng):
    for _ in range(200):
        z1, z2 = np.sort(rng.uniform(-12, 12, 2))
        got = homodyne_interval_integrals(z1, z2)
        assert np.max(np.abs(np.subtract(got, quad_interval_integrals(z1, z2)))) <= 1e-10
        assert all(abs(v) <= 1 for v in got)


def test_endpoint_clamp():
    p = HomodyneParams(0.3, -50.0, 1e9)
    assert (p.z1, p.z2) == (-12.0, 12.0)


def test_full_line_is_identity():
    for th in np.linspace(-3, 3, 7):
        assert np.allclose(homodyne_observable(HomodyneParams(th, -12, 12)).matrix, np.eye(2), atol=1e-15)


@given(phases)
def test_sign_binning(theta):
    m = homodyne_matrix(theta, -12.0, 0.0)
    assert abs(m[0, 0]) <= 1e-10 and abs(m[1, 1]) <= 1e-10
    assert abs(abs(m[0, 1]) - SIGN_MAG) <= 1e-10


def test_half_line_example():
    m = homodyne_matrix(0.0, 0.0, 12.0)
    assert abs(m[0, 0]) < 1e-15
    assert m[0, 1] == pytest.approx(SIGN_MAG, abs=1e-15)


def test_homodyne_phase_convention():
    # <n|x_theta> = exp(i n theta) psi_n  =>  M01 = 2 exp(-i theta) I01
    i01 = homodyne_interval_integrals(0.2, 1.7)[1]
    m = homodyne_matrix(0.9, 0.2, 1.7)
    assert m[0, 1] == pytest.approx(2 * i01 * np.exp(-0.9j), abs=1e-15)
    ref = fock_homodyne_observable(GaussianParams(), 0.9, 0.2, 1.7, dim=8)
    assert np.allclose(ref, m, atol=1e-12)


def test_local_observable_contract():
    obs = LocalObservable(np.diag([-1.0, 1.0]))
    assert not obs.matrix.flags.writeable
    assert np.allclose(obs.eigenvalues(), [-1, 1])
    with pytest.raises(ValueError):
        LocalObservable(np.array([[0, 1], [0, 0]]))
    with pytest.raises(ValueError):
        LocalObservable(np.eye(3))


def test_remap_identity_and_displacement():
    r = gaussian_homodyne_remap(GaussianParams(), 0.4, -1.0, 2.0)
    assert (r.theta, r.z1, r.z2) == pytest.approx((0.4, -1.0, 2.0), abs=1e-15)
    alpha, theta = 0.3 - 0.7j, 1.1
    c = homodyne_remap_coefficients(GaussianParams(alpha), theta)
    delta = (alpha * np.exp(-1j * theta) + alpha.conjugate() * np.exp(1j * theta)).real / math.sqrt(2)
    assert (c.phase, c.scale, c.shift) == pytest.approx((theta, 1.0, delta), abs=1e-14)


def test_remap_real_squeezing_scale():
    c = homodyne_remap_coefficients(GaussianParams(0j, 0.2, 0.0), 0.0)
    assert c.scale == pytest.approx(math.sqrt(math.cosh(0.4) - math.sinh(0.4)), abs=1e-14)
    assert c.scale == pytest.approx(math.exp(-0.2), abs=1e-14)
    ref = fock_homodyne_observable(GaussianParams(0j, 0.2, 0.0), 0.0, -0.5, 1.5, dim=64)
    got = homodyne_observable(gaussian_homodyne_remap(GaussianParams(0j, 0.2, 0.0), 0.0, -0.5, 1.5)).matrix
    assert np.max(np.abs(ref - got)) <= 1e-10


@given(squeeze, phases, phases)
def test_remap_matches_closed_form(r, phi, theta):
    # phase = theta - arctan(sinh r sin(phi - 2 theta) / (cosh r - sinh r cos(phi - 2 theta)))
    # scale = sqrt(cosh 2r - sinh 2r cos(phi - 2 theta))
    c = homodyne_remap_coefficients(GaussianParams(0j, r, phi), theta)
    u = phi - 2 * theta
    expected = theta - math.atan(math.sinh(r) * math.sin(u) / (math.cosh(r) - math.sinh(r) * math.cos(u)))
    assert abs(math.remainder(c.phase - expected, 2 * math.pi)) <= 1e-12
    assert c.scale == pytest.approx(math.sqrt(math.cosh(2 * r) - math.sinh(2 * r) * math.cos(u)), rel=1e-12)


def test_remap_phase_rejects_sine_denominator():
    # the variant with sin in the denominator disagrees with the oracle-backed phase
    r, phi, theta = 0.8, 0.3, -0.9
    u = phi - 2 * theta
    c = homodyne_remap_coefficients(GaussianParams(0j, r, phi), theta)
    wrong = theta - math.atan(math.sinh(r) * math.sin(u) / (math.cosh(r) - math.sinh(r) * math.sin(u)))
    assert abs(math.remainder(c.phase - wrong, 2 * math.pi)) > 1e-2
    g = GaussianParams(0j, r, phi)
    ref = fock_homodyne_observable(g, theta, -0.4, 0.9, dim=96)
    assert np.max(np.abs(homodyne_observable(gaussian_homodyne_remap(g, theta, -0.4, 0.9)).matrix - ref)) <= 1e-9


def test_remap_infinite_endpoints_stay_put():
    p = gaussian_homodyne_remap(GaussianParams(1 + 1j, 0.5, 0.2), 0.3, -12.0, 12.0)
    assert (p.z1, p.z2) == (-12.0, 12.0)


@given(amps, amps, squeeze, phases, phases, st.floats(-6, 6), st.floats(0.01, 12))
def test_remap_equivalence_property(re, im, r, phi, theta, c, w):
    g = gauss_from(re, im, r, phi)
    z1, z2 = max(c - w / 2, -12), min(c + w / 2, 12)
    ref = fock_homodyne_observable(g, theta, z1, z2, dim=128)
    got = homodyne_observable(gaussian_homodyne_remap(g, theta, z1, z2)).matrix
    assert np.max(np.abs(ref - got)) <= 1e-6


def test_onoff_trivial_cases():
    assert np.allclose(onoff_matrix(OnOffParams(), 40), np.diag([-1, 1]), atol=1e-15)
    for eta in (0.1, 0.5, 0.83):
        m = onoff_matrix(OnOffParams(eta=eta), 40)
        assert np.allclose(m, np.diag([-1, 2 * eta - 1]), atol=1e-14)


def test_onoff_pure_displacement():
    alpha = 0.5
    m = onoff_matrix(OnOffParams(GaussianParams(alpha)), 40)
    e = math.exp(-alpha ** 2)
    assert m[0, 0] == pytest.approx(1 - 2 * e, abs=1e-12)
    assert m[1, 1] == pytest.approx(1 - 2 * alpha ** 2 * e, abs=1e-12)
    assert abs(m[0, 1]) == pytest.approx(2 * alpha * e, abs=1e-12)


def test_onoff_invalid_eta():
    for eta in (0.0, -0.1, 1.1):
        with pytest.raises(InvalidParameterError):
            OnOffParams(eta=eta)


def test_vacuum_overlap_examples():
    assert vacuum_overlap_oracle(GaussianParams(), 0) == 1
    assert vacuum_overlap_oracle(GaussianParams(), 1) == 0
    a = 0.4 - 0.9j
    assert vacuum_overlap_oracle(GaussianParams(a), 0) == pytest.approx(math.exp(-abs(a) ** 2 / 2), abs=1e-15)
    assert vacuum_overlap_oracle(GaussianParams(0j, 0.7), 0) == pytest.approx(math.cosh(0.7) ** -0.5, abs=1e-15)
    with pytest.raises(ValueError):
        vacuum_overlap_oracle(GaussianParams(), 2)


@given(amps, amps, squeeze, phases)
def test_eta_one_matches_overlap_oracle(re, im, r, phi):
    g = gauss_from(re, im, r, phi)
    v = np.array([vacuum_overlap_oracle(g, 0), vacuum_overlap_oracle(g, 1)])
    expected = np.eye(2) - 2 * np.outer(v.conj(), v)
    assert np.max(np.abs(onoff_observable(OnOffParams(g, 1.0)).matrix - expected)) <= 1e-8


@given(amps, amps, squeeze, phases, st.floats(0.05, 1.0))
def test_spectral_matches_dense(re, im, r, phi, eta):
    params = OnOffParams(gauss_from(re, im, r, phi), eta)
    dense = onoff_matrix(params, 64, method="expm")
    fast = onoff_matrix(params, 64, method="spectral")
    assert np.max(np.abs(dense - fast)) <= 1e-12


@given(amps, amps, squeeze, phases, st.floats(0.01, 1.0))
def test_observable_spectrum(re, im, r, phi, eta):
    obs = onoff_observable(OnOffParams(gauss_from(re, im, r, phi), eta))
    m = obs.matrix
    assert np.max(np.abs(m - m.conj().T)) <= 1e-12
    ev = obs.eigenvalues()
    assert ev.min() >= -1 - 1e-9 and ev.max() <= 1 + 1e-9


def test_onoff_cutoff_autodoubling():
    params = OnOffParams(GaussianParams(2 + 2j, 1.0, 0.3), 0.5)
    auto = onoff_matrix(params)
    assert np.max(np.abs(auto - onoff_matrix(params, 512))) <= 1e-8


def test_onoff_convergence_error(monkeypatch):
    import spqn.measurement as meas

    monkeypatch.setattr(meas, "MAX_CUTOFF", 40)
    with pytest.raises(ConvergenceError):
        meas.onoff_matrix(OnOffParams(GaussianParams(2 + 2j, 1.0, 0.3), 0.5))


def test_squeezing_db():
    assert squeezing_db(0.0) == 0.0
    assert squeezing_db(-0.243) == squeezing_db(0.243)
    assert squeezing_db(0.243) == pytest.approx(10 * math.log10(math.exp(0.486)), abs=1e-12)
