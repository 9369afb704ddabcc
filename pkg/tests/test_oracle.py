import math

import numpy as np
import pytest

from capa_secrecy import oracle, secrecy
from capa_secrecy.channel import LinkStatistics
from capa_secrecy.errors import InfeasibleTargetError
from capa_secrecy.geometry import ApertureSpec, QuadratureRule, make_grid
from capa_secrecy.scenario import DEFAULT_SCENARIO

S0 = DEFAULT_SCENARIO
RADIO = S0.radio


@pytest.fixture(scope="module")
def field():
    grid = make_grid(S0.aperture, QuadratureRule.MIDPOINT, 12, 12)
    return oracle.discretize(S0.channel, S0.bob, S0.eve, S0.aperture, grid)


@pytest.fixture(scope="module")
def discrete_link(field):
    return LinkStatistics(field.gain_b, field.gain_e, field.correlation)


def span_current(field, bf):
    return bf.a * np.conj(field.h_b) + bf.b * np.conj(field.h_e)


def test_dense_and_factored_pencil_agree(field):
    pencil = oracle.OperatorPencil.from_field(field, RADIO.gamma_bar_b, RADIO.gamma_bar_e)
    Ab, Ae = pencil.dense()
    u = np.random.default_rng(0).standard_normal(field.N) + 1j
    ab, ae = pencil.apply(u)
    assert np.allclose(Ab @ u, ab) and np.allclose(Ae @ u, ae)
    assert np.allclose(Ab, Ab.conj().T)


def test_rank_one_pencil_eigenvalue(field):
    # with Eve switched off the top eigenvalue is 1 + gamma_b g_b exactly
    class NoEve:
        gamma_bar_b = RADIO.gamma_bar_b
        gamma_bar_e = 0.0

    res = oracle.oracle_msr(field, NoEve)
    assert res.eigenvalue == pytest.approx(1 + RADIO.gamma_bar_b * field.gain_b, rel=1e-10)
    mrt = np.conj(field.h_b) / np.linalg.norm(field.h_b)
    assert abs(np.vdot(mrt, res.eigvec)) == pytest.approx(1.0, abs=1e-10)


def test_oracle_matches_closed_form_on_same_samples(field, discrete_link):
    # identical discrete problem, so the two routes must agree to round-off
    res = oracle.oracle_msr(field, RADIO)
    assert res.value == pytest.approx(secrecy.msr(discrete_link, RADIO).value, rel=1e-9)
    pencil = oracle.OperatorPencil.from_field(field, RADIO.gamma_bar_b, RADIO.gamma_bar_e)
    assert oracle.rayleigh_quotient(pencil, res.eigvec) == pytest.approx(res.eigenvalue, rel=1e-10)


def test_eigvec_lies_in_span(field, discrete_link):
    res = oracle.oracle_msr(field, RADIO)
    basis, _ = np.linalg.qr(np.stack([np.conj(field.h_b), np.conj(field.h_e)], axis=1))
    resid = res.eigvec - basis @ (basis.conj().T @ res.eigvec)
    assert np.linalg.norm(resid) < 1e-8
    j = span_current(field, secrecy.msr(discrete_link, RADIO).beamformer)
    assert abs(np.vdot(j, res.eigvec)) / np.linalg.norm(j) > 0.999


def test_rayleigh_quotient_scale_invariant(field):
    pencil = oracle.OperatorPencil.from_field(field, RADIO.gamma_bar_b, RADIO.gamma_bar_e)
    u = np.random.default_rng(1).standard_normal(field.N) * (1 + 0.5j)
    assert oracle.rayleigh_quotient(pencil, 7.3e4j * u) == pytest.approx(oracle.rayleigh_quotient(pencil, u), rel=1e-12)


@pytest.mark.parametrize("R0", [0.5, 2.0, 6.0])
def test_oracle_mrp_matches_closed_form_on_same_samples(field, discrete_link, R0):
    res = oracle.oracle_mrp(field, RADIO, R0)
    sol = secrecy.mrp(discrete_link, RADIO, R0)
    assert res.value == pytest.approx(sol.value, rel=1e-9)
    j = span_current(field, sol.beamformer)
    assert abs(np.vdot(j, res.eigvec)) / np.linalg.norm(j) > 0.999


def test_mrp_operator_is_rank_two(field):
    D = oracle.mrp_operator(field, RADIO.snr_scale_b, RADIO.snr_scale_e, 2.0)
    s = np.linalg.svd(D, compute_uv=False)
    assert s[2] < 1e-10 * s[0]
    w = np.linalg.eigvalsh(D)
    assert w[0] < 0 < w[-1]


def test_oracle_mrp_rejects_bad_targets(field):
    with pytest.raises(ValueError):
        oracle.oracle_mrp(field, RADIO, 0.0)
    # identical users leave no positive direction
    same = oracle.DiscretizedField(field.h_b, field.h_b, field.grid)
    with pytest.raises(InfeasibleTargetError):
        oracle.oracle_mrp(same, RADIO, 1.0)


def test_discretize_checks_grid():
    grid = make_grid(ApertureSpec.capa(1.0), "midpoint", 4, 4)
    with pytest.raises(ValueError):
        oracle.discretize(S0.channel, S0.bob, S0.eve, ApertureSpec.capa(0.5), grid)


def test_convergence_sweep_detects_stall():
    rows = oracle.oracle_convergence_sweep(lambda n: 1 + 1 / n**2, [4, 8, 16], 1.0)
    assert [r.N for r in rows] == [4, 8, 16]
    assert rows[-1].delta == pytest.approx(1 / 256)
    with pytest.raises(AssertionError):
        oracle.oracle_convergence_sweep(lambda n: 1.1, [4, 8], 1.0)
    with pytest.raises(ValueError):
        oracle.oracle_convergence_sweep(lambda n: 1.0, [8, 4], 1.0)


def test_midpoint_oracle_converges():
    ap = S0.aperture

    def at(n):
        grid = make_grid(ap, QuadratureRule.MIDPOINT, n, n)
        return oracle.oracle_msr(oracle.discretize(S0.channel, S0.bob, S0.eve, ap, grid), RADIO).value

    rows = oracle.oracle_convergence_sweep(at, [6, 12, 24], secrecy.msr(S0.link(), RADIO).value)
    assert rows[-1].delta < 2e-4
