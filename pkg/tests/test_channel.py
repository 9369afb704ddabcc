import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from capa_secrecy.channel import (
    ChannelParams,
    LinkMethod,
    LinkStatistics,
    capa_gain_closed,
    capa_gain_limit,
    capa_gain_numeric,
    correlation_chebyshev,
    correlation_numeric,
    link_stats,
    los_response,
    spda_link_stats,
)
from capa_secrecy.errors import DegenerateGeometryError
from capa_secrecy.geometry import ApertureSpec, QuadratureRule, UserGeometry, make_grid
from capa_secrecy.scenario import DEFAULT_SCENARIO

PARAMS = ChannelParams(0.125)
BOB = UserGeometry(10.0, math.pi / 6, math.pi / 6)
EVE = UserGeometry(20.0, math.pi / 3, math.pi / 3)
AP = ApertureSpec.capa(0.5)

users = st.builds(
    UserGeometry,
    r=st.floats(1.0, 60.0),
    theta=st.floats(0.05, math.pi - 0.05),
    phi=st.floats(0.05, math.pi - 0.05),
)


def test_reference_link_values():
    link = DEFAULT_SCENARIO.link()
    assert link.g_b == pytest.approx(17874.63, rel=1e-6)
    assert link.g_e == pytest.approx(13394.91, rel=1e-6)
    assert link.rho_bar == pytest.approx(0.0466, abs=1e-4)


def test_los_response_magnitude():
    # at the aperture centre the distance is just r
    h = los_response(PARAMS, BOB, 0.0, 0.0)
    expected = PARAMS.k0 * PARAMS.impedance * math.sqrt(BOB.r * BOB.Psi) / (math.sqrt(4 * math.pi) * BOB.r**1.5)
    assert abs(h) == pytest.approx(expected, rel=1e-12)
    assert np.angle(h / 1j) == pytest.approx(np.angle(np.exp(-1j * PARAMS.k0 * BOB.r)), abs=1e-9)


def test_los_response_vectorised():
    x = np.linspace(-0.25, 0.25, 7)
    out = los_response(PARAMS, BOB, x[:, None], x[None, :])
    assert out.shape == (7, 7)
    assert out[2, 3] == pytest.approx(los_response(PARAMS, BOB, x[2], x[3]), rel=1e-14)


@pytest.mark.parametrize("user", [BOB, EVE])
def test_gain_closed_matches_midpoint(user):
    grid = make_grid(AP, QuadratureRule.MIDPOINT, 128, 128)
    assert capa_gain_numeric(PARAMS, user, grid) == pytest.approx(capa_gain_closed(PARAMS, user, AP), rel=1e-5)


def test_gain_closed_matches_gauss_legendre_off_axis():
    user = UserGeometry(1.5, 0.4, 2.5)
    ap = ApertureSpec.capa(1.2, 0.7)
    grid = make_grid(ap, QuadratureRule.GAUSS_LEGENDRE, 80, 80)
    assert capa_gain_numeric(PARAMS, user, grid) == pytest.approx(capa_gain_closed(PARAMS, user, ap), rel=1e-9)


def test_gain_grows_toward_limit():
    sizes = np.logspace(-1, 3, 30)
    g = np.array([capa_gain_closed(PARAMS, BOB, ApertureSpec.capa(L)) for L in sizes])
    assert np.all(np.diff(g) > 0)
    assert np.all(g < capa_gain_limit(PARAMS))
    assert g[-1] == pytest.approx(capa_gain_limit(PARAMS), rel=1e-2)


def test_chebyshev_correlation_converged():
    r100 = correlation_chebyshev(PARAMS, BOB, EVE, AP, 100)
    r200 = correlation_chebyshev(PARAMS, BOB, EVE, AP, 200)
    assert abs(r100 - r200) / abs(r200) < 1e-3
    dense = correlation_numeric(PARAMS, BOB, EVE, make_grid(AP, QuadratureRule.GAUSS_LEGENDRE, 60, 60))
    assert abs(r200 - dense) / abs(dense) < 1e-3


def test_correlation_single_node():
    rho = correlation_chebyshev(PARAMS, BOB, EVE, AP, 1)
    h = los_response(PARAMS, BOB, 0.0, 0.0) * np.conj(los_response(PARAMS, EVE, 0.0, 0.0))
    assert rho == pytest.approx(math.pi**2 * AP.area / 4 * h)


def test_same_user_is_fully_correlated():
    link = link_stats(PARAMS, BOB, BOB, AP, LinkMethod.NUMERIC, 64)
    assert link.rho_bar == pytest.approx(1.0, abs=1e-12)
    assert link.rho.imag == pytest.approx(0.0, abs=1e-9 * link.g_b)


def test_link_methods_agree():
    closed = link_stats(PARAMS, BOB, EVE, AP)
    numeric = link_stats(PARAMS, BOB, EVE, AP, "numeric", 128)
    assert numeric.g_b == pytest.approx(closed.g_b, rel=1e-4)
    assert numeric.g_e == pytest.approx(closed.g_e, rel=1e-4)
    assert abs(numeric.rho - closed.rho) / abs(closed.rho) < 1e-3


def test_spda_with_full_occupation_matches_capa_closed_form():
    pitch = PARAMS.wavelength / 2
    spda = ApertureSpec.spda_from_aor(0.5, 0.5, 1.0, pitch)
    a = link_stats(PARAMS, BOB, EVE, spda)
    b = link_stats(PARAMS, BOB, EVE, ApertureSpec.capa(spda.Lx, spda.Lz))
    assert a == b


def test_spda_link_stats_scaling():
    ap = ApertureSpec.spda_from_aor(1.0, 1.0, 0.3, PARAMS.wavelength / 2)
    s = spda_link_stats(PARAMS, BOB, EVE, ap)
    assert s.g_b == pytest.approx(s.g_b_closed, rel=5e-2)
    assert 0 <= s.rho_bar < 1


def test_degenerate_gain_rejected():
    with pytest.raises(DegenerateGeometryError):
        LinkStatistics(0.0, 1.0, 0.0)


def test_scaled_keeps_rho_bar():
    link = DEFAULT_SCENARIO.link()
    s = link.scaled(g_b=1.7, g_e=0.3)
    assert s.rho_bar == pytest.approx(link.rho_bar, rel=1e-12)
    assert s.g_b == pytest.approx(1.7 * link.g_b)


@settings(max_examples=60, deadline=None)
@given(user=users, L=st.floats(0.05, 50.0))
def test_gain_bounded_by_limit(user, L):
    g = capa_gain_closed(PARAMS, user, ApertureSpec.capa(L))
    assert 0 < g < capa_gain_limit(PARAMS)


@settings(max_examples=60, deadline=None)
@given(user=users)
def test_gain_mirror_symmetry(user):
    # reflecting the user across the x = 0 plane leaves a centred aperture's gain unchanged
    # near grazing the four arctans nearly cancel, so allow for round-off
    mirrored = UserGeometry(user.r, user.theta, math.pi - user.phi)
    assert capa_gain_closed(PARAMS, mirrored, AP) == pytest.approx(capa_gain_closed(PARAMS, user, AP), rel=1e-8)


@settings(max_examples=40, deadline=None)
@given(bob=users, eve=users)
def test_correlation_cauchy_schwarz(bob, eve):
    link = link_stats(PARAMS, bob, eve, AP, LinkMethod.NUMERIC, 24)
    assert 0 <= link.rho_bar <= 1 + 1e-12
    swapped = link_stats(PARAMS, eve, bob, AP, LinkMethod.NUMERIC, 24)
    assert swapped.rho == pytest.approx(link.rho.conjugate(), rel=1e-12)
