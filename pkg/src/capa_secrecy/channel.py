"""Line-of-sight responses, channel gains and the Bob-Eve correlation.

Convention: the correlation is ``rho = integral h_b(s) conj(h_e(s)) ds`` over
the aperture. Everything downstream consumes a :class:`LinkStatistics`.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateGeometryError
from .geometry import (
    ApertureKind,
    ApertureSpec,
    QuadratureGrid,
    QuadratureRule,
    UserGeometry,
    make_grid,
    spda_element_centers,
)

__all__ = [
    "ChannelParams",
    "LinkStatistics",
    "SpdaLinkStatistics",
    "LinkMethod",
    "los_response",
    "capa_gain_closed",
    "capa_gain_limit",
    "capa_gain_numeric",
    "correlation_numeric",
    "correlation_chebyshev",
    "spda_link_stats",
    "link_stats",
]

FREE_SPACE_IMPEDANCE = 120 * math.pi
DEFAULT_CHEBYSHEV_T = 100


@dataclass(frozen=True)
class ChannelParams:
    wavelength: float
    impedance: float = FREE_SPACE_IMPEDANCE

    def __post_init__(self):
        if not self.wavelength > 0:
            raise ValueError(f"wavelength must be positive, got {self.wavelength}")

    @property
    def k0(self) -> float:
        return 2 * math.pi / self.wavelength

    @property
    def gain_scale(self) -> float:
        """``k0^2 eta^2``, twice the gain of an infinite planar aperture."""
        return (self.k0 * self.impedance) ** 2


@dataclass(frozen=True)
class LinkStatistics:
    """Bob gain, Eve gain and their correlation; all the closed forms need.

    ``rho_bar = |rho|^2 / (g_b g_e)`` is derived, never passed in.
    """

    g_b: float
    g_e: float
    rho: complex
    rho_bar: float = field(init=False)

    def __post_init__(self):
        if not (self.g_b > 0 and self.g_e > 0):
            raise DegenerateGeometryError(
                f"channel gains must be positive to define rho_bar (g_b={self.g_b}, g_e={self.g_e})"
            )
        object.__setattr__(self, "rho", complex(self.rho))
        object.__setattr__(self, "rho_bar", abs(self.rho) ** 2 / (self.g_b * self.g_e))

    def scaled(self, g_b: float = 1.0, g_e: float = 1.0) -> "LinkStatistics":
        """Copy with the gains multiplied (rho rescaled to keep rho_bar)."""
        return LinkStatistics(self.g_b * g_b, self.g_e * g_e, self.rho * math.sqrt(g_b * g_e))


@dataclass(frozen=True)
class SpdaLinkStatistics(LinkStatistics):
    """Discrete-sum link statistics plus the occupation-ratio approximations."""

    g_b_closed: float = field(default=math.nan, kw_only=True)
    g_e_closed: float = field(default=math.nan, kw_only=True)


class LinkMethod(str, enum.Enum):
    CLOSED_FORM = "closed"
    NUMERIC = "numeric"


def _distance(user: UserGeometry, x, z):
    r = user.r
    return np.sqrt(x * x + z * z - 2 * r * (user.Phi * x + user.Theta * z) + r * r)


def los_response(params: ChannelParams, user: UserGeometry, x, z):
    """Complex LoS field response of ``user`` to a unit current at ``(x, 0, z)``.

    Accepts scalars or arrays (broadcast together).
    """
    D = _distance(user, np.asarray(x, dtype=float), np.asarray(z, dtype=float))
    if np.any(D <= 0) or not np.all(np.isfinite(D)):
        raise DegenerateGeometryError("user location coincides with an aperture point")
    k0 = params.k0
    amp = k0 * params.impedance * math.sqrt(user.r * user.Psi) / math.sqrt(4 * math.pi)
    h = 1j * amp * np.exp(-1j * k0 * D) / D**1.5
    return h if h.ndim else complex(h)


def _arctan_sum(user: UserGeometry, Lx: float, Lz: float) -> float:
    psi = user.Psi
    total = 0.0
    for x in (Lx / (2 * user.r) + user.Phi, Lx / (2 * user.r) - user.Phi):
        for z in (Lz / (2 * user.r) + user.Theta, Lz / (2 * user.r) - user.Theta):
            total += math.atan(x * z / (psi * math.sqrt(psi * psi + x * x + z * z)))
    return total


def capa_gain_closed(params: ChannelParams, user: UserGeometry, aperture: ApertureSpec) -> float:
    """Exact gain of a planar rectangular aperture (four-arctan form)."""
    return params.gain_scale / (4 * math.pi) * _arctan_sum(user, aperture.Lx, aperture.Lz)


def capa_gain_limit(params: ChannelParams) -> float:
    """Gain of an unbounded plane: half of ``k0^2 eta^2``."""
    return params.gain_scale / 2


def capa_gain_numeric(params: ChannelParams, user: UserGeometry, grid: QuadratureGrid) -> float:
    h = los_response(params, user, grid.x, grid.z)
    return float(np.sum(grid.weights * np.abs(h) ** 2))


def correlation_numeric(params: ChannelParams, bob: UserGeometry, eve: UserGeometry, grid: QuadratureGrid) -> complex:
    hb = los_response(params, bob, grid.x, grid.z)
    he = los_response(params, eve, grid.x, grid.z)
    return complex(np.sum(grid.weights * hb * np.conj(he)))


def correlation_chebyshev(
    params: ChannelParams,
    bob: UserGeometry,
    eve: UserGeometry,
    aperture: ApertureSpec,
    T: int = DEFAULT_CHEBYSHEV_T,
) -> complex:
    """Correlation integral on a ``T x T`` Chebyshev-Gauss tensor grid.

    ``T = 1`` is allowed (single node at the centre); ``make_grid`` insists on
    two points per axis, so the rule is assembled here directly.
    """
    if T < 1:
        raise ValueError(f"T must be at least 1, got {T}")
    t = np.arange(1, T + 1)
    psi = np.cos((2 * t - 1) * np.pi / (2 * T))
    w1 = np.sqrt(1 - psi**2)
    Z, X = np.meshgrid(aperture.Lz * psi / 2, aperture.Lx * psi / 2, indexing="ij")
    W = np.outer(w1, w1)
    hb = los_response(params, bob, X, Z)
    he = los_response(params, eve, X, Z)
    scale = math.pi**2 * aperture.area / (4 * T * T)
    return complex(scale * np.sum(W * hb * np.conj(he)))


def spda_link_stats(
    params: ChannelParams, bob: UserGeometry, eve: UserGeometry, aperture: ApertureSpec
) -> SpdaLinkStatistics:
    """Element-sum gains and correlation of a discrete planar array.

    Each element is treated as a flat patch of area ``A_s`` sampled at its
    centre. The ``*_closed`` fields carry the occupation-ratio scaling of the
    continuous-aperture gain over the same ``Lx x Lz`` footprint.
    """
    if aperture.kind is not ApertureKind.SPDA:
        raise ValueError("spda_link_stats needs a discrete aperture")
    c = spda_element_centers(aperture)
    hb = los_response(params, bob, c[:, 0], c[:, 1])
    he = los_response(params, eve, c[:, 0], c[:, 1])
    As = aperture.element_area
    zeta = aperture.occupation_ratio
    footprint = ApertureSpec.capa(aperture.Lx, aperture.Lz)
    return SpdaLinkStatistics(
        g_b=float(As * np.sum(np.abs(hb) ** 2)),
        g_e=float(As * np.sum(np.abs(he) ** 2)),
        rho=complex(As * np.sum(hb * np.conj(he))),
        g_b_closed=zeta * capa_gain_closed(params, bob, footprint),
        g_e_closed=zeta * capa_gain_closed(params, eve, footprint),
    )


def link_stats(
    params: ChannelParams,
    bob: UserGeometry,
    eve: UserGeometry,
    aperture: ApertureSpec,
    method: LinkMethod | str = LinkMethod.CLOSED_FORM,
    resolution: int | None = None,
) -> LinkStatistics:
    """Gains and correlation for a Bob/Eve pair.

    ``resolution`` is the Chebyshev order ``T`` for the closed-form route and
    the per-axis midpoint count for the numeric route on a continuous
    aperture; discrete arrays ignore it under the numeric route.

    Closed form on a discrete array scales both the continuous gains and the
    continuous correlation by the occupation ratio, so an array with ratio 1
    reproduces the continuous aperture exactly.
    """
    method = LinkMethod(method)
    if method is LinkMethod.CLOSED_FORM:
        T = DEFAULT_CHEBYSHEV_T if resolution is None else resolution
        footprint = aperture if aperture.kind is ApertureKind.CAPA else ApertureSpec.capa(aperture.Lx, aperture.Lz)
        zeta = aperture.occupation_ratio
        return LinkStatistics(
            zeta * capa_gain_closed(params, bob, footprint),
            zeta * capa_gain_closed(params, eve, footprint),
            zeta * correlation_chebyshev(params, bob, eve, footprint, T),
        )
    if aperture.kind is ApertureKind.SPDA:
        s = spda_link_stats(params, bob, eve, aperture)
        return LinkStatistics(s.g_b, s.g_e, s.rho)
    n = 128 if resolution is None else resolution
    grid = make_grid(aperture, QuadratureRule.MIDPOINT, n, n)
    hb = los_response(params, bob, grid.x, grid.z)
    he = los_response(params, eve, grid.x, grid.z)
    w = grid.weights
    return LinkStatistics(
        float(np.sum(w * np.abs(hb) ** 2)),
        float(np.sum(w * np.abs(he) ** 2)),
        complex(np.sum(w * hb * np.conj(he))),
    )
