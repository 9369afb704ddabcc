"""Secrecy rate and required-power limits of continuous-aperture-array wiretap links."""

from .channel import (
    ChannelParams,
    LinkMethod,
    LinkStatistics,
    capa_gain_closed,
    capa_gain_numeric,
    correlation_chebyshev,
    link_stats,
    los_response,
    spda_link_stats,
)
from .errors import CapaError, DegenerateGeometryError, GeometryError, InfeasibleTargetError
from .geometry import ApertureKind, ApertureSpec, QuadratureGrid, QuadratureRule, UserGeometry, make_grid, spda_element_centers
from .scenario import DEFAULT_SCENARIO, Scenario
from .secrecy import (
    BeamformerCoeffs,
    NoiseGeometry,
    RadioConfig,
    SecrecySolution,
    asymptotic_limits,
    mrp,
    mrt_power,
    mrt_rate,
    msr,
    rate_of_beamformer,
    zf_power,
    zf_rate,
)

__version__ = "0.1.0"
