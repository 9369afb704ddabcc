"""The reference scenario and a flat container bundling its pieces."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, replace

from .channel import DEFAULT_CHEBYSHEV_T, ChannelParams, LinkMethod, LinkStatistics, link_stats
from .geometry import ApertureKind, ApertureSpec, UserGeometry
from .secrecy import RadioConfig

__all__ = ["Scenario", "DEFAULT_SCENARIO"]


@dataclass(frozen=True)
class Scenario:
    """Every scalar needed to evaluate one operating point.

    Noise powers default to 1 W so ``snr_db`` is simply ``10 log10(P)``.
    Receive areas default to ``wavelength^2 / (4 pi)`` when left as ``None``.
    ``aor`` and ``pitch`` only matter for discrete arrays (pitch defaults to
    half a wavelength).
    """

    wavelength: float = 0.125
    bob_r: float = 10.0
    bob_theta: float = math.pi / 6
    bob_phi: float = math.pi / 6
    eve_r: float = 20.0
    eve_theta: float = math.pi / 3
    eve_phi: float = math.pi / 3
    snr_db: float = 10.0
    sigma2_b: float = 1.0
    sigma2_e: float = 1.0
    area_b: float | None = None
    area_e: float | None = None
    Lx: float = 0.5
    Lz: float = 0.5
    array: str = "capa"
    aor: float = 1.0
    pitch: float | None = None
    target_rate: float = 2.0
    chebyshev_T: int = DEFAULT_CHEBYSHEV_T

    def replace(self, **changes) -> "Scenario":
        return replace(self, **changes)

    def as_dict(self) -> dict:
        return asdict(self)

    @property
    def channel(self) -> ChannelParams:
        return ChannelParams(self.wavelength)

    @property
    def bob(self) -> UserGeometry:
        return UserGeometry(self.bob_r, self.bob_theta, self.bob_phi)

    @property
    def eve(self) -> UserGeometry:
        return UserGeometry(self.eve_r, self.eve_theta, self.eve_phi)

    @property
    def power(self) -> float:
        """Transmit power in watts implied by ``snr_db`` relative to Bob's noise."""
        return self.sigma2_b * 10 ** (self.snr_db / 10)

    @property
    def radio(self) -> RadioConfig:
        rx_area = self.wavelength**2 / (4 * math.pi)
        return RadioConfig(
            P=self.power,
            sigma2_b=self.sigma2_b,
            sigma2_e=self.sigma2_e,
            area_b=rx_area if self.area_b is None else self.area_b,
            area_e=rx_area if self.area_e is None else self.area_e,
        )

    @property
    def aperture(self) -> ApertureSpec:
        if ApertureKind(self.array) is ApertureKind.CAPA:
            return ApertureSpec.capa(self.Lx, self.Lz)
        pitch = self.wavelength / 2 if self.pitch is None else self.pitch
        return ApertureSpec.spda_from_aor(self.Lx, self.Lz, self.aor, pitch)

    def link(self, method: LinkMethod | str = LinkMethod.CLOSED_FORM, resolution: int | None = None) -> LinkStatistics:
        if resolution is None and LinkMethod(method) is LinkMethod.CLOSED_FORM:
            resolution = self.chebyshev_T
        return link_stats(self.channel, self.bob, self.eve, self.aperture, method, resolution)


DEFAULT_SCENARIO = Scenario()
