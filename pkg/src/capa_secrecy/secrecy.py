"""Closed-form secrecy limits for a single-transmitter wiretap link.

Every optimal current lies in ``span{conj(h_b), conj(h_e)}``, so a beamformer
is just the pair ``(a, b)`` in ``j = c (a conj(h_b) + b conj(h_e))`` and all
inner products reduce to ``(g_b, g_e, rho)``:

    int h_b j = c (a g_b + b rho)
    int h_e j = c (a conj(rho) + b g_e)
    int |j|^2 = c^2 (|a|^2 g_b + |b|^2 g_e + 2 Re(conj(a) b rho))

Nothing here touches a quadrature grid.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

from .channel import ChannelParams, LinkStatistics
from .errors import DegenerateGeometryError, InfeasibleTargetError

__all__ = [
    "NoiseGeometry",
    "RadioConfig",
    "BeamformerCoeffs",
    "SolutionKind",
    "SecrecySolution",
    "AsymptoticLimits",
    "principal_eigenvalue",
    "simplified_principal_eigenvalue",
    "msr",
    "rate_of_beamformer",
    "user_snrs",
    "mrt_rate",
    "zf_rate",
    "zf_rate_high_snr",
    "mrp",
    "mrt_power",
    "mrt_rate_ceiling",
    "zf_power",
    "asymptotic_limits",
]

# |rho| below this fraction of sqrt(g_b g_e) counts as orthogonal.
_ORTHO_TOL = 1e-12


@dataclass(frozen=True, kw_only=True)
class NoiseGeometry:
    """Receiver noise powers and aperture areas of Bob and Eve."""

    sigma2_b: float
    sigma2_e: float
    area_b: float
    area_e: float

    def __post_init__(self):
        if min(self.sigma2_b, self.sigma2_e, self.area_b, self.area_e) <= 0:
            raise ValueError("noise powers and receive areas must be positive")

    @property
    def snr_scale_b(self) -> float:
        """``|A_b| / sigma_b^2``: Bob's SNR per unit power per unit gain."""
        return self.area_b / self.sigma2_b

    @property
    def snr_scale_e(self) -> float:
        return self.area_e / self.sigma2_e


@dataclass(frozen=True, kw_only=True)
class RadioConfig(NoiseGeometry):
    P: float

    def __post_init__(self):
        super().__post_init__()
        if not self.P > 0:
            raise ValueError(f"power budget must be positive, got {self.P}")

    @property
    def gamma_bar_b(self) -> float:
        return self.P * self.snr_scale_b

    @property
    def gamma_bar_e(self) -> float:
        return self.P * self.snr_scale_e

    def with_power(self, P: float) -> "RadioConfig":
        return RadioConfig(P=P, sigma2_b=self.sigma2_b, sigma2_e=self.sigma2_e, area_b=self.area_b, area_e=self.area_e)


@dataclass(frozen=True)
class BeamformerCoeffs:
    """Unnormalised span coefficients plus the transmit power they carry."""

    a: complex
    b: complex
    power: float

    def norm2(self, link: LinkStatistics) -> float:
        """``int |a conj(h_b) + b conj(h_e)|^2`` before power scaling."""
        a, b = complex(self.a), complex(self.b)
        return (
            abs(a) ** 2 * link.g_b
            + abs(b) ** 2 * link.g_e
            + 2 * (a.conjugate() * b * link.rho).real
        )

    def scale(self, link: LinkStatistics) -> float:
        """Constant ``c`` making ``int |j|^2`` equal ``power``."""
        n2 = self.norm2(link)
        if not n2 > 0:
            raise ValueError("beamformer has zero norm")
        return math.sqrt(self.power / n2)

    def inner_products(self, link: LinkStatistics) -> tuple[complex, complex]:
        """``(int h_b j, int h_e j)`` for the power-scaled current."""
        c = self.scale(link)
        a, b = complex(self.a), complex(self.b)
        return c * (a * link.g_b + b * link.rho), c * (a * link.rho.conjugate() + b * link.g_e)

    @property
    def ratio(self) -> complex:
        return complex(self.b) / complex(self.a)


class SolutionKind(str, enum.Enum):
    MSR = "msr"
    MRP = "mrp"
    MRT_RATE = "mrt_rate"
    ZF_RATE = "zf_rate"
    MRT_POWER = "mrt_power"
    ZF_POWER = "zf_power"


@dataclass(frozen=True)
class SecrecySolution:
    value: float
    beamformer: BeamformerCoeffs
    kind: SolutionKind
    # set when the requested scheme collapsed to MRT because rho == 0
    degenerate: bool = field(default=False)


def _require_not_parallel(link: LinkStatistics):
    if link.rho_bar >= 1:
        raise DegenerateGeometryError(
            f"Bob and Eve responses are parallel (rho_bar={link.rho_bar:.17g}); no secrecy is possible"
        )


def _orthogonal(link: LinkStatistics) -> bool:
    return abs(link.rho) < _ORTHO_TOL * math.sqrt(link.g_b * link.g_e)


def principal_eigenvalue(link: LinkStatistics, radio: RadioConfig) -> float:
    """Largest generalised eigenvalue of the (I + gb hb hb^H, I + ge he he^H) pencil.

    Positive root of
    ``(1 + E) m^2 - (B - E + K) m - K = 0`` with ``m = lambda - 1``,
    ``B = gamma_b g_b``, ``E = gamma_e g_e``, ``K = B E (1 - rho_bar)``.
    """
    B = radio.gamma_bar_b * link.g_b
    E = radio.gamma_bar_e * link.g_e
    K = B * E * (1 - link.rho_bar)
    xi = B - E + K
    disc = math.sqrt(xi * xi + 4 * (1 + E) * K)
    # for xi < 0 use Gamma / (sqrt - xi) to avoid cancellation
    top = xi + disc if xi >= 0 else 4 * (1 + E) * K / (disc - xi)
    return 1 + top / (2 * (1 + E))


def simplified_principal_eigenvalue(link: LinkStatistics, radio: RadioConfig) -> float:
    """``1 + B (1 + E (1 - rho_bar)) / (1 + E)``.

    Equals :func:`principal_eigenvalue` only when ``rho_bar == 0``; for
    correlated users it overshoots the true maximum. Kept for comparison.
    """
    B = radio.gamma_bar_b * link.g_b
    E = radio.gamma_bar_e * link.g_e
    return 1 + B * (1 + E * (1 - link.rho_bar)) / (1 + E)


def _xi1(link: LinkStatistics, radio: RadioConfig, lam: float) -> float:
    B = radio.gamma_bar_b * link.g_b
    E = radio.gamma_bar_e * link.g_e
    delta = B - lam * E
    return (delta + math.sqrt(delta * delta + 4 * lam * B * E * (1 - link.rho_bar))) / 2


def msr(link: LinkStatistics, radio: RadioConfig) -> SecrecySolution:
    """Maximum secrecy rate (bits/use) under power budget ``radio.P``.

    The optimal current is ``conj(h_b) + b conj(h_e)`` with
    ``b = (xi_1 - gamma_b g_b) / (gamma_b rho)``. That expression is computed
    through the equivalent ``-lam gamma_e conj(rho) / (xi_1 + lam gamma_e g_e)``,
    which has no ``rho`` in the denominator and no cancellation at low SNR.
    """
    _require_not_parallel(link)
    lam = principal_eigenvalue(link, radio)
    if _orthogonal(link):
        b = 0j
    else:
        xi1 = _xi1(link, radio, lam)
        ge_l = lam * radio.gamma_bar_e
        b = -ge_l * link.rho.conjugate() / (xi1 + ge_l * link.g_e)
    return SecrecySolution(math.log2(lam), BeamformerCoeffs(1.0, b, radio.P), SolutionKind.MSR)


def user_snrs(link: LinkStatistics, noise: NoiseGeometry, bf: BeamformerCoeffs) -> tuple[float, float]:
    """Received SNRs of Bob and Eve for a current carrying ``bf.power`` watts."""
    ib, ie = bf.inner_products(link)
    return noise.snr_scale_b * abs(ib) ** 2, noise.snr_scale_e * abs(ie) ** 2


def rate_of_beamformer(link: LinkStatistics, noise: NoiseGeometry, bf: BeamformerCoeffs) -> float:
    """Secrecy rate of an arbitrary span beamformer.

    The transmit power is ``bf.power``; ``noise`` only contributes noise
    powers and receive areas (a ``RadioConfig`` works, its ``P`` is unused).
    """
    gb, ge = user_snrs(link, noise, bf)
    return max(math.log2((1 + gb) / (1 + ge)), 0.0)


def mrt_rate(link: LinkStatistics, radio: RadioConfig) -> SecrecySolution:
    B = radio.gamma_bar_b * link.g_b
    E = radio.gamma_bar_e * link.g_e
    value = max(math.log2((1 + B) / (1 + E * link.rho_bar)), 0.0)
    return SecrecySolution(value, BeamformerCoeffs(1.0, 0j, radio.P), SolutionKind.MRT_RATE)


def _zf_coeff(link: LinkStatistics) -> complex:
    # -(g_b / rho) rho_bar == -conj(rho) / g_e
    return -link.rho.conjugate() / link.g_e


def zf_rate(link: LinkStatistics, radio: RadioConfig) -> SecrecySolution:
    """Exact finite-SNR rate of zero-forcing: ``log2(1 + gamma_b g_b (1 - rho_bar))``."""
    _require_not_parallel(link)
    if _orthogonal(link):
        sol = mrt_rate(link, radio)
        return SecrecySolution(sol.value, sol.beamformer, SolutionKind.ZF_RATE, degenerate=True)
    value = math.log2(1 + radio.gamma_bar_b * link.g_b * (1 - link.rho_bar))
    return SecrecySolution(value, BeamformerCoeffs(1.0, _zf_coeff(link), radio.P), SolutionKind.ZF_RATE)


def zf_rate_high_snr(link: LinkStatistics, radio: RadioConfig) -> float:
    """High-SNR asymptote ``log2(gamma_b g_b (1 - rho_bar))`` (may be negative)."""
    return math.log2(radio.gamma_bar_b * link.g_b * (1 - link.rho_bar))


def _mrp_terms(link: LinkStatistics, noise: NoiseGeometry, R0: float):
    p = noise.snr_scale_b
    q = 2.0**R0 * noise.snr_scale_e
    alpha = p * link.g_b - q * link.g_e
    beta = 4 * p * q * link.g_b * link.g_e * (1 - link.rho_bar)
    root = math.sqrt(alpha * alpha + beta)
    return p, q, alpha, beta, root


def mrp(link: LinkStatistics, noise: NoiseGeometry, R0: float) -> SecrecySolution:
    """Minimum transmit power achieving secrecy rate ``R0`` bits/use.

    Current ``conj(h_b) - tau conj(h_e)``; ``tau`` is evaluated as
    ``2 q conj(rho) / (p g_b + q g_e + sqrt(alpha^2 + beta))``, algebraically
    identical to the textbook ratio with ``rho`` in the denominator.
    """
    if R0 < 0:
        raise ValueError(f"target rate must be non-negative, got {R0}")
    p, q, alpha, beta, root = _mrp_terms(link, noise, R0)
    if link.rho_bar >= 1:
        if alpha > 0:
            # parallel responses: MRT and optimal coincide
            return SecrecySolution((2.0**R0 - 1) / alpha, BeamformerCoeffs(1.0, 0j, (2.0**R0 - 1) / alpha), SolutionKind.MRP)
        raise InfeasibleTargetError(
            "parallel responses cannot support this target", ceiling=math.log2(p * link.g_b / (noise.snr_scale_e * link.g_e))
        )
    denom = alpha + root if alpha >= 0 else beta / (root - alpha)
    value = 2 * (2.0**R0 - 1) / denom
    tau = 0j if _orthogonal(link) else 2 * q * link.rho.conjugate() / (p * link.g_b + q * link.g_e + root)
    return SecrecySolution(value, BeamformerCoeffs(1.0, -tau, value), SolutionKind.MRP)


def mrt_rate_ceiling(link: LinkStatistics, noise: NoiseGeometry) -> float:
    """Largest secrecy rate MRT reaches with unlimited power (inf if rho == 0)."""
    leak = noise.snr_scale_e * link.g_e * link.rho_bar
    if leak <= 0:
        return math.inf
    return max(math.log2(noise.snr_scale_b * link.g_b / leak), 0.0)


def mrt_power(link: LinkStatistics, noise: NoiseGeometry, R0: float) -> SecrecySolution:
    if R0 < 0:
        raise ValueError(f"target rate must be non-negative, got {R0}")
    denom = noise.snr_scale_b * link.g_b - 2.0**R0 * noise.snr_scale_e * link.g_e * link.rho_bar
    if denom <= 0:
        ceiling = mrt_rate_ceiling(link, noise)
        raise InfeasibleTargetError(
            f"MRT cannot reach {R0} bits/use at any power; its ceiling is {ceiling:.6g}", ceiling=ceiling
        )
    value = (2.0**R0 - 1) / denom
    return SecrecySolution(value, BeamformerCoeffs(1.0, 0j, value), SolutionKind.MRT_POWER)


def zf_power(link: LinkStatistics, noise: NoiseGeometry, R0: float) -> SecrecySolution:
    """Power zero-forcing needs for ``R0``, in the ``2^R0 / (...)`` form.

    This is the large-target approximation; the exact zero-forcing power is
    ``(2^R0 - 1) / (...)`` and is always smaller.
    """
    _require_not_parallel(link)
    if not R0 > 0:
        raise ValueError(f"target rate must be positive, got {R0}")
    value = 2.0**R0 / (noise.snr_scale_b * link.g_b * (1 - link.rho_bar))
    degenerate = _orthogonal(link)
    b = 0j if degenerate else _zf_coeff(link)
    return SecrecySolution(value, BeamformerCoeffs(1.0, b, value), SolutionKind.ZF_POWER, degenerate=degenerate)


@dataclass(frozen=True)
class AsymptoticLimits:
    msr_capa: float
    msr_spda: float
    mrp_capa: float
    mrp_spda: float


def asymptotic_limits(
    params: ChannelParams, noise: NoiseGeometry, radio: RadioConfig, zeta_oc: float, R0: float
) -> AsymptoticLimits:
    """Rate ceilings and power floors of unbounded apertures.

    Assumes the correlation vanishes for an infinite aperture, so only Bob's
    limiting gain ``k0^2 eta^2 / 2`` (times the occupation ratio) survives.
    """
    if not 0 < zeta_oc <= 1:
        raise ValueError(f"occupation ratio must lie in (0, 1], got {zeta_oc}")
    g_inf = params.gain_scale / 2
    mrp_capa = 2 * (2.0**R0 - 1) / (params.gain_scale * noise.snr_scale_b)
    return AsymptoticLimits(
        msr_capa=math.log2(1 + radio.gamma_bar_b * g_inf),
        msr_spda=math.log2(1 + radio.gamma_bar_b * g_inf * zeta_oc),
        mrp_capa=mrp_capa,
        mrp_spda=mrp_capa / zeta_oc,
    )
