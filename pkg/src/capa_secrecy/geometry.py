"""Apertures, user placements and sample layouts on the x-z plane.

The transmit aperture is always centred at the origin of the x-z plane with
its normal along +y. Users sit in front of it (positive y), which is what
keeps the projected-aperture factor of the LoS response real.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import GeometryError

__all__ = [
    "ApertureKind",
    "ApertureSpec",
    "QuadratureRule",
    "QuadratureGrid",
    "UserGeometry",
    "make_grid",
    "spda_element_centers",
]

_LAYOUT_RTOL = 1e-6


class ApertureKind(str, enum.Enum):
    CAPA = "capa"
    SPDA = "spda"


class QuadratureRule(str, enum.Enum):
    MIDPOINT = "midpoint"
    GAUSS_LEGENDRE = "gauss-legendre"
    CHEBYSHEV_GAUSS = "chebyshev-gauss"


@dataclass(frozen=True)
class ApertureSpec:
    """Planar aperture, either continuous or split into square elements.

    For a spatially discrete array the element grid is ``Mx x Mz`` (both odd)
    with pitch ``d`` and element area ``A_s``; ``Lx``/``Lz`` must equal
    ``Mx*d``/``Mz*d`` to within one part in a million.
    """

    kind: ApertureKind
    Lx: float
    Lz: float
    element_area: float | None = None
    spacing: float | None = None
    Mx: int | None = None
    Mz: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "kind", ApertureKind(self.kind))
        if not (self.Lx > 0 and self.Lz > 0):
            raise GeometryError(f"aperture dimensions must be positive, got Lx={self.Lx}, Lz={self.Lz}")
        if self.kind is ApertureKind.CAPA:
            return
        if None in (self.element_area, self.spacing, self.Mx, self.Mz):
            raise GeometryError("SPDA needs element_area, spacing, Mx and Mz")
        if self.element_area <= 0 or self.spacing <= 0:
            raise GeometryError("element area and spacing must be positive")
        for name, m in (("Mx", self.Mx), ("Mz", self.Mz)):
            if m < 1 or m % 2 == 0:
                raise GeometryError(f"{name} must be a positive odd count, got {m}")
        if math.sqrt(self.element_area) > self.spacing * (1 + 1e-12):
            raise GeometryError("elements overlap: sqrt(element_area) exceeds the spacing")
        for L, m, name in ((self.Lx, self.Mx, "Lx"), (self.Lz, self.Mz, "Lz")):
            if abs(L - m * self.spacing) > _LAYOUT_RTOL * L:
                raise GeometryError(f"{name}={L} does not match element count x spacing = {m * self.spacing}")

    @classmethod
    def capa(cls, Lx: float, Lz: float | None = None) -> "ApertureSpec":
        return cls(ApertureKind.CAPA, Lx, Lx if Lz is None else Lz)

    @classmethod
    def spda(cls, Mx: int, Mz: int, spacing: float, element_area: float) -> "ApertureSpec":
        return cls(ApertureKind.SPDA, Mx * spacing, Mz * spacing, element_area, spacing, Mx, Mz)

    @classmethod
    def spda_from_aor(cls, Lx: float, Lz: float, aor: float, pitch: float) -> "ApertureSpec":
        """Fit an odd element grid of roughly ``pitch`` spacing into ``Lx x Lz``.

        The spacing is shrunk so the grid spans the aperture exactly; square
        apertures keep one common spacing. ``aor`` sets the element area.
        """
        if not 0 < aor <= 1:
            raise GeometryError(f"occupation ratio must lie in (0, 1], got {aor}")
        if not math.isclose(Lx, Lz, rel_tol=1e-12):
            raise GeometryError("spda_from_aor only handles square apertures")
        m = max(1, int(round(Lx / pitch)))
        if m % 2 == 0:
            m += 1
        d = Lx / m
        return cls(ApertureKind.SPDA, Lx, Lz, aor * d * d, d, m, m)

    @property
    def area(self) -> float:
        return self.Lx * self.Lz

    @property
    def occupation_ratio(self) -> float:
        if self.kind is ApertureKind.CAPA:
            return 1.0
        return self.element_area / self.spacing**2


@dataclass(frozen=True)
class UserGeometry:
    """Polar placement of a receiver relative to the aperture centre.

    ``theta`` is the elevation measured from +z and ``phi`` the azimuth in the
    x-y plane, so the direction cosines are
    ``(cos(phi) sin(theta), sin(phi) sin(theta), cos(theta))``.
    """

    r: float
    theta: float
    phi: float
    Phi: float = field(init=False, repr=False)
    Psi: float = field(init=False, repr=False)
    Theta: float = field(init=False, repr=False)

    def __post_init__(self):
        if not self.r > 0:
            raise GeometryError(f"distance must be positive, got {self.r}")
        if not (0 <= self.theta <= math.pi and 0 <= self.phi <= math.pi):
            raise GeometryError("theta and phi must lie in [0, pi]")
        st = math.sin(self.theta)
        object.__setattr__(self, "Phi", math.cos(self.phi) * st)
        object.__setattr__(self, "Psi", math.sin(self.phi) * st)
        object.__setattr__(self, "Theta", math.cos(self.theta))
        if not self.Psi > 0:
            raise GeometryError("user must be in front of the aperture (Psi > 0)")

    @property
    def position(self) -> np.ndarray:
        return self.r * np.array([self.Phi, self.Psi, self.Theta])


@dataclass(frozen=True, eq=False)
class QuadratureGrid:
    """Tensor-product sample points over the aperture plus their weights."""

    x: np.ndarray
    z: np.ndarray
    weights: np.ndarray
    rule: QuadratureRule
    Nx: int
    Nz: int

    def __post_init__(self):
        for arr in (self.x, self.z, self.weights):
            arr.setflags(write=False)

    @property
    def points(self) -> np.ndarray:
        return np.column_stack([self.x, self.z])

    def __len__(self):
        return self.weights.size


def _axis_rule(rule: QuadratureRule, n: int, half: float) -> tuple[np.ndarray, np.ndarray]:
    if rule is QuadratureRule.MIDPOINT:
        h = 2 * half / n
        nodes = -half + h * (np.arange(n) + 0.5)
        return nodes, np.full(n, h)
    if rule is QuadratureRule.GAUSS_LEGENDRE:
        t, w = np.polynomial.legendre.leggauss(n)
        return half * t, half * w
    if rule is QuadratureRule.CHEBYSHEV_GAUSS:
        t = np.arange(1, n + 1)
        psi = np.cos((2 * t - 1) * np.pi / (2 * n))
        return half * psi, (np.pi / n) * half * np.sqrt(1 - psi**2)
    raise ValueError(f"unknown rule {rule!r}")


def make_grid(aperture: ApertureSpec, rule: QuadratureRule | str, Nx: int, Nz: int) -> QuadratureGrid:
    """Build a tensor-product quadrature grid over a continuous aperture.

    Points are laid out row-major in z then x, i.e. ``x`` varies fastest.
    """
    rule = QuadratureRule(rule)
    if aperture.kind is not ApertureKind.CAPA:
        raise GeometryError("quadrature grids are defined on continuous apertures only")
    if Nx < 2 or Nz < 2:
        raise GeometryError(f"need at least 2 points per axis, got {Nx}x{Nz}")
    xs, wx = _axis_rule(rule, Nx, aperture.Lx / 2)
    zs, wz = _axis_rule(rule, Nz, aperture.Lz / 2)
    Z, X = np.meshgrid(zs, xs, indexing="ij")
    W = np.outer(wz, wx)
    return QuadratureGrid(X.ravel(), Z.ravel(), W.ravel(), rule, Nx, Nz)


def spda_element_centers(aperture: ApertureSpec) -> np.ndarray:
    """Element centres ``(m_x d, m_z d)`` as an ``(Mx*Mz, 2)`` array, x fastest."""
    if aperture.kind is not ApertureKind.SPDA:
        raise GeometryError("element centres exist only for discrete arrays")
    mx = np.arange(aperture.Mx) - (aperture.Mx - 1) // 2
    mz = np.arange(aperture.Mz) - (aperture.Mz - 1) // 2
    Z, X = np.meshgrid(mz * aperture.spacing, mx * aperture.spacing, indexing="ij")
    return np.column_stack([X.ravel(), Z.ravel()])
