"""Brute-force reference: discretise the aperture and eigensolve densely.

Deliberately independent of :mod:`capa_secrecy.secrecy`. It only samples the
LoS response on a quadrature grid and hands dense matrices to LAPACK.

Samples are scaled by ``sqrt(weight)`` so the Euclidean inner product of two
sampled responses approximates the aperture integral and the continuous
identity operator becomes the plain identity matrix. Matrices act on the
current vector, where Bob's signal is ``h_b^T j = conj(h_b)^H j``; hence the
pencil is built from ``conj(h)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
import scipy.linalg as sla

from .channel import ChannelParams, los_response
from .errors import InfeasibleTargetError
from .geometry import ApertureSpec, QuadratureGrid, UserGeometry

__all__ = [
    "DiscretizedField",
    "OperatorPencil",
    "OracleResult",
    "ConvergenceRow",
    "discretize",
    "rayleigh_quotient",
    "oracle_msr",
    "oracle_mrp",
    "mrp_operator",
    "oracle_convergence_sweep",
]


@dataclass(frozen=True, eq=False)
class DiscretizedField:
    h_b: np.ndarray
    h_e: np.ndarray
    grid: QuadratureGrid

    @property
    def N(self) -> int:
        return self.h_b.size

    @property
    def gain_b(self) -> float:
        return float(np.vdot(self.h_b, self.h_b).real)

    @property
    def gain_e(self) -> float:
        return float(np.vdot(self.h_e, self.h_e).real)

    @property
    def correlation(self) -> complex:
        """``sum h_b conj(h_e)``, the discrete correlation integral."""
        return complex(np.vdot(self.h_e, self.h_b))


def discretize(
    params: ChannelParams,
    bob: UserGeometry,
    eve: UserGeometry,
    aperture: ApertureSpec,
    grid: QuadratureGrid,
) -> DiscretizedField:
    if not (np.all(np.abs(grid.x) <= aperture.Lx / 2 * (1 + 1e-12)) and np.all(np.abs(grid.z) <= aperture.Lz / 2 * (1 + 1e-12))):
        raise ValueError("grid points fall outside the aperture")
    sw = np.sqrt(grid.weights)
    hb = sw * los_response(params, bob, grid.x, grid.z)
    he = sw * los_response(params, eve, grid.x, grid.z)
    return DiscretizedField(np.asarray(hb), np.asarray(he), grid)


@dataclass(frozen=True, eq=False)
class OperatorPencil:
    """``A_k = I + gamma_k v_k v_k^H`` with ``v_k = conj(h_k)``, kept factored."""

    v_b: np.ndarray
    v_e: np.ndarray
    gamma_b: float
    gamma_e: float

    @classmethod
    def from_field(cls, field: DiscretizedField, gamma_b: float, gamma_e: float) -> "OperatorPencil":
        return cls(np.conj(field.h_b), np.conj(field.h_e), gamma_b, gamma_e)

    @property
    def N(self) -> int:
        return self.v_b.size

    @staticmethod
    def _rank_one_plus_identity(v: np.ndarray, gamma: float) -> np.ndarray:
        A = gamma * np.outer(v, v.conj())
        A[np.diag_indices_from(A)] += 1.0
        return A

    def dense(self) -> tuple[np.ndarray, np.ndarray]:
        return self._rank_one_plus_identity(self.v_b, self.gamma_b), self._rank_one_plus_identity(self.v_e, self.gamma_e)

    def apply(self, u: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """``(A_b u, A_e u)`` without materialising either matrix."""
        return (
            u + self.gamma_b * self.v_b * np.vdot(self.v_b, u),
            u + self.gamma_e * self.v_e * np.vdot(self.v_e, u),
        )


def rayleigh_quotient(pencil: OperatorPencil, u: np.ndarray) -> float:
    Ab_u, Ae_u = pencil.apply(u)
    return float(np.vdot(u, Ab_u).real / np.vdot(u, Ae_u).real)


@dataclass(frozen=True, eq=False)
class OracleResult:
    value: float
    eigvec: np.ndarray
    eigenvalue: float


def oracle_msr(field: DiscretizedField, radio) -> OracleResult:
    """Maximise the pencil's Rayleigh quotient by a dense generalised eigensolve.

    ``radio`` needs ``gamma_bar_b`` and ``gamma_bar_e`` (``P |A_k| / sigma_k^2``).
    ``value`` is ``log2`` of the top generalised eigenvalue; ``eigvec`` is the
    maximising current, unit norm.
    """
    if field.N < 2:
        raise ValueError("need at least two samples")
    Ab, Ae = OperatorPencil.from_field(field, radio.gamma_bar_b, radio.gamma_bar_e).dense()
    n = field.N
    w, V = sla.eigh(Ab, Ae, subset_by_index=[n - 1, n - 1])
    lam = float(w[-1])
    u = V[:, -1]
    return OracleResult(math.log2(lam), u / np.linalg.norm(u), lam)


def mrp_operator(field: DiscretizedField, snr_scale_b: float, snr_scale_e: float, R0: float) -> np.ndarray:
    """Dense rank-2 Hermitian ``p conj(h_b) h_b^T - 2^R0 q conj(h_e) h_e^T``."""
    vb, ve = np.conj(field.h_b), np.conj(field.h_e)
    return snr_scale_b * np.outer(vb, vb.conj()) - 2.0**R0 * snr_scale_e * np.outer(ve, ve.conj())


def oracle_mrp(field: DiscretizedField, noise, R0: float) -> OracleResult:
    """Minimum power for rate ``R0`` from the top eigenpair of the dense power operator.

    ``noise`` needs ``snr_scale_b`` and ``snr_scale_e`` (``|A_k| / sigma_k^2``).
    """
    if not R0 > 0:
        raise ValueError(f"target rate must be positive, got {R0}")
    D = mrp_operator(field, noise.snr_scale_b, noise.snr_scale_e, R0)
    n = field.N
    w, V = sla.eigh(D, subset_by_index=[n - 1, n - 1])
    lam = float(w[-1])
    # anything at round-off level of the operator norm counts as zero
    scale = noise.snr_scale_b * field.gain_b + 2.0**R0 * noise.snr_scale_e * field.gain_e
    if lam <= 1e-12 * scale:
        raise InfeasibleTargetError(f"power operator has no positive eigenvalue for R0={R0}")
    return OracleResult((2.0**R0 - 1) / lam, V[:, -1], lam)


@dataclass(frozen=True)
class ConvergenceRow:
    N: int
    oracle: float
    reference: float

    @property
    def delta(self) -> float:
        return abs(self.oracle - self.reference) / abs(self.reference)


def oracle_convergence_sweep(
    evaluate: Callable[[int], float],
    resolutions: Sequence[int],
    reference: float,
) -> list[ConvergenceRow]:
    """Evaluate an oracle quantity at increasing resolutions against a fixed reference.

    ``evaluate(n)`` returns the oracle value at ``n`` samples per axis. Raises
    ``AssertionError`` if the relative deltas fail to decrease over the last
    two resolutions.
    """
    if list(resolutions) != sorted(set(resolutions)):
        raise ValueError("resolutions must be strictly increasing")
    rows = [ConvergenceRow(n, float(evaluate(n)), float(reference)) for n in resolutions]
    if len(rows) >= 2 and not rows[-1].delta < rows[-2].delta:
        raise AssertionError(
            f"oracle deltas not decreasing: {[r.delta for r in rows]}"
        )
    return rows
