"""Reduced-order longitudinal dynamics: short-period frequency and damping.

Works in dimensional stability derivatives (per second / per radian):

    M_alpha, M_q, M_alphadot, M_delta_e   pitch-moment derivatives, 1/s^2, 1/s
    Z_alpha, Z_delta_e                    heave-force derivatives, m/s^2 per rad
    U1                                    trim true airspeed, m/s

The two-degree-of-freedom (alpha, q) approximation gives

    omega_sp = sqrt(Z_alpha*M_q/U1 - M_alpha)
    zeta_sp  = -(M_q + Z_alpha/U1 + M_alphadot) / (2*omega_sp)

and dropping the heave coupling leaves the one-degree-of-freedom forms
omega = sqrt(-M_alpha), zeta = -M_alphadot/(2*omega).  When the quasi-steady
pitch-damping data cannot separate M_alphadot, the conventional surrogate
M_alphadot := M_q/3 is substituted.

Non-oscillatory cases (radicand <= 0) are flagged rather than raised: a
statically unstable estimate is a legitimate result of identification.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Optional

import numpy as np

from .aeromean import AeroModelPair
from .errors import NumericError

# central finite-difference steps for linearize_truth
_H_ALPHA = 1e-4
_H_QTILDE = 1e-5
_H_DELTA_E = 1e-4


@dataclass(frozen=True)
class CoefficientDerivatives:
    """Nondimensional stability and control derivatives at one condition."""

    cm_alpha: float      # per rad
    cm_q_nd: float       # per unit qtilde
    cm_delta_e: float    # per rad
    cz_alpha: float      # per rad
    cz_delta_e: float    # per rad

    def cm_q_per_rad_s(self, cbar: float, u1: float) -> float:
        """Pitch-damping derivative per dimensional pitch rate (rad/s)."""
        return self.cm_q_nd * cbar / (2.0 * u1)


@dataclass(frozen=True)
class DimensionalDerivatives:
    """Dimensional longitudinal derivatives at one trim condition."""

    M_alpha: float       # 1/s^2
    M_q: float           # 1/s
    M_alphadot: float    # 1/s
    M_delta_e: float     # 1/s^2
    Z_alpha: float       # m/s^2 per rad
    Z_delta_e: float     # m/s^2 per rad
    U1: float            # m/s
    theta1: float = 0.0  # trim pitch attitude, rad

    def __post_init__(self):
        if not self.U1 > 0.0:
            raise NumericError(f"U1={self.U1} must be positive")


@dataclass(frozen=True)
class ShortPeriodResult:
    """Frequency/damping estimate; omega/zeta are None when non-oscillatory."""

    omega_sp: Optional[float]   # rad/s
    zeta_sp: Optional[float]    # -
    oscillatory: bool
    radicand: float             # omega_sp^2 candidate, sign diagnostic


def one_dof_short_period(m_alpha: float, m_alphadot: float) -> ShortPeriodResult:
    """Single-degree-of-freedom pitch approximation."""
    radicand = -m_alpha
    if radicand <= 0.0:
        return ShortPeriodResult(None, None, False, radicand)
    omega = math.sqrt(radicand)
    zeta = -m_alphadot / (2.0 * omega)
    return ShortPeriodResult(omega, zeta, True, radicand)


def two_dof_short_period(d: DimensionalDerivatives) -> ShortPeriodResult:
    """Two-degree-of-freedom (alpha, q) approximation."""
    radicand = d.Z_alpha * d.M_q / d.U1 - d.M_alpha
    if radicand <= 0.0:
        return ShortPeriodResult(None, None, False, radicand)
    omega = math.sqrt(radicand)
    zeta = -(d.M_q + d.Z_alpha / d.U1 + d.M_alphadot) / (2.0 * omega)
    return ShortPeriodResult(omega, zeta, True, radicand)


def short_period_with_mq_substitution(d: DimensionalDerivatives) -> ShortPeriodResult:
    """Two-DOF approximation with the M_alphadot := M_q/3 surrogate."""
    return two_dof_short_period(replace(d, M_alphadot=d.M_q / 3.0))


def short_period_matrix(d: DimensionalDerivatives) -> np.ndarray:
    """State matrix of the (alpha, q) system; eigenvalues give the mode."""
    return np.array([
        [d.Z_alpha / d.U1, 1.0],
        [d.M_alpha + d.M_alphadot * d.Z_alpha / d.U1, d.M_q + d.M_alphadot],
    ])


def short_period_from_eigenvalues(d: DimensionalDerivatives) -> ShortPeriodResult:
    """Mode extracted from the 2x2 state matrix eigenvalues.

    Serves as the independent route against the closed forms: for an
    oscillatory pair, omega = |lambda| and zeta = -Re(lambda)/|lambda|.
    """
    eig = np.linalg.eigvals(short_period_matrix(d))
    if abs(eig[0].imag) < 1e-300:
        return ShortPeriodResult(None, None, False,
                                 float(np.real(eig[0] * eig[1])))
    lam = eig[0]
    omega = abs(lam)
    return ShortPeriodResult(float(omega), float(-lam.real / omega), True,
                             float(omega * omega))


def alpha_transfer_function(d: DimensionalDerivatives):
    """Elevator-to-alpha transfer function of the two-DOF approximation.

    Returns (numerator, denominator) polynomial coefficients, highest
    degree first:

        num = [Z_de/U1, M_de - M_q*Z_de/U1]
        den = [1, -(M_q + Z_alpha/U1 + M_alphadot), Z_alpha*M_q/U1 - M_alpha]
    """
    num = np.array([d.Z_delta_e / d.U1,
                    d.M_delta_e - d.M_q * d.Z_delta_e / d.U1])
    den = np.array([1.0,
                    -(d.M_q + d.Z_alpha / d.U1 + d.M_alphadot),
                    d.Z_alpha * d.M_q / d.U1 - d.M_alpha])
    return num, den


def linearize_truth(models: AeroModelPair, alpha: float, delta_e: float,
                    qtilde: float = 0.0) -> CoefficientDerivatives:
    """Central finite-difference derivatives of a truth model pair at trim.

    Steps: 1e-4 rad in alpha and delta_e, 1e-5 in qtilde.  Evaluations skip
    the hull check so trim points near the hull boundary stay differentiable.
    """
    def central(model, var: int) -> float:
        h = (_H_ALPHA, _H_QTILDE, _H_DELTA_E)[var]
        lo = [alpha, qtilde, delta_e]
        hi = [alpha, qtilde, delta_e]
        lo[var] -= h
        hi[var] += h
        return (model.evaluate_vars(*hi, check_hull=False)
                - model.evaluate_vars(*lo, check_hull=False)) / (2.0 * h)

    return CoefficientDerivatives(
        cm_alpha=central(models.cm, 0),
        cm_q_nd=central(models.cm, 1),
        cm_delta_e=central(models.cm, 2),
        cz_alpha=central(models.cz, 0),
        cz_delta_e=central(models.cz, 2),
    )


def dimensionalize(c: CoefficientDerivatives, geom, qbar: float, u1: float,
                   mq_substitution: bool = False,
                   theta1: float = 0.0) -> DimensionalDerivatives:
    """Convert nondimensional derivatives to dimensional ones at a condition.

    The pitch-damping conversion folds the qtilde convention into M_q:
    M_q = Cm_q_nd * (cbar/(2*U1)) * qbar*S*cbar/Iy.  With mq_substitution
    the M_alphadot := M_q/3 surrogate is applied, otherwise M_alphadot = 0.
    """
    if qbar <= 0.0 or u1 <= 0.0:
        raise NumericError("qbar and u1 must be positive")
    moment_scale = qbar * geom.S * geom.cbar / geom.Iy
    force_scale = qbar * geom.S / geom.mass
    m_q = c.cm_q_nd * (geom.cbar / (2.0 * u1)) * moment_scale
    return DimensionalDerivatives(
        M_alpha=c.cm_alpha * moment_scale,
        M_q=m_q,
        M_alphadot=(m_q / 3.0) if mq_substitution else 0.0,
        M_delta_e=c.cm_delta_e * moment_scale,
        Z_alpha=c.cz_alpha * force_scale,
        Z_delta_e=c.cz_delta_e * force_scale,
        U1=u1,
        theta1=theta1,
    )
