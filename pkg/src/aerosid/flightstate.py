"""Core value types: the 8-dim flight state and aircraft geometry.

The identification state vector is fixed, in this order:

    [mach, rho, qbar, p, q, r, alpha, delta_e]

with rho in kg/m^3, qbar in Pa, body rates p/q/r in rad/s, alpha and
delta_e in rad.  Everything downstream (kernels, gradients, sweeps)
indexes into that convention.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

STATE_DIM = 8
STATE_NAMES = ("mach", "rho", "qbar", "p", "q", "r", "alpha", "delta_e")
IDX_MACH, IDX_RHO, IDX_QBAR, IDX_P, IDX_Q, IDX_R, IDX_ALPHA, IDX_DELTA_E = range(8)


@dataclass(frozen=True)
class FlightState:
    """One identification sample of the aircraft state."""

    mach: float        # -
    rho: float         # kg/m^3
    qbar: float        # Pa
    p: float           # rad/s
    q: float           # rad/s
    r: float           # rad/s
    alpha: float       # rad
    delta_e: float     # rad

    def __post_init__(self):
        if not self.rho > 0.0:
            raise ValueError(f"rho={self.rho} must be positive")
        if not self.qbar >= 0.0:
            raise ValueError(f"qbar={self.qbar} must be non-negative")
        if not self.mach >= 0.0:
            raise ValueError(f"mach={self.mach} must be non-negative")
        if not abs(self.alpha) < math.pi / 2:
            raise ValueError(f"alpha={self.alpha} must satisfy |alpha| < pi/2")
        for name in ("mach", "rho", "qbar", "p", "q", "r", "alpha", "delta_e"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"{name} must be finite")

    def as_vector(self) -> np.ndarray:
        """State as the fixed-order 8-vector."""
        return np.array([self.mach, self.rho, self.qbar, self.p, self.q,
                         self.r, self.alpha, self.delta_e])

    @staticmethod
    def from_vector(v) -> "FlightState":
        v = np.asarray(v, dtype=float)
        if v.shape != (STATE_DIM,):
            raise ValueError(f"state vector must have shape ({STATE_DIM},)")
        return FlightState(*v.tolist())

    @property
    def v_true(self) -> float:
        """True airspeed in m/s implied by qbar and rho."""
        return math.sqrt(2.0 * self.qbar / self.rho)


@dataclass(frozen=True)
class AircraftGeometry:
    """Mass and reference geometry of the simulated aircraft."""

    S: float          # wing reference area, m^2
    cbar: float       # mean aerodynamic chord, m
    mass: float       # kg
    Iy: float         # pitch inertia, kg m^2
    Ix: float = 0.0   # roll inertia, kg m^2
    Iz: float = 0.0   # yaw inertia, kg m^2
    Ixz: float = 0.0  # roll-yaw product of inertia, kg m^2
    cg_frac: float = 0.25  # cg position, fraction of cbar

    def __post_init__(self):
        for name in ("S", "cbar", "mass", "Iy"):
            if not getattr(self, name) > 0.0:
                raise ValueError(f"{name} must be positive")
