"""Standard-atmosphere model (troposphere and lower stratosphere).

All altitudes are geopotential metres.  Properties follow the standard
lapse-rate atmosphere: linear temperature lapse to 11 km, isothermal to
20 km.  That range covers the flight envelope of the trainer-class
aircraft this package simulates; queries beyond it raise ValueError
rather than extrapolate silently.
"""

import math

from .errors import NumericError

# Standard sea-level state and gas constants (SI).
T0_K = 288.15
P0_PA = 101325.0
RHO0_KGPM3 = 1.225
LAPSE_KPM = 0.0065        # troposphere temperature lapse rate
R_JPKGK = 287.05287       # specific gas constant, dry air
GAMMA = 1.4               # ratio of specific heats
G0_MPS2 = 9.80665

H_TROPOPAUSE_M = 11000.0
H_MAX_M = 20000.0
H_MIN_M = -2000.0

_T11 = T0_K - LAPSE_KPM * H_TROPOPAUSE_M
_P11 = P0_PA * (_T11 / T0_K) ** (G0_MPS2 / (LAPSE_KPM * R_JPKGK))


def _check_altitude(h_m: float) -> None:
    if not (H_MIN_M <= h_m <= H_MAX_M):
        raise ValueError(
            f"altitude {h_m:.1f} m outside modeled range "
            f"[{H_MIN_M:.0f}, {H_MAX_M:.0f}] m"
        )


def temperature(h_m: float) -> float:
    """Static air temperature in K at geopotential altitude h_m."""
    _check_altitude(h_m)
    if h_m <= H_TROPOPAUSE_M:
        return T0_K - LAPSE_KPM * h_m
    return _T11


def pressure(h_m: float) -> float:
    """Static pressure in Pa at geopotential altitude h_m."""
    _check_altitude(h_m)
    if h_m <= H_TROPOPAUSE_M:
        t = T0_K - LAPSE_KPM * h_m
        return P0_PA * (t / T0_K) ** (G0_MPS2 / (LAPSE_KPM * R_JPKGK))
    return _P11 * math.exp(-G0_MPS2 * (h_m - H_TROPOPAUSE_M) / (R_JPKGK * _T11))


def density(h_m: float) -> float:
    """Air density in kg/m^3 at geopotential altitude h_m (ideal gas)."""
    return pressure(h_m) / (R_JPKGK * temperature(h_m))


def sound_speed(h_m: float) -> float:
    """Speed of sound in m/s at geopotential altitude h_m."""
    return math.sqrt(GAMMA * R_JPKGK * temperature(h_m))


def density_from_pressure_oat(pressure_altitude_m: float, oat_k: float) -> float:
    """Density from pressure altitude and measured outside air temperature.

    Static pressure is taken from the standard atmosphere at the pressure
    altitude; density then follows from the ideal gas law with the actual
    temperature.
    """
    if oat_k <= 0.0:
        raise ValueError(f"outside air temperature {oat_k} K must be positive")
    return pressure(pressure_altitude_m) / (R_JPKGK * oat_k)


def density_altitude(rho_kgpm3: float) -> float:
    """Geopotential altitude in m at which the standard density equals rho.

    Density is strictly decreasing with altitude, so the inverse is found
    by bisection over the modeled range.
    """
    if rho_kgpm3 <= 0.0:
        raise NumericError(f"density {rho_kgpm3} kg/m^3 must be positive")
    lo, hi = H_MIN_M, H_MAX_M
    if rho_kgpm3 > density(lo) or rho_kgpm3 < density(hi):
        raise NumericError(
            f"density {rho_kgpm3:.4f} kg/m^3 outside modeled altitude range"
        )
    for _ in range(80):
        mid = 0.5 * (lo + hi)
        if density(mid) > rho_kgpm3:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def altitude_for_qbar_mach(qbar_pa: float, mach: float) -> float:
    """Altitude at which flight at the given Mach gives dynamic pressure qbar.

    Uses qbar = 0.5*gamma*p(h)*M^2, monotone decreasing in h, solved by
    bisection.
    """
    if qbar_pa <= 0.0 or mach <= 0.0:
        raise NumericError("qbar and mach must be positive")
    target_p = 2.0 * qbar_pa / (GAMMA * mach * mach)
    if target_p > pressure(H_MIN_M) or target_p < pressure(H_MAX_M):
        raise NumericError(
            f"no modeled altitude gives qbar={qbar_pa:.0f} Pa at M={mach:.2f}"
        )
    lo, hi = H_MIN_M, H_MAX_M
    for _ in range(80):
        mid = 0.5 * (lo + hi)
        if pressure(mid) > target_p:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)
