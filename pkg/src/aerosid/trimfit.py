"""Empirical trim functions regressed from steady-point flight data.

Steady "trim shots" record the angle of attack and stabilator deflection
that hold level flight at one dynamic pressure.  Across a Mach bucket those
points collapse onto two smooth curves,

    alpha_trim(qbar)   = a * exp(-b * qbar)
    delta_e_trim(qbar) = c + d * ln(qbar)

and fitting (a, b, c, d) per bucket turns a handful of shots into a trim
state generator: any dynamic pressure inside the fitted domain yields a
full zero-rate flight state suitable for differentiating a posterior
surface at trim.

The alpha curve is fitted in two stages: a log-linear least-squares pass
(exact if the data are exactly exponential) seeds one Gauss-Newton step on
the original residuals, which removes the log-transform's noise bias
without a full iterative solver.  The delta_e curve is plain linear least
squares in ln(qbar).

Units: qbar enters ln() in pascals, recorded on the type, since the d
coefficient is meaningless without the convention.  Converting a fit to
another unit system shifts c by d*ln(unit ratio).
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from typing import Iterable, Sequence, Union

import numpy as np

from . import atmosphere as atmo
from .dynsim import TrimShot
from .errors import (
    DegenerateDesignError,
    ExtrapolationError,
    InsufficientDataError,
    LogDomainError,
    ValidationError,
)
from .flightdata import ManeuverRecord
from .flightstate import FlightState

__all__ = [
    "DEFAULT_MACH_BUCKETS",
    "TrimFunctions",
    "TrimPoint",
    "extract_trim_shots",
    "fit_trim_functions",
    "read_trim_shots_csv",
    "trim_state",
    "write_trim_shots_csv",
]

# Mach ranges for the default bucketing: low / moderate / high subsonic and
# low supersonic, each a +/-0.1 band around its center.
DEFAULT_MACH_BUCKETS = ((0.4, 0.6), (0.6, 0.8), (0.8, 1.0), (0.98, 1.18))

# Fractional overhang beyond the fitted qbar domain that trim_state accepts.
EXTRAPOLATION_FRACTION = 0.20

TRIM_QBAR_UNITS = "Pa"


@dataclass(frozen=True)
class TrimFunctions:
    """Fitted trim curves for one Mach bucket.

    alpha_trim(qbar) = a*exp(-b*qbar), delta_e_trim(qbar) = c + d*ln(qbar),
    with qbar in the units named by qbar_units (always pascals here).
    """

    a: float                          # rad
    b: float                          # 1/Pa
    c: float                          # rad
    d: float                          # rad per ln(Pa)
    mach_bucket: tuple[float, float]  # (lo, hi), dimensionless
    qbar_domain: tuple[float, float]  # (min, max) of fitted shots, Pa
    alpha_rms: float                  # rad, residual rms of the alpha fit
    delta_e_rms: float                # rad, residual rms of the delta_e fit
    n_shots: int
    qbar_units: str = TRIM_QBAR_UNITS

    def __post_init__(self):
        if not self.a > 0.0:
            raise ValidationError(f"trim function requires a > 0, got {self.a}")
        if not self.qbar_domain[0] > 0.0:
            raise ValidationError("qbar domain must be positive")
        if self.qbar_units != TRIM_QBAR_UNITS:
            raise ValidationError(
                f"ln(qbar) convention is {TRIM_QBAR_UNITS}, got {self.qbar_units!r}")

    def alpha_trim(self, qbar: float) -> float:
        """Trim angle of attack, rad.  No domain check; see trim_state."""
        return self.a * math.exp(-self.b * qbar)

    def delta_e_trim(self, qbar: float) -> float:
        """Trim stabilator deflection, rad.  No domain check; see trim_state."""
        return self.c + self.d * math.log(qbar)


@dataclass(frozen=True)
class TrimPoint:
    """Zero-rate flight state at a queried trim condition."""

    state: FlightState
    U1: float             # trim airspeed, m/s
    theta1: float = 0.0   # trim pitch attitude, rad

    def __post_init__(self):
        if self.state.p != 0.0 or self.state.q != 0.0 or self.state.r != 0.0:
            raise ValidationError("trim point must have zero body rates")


ShotLike = Union[TrimShot, tuple]


def _shot_fields(shot: ShotLike) -> tuple[FlightState, float, float]:
    if isinstance(shot, TrimShot):
        return shot.state, shot.alpha_trim, shot.delta_e_trim
    state, alpha, delta_e = shot
    return state, float(alpha), float(delta_e)


def _fit_alpha(qbar: np.ndarray, alpha: np.ndarray) -> tuple[float, float, float]:
    """Two-stage exponential fit; returns (a, b, residual rms)."""
    if np.any(alpha <= 0.0):
        bad = float(alpha[alpha <= 0.0][0])
        raise LogDomainError(
            f"alpha_trim sample {bad} is not positive; exponential trim "
            "function is fit in log space")
    # stage 1: ln(alpha) = ln(a) - b*qbar, ordinary least squares
    design = np.column_stack([np.ones_like(qbar), -qbar])
    coef, *_ = np.linalg.lstsq(design, np.log(alpha), rcond=None)
    a, b = math.exp(coef[0]), coef[1]
    # stage 2: one Gauss-Newton step on the untransformed residuals
    model = a * np.exp(-b * qbar)
    resid = alpha - model
    jac = np.column_stack([model / a, -qbar * model])
    step, *_ = np.linalg.lstsq(jac, resid, rcond=None)
    a, b = a + float(step[0]), b + float(step[1])
    rms = float(np.sqrt(np.mean((alpha - a * np.exp(-b * qbar)) ** 2)))
    return a, b, rms


def _fit_delta_e(qbar: np.ndarray, delta_e: np.ndarray) -> tuple[float, float, float]:
    """Log-linear fit; returns (c, d, residual rms)."""
    design = np.column_stack([np.ones_like(qbar), np.log(qbar)])
    coef, *_ = np.linalg.lstsq(design, delta_e, rcond=None)
    c, d = float(coef[0]), float(coef[1])
    rms = float(np.sqrt(np.mean((delta_e - (c + d * np.log(qbar))) ** 2)))
    return c, d, rms


def fit_trim_functions(
    shots: Sequence[ShotLike],
    buckets: Sequence[tuple[float, float]] = DEFAULT_MACH_BUCKETS,
) -> list[TrimFunctions]:
    """Regress per-bucket trim curves from steady-point shots.

    Shots are grouped by Mach into the given (lo, hi) buckets; a shot falls
    in every bucket whose range contains its Mach, so overlapping buckets
    are allowed.  Buckets that catch no shots are skipped silently; buckets
    with one or two shots are an error, since neither curve is regressable
    from fewer than three points.
    """
    if not shots:
        raise InsufficientDataError("no trim shots supplied")
    parsed = [_shot_fields(s) for s in shots]
    for state, _, _ in parsed:
        if not state.qbar > 0.0:
            raise ValidationError(f"trim shot needs qbar > 0, got {state.qbar}")

    fitted = []
    for lo, hi in buckets:
        members = [(s, al, de) for s, al, de in parsed if lo <= s.mach <= hi]
        if not members:
            continue
        if len(members) < 3:
            raise InsufficientDataError(
                f"Mach bucket ({lo}, {hi}) has {len(members)} trim shots; "
                "need at least 3")
        qbar = np.array([s.qbar for s, _, _ in members])
        alpha = np.array([al for _, al, _ in members])
        delta_e = np.array([de for _, _, de in members])
        if np.ptp(qbar) <= 1e-12 * float(np.max(qbar)):
            raise DegenerateDesignError(
                f"Mach bucket ({lo}, {hi}): all shots share qbar="
                f"{float(qbar[0]):.6g} Pa; cannot regress trim curves")
        a, b, alpha_rms = _fit_alpha(qbar, alpha)
        c, d, delta_e_rms = _fit_delta_e(qbar, delta_e)
        fitted.append(TrimFunctions(
            a=a, b=b, c=c, d=d,
            mach_bucket=(float(lo), float(hi)),
            qbar_domain=(float(np.min(qbar)), float(np.max(qbar))),
            alpha_rms=alpha_rms, delta_e_rms=delta_e_rms,
            n_shots=len(members),
        ))
    return fitted


def trim_state(tf: TrimFunctions, qbar: float, rho: float) -> TrimPoint:
    """Full zero-rate flight state at (qbar, rho) from fitted trim curves.

    Refuses queries outside the fitted qbar domain stretched by 20% on each
    side, and refuses trim functions whose alpha curve is not monotonically
    decreasing (b <= 0), which signals a fit on unsuitable data.
    """
    if not rho > 0.0:
        raise ValidationError(f"rho must be positive, got {rho}")
    if tf.b <= 0.0:
        raise ValidationError(
            f"fitted b={tf.b:.3g} <= 0: alpha_trim is not decreasing in qbar, "
            "refusing to query this bucket")
    lo, hi = tf.qbar_domain
    lo_ext = lo * (1.0 - EXTRAPOLATION_FRACTION)
    hi_ext = hi * (1.0 + EXTRAPOLATION_FRACTION)
    if not lo_ext <= qbar <= hi_ext:
        raise ExtrapolationError(
            f"qbar={qbar:.6g} Pa outside fitted domain [{lo:.6g}, {hi:.6g}] "
            f"(+/-{EXTRAPOLATION_FRACTION:.0%} overhang)")
    u1 = math.sqrt(2.0 * qbar / rho)
    mach = u1 / atmo.sound_speed(atmo.density_altitude(rho))
    state = FlightState(
        mach=mach, rho=rho, qbar=qbar, p=0.0, q=0.0, r=0.0,
        alpha=tf.alpha_trim(qbar), delta_e=tf.delta_e_trim(qbar),
    )
    return TrimPoint(state=state, U1=u1)


# -- steady-window extraction --------------------------------------------------

STEADY_WINDOW_S = 5.0
STEADY_RATE_RADPS = 0.005


def extract_trim_shots(record: ManeuverRecord,
                       window_s: float = STEADY_WINDOW_S,
                       rate_limit: float = STEADY_RATE_RADPS) -> list[TrimShot]:
    """Detect steady windows in a record and average each into a trim shot.

    A window qualifies when every body-rate magnitude stays below the limit
    for the full duration; qualifying windows are taken greedily from the
    start and do not overlap.  Each shot is the channel mean over its
    window with rates forced to zero.
    """
    t = record.t
    steady = (np.abs(record.p) < rate_limit) & (np.abs(record.q) < rate_limit) \
        & (np.abs(record.r) < rate_limit)
    shots = []
    i = 0
    n = record.n
    while i < n:
        if not steady[i]:
            i += 1
            continue
        j = i
        while j + 1 < n and steady[j + 1]:
            j += 1
        # carve as many disjoint windows as fit inside [t[i], t[j]]
        k = i
        while t[j] - t[k] >= window_s:
            end = int(np.searchsorted(t, t[k] + window_s, side="left"))
            end = min(end, j)
            sl = slice(k, end + 1)
            shots.append(_window_shot(record, sl))
            k = end + 1
            if k > j:
                break
        i = j + 1
    return shots


def _window_shot(record: ManeuverRecord, sl: slice) -> TrimShot:
    state = FlightState(
        mach=float(np.mean(record.mach[sl])),
        rho=float(np.mean(record.rho[sl])),
        qbar=float(np.mean(record.qbar[sl])),
        p=0.0, q=0.0, r=0.0,
        alpha=float(np.mean(record.alpha[sl])),
        delta_e=float(np.mean(record.delta_e[sl])),
    )
    return TrimShot(state=state, alpha_trim=state.alpha,
                    delta_e_trim=state.delta_e)


# -- trim-shot CSV ---------------------------------------------------------------

_SHOT_COLUMNS = ("mach", "rho_kgpm3", "qbar_pa", "alpha_rad", "delta_e_rad")


def write_trim_shots_csv(path, shots: Iterable[ShotLike]) -> None:
    """One row per shot, SI units, fixed header."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(_SHOT_COLUMNS)
        for shot in shots:
            state, alpha, delta_e = _shot_fields(shot)
            writer.writerow([repr(state.mach), repr(state.rho),
                             repr(state.qbar), repr(alpha), repr(delta_e)])


def read_trim_shots_csv(path) -> list[TrimShot]:
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or tuple(h.strip() for h in header) != _SHOT_COLUMNS:
            raise ValidationError(
                f"trim-shot CSV must have header {', '.join(_SHOT_COLUMNS)}")
        shots = []
        for row in reader:
            if not row:
                continue
            if len(row) != len(_SHOT_COLUMNS):
                raise ValidationError(
                    f"trim-shot CSV row has {len(row)} fields, expected "
                    f"{len(_SHOT_COLUMNS)}")
            mach, rho, qbar, alpha, delta_e = map(float, row)
            state = FlightState(mach=mach, rho=rho, qbar=qbar,
                                p=0.0, q=0.0, r=0.0,
                                alpha=alpha, delta_e=delta_e)
            shots.append(TrimShot(state=state, alpha_trim=alpha,
                                  delta_e_trim=delta_e))
    return shots
