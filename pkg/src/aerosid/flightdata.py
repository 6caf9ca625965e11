"""Maneuver telemetry: records, CSV ingest/export, coefficient extraction.

The extraction step inverts the longitudinal rigid-body equations to turn
recorded motion into per-sample aerodynamic coefficient targets:

    Cm = (Iy*q_dot + (Ix - Iz)*p*r + Ixz*(p^2 - r^2)) / (qbar*S*cbar)
    Cz = m*(w_dot + p*v - q*u - g*cos(theta)*cos(phi)) / (qbar*S)

with v = 0 and phi = 0 for longitudinal flight.  The angular and vertical
accelerations are not measured; they come from a window-5 degree-2 local
polynomial fit of the recorded q and w channels (one-sided stencils at the
ends).  The quadratic fit suppresses measurement noise much better than
raw differencing at the cost of an O(h^2) bias on higher-order signal
content.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, fields
from typing import Optional

import numpy as np

from . import units as units_mod
from .atmosphere import G0_MPS2, density_from_pressure_oat
from .errors import (
    DegenerateSampleError,
    FormatError,
    InsufficientDataError,
    SchemaError,
)
from .flightstate import AircraftGeometry, FlightState

_MEASURED = ("mach", "rho", "qbar", "p", "q", "r", "alpha", "delta_e")
_OPTIONAL = ("nz", "u_body", "w_body", "theta")
_SPACING_TOL = 0.10


@dataclass(frozen=True)
class TruthChannels:
    """Exact simulator channels retained alongside (possibly noisy) telemetry.

    These exist so tests can oracle against the truth; nothing in the
    fitting path reads them.
    """

    mach: np.ndarray
    rho: np.ndarray
    qbar: np.ndarray
    p: np.ndarray
    q: np.ndarray
    r: np.ndarray
    alpha: np.ndarray
    delta_e: np.ndarray
    nz: np.ndarray
    u_body: np.ndarray
    w_body: np.ndarray
    theta: np.ndarray
    u_dot: np.ndarray      # exact du/dt, m/s^2
    w_dot: np.ndarray      # exact dw/dt, m/s^2
    q_dot: np.ndarray      # exact dq/dt, rad/s^2
    cm: np.ndarray         # truth-model Cm along the trajectory
    cz: np.ndarray         # truth-model Cz along the trajectory

    def sliced(self, idx) -> "TruthChannels":
        return TruthChannels(**{f.name: getattr(self, f.name)[idx]
                                for f in fields(self)})


@dataclass(frozen=True)
class ManeuverRecord:
    """Uniformly sampled telemetry for one maneuver.

    Timestamps must be strictly increasing with spacing within 10% of the
    median spacing (decimation keeps endpoints, so one boundary gap may sit
    exactly at that limit).
    """

    t: np.ndarray
    mach: np.ndarray
    rho: np.ndarray
    qbar: np.ndarray
    p: np.ndarray
    q: np.ndarray
    r: np.ndarray
    alpha: np.ndarray
    delta_e: np.ndarray
    nz: Optional[np.ndarray] = None
    u_body: Optional[np.ndarray] = None
    w_body: Optional[np.ndarray] = None
    theta: Optional[np.ndarray] = None
    truth: Optional[TruthChannels] = None
    label: str = ""

    def __post_init__(self):
        t = np.asarray(self.t, dtype=float)
        object.__setattr__(self, "t", t)
        n = t.size
        if n < 1:
            raise FormatError("record needs at least one sample")
        for name in _MEASURED + _OPTIONAL:
            arr = getattr(self, name)
            if arr is None:
                continue
            arr = np.asarray(arr, dtype=float)
            object.__setattr__(self, name, arr)
            if arr.shape != (n,):
                raise FormatError(
                    f"channel {name} length {arr.shape} != time length {n}")
        if np.any(np.abs(self.alpha) >= math.pi / 2):
            bad = int(np.argmax(np.abs(self.alpha) >= math.pi / 2))
            raise FormatError(
                f"alpha={self.alpha[bad]:.3f} rad at sample {bad} outside "
                "|alpha| < pi/2")
        if np.any(self.rho <= 0.0):
            bad = int(np.argmax(self.rho <= 0.0))
            raise FormatError(f"non-positive rho at sample {bad}")
        if n >= 2:
            dt = np.diff(t)
            if np.any(dt <= 0.0):
                raise FormatError("timestamps must be strictly increasing")
            med = float(np.median(dt))
            # one boundary gap may land exactly on the 10% limit
            if np.any(np.abs(dt - med) > _SPACING_TOL * med * (1.0 + 1e-9)):
                raise FormatError(
                    "timestamp spacing deviates more than 10% from median")
        if self.truth is not None and self.truth.alpha.shape != (n,):
            raise FormatError("truth channel length mismatch")

    @property
    def n(self) -> int:
        return self.t.size

    @property
    def duration(self) -> float:
        return float(self.t[-1] - self.t[0])

    def state_at(self, i: int) -> FlightState:
        return FlightState(
            mach=float(self.mach[i]), rho=float(self.rho[i]),
            qbar=float(self.qbar[i]), p=float(self.p[i]), q=float(self.q[i]),
            r=float(self.r[i]), alpha=float(self.alpha[i]),
            delta_e=float(self.delta_e[i]),
        )

    @property
    def states(self) -> list[FlightState]:
        return [self.state_at(i) for i in range(self.n)]

    def state_matrix(self) -> np.ndarray:
        """All samples as an (n, 8) matrix in the fixed state-vector order."""
        return np.column_stack([self.mach, self.rho, self.qbar, self.p,
                                self.q, self.r, self.alpha, self.delta_e])


@dataclass(frozen=True)
class CoefficientSample:
    """One GP training sample: state x, coefficient target y, channel tag."""

    x: FlightState
    y: float
    channel: str


# -- differentiation ----------------------------------------------------------

def local_poly_derivative(t: np.ndarray, y: np.ndarray, window: int = 5,
                          degree: int = 2) -> np.ndarray:
    """First time derivative of y by local least-squares polynomial fits.

    For each sample a degree-2 polynomial is fitted over a 5-sample window
    (centered in the interior, one-sided at the ends) using the actual
    timestamps, and its slope at the sample is returned.  Windows are built
    in local time tau = t - t_i so the normal equations stay conditioned.
    """
    t = np.asarray(t, dtype=float)
    y = np.asarray(y, dtype=float)
    n = t.size
    if n < window:
        raise InsufficientDataError(
            f"differentiation needs at least {window} samples, got {n}")
    half = window // 2
    starts = np.clip(np.arange(n) - half, 0, n - window)
    cols = starts[:, None] + np.arange(window)[None, :]
    tau = t[cols] - t[:, None]                      # (n, window)
    yw = y[cols]                                    # (n, window)
    # Vandermonde per window: (n, window, degree+1)
    powers = np.arange(degree + 1)
    vand = tau[:, :, None] ** powers[None, None, :]
    ata = np.einsum("nwi,nwj->nij", vand, vand)
    aty = np.einsum("nwi,nw->ni", vand, yw)
    coef = np.linalg.solve(ata, aty[:, :, None])[:, :, 0]
    return coef[:, 1]


# -- extraction ---------------------------------------------------------------

def _check_extractable(record: ManeuverRecord) -> None:
    if record.n < 5:
        raise InsufficientDataError(
            f"coefficient extraction needs >= 5 samples, got {record.n}")
    if np.any(record.qbar <= 0.0):
        bad = int(np.argmax(record.qbar <= 0.0))
        raise DegenerateSampleError(
            f"non-positive qbar at sample {bad} (t={record.t[bad]:.3f} s)")


def extract_cm_values(record: ManeuverRecord, geom: AircraftGeometry) -> np.ndarray:
    """Per-sample pitching-moment coefficient from the pitch equation."""
    _check_extractable(record)
    q_dot = local_poly_derivative(record.t, record.q)
    moment = (geom.Iy * q_dot
              + (geom.Ix - geom.Iz) * record.p * record.r
              + geom.Ixz * (record.p ** 2 - record.r ** 2))
    return moment / (record.qbar * geom.S * geom.cbar)


def extract_cz_values(record: ManeuverRecord, geom: AircraftGeometry) -> np.ndarray:
    """Per-sample body-z force coefficient from the heave equation."""
    _check_extractable(record)
    for name in ("u_body", "w_body", "theta"):
        if getattr(record, name) is None:
            raise SchemaError(f"Cz extraction needs channel {name}")
    w_dot = local_poly_derivative(record.t, record.w_body)
    accel = w_dot - record.q * record.u_body - G0_MPS2 * np.cos(record.theta)
    return geom.mass * accel / (record.qbar * geom.S)


def _package(record: ManeuverRecord, y: np.ndarray,
             channel: str) -> list[CoefficientSample]:
    return [CoefficientSample(x=record.state_at(i), y=float(y[i]), channel=channel)
            for i in range(record.n)]


def extract_cm(record: ManeuverRecord,
               geom: AircraftGeometry) -> list[CoefficientSample]:
    """Pitching-moment training samples extracted from one record."""
    return _package(record, extract_cm_values(record, geom), "Cm")


def extract_cz(record: ManeuverRecord,
               geom: AircraftGeometry) -> list[CoefficientSample]:
    """Z-force training samples extracted from one record."""
    return _package(record, extract_cz_values(record, geom), "Cz")


# -- decimation ---------------------------------------------------------------

def decimate(record: ManeuverRecord, max_points: int) -> ManeuverRecord:
    """Uniform-stride subsample keeping the first and last samples.

    The stride is ceil(n / max_points); if the final sample does not land
    on the stride grid it is appended, so the result may hold max_points+1
    samples.
    """
    if max_points < 2:
        raise ValueError("max_points must be at least 2")
    n = record.n
    if n <= max_points:
        return record
    stride = math.ceil(n / max_points)
    idx = np.arange(0, n, stride)
    if idx[-1] != n - 1:
        idx = np.append(idx, n - 1)
    kwargs = {"t": record.t[idx], "label": record.label}
    for name in _MEASURED + _OPTIONAL:
        arr = getattr(record, name)
        kwargs[name] = None if arr is None else arr[idx]
    kwargs["truth"] = None if record.truth is None else record.truth.sliced(idx)
    return ManeuverRecord(**kwargs)


def decimate_samples(samples: list, max_points: int) -> list:
    """Uniform-stride subsample of a coefficient-sample list.

    Same index policy as decimate(): stride ceil(n / max_points), first
    sample always kept, last sample appended if it misses the stride grid.
    Extraction should run on the full-rate record first (the derivative
    stencils need dense time support); this trims the resulting samples to
    a fit-sized set.
    """
    if max_points < 2:
        raise ValueError("max_points must be at least 2")
    n = len(samples)
    if n <= max_points:
        return list(samples)
    stride = math.ceil(n / max_points)
    idx = list(range(0, n, stride))
    if idx[-1] != n - 1:
        idx.append(n - 1)
    return [samples[i] for i in idx]


# -- CSV schema ---------------------------------------------------------------

# canonical export column -> (channel, SI unit tag)
CANONICAL_COLUMNS = {
    "time_s": ("time", "s"),
    "mach": ("mach", "-"),
    "rho_kgpm3": ("rho", "kg/m3"),
    "qbar_pa": ("qbar", "pa"),
    "p_radps": ("p", "rad/s"),
    "q_radps": ("q", "rad/s"),
    "r_radps": ("r", "rad/s"),
    "alpha_rad": ("alpha", "rad"),
    "delta_e_rad": ("delta_e", "rad"),
    "nz_g": ("nz", "g"),
    "u_body_mps": ("u_body", "m/s"),
    "w_body_mps": ("w_body", "m/s"),
    "theta_rad": ("theta", "rad"),
}
CANONICAL_COLUMN_MAP = {col: ch for col, (ch, _) in CANONICAL_COLUMNS.items()}
CANONICAL_UNITS = {col: u for col, (_, u) in CANONICAL_COLUMNS.items()}

_MANDATORY_CHANNELS = ("time", "mach", "qbar", "p", "q", "r", "alpha", "delta_e")

_TRUTH_PREFIX = "truth_"


def export_csv(record: ManeuverRecord, path) -> None:
    """Write a record in the canonical SI schema at 17 significant digits.

    Truth channels, when present, are written as truth_-prefixed columns so
    an exported record reloads completely.
    """
    cols: list[tuple[str, np.ndarray]] = [("time_s", record.t)]
    for col, (ch, _) in CANONICAL_COLUMNS.items():
        if ch == "time":
            continue
        arr = getattr(record, ch)
        if arr is not None:
            cols.append((col, arr))
    if record.truth is not None:
        for f in fields(TruthChannels):
            cols.append((_TRUTH_PREFIX + f.name, getattr(record.truth, f.name)))
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow([c for c, _ in cols])
        arrays = [a for _, a in cols]
        for i in range(record.n):
            w.writerow([f"{a[i]:.17g}" for a in arrays])


def _read_csv_columns(path) -> dict[str, np.ndarray]:
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise FormatError(f"{path}: empty file") from None
        header = [h.strip() for h in header]
        rows = []
        for lineno, row in enumerate(reader, start=2):
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) != len(header):
                raise FormatError(f"{path}:{lineno}: expected {len(header)} cells")
            try:
                rows.append([float(c) for c in row])
            except ValueError as e:
                raise FormatError(f"{path}:{lineno}: non-numeric cell ({e})") from None
    if not rows:
        raise FormatError(f"{path}: no data rows")
    data = np.asarray(rows, dtype=float)
    return {name: data[:, j] for j, name in enumerate(header)}


def ingest_csv(path, column_map: dict[str, str],
               units: dict[str, str]) -> ManeuverRecord:
    """Read telemetry from a CSV file into a ManeuverRecord.

    column_map maps CSV column names to canonical channel names (time, mach,
    rho, qbar, p, q, r, alpha, delta_e, nz, u_body, w_body, theta,
    pressure_altitude, oat); units maps CSV column names to unit tags.
    Density may be given directly (rho) or derived from pressure_altitude
    plus oat via the standard atmosphere and the ideal gas law.
    """
    raw = _read_csv_columns(path)
    channels: dict[str, np.ndarray] = {}
    for col, channel in column_map.items():
        if col not in raw:
            raise SchemaError(f"{path}: mapped column {col!r} not in file")
        unit = units.get(col)
        if unit is None:
            raise SchemaError(f"no unit declared for column {col!r}")
        vals = raw[col]
        channels[channel] = np.array([units_mod.convert(v, unit) for v in vals])

    if "rho" not in channels:
        if "pressure_altitude" in channels and "oat" in channels:
            channels["rho"] = np.array([
                density_from_pressure_oat(h, t)
                for h, t in zip(channels["pressure_altitude"], channels["oat"])
            ])
        else:
            raise SchemaError(
                "need either a rho column or pressure_altitude plus oat")
    missing = [ch for ch in _MANDATORY_CHANNELS if ch not in channels]
    if missing:
        raise SchemaError(f"{path}: missing mandatory channel(s) {missing}")

    t = channels["time"]
    if t.size >= 2 and np.any(np.diff(t) <= 0.0):
        raise FormatError(f"{path}: time column must be strictly increasing")

    truth = None
    truth_cols = {name[len(_TRUTH_PREFIX):]: arr for name, arr in raw.items()
                  if name.startswith(_TRUTH_PREFIX)}
    if truth_cols:
        expected = {f.name for f in fields(TruthChannels)}
        if set(truth_cols) == expected:
            truth = TruthChannels(**truth_cols)

    return ManeuverRecord(
        t=t,
        mach=channels["mach"], rho=channels["rho"], qbar=channels["qbar"],
        p=channels["p"], q=channels["q"], r=channels["r"],
        alpha=channels["alpha"], delta_e=channels["delta_e"],
        nz=channels.get("nz"), u_body=channels.get("u_body"),
        w_body=channels.get("w_body"), theta=channels.get("theta"),
        truth=truth,
    )


def read_record_csv(path) -> ManeuverRecord:
    """Read a record written by export_csv (canonical schema, SI units).

    Optional canonical columns (nz, body velocities, theta) are mapped only
    when present in the file header.
    """
    with open(path, newline="") as fh:
        header = [h.strip() for h in next(csv.reader(fh))]
    colmap = {c: ch for c, ch in CANONICAL_COLUMN_MAP.items() if c in header}
    unitmap = {c: u for c, u in CANONICAL_UNITS.items() if c in header}
    return ingest_csv(path, colmap, unitmap)
