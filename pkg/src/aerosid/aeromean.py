"""Polynomial aerodynamic coefficient models and the prior catalog.

A coefficient model is a sum of monomial terms in (alpha, qtilde, delta_e):

    C(alpha, qtilde, delta_e) = sum_i theta_i * alpha^a_i * qtilde^b_i * delta_e^c_i

where qtilde = Q*cbar/(2*V_true) is the nondimensional pitch rate.  The same
structure serves two roles: as the synthetic truth model flown by the
simulator, and as the physics prior mean of the Gaussian-process fits.

Each model carries a validity hull over (alpha, qtilde, delta_e).  Public
evaluation refuses out-of-hull queries outright; the Gaussian-process layer
evaluates with the hull check disabled because the posterior is allowed to
extrapolate (with growing uncertainty) where a bare polynomial is not
trusted.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

from .errors import HullError, ValidationError
from .flightstate import FlightState, AircraftGeometry

CHANNEL_CM = "Cm"
CHANNEL_CZ = "Cz"
_CHANNELS = (CHANNEL_CM, CHANNEL_CZ)

_VAR_NAMES = ("alpha", "qtilde", "delta_e")


@dataclass(frozen=True)
class AeroTerm:
    """One monomial term theta * alpha^ea * qtilde^eq * delta_e^ed."""

    theta: float
    exp_alpha: int
    exp_qtilde: int
    exp_deltae: int

    def __post_init__(self):
        for name in ("exp_alpha", "exp_qtilde", "exp_deltae"):
            e = getattr(self, name)
            if not isinstance(e, int) or e < 0:
                raise ValidationError(f"{name}={e!r} must be a non-negative integer")

    @property
    def exponents(self) -> tuple[int, int, int]:
        return (self.exp_alpha, self.exp_qtilde, self.exp_deltae)


@dataclass(frozen=True)
class Hull:
    """Axis-aligned validity box over (alpha, qtilde, delta_e), in rad / - / rad."""

    alpha: tuple[float, float] = (-0.17, 0.35)
    qtilde: tuple[float, float] = (-0.05, 0.05)
    delta_e: tuple[float, float] = (-0.30, 0.30)

    def __post_init__(self):
        for name in _VAR_NAMES:
            lo, hi = getattr(self, name)
            if not lo < hi:
                raise ValidationError(f"hull {name} bounds ({lo}, {hi}) need lo < hi")

    def contains(self, alpha: float, qtilde: float, delta_e: float) -> bool:
        return (
            self.alpha[0] <= alpha <= self.alpha[1]
            and self.qtilde[0] <= qtilde <= self.qtilde[1]
            and self.delta_e[0] <= delta_e <= self.delta_e[1]
        )

    def check(self, alpha: float, qtilde: float, delta_e: float) -> None:
        for name, v in zip(_VAR_NAMES, (alpha, qtilde, delta_e)):
            lo, hi = getattr(self, name)
            if not lo <= v <= hi:
                raise HullError(
                    f"{name}={v:.6g} outside validity hull [{lo:.6g}, {hi:.6g}]"
                )

    def center(self) -> tuple[float, float, float]:
        return tuple(0.5 * (getattr(self, n)[0] + getattr(self, n)[1]) for n in _VAR_NAMES)


@dataclass(frozen=True)
class GenericAeroModel:
    """Polynomial coefficient model for one channel (Cm or Cz).

    ref_chord_m is the reference chord the model's qtilde convention is
    defined with; it must match the geometry the model is flown against.
    """

    channel: str
    terms: tuple[AeroTerm, ...]
    hull: Hull = field(default_factory=Hull)
    ref_chord_m: float = 1.0

    def __post_init__(self):
        if self.channel not in _CHANNELS:
            raise ValidationError(f"channel {self.channel!r} not one of {_CHANNELS}")
        if not self.terms:
            raise ValidationError("model needs at least one term")
        if self.ref_chord_m <= 0.0:
            raise ValidationError("ref_chord_m must be positive")
        object.__setattr__(self, "terms", tuple(self.terms))
        seen = set()
        for t in self.terms:
            if t.exponents in seen:
                raise ValidationError(
                    f"duplicate term exponents alpha^{t.exp_alpha} "
                    f"qtilde^{t.exp_qtilde} delta_e^{t.exp_deltae}"
                )
            seen.add(t.exponents)

    # -- evaluation in (alpha, qtilde, delta_e) ------------------------------

    def evaluate_vars(self, alpha: float, qtilde: float, delta_e: float,
                      check_hull: bool = True) -> float:
        if check_hull:
            self.hull.check(alpha, qtilde, delta_e)
        total = 0.0
        for t in self.terms:
            total += t.theta * alpha ** t.exp_alpha * qtilde ** t.exp_qtilde \
                * delta_e ** t.exp_deltae
        return total

    def gradient_vars(self, alpha: float, qtilde: float, delta_e: float,
                      check_hull: bool = True) -> tuple[float, float, float]:
        """(d/dalpha, d/dqtilde, d/ddelta_e) of the polynomial."""
        if check_hull:
            self.hull.check(alpha, qtilde, delta_e)
        ga = gq = gd = 0.0
        for t in self.terms:
            a, b, c = t.exponents
            if a:
                ga += t.theta * a * alpha ** (a - 1) * qtilde ** b * delta_e ** c
            if b:
                gq += t.theta * b * alpha ** a * qtilde ** (b - 1) * delta_e ** c
            if c:
                gd += t.theta * c * alpha ** a * qtilde ** b * delta_e ** (c - 1)
        return ga, gq, gd


# -- projection from the 8-dim flight state ----------------------------------

def project_state(x: FlightState, ref_chord_m: float) -> tuple[float, float, float]:
    """Map a flight state to the model variables (alpha, qtilde, delta_e).

    qtilde = q * cbar / (2 * V_true) with V_true = sqrt(2*qbar/rho).
    """
    if x.qbar <= 0.0:
        raise ValueError("qtilde undefined at qbar <= 0")
    v_true = math.sqrt(2.0 * x.qbar / x.rho)
    qtilde = x.q * ref_chord_m / (2.0 * v_true)
    return x.alpha, qtilde, x.delta_e


def project_state_jacobian(x: FlightState, ref_chord_m: float):
    """3x8 Jacobian of (alpha, qtilde, delta_e) w.r.t. the state vector.

    State vector order: [mach, rho, qbar, p, q, r, alpha, delta_e].
    Only qtilde has off-axis partials: through q, rho and qbar (V_true is a
    function of rho and qbar; Mach does not enter this projection).
    """
    import numpy as np

    if x.qbar <= 0.0:
        raise ValueError("qtilde undefined at qbar <= 0")
    v_true = math.sqrt(2.0 * x.qbar / x.rho)
    jac = np.zeros((3, 8))
    jac[0, 6] = 1.0                                         # alpha
    jac[1, 1] = x.q * ref_chord_m / (4.0 * x.rho * v_true)  # d qtilde / d rho
    jac[1, 2] = -x.q * ref_chord_m / (4.0 * x.qbar * v_true)  # d qtilde / d qbar
    jac[1, 4] = ref_chord_m / (2.0 * v_true)                # d qtilde / d q
    jac[2, 7] = 1.0                                         # delta_e
    return jac


def evaluate(model: GenericAeroModel, x: FlightState) -> float:
    """Coefficient value at a flight state; refuses out-of-hull queries."""
    alpha, qtilde, delta_e = project_state(x, model.ref_chord_m)
    return model.evaluate_vars(alpha, qtilde, delta_e, check_hull=True)


def gradient(model: GenericAeroModel, x: FlightState) -> tuple[float, float, float]:
    """(dC/dalpha, dC/dqtilde, dC/ddelta_e) at a flight state, hull-checked."""
    alpha, qtilde, delta_e = project_state(x, model.ref_chord_m)
    return model.gradient_vars(alpha, qtilde, delta_e, check_hull=True)


@dataclass(frozen=True)
class AeroModelPair:
    """A matched (Cm, Cz) model pair sharing hull and reference chord."""

    cm: GenericAeroModel
    cz: GenericAeroModel

    def __post_init__(self):
        if self.cm.channel != CHANNEL_CM or self.cz.channel != CHANNEL_CZ:
            raise ValidationError("pair must be (Cm model, Cz model)")
        if self.cm.hull != self.cz.hull:
            raise ValidationError("Cm and Cz models must share a hull")
        if self.cm.ref_chord_m != self.cz.ref_chord_m:
            raise ValidationError("Cm and Cz models must share ref_chord_m")

    @property
    def hull(self) -> Hull:
        return self.cm.hull

    @property
    def ref_chord_m(self) -> float:
        return self.cm.ref_chord_m


@dataclass(frozen=True)
class PriorCatalogEntry:
    """Named prior: model pair plus the geometry it was defined for."""

    name: str
    models: AeroModelPair
    geometry: AircraftGeometry

    def __post_init__(self):
        if not self.name:
            raise ValidationError("prior entry needs a non-empty name")
        if not math.isclose(self.models.ref_chord_m, self.geometry.cbar,
                            rel_tol=1e-12):
            raise ValidationError(
                "model ref_chord_m and geometry cbar disagree "
                f"({self.models.ref_chord_m} vs {self.geometry.cbar})"
            )

    @property
    def cm_model(self) -> GenericAeroModel:
        return self.models.cm

    @property
    def cz_model(self) -> GenericAeroModel:
        return self.models.cz


# -- prior files --------------------------------------------------------------

_TERM_KEYS = {"theta", "exp_alpha", "exp_qtilde", "exp_deltae"}
_GEOM_KEYS = {"S_m2", "cbar_m", "mass_kg", "Iy_kgm2", "Ix_kgm2", "Iz_kgm2",
              "Ixz_kgm2", "cg_frac"}


def _reject_unknown(d: dict, allowed: set, where: str) -> None:
    unknown = set(d) - allowed
    if unknown:
        raise ValidationError(f"unknown field(s) {sorted(unknown)} in {where}")


def load_prior(path) -> PriorCatalogEntry:
    """Load a prior catalog entry from a JSON parameter file.

    Schema (strict; unknown fields are rejected):

        {
          "name": str,
          "geometry": {"S_m2", "cbar_m", "mass_kg", "Iy_kgm2",
                       "Ix_kgm2", "Iz_kgm2", "Ixz_kgm2", "cg_frac"},
          "hull": {"alpha": [lo, hi], "qtilde": [lo, hi], "delta_e": [lo, hi]},
          "models": [
            {"channel": "Cm"|"Cz",
             "terms": [{"theta", "exp_alpha", "exp_qtilde", "exp_deltae"}, ...]},
            ...
          ]
        }
    """
    try:
        with open(path) as f:
            raw = json.load(f)
    except json.JSONDecodeError as e:
        raise ValidationError(f"prior file {path} is not valid JSON: {e}") from None
    if not isinstance(raw, dict):
        raise ValidationError(f"prior file {path} must hold a JSON object")
    _reject_unknown(raw, {"name", "geometry", "hull", "models"}, "prior file")
    for key in ("name", "geometry", "hull", "models"):
        if key not in raw:
            raise ValidationError(f"prior file {path} missing field {key!r}")

    gd = raw["geometry"]
    _reject_unknown(gd, _GEOM_KEYS, "geometry")
    missing = _GEOM_KEYS - set(gd)
    if missing:
        raise ValidationError(f"geometry missing field(s) {sorted(missing)}")
    geometry = AircraftGeometry(
        S=float(gd["S_m2"]), cbar=float(gd["cbar_m"]), mass=float(gd["mass_kg"]),
        Iy=float(gd["Iy_kgm2"]), Ix=float(gd["Ix_kgm2"]), Iz=float(gd["Iz_kgm2"]),
        Ixz=float(gd["Ixz_kgm2"]), cg_frac=float(gd["cg_frac"]),
    )

    hd = raw["hull"]
    _reject_unknown(hd, set(_VAR_NAMES), "hull")
    try:
        hull = Hull(
            alpha=tuple(float(v) for v in hd["alpha"]),
            qtilde=tuple(float(v) for v in hd["qtilde"]),
            delta_e=tuple(float(v) for v in hd["delta_e"]),
        )
    except KeyError as e:
        raise ValidationError(f"hull missing field {e}") from None

    by_channel: dict[str, GenericAeroModel] = {}
    for md in raw["models"]:
        _reject_unknown(md, {"channel", "terms"}, "model block")
        channel = md.get("channel")
        if channel not in _CHANNELS:
            raise ValidationError(f"model channel {channel!r} not one of {_CHANNELS}")
        if channel in by_channel:
            raise ValidationError(f"duplicate model block for channel {channel}")
        terms = []
        for td in md.get("terms", []):
            _reject_unknown(td, _TERM_KEYS, f"{channel} term")
            missing = _TERM_KEYS - set(td)
            if missing:
                raise ValidationError(
                    f"{channel} term missing field(s) {sorted(missing)}")
            terms.append(AeroTerm(
                theta=float(td["theta"]),
                exp_alpha=int(td["exp_alpha"]),
                exp_qtilde=int(td["exp_qtilde"]),
                exp_deltae=int(td["exp_deltae"]),
            ))
        by_channel[channel] = GenericAeroModel(
            channel=channel, terms=tuple(terms), hull=hull,
            ref_chord_m=geometry.cbar,
        )
    for channel in _CHANNELS:
        if channel not in by_channel:
            raise ValidationError(f"prior file {path} missing {channel} model")

    pair = AeroModelPair(cm=by_channel[CHANNEL_CM], cz=by_channel[CHANNEL_CZ])
    return PriorCatalogEntry(name=str(raw["name"]), models=pair, geometry=geometry)


def save_prior(entry: PriorCatalogEntry, path) -> None:
    """Write a prior catalog entry in the load_prior schema."""
    g = entry.geometry
    doc = {
        "name": entry.name,
        "geometry": {
            "S_m2": g.S, "cbar_m": g.cbar, "mass_kg": g.mass, "Iy_kgm2": g.Iy,
            "Ix_kgm2": g.Ix, "Iz_kgm2": g.Iz, "Ixz_kgm2": g.Ixz,
            "cg_frac": g.cg_frac,
        },
        "hull": {
            "alpha": list(entry.models.hull.alpha),
            "qtilde": list(entry.models.hull.qtilde),
            "delta_e": list(entry.models.hull.delta_e),
        },
        "models": [
            {
                "channel": m.channel,
                "terms": [
                    {"theta": t.theta, "exp_alpha": t.exp_alpha,
                     "exp_qtilde": t.exp_qtilde, "exp_deltae": t.exp_deltae}
                    for t in m.terms
                ],
            }
            for m in (entry.models.cm, entry.models.cz)
        ],
    }
    with open(path, "w") as f:
        json.dump(doc, f, indent=2)
        f.write("\n")


def shipped_prior_path(name: str):
    """Path of a prior JSON shipped with the package ('truthlike', 'wrongprior')."""
    from importlib import resources

    ref = resources.files("aerosid").joinpath(f"priors/{name}.json")
    if not ref.is_file():
        raise ValidationError(f"no shipped prior named {name!r}")
    return ref


def load_shipped_prior(name: str) -> PriorCatalogEntry:
    from importlib import resources

    ref = shipped_prior_path(name)
    with resources.as_file(ref) as p:
        return load_prior(p)
