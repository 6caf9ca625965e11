"""Nonlinear longitudinal flight simulator (truth model + maneuver flying).

Three-degree-of-freedom body-axis equations of motion (V = P = R = phi = 0),
z axis positive down:

    u_dot = (qbar*S*Cx + T)/m - g*sin(theta) - q*w
    w_dot =  qbar*S*Cz/m      + g*cos(theta) + q*u
    q_dot =  qbar*S*cbar*Cm / Iy
    theta_dot = q
    h_dot = u*sin(theta) - w*cos(theta)

Cm and Cz come from a polynomial truth model; the axial closure is a
fixed-throttle thrust along body x plus a parabolic drag polar
Cx = -(cd0 + k*Cz^2), with thrust solved once at trim and held constant
through the maneuver.  Integration is fixed-step classical Runge-Kutta.

Everything the identification pipeline consumes is produced here: trim
solutions, rollercoaster and doublet maneuver records (with exact truth
channels retained), steady trim shots, and seeded measurement noise.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Callable, Optional, Sequence

import numpy as np

from . import atmosphere as atmo
from .aeromean import AeroModelPair
from .errors import DivergenceError, NoTrimError
from .flightdata import ManeuverRecord, TruthChannels
from .flightstate import AircraftGeometry, FlightState
from .lineardyn import linearize_truth

G = atmo.G0_MPS2

KIND_ROLLERCOASTER = "rollercoaster"
KIND_DOUBLET = "doublet"
KIND_TRIM_SHOT = "trim_shot"
_KINDS = (KIND_ROLLERCOASTER, KIND_DOUBLET, KIND_TRIM_SHOT)

DT_DEFAULT = 0.01          # s, integration and record step


@dataclass(frozen=True)
class TruthModel:
    """Aerodynamic truth: (Cm, Cz) polynomial pair plus axial closure."""

    models: AeroModelPair
    cd0: float = 0.020         # zero-lift drag coefficient
    k_induced: float = 0.12    # induced-drag factor on Cz^2

    def __post_init__(self):
        if self.cd0 < 0.0 or self.k_induced < 0.0:
            raise ValueError("drag closure coefficients must be non-negative")


@dataclass(frozen=True)
class SimState:
    """Simulator state: body velocities, pitch rate/attitude, altitude."""

    u: float       # body x velocity, m/s
    w: float       # body z velocity, m/s
    q: float       # pitch rate, rad/s
    theta: float   # pitch attitude, rad
    h: float       # geopotential altitude, m

    @property
    def alpha(self) -> float:
        return math.atan2(self.w, self.u)

    @property
    def v_true(self) -> float:
        return math.hypot(self.u, self.w)

    @property
    def rho(self) -> float:
        return atmo.density(self.h)

    @property
    def qbar(self) -> float:
        return 0.5 * self.rho * self.v_true ** 2

    @property
    def mach(self) -> float:
        return self.v_true / atmo.sound_speed(self.h)


@dataclass(frozen=True)
class NoiseSpec:
    """Additive Gaussian measurement noise, one sigma per channel group."""

    sigma_rate: float = 0.0      # p, q, r, rad/s
    sigma_alpha: float = 0.0     # rad
    sigma_delta_e: float = 0.0   # rad
    sigma_qbar: float = 0.0      # Pa
    seed: int = 0

    def __post_init__(self):
        for name in ("sigma_rate", "sigma_alpha", "sigma_delta_e", "sigma_qbar"):
            if getattr(self, name) < 0.0:
                raise ValueError(f"{name} must be non-negative")

    @property
    def silent(self) -> bool:
        return (self.sigma_rate == 0.0 and self.sigma_alpha == 0.0
                and self.sigma_delta_e == 0.0 and self.sigma_qbar == 0.0)


@dataclass(frozen=True)
class ManeuverSpec:
    """Declarative maneuver description consumed by fly()."""

    kind: str
    duration_s: float
    mach_target: float
    altitude_target_m: float
    g_low: float = 0.0           # rollercoaster load-factor floor, g
    g_high: float = 2.0          # rollercoaster load-factor ceiling, g
    g_rate: float = 0.5          # rollercoaster ramp rate, g/s
    de_amplitude: float = 0.01   # doublet elevator amplitude, rad
    de_period: float = 2.0       # doublet full period, s
    exc_amplitude: float = 0.0   # rollercoaster multisine elevator overlay, rad
    label: str = ""

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise ValueError(f"kind {self.kind!r} not one of {_KINDS}")
        if self.duration_s <= 0.0:
            raise ValueError("duration_s must be positive")
        if self.kind == KIND_ROLLERCOASTER:
            # equal bounds are allowed: the command degenerates to a hold
            if self.g_low > self.g_high:
                raise ValueError("need g_low <= g_high")
            if self.g_rate <= 0.0:
                raise ValueError("g_rate must be positive")
        if self.exc_amplitude < 0.0:
            raise ValueError("exc_amplitude must be non-negative")


@dataclass(frozen=True)
class TrimSolution:
    """Converged steady level-flight equilibrium."""

    state: SimState
    alpha: float        # rad
    delta_e: float      # rad
    thrust: float       # N
    residual: float     # max |(u_dot, w_dot, q_dot)| at the solution
    mach: float
    qbar: float         # Pa

    def flight_state(self) -> FlightState:
        return FlightState(
            mach=self.mach, rho=self.state.rho, qbar=self.qbar,
            p=0.0, q=0.0, r=0.0, alpha=self.alpha, delta_e=self.delta_e,
        )


@dataclass(frozen=True)
class TrimShot:
    """One steady-point measurement for the trim-function regression."""

    state: FlightState
    alpha_trim: float    # rad (same as state.alpha)
    delta_e_trim: float  # rad (same as state.delta_e)


# -- right-hand side ----------------------------------------------------------

def _make_coeff_eval(model):
    terms = tuple((t.theta, t.exp_alpha, t.exp_qtilde, t.exp_deltae)
                  for t in model.terms)

    def evaluate(alpha: float, qtilde: float, delta_e: float) -> float:
        total = 0.0
        for theta, a, b, c in terms:
            total += theta * alpha ** a * qtilde ** b * delta_e ** c
        return total

    return evaluate


class _Plant:
    """Bound truth model + geometry with a fast right-hand side."""

    def __init__(self, truth: TruthModel, geom: AircraftGeometry):
        self.truth = truth
        self.geom = geom
        self.cm = _make_coeff_eval(truth.models.cm)
        self.cz = _make_coeff_eval(truth.models.cz)
        self.cbar = geom.cbar
        self.S = geom.S
        self.mass = geom.mass
        self.Iy = geom.Iy
        self.cd0 = truth.cd0
        self.k_ind = truth.k_induced

    def derivs(self, u, w, q, theta, h, delta_e, thrust):
        """State derivatives plus the air-data extras used for recording."""
        v2 = u * u + w * w
        v = math.sqrt(v2)
        alpha = math.atan2(w, u)
        rho = atmo.density(h)
        qbar = 0.5 * rho * v2
        qtilde = q * self.cbar / (2.0 * v)
        cz = self.cz(alpha, qtilde, delta_e)
        cm = self.cm(alpha, qtilde, delta_e)
        cx = -(self.cd0 + self.k_ind * cz * cz)
        qbar_s = qbar * self.S
        sin_t, cos_t = math.sin(theta), math.cos(theta)
        u_dot = (qbar_s * cx + thrust) / self.mass - G * sin_t - q * w
        w_dot = qbar_s * cz / self.mass + G * cos_t + q * u
        q_dot = qbar_s * self.cbar * cm / self.Iy
        theta_dot = q
        h_dot = u * sin_t - w * cos_t
        return (u_dot, w_dot, q_dot, theta_dot, h_dot,
                alpha, v, rho, qbar, cz, cm)


# -- trim ---------------------------------------------------------------------

_TRIM_TOL = 1e-8
_TRIM_TARGET = 1e-12
_TRIM_MAX_ITER = 100


def solve_trim(truth: TruthModel, geom: AircraftGeometry, mach: float,
               altitude_m: float) -> TrimSolution:
    """Steady level-flight trim at a Mach/altitude condition.

    Solves (u_dot, w_dot, q_dot) = 0 for (alpha, delta_e, thrust) by damped
    Newton iteration with a finite-difference Jacobian; theta = alpha keeps
    h_dot = 0 identically.  Raises NoTrimError if the residual cannot be
    driven below 1e-8 within 100 iterations or the solution leaves the
    model hull.
    """
    plant = _Plant(truth, geom)
    v = mach * atmo.sound_speed(altitude_m)

    def residual(x):
        alpha, delta_e, thrust = x
        u = v * math.cos(alpha)
        w = v * math.sin(alpha)
        out = plant.derivs(u, w, 0.0, alpha, altitude_m, delta_e, thrust)
        return np.array(out[:3])

    x = np.array([0.02, 0.0, 0.03 * geom.mass * G])
    scale = np.array([1e-7, 1e-7, max(1.0, 1e-6 * geom.mass * G)])
    r = residual(x)
    best = float(np.max(np.abs(r)))
    for _ in range(_TRIM_MAX_ITER):
        if best <= _TRIM_TARGET:
            break
        jac = np.empty((3, 3))
        for j in range(3):
            dx = np.zeros(3)
            dx[j] = scale[j]
            jac[:, j] = (residual(x + dx) - residual(x - dx)) / (2.0 * scale[j])
        try:
            step = np.linalg.solve(jac, -r)
        except np.linalg.LinAlgError:
            raise NoTrimError("singular trim Jacobian", best) from None
        lam = 1.0
        improved = False
        for _ in range(12):
            x_new = x + lam * step
            r_new = residual(x_new)
            norm_new = float(np.max(np.abs(r_new)))
            if norm_new < best:
                x, r, best = x_new, r_new, norm_new
                improved = True
                break
            lam *= 0.5
        if not improved:
            break
    if best > _TRIM_TOL:
        raise NoTrimError(
            f"trim did not converge at M={mach:.3f}, h={altitude_m:.0f} m "
            f"(residual {best:.3e})", best)

    alpha, delta_e, thrust = (float(x[0]), float(x[1]), float(x[2]))
    hull = truth.models.hull
    if not hull.contains(alpha, 0.0, delta_e):
        raise NoTrimError(
            f"trim solution alpha={alpha:.4f}, delta_e={delta_e:.4f} "
            "outside model hull", best)
    if thrust < 0.0:
        raise NoTrimError(f"trim thrust {thrust:.1f} N negative", best)
    state = SimState(u=v * math.cos(alpha), w=v * math.sin(alpha), q=0.0,
                     theta=alpha, h=altitude_m)
    return TrimSolution(state=state, alpha=alpha, delta_e=delta_e,
                        thrust=thrust, residual=best, mach=state.mach,
                        qbar=state.qbar)


# -- integration --------------------------------------------------------------

class StepController:
    """Base for once-per-step digital controllers (zero-order-hold elevator)."""

    def command(self, t: float, nz: float, state: SimState) -> float:
        raise NotImplementedError


def integrate(truth: TruthModel, geom: AircraftGeometry, initial: SimState,
              elevator, thrust: float, duration_s: float,
              dt: float = DT_DEFAULT, record_stride: int = 1,
              label: str = "") -> ManeuverRecord:
    """Fixed-step RK4 integration producing a telemetry record.

    elevator is either a smooth time function t -> delta_e (evaluated at the
    RK4 stage times) or a StepController whose command is computed once per
    step from the measured load factor and held through the step.  Exact
    state derivatives and coefficient values are retained as truth channels.
    Raises DivergenceError when alpha leaves the model hull, qbar collapses,
    or altitude leaves the modeled atmosphere.
    """
    plant = _Plant(truth, geom)
    hull = truth.models.hull
    n_steps = int(round(duration_s / dt))
    if n_steps < 1:
        raise ValueError("duration shorter than one step")
    is_controller = isinstance(elevator, StepController)

    n_rec = n_steps // record_stride + 1
    rec = {name: np.empty(n_rec) for name in
           ("t", "mach", "rho", "qbar", "p", "q", "r", "alpha", "delta_e",
            "nz", "u_body", "w_body", "theta", "u_dot", "w_dot", "q_dot",
            "cm", "cz")}

    u, w, q, theta, h = (initial.u, initial.w, initial.q, initial.theta,
                         initial.h)
    mg = geom.mass * G
    delta_e_held = float(elevator.command(0.0, 1.0, initial)) if is_controller \
        else float(elevator(0.0))

    i_rec = 0
    for k in range(n_steps + 1):
        t = k * dt
        if is_controller:
            if k > 0:
                # controller reads the accelerometer with last step's surface
                d = plant.derivs(u, w, q, theta, h, delta_e_held, thrust)
                nz_meas = -d[8] * geom.S * d[9] / mg
                state_now = SimState(u=u, w=w, q=q, theta=theta, h=h)
                delta_e_held = float(elevator.command(t, nz_meas, state_now))
            de_t = delta_e_held
        else:
            de_t = float(elevator(t))

        d1 = plant.derivs(u, w, q, theta, h, de_t, thrust)
        alpha, v, rho, qbar = d1[5], d1[6], d1[7], d1[8]

        if not (hull.alpha[0] <= alpha <= hull.alpha[1]):
            raise DivergenceError(
                f"alpha={alpha:.4f} left the model hull at t={t:.2f} s", t)
        if qbar <= 0.0 or v < 1.0:
            raise DivergenceError(f"airspeed collapsed at t={t:.2f} s", t)
        if not (atmo.H_MIN_M < h < atmo.H_MAX_M):
            raise DivergenceError(f"altitude left modeled range at t={t:.2f} s", t)

        if k % record_stride == 0:
            j = i_rec
            rec["t"][j] = t
            rec["mach"][j] = v / atmo.sound_speed(h)
            rec["rho"][j] = rho
            rec["qbar"][j] = qbar
            rec["p"][j] = 0.0
            rec["q"][j] = q
            rec["r"][j] = 0.0
            rec["alpha"][j] = alpha
            rec["delta_e"][j] = de_t
            rec["nz"][j] = -qbar * geom.S * d1[9] / mg
            rec["u_body"][j] = u
            rec["w_body"][j] = w
            rec["theta"][j] = theta
            rec["u_dot"][j] = d1[0]
            rec["w_dot"][j] = d1[1]
            rec["q_dot"][j] = d1[2]
            rec["cm"][j] = d1[10]
            rec["cz"][j] = d1[9]
            i_rec += 1

        if k == n_steps:
            break

        # classical RK4; elevator sampled at stage times when time-driven
        de_mid = de_t if is_controller else float(elevator(t + 0.5 * dt))
        de_end = de_t if is_controller else float(elevator(t + dt))
        s1 = d1[:5]
        s2 = plant.derivs(u + 0.5 * dt * s1[0], w + 0.5 * dt * s1[1],
                          q + 0.5 * dt * s1[2], theta + 0.5 * dt * s1[3],
                          h + 0.5 * dt * s1[4], de_mid, thrust)[:5]
        s3 = plant.derivs(u + 0.5 * dt * s2[0], w + 0.5 * dt * s2[1],
                          q + 0.5 * dt * s2[2], theta + 0.5 * dt * s2[3],
                          h + 0.5 * dt * s2[4], de_mid, thrust)[:5]
        s4 = plant.derivs(u + dt * s3[0], w + dt * s3[1], q + dt * s3[2],
                          theta + dt * s3[3], h + dt * s3[4], de_end,
                          thrust)[:5]
        u += dt / 6.0 * (s1[0] + 2.0 * s2[0] + 2.0 * s3[0] + s4[0])
        w += dt / 6.0 * (s1[1] + 2.0 * s2[1] + 2.0 * s3[1] + s4[1])
        q += dt / 6.0 * (s1[2] + 2.0 * s2[2] + 2.0 * s3[2] + s4[2])
        theta += dt / 6.0 * (s1[3] + 2.0 * s2[3] + 2.0 * s3[3] + s4[3])
        h += dt / 6.0 * (s1[4] + 2.0 * s2[4] + 2.0 * s3[4] + s4[4])

    truth_ch = TruthChannels(
        mach=rec["mach"].copy(), rho=rec["rho"].copy(), qbar=rec["qbar"].copy(),
        p=rec["p"].copy(), q=rec["q"].copy(), r=rec["r"].copy(),
        alpha=rec["alpha"].copy(), delta_e=rec["delta_e"].copy(),
        nz=rec["nz"].copy(), u_body=rec["u_body"].copy(),
        w_body=rec["w_body"].copy(), theta=rec["theta"].copy(),
        u_dot=rec["u_dot"], w_dot=rec["w_dot"], q_dot=rec["q_dot"],
        cm=rec["cm"], cz=rec["cz"],
    )
    return ManeuverRecord(
        t=rec["t"], mach=rec["mach"], rho=rec["rho"], qbar=rec["qbar"],
        p=rec["p"], q=rec["q"], r=rec["r"], alpha=rec["alpha"],
        delta_e=rec["delta_e"], nz=rec["nz"], u_body=rec["u_body"],
        w_body=rec["w_body"], theta=rec["theta"], truth=truth_ch, label=label,
    )


# -- maneuvers ----------------------------------------------------------------

def _triangle_nz(t: float, g_low: float, g_high: float, g_rate: float) -> float:
    """Triangle-wave load-factor command starting from 1 g and rising."""
    up_first = g_high - 1.0
    leg = (g_high - g_low)
    if leg == 0.0:
        return g_high
    if t <= up_first / g_rate:
        return 1.0 + g_rate * t
    t2 = t - up_first / g_rate
    period = 2.0 * leg / g_rate
    phase = t2 % period
    if phase <= leg / g_rate:
        return g_high - g_rate * phase
    return g_low + g_rate * (phase - leg / g_rate)


# Multisine elevator overlay used to keep the pitch axis persistently excited
# during closed-loop maneuvers.  Frequencies bracket typical short-period
# frequencies; phases are staggered so the components never peak together.
EXC_FREQS_RADPS = (1.3, 2.1, 3.4, 5.5)
EXC_PHASES_RAD = (0.0, 1.9, 3.1, 4.7)


def multisine_overlay(t: float, amplitude: float) -> float:
    """Deterministic low-amplitude elevator excitation, rad."""
    if amplitude == 0.0:
        return 0.0
    s = 0.0
    for w, ph in zip(EXC_FREQS_RADPS, EXC_PHASES_RAD):
        s += math.sin(w * t + ph)
    return amplitude * s / len(EXC_FREQS_RADPS)


class _LoadFactorPI(StepController):
    """Static-inversion feedforward plus PI correction on load factor.

    The feedforward inverts the quasi-steady moment/force balance using the
    coefficient slopes frozen at the entry trim but rescaled by the current
    dynamic pressure, so it stays calibrated as energy bleeds off through
    the maneuver.  The commanded profile is tracked without phase advance:
    the corners of a triangle-wave command excite the pitch transient, and
    that transient is exactly what downstream identification feeds on.  An
    optional multisine overlay keeps the elevator moving between corners.
    Gains are fixed defaults, not science parameters.
    """

    KP = 0.25     # proportional gain, per g of error (normalized)
    KI = 1.20     # integral gain, per g-second (normalized)

    def __init__(self, truth: TruthModel, geom: AircraftGeometry,
                 trim: TrimSolution, nz_command: Callable[[float], float],
                 dt: float, exc_amplitude: float = 0.0):
        self.nz_command = nz_command
        self.dt = dt
        self.exc_amplitude = exc_amplitude
        self.de_min, self.de_max = truth.models.hull.delta_e
        c = linearize_truth(truth.models, trim.alpha, trim.delta_e)
        # quasi-steady Cz change per delta_e with the moment kept balanced
        cz_per_de = c.cz_delta_e - c.cz_alpha * c.cm_delta_e / c.cm_alpha
        self.mg = geom.mass * G
        self.S = geom.S
        self.cz_per_de = cz_per_de
        self.de_trim = trim.delta_e
        self.qbar_trim = trim.qbar
        self.e_int = 0.0

    def command(self, t: float, nz: float, state: SimState) -> float:
        nz_cmd = self.nz_command(t)
        qbar = max(state.qbar, 0.1 * self.qbar_trim)
        dnz_dde = -qbar * self.S * self.cz_per_de / self.mg    # g per rad
        # Cz needed for the commanded load factor at current qbar, vs trim Cz
        dcz = -(self.mg / self.S) * (nz_cmd / qbar - 1.0 / self.qbar_trim)
        de_ff = self.de_trim + dcz / self.cz_per_de
        e = nz_cmd - nz
        de = de_ff + (self.KP * e + self.KI * self.e_int) / dnz_dde
        de += multisine_overlay(t, self.exc_amplitude)
        if self.de_min < de < self.de_max:
            self.e_int += e * self.dt     # integrate only when unsaturated
        return min(max(de, self.de_min), self.de_max)


def fly_rollercoaster(truth: TruthModel, geom: AircraftGeometry,
                      spec: ManeuverSpec, noise: Optional[NoiseSpec] = None,
                      dt: float = DT_DEFAULT) -> ManeuverRecord:
    """Closed-loop triangle-wave load-factor sweep from trim."""
    trim = solve_trim(truth, geom, spec.mach_target, spec.altitude_target_m)
    controller = _LoadFactorPI(
        truth, geom, trim,
        lambda t: _triangle_nz(t, spec.g_low, spec.g_high, spec.g_rate), dt,
        exc_amplitude=spec.exc_amplitude)
    record = integrate(truth, geom, trim.state, controller, trim.thrust,
                       spec.duration_s, dt=dt,
                       label=spec.label or KIND_ROLLERCOASTER)
    return apply_noise(record, noise) if noise is not None else record


def doublet_elevator(de_trim: float, amplitude: float, period: float,
                     t_start: float = 1.0) -> Callable[[float], float]:
    """One-cycle sine elevator doublet riding on the trim setting."""
    def de(t: float) -> float:
        if t_start <= t < t_start + period:
            return de_trim + amplitude * math.sin(
                2.0 * math.pi * (t - t_start) / period)
        return de_trim
    return de


def fly_doublet(truth: TruthModel, geom: AircraftGeometry, spec: ManeuverSpec,
                noise: Optional[NoiseSpec] = None,
                dt: float = DT_DEFAULT) -> ManeuverRecord:
    """Open-loop elevator doublet from trim."""
    trim = solve_trim(truth, geom, spec.mach_target, spec.altitude_target_m)
    elevator = doublet_elevator(trim.delta_e, spec.de_amplitude, spec.de_period)
    record = integrate(truth, geom, trim.state, elevator, trim.thrust,
                       spec.duration_s, dt=dt, label=spec.label or KIND_DOUBLET)
    return apply_noise(record, noise) if noise is not None else record


def fly_trim_hold(truth: TruthModel, geom: AircraftGeometry, spec: ManeuverSpec,
                  noise: Optional[NoiseSpec] = None,
                  dt: float = DT_DEFAULT) -> ManeuverRecord:
    """Steady hold at trim (a recorded trim-shot maneuver)."""
    trim = solve_trim(truth, geom, spec.mach_target, spec.altitude_target_m)
    record = integrate(truth, geom, trim.state, lambda t: trim.delta_e,
                       trim.thrust, spec.duration_s, dt=dt,
                       label=spec.label or KIND_TRIM_SHOT)
    return apply_noise(record, noise) if noise is not None else record


def fly(truth: TruthModel, geom: AircraftGeometry, spec: ManeuverSpec,
        noise: Optional[NoiseSpec] = None,
        dt: float = DT_DEFAULT) -> ManeuverRecord:
    """Dispatch a maneuver spec to its flyer."""
    flyers = {KIND_ROLLERCOASTER: fly_rollercoaster, KIND_DOUBLET: fly_doublet,
              KIND_TRIM_SHOT: fly_trim_hold}
    return flyers[spec.kind](truth, geom, spec, noise, dt)


def fly_trim_shots(truth: TruthModel, geom: AircraftGeometry,
                   conditions: Sequence[tuple[float, float]],
                   noise: Optional[NoiseSpec] = None) -> list[TrimShot]:
    """Steady-point trim measurements at (mach, altitude_m) conditions.

    Noise perturbs the measured channels of each shot (alpha, delta_e, qbar,
    rates); the same seed reproduces the same shots bit for bit.
    """
    rng = np.random.default_rng(noise.seed) if noise is not None else None
    shots = []
    for mach, altitude_m in conditions:
        trim = solve_trim(truth, geom, mach, altitude_m)
        fs = trim.flight_state()
        if rng is not None and not noise.silent:
            fs = FlightState(
                mach=fs.mach, rho=fs.rho,
                qbar=fs.qbar + noise.sigma_qbar * rng.standard_normal(),
                p=noise.sigma_rate * rng.standard_normal(),
                q=noise.sigma_rate * rng.standard_normal(),
                r=noise.sigma_rate * rng.standard_normal(),
                alpha=fs.alpha + noise.sigma_alpha * rng.standard_normal(),
                delta_e=fs.delta_e + noise.sigma_delta_e * rng.standard_normal(),
            )
        shots.append(TrimShot(state=fs, alpha_trim=fs.alpha,
                              delta_e_trim=fs.delta_e))
    return shots


def apply_noise(record: ManeuverRecord, noise: NoiseSpec) -> ManeuverRecord:
    """Additive Gaussian noise on the measured channels, truth retained.

    Only the identification channels are perturbed (rates, alpha, delta_e,
    qbar); the kinematic channels used for Cz extraction stay exact.  Same
    seed, same record, bit for bit.
    """
    if record.truth is None:
        raise ValueError("apply_noise expects a record with truth channels")
    if noise.silent:
        return record
    rng = np.random.default_rng(noise.seed)
    n = record.n
    return ManeuverRecord(
        t=record.t,
        mach=record.mach, rho=record.rho,
        qbar=record.qbar + noise.sigma_qbar * rng.standard_normal(n),
        p=record.p + noise.sigma_rate * rng.standard_normal(n),
        q=record.q + noise.sigma_rate * rng.standard_normal(n),
        r=record.r + noise.sigma_rate * rng.standard_normal(n),
        alpha=record.alpha + noise.sigma_alpha * rng.standard_normal(n),
        delta_e=record.delta_e + noise.sigma_delta_e * rng.standard_normal(n),
        nz=record.nz, u_body=record.u_body, w_body=record.w_body,
        theta=record.theta, truth=record.truth, label=record.label,
    )
