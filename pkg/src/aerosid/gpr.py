"""Gaussian-process regression with a physics polynomial mean.

The GP input is the 8-dimensional flight state [mach, rho, qbar, p, q, r,
alpha, delta_e]; the target is one aerodynamic coefficient channel.  The
mean function is a polynomial coefficient model evaluated in physical units
through the fixed state -> (alpha, qtilde, delta_e) projection, so the GP
learns deviations from physics rather than the surface itself.

Two kernels are supported.  The default neural-network kernel

    k(x, x') = asin( x.x' / sqrt((1 + |x|^2/2) (1 + |x'|^2/2)) )

is non-stationary and parameter-free but scale-sensitive: its diagonal
argument |x|^2 / (1 + |x|^2/2) crosses 1 once |x|^2 > 2, outside asin's
domain.  Inputs are therefore standardized per dimension and then shrunk by
a common factor chosen so every training point sits at squared radius
well below 2 (dimensions that are constant in the training data are passed
through unscaled and uncentered).  The squared-exponential kernel
sigma^2 * exp(-sum((dz/ell)^2)/2) is the stationary baseline; its
hyperparameters apply in the same standardized coordinates.

Posterior mean, variance, and the analytic posterior-mean gradient (chained
back to physical units) are exact dense-Cholesky computations.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass
from typing import Optional, Sequence, Union

import numpy as np
from scipy.linalg import cho_solve, cholesky
from scipy.ndimage import median_filter

from .aeromean import (
    AeroTerm,
    GenericAeroModel,
    Hull,
    project_state,
    project_state_jacobian,
)
from .errors import (
    ConditioningError,
    InsufficientDataError,
    NumericError,
    ValidationError,
)
from .flightdata import CoefficientSample
from .flightstate import STATE_DIM, FlightState

log = logging.getLogger(__name__)

KERNEL_NN = "nn"
KERNEL_SE = "se"
_KERNEL_ALIASES = {
    "nn": KERNEL_NN, "neuralnetwork": KERNEL_NN, "neural_network": KERNEL_NN,
    "se": KERNEL_SE, "squaredexponential": KERNEL_SE,
    "squared_exponential": KERNEL_SE,
}

_ASIN_TOL = 1e-12      # clamp tolerance on the asin argument
_NN_RADIUS_SQ_MAX = 2.0   # asin domain bound on the standardized squared radius

CHECKPOINT_VERSION = 1


@dataclass(frozen=True)
class KernelSpec:
    """Kernel choice plus squared-exponential hyperparameters.

    length_scales and signal_variance apply to the SE kernel only and live
    in standardized coordinates; the NN kernel is parameter-free.
    """

    kind: str
    length_scales: Union[float, Sequence[float]] = 1.0
    signal_variance: float = 1.0

    def __post_init__(self):
        key = str(self.kind).replace("-", "_").lower()
        if key not in _KERNEL_ALIASES:
            raise ValidationError(
                f"unknown kernel kind {self.kind!r}; expected one of "
                f"{sorted(set(_KERNEL_ALIASES.values()))}")
        object.__setattr__(self, "kind", _KERNEL_ALIASES[key])
        ell = np.atleast_1d(np.asarray(self.length_scales, dtype=float))
        if ell.size not in (1, STATE_DIM):
            raise ValidationError(
                f"length_scales needs 1 or {STATE_DIM} entries, got {ell.size}")
        if not np.all(ell > 0.0):
            raise ValidationError("length_scales must be strictly positive")
        if not self.signal_variance > 0.0:
            raise ValidationError("signal_variance must be strictly positive")
        object.__setattr__(self, "length_scales", tuple(float(v) for v in ell))

    def ell_vector(self) -> np.ndarray:
        ell = np.asarray(self.length_scales, dtype=float)
        if ell.size == 1:
            ell = np.full(STATE_DIM, ell[0])
        return ell


@dataclass(frozen=True)
class Standardizer:
    """Per-dimension affine map z = (x - shift) / scale used by the kernel.

    Retained dimensions are centered on the training mean and divided by
    their training standard deviation times a common shrink factor that
    keeps every standardized point inside the NN kernel's domain.
    Dimensions constant in the training data get shift 0 and scale 1
    (identity passthrough) and are flagged in `constant`.
    """

    shift: tuple
    scale: tuple
    constant: tuple

    _STD_FLOOR_REL = 1e-12

    def __post_init__(self):
        for name in ("shift", "scale", "constant"):
            v = tuple(getattr(self, name))
            if len(v) != STATE_DIM:
                raise ValidationError(f"{name} needs {STATE_DIM} entries")
            object.__setattr__(self, name, v)
        if not all(s > 0.0 for s in self.scale):
            raise ValidationError("standardizer scales must be positive")

    # squared-radius budget split between constant passthrough dimensions
    # and the standardized retained dimensions; their sum must stay below
    # the NN kernel's domain bound of 2
    _CONST_BUDGET = 0.9
    _RETAINED_BUDGET = 0.85

    @classmethod
    def from_data(cls, X: np.ndarray) -> "Standardizer":
        X = np.asarray(X, dtype=float)
        mu = X.mean(axis=0)
        sd = X.std(axis=0)
        constant = sd <= cls._STD_FLOOR_REL * np.maximum(1.0, np.abs(mu))
        n_ret = int(np.count_nonzero(~constant))

        # constant dimensions pass through uncentered so they keep carrying
        # their raw value into the kernel (a pure bias direction), shrunk
        # uniformly only if their raw norm alone would leave the kernel's
        # domain
        const_norm2 = float(np.sum(mu[constant] ** 2))
        const_factor = 1.0
        if const_norm2 > cls._CONST_BUDGET:
            const_factor = np.sqrt(const_norm2 / cls._CONST_BUDGET)
        const_used = min(const_norm2, cls._CONST_BUDGET)

        shift = np.where(constant, 0.0, mu)
        if n_ret == 0:
            scale = np.where(constant, const_factor, 1.0)
            return cls(shift=tuple(shift), scale=tuple(scale),
                       constant=tuple(bool(c) for c in constant))
        # retained dimensions: unit-variance standardization shrunk by a
        # common factor c putting the mean squared radius near 0.5, floored
        # so the farthest training point stays inside the remaining budget
        z_unit = (X[:, ~constant] - mu[~constant]) / sd[~constant]
        r_max = float(np.sqrt(np.max(np.sum(z_unit ** 2, axis=1))))
        room = max(cls._RETAINED_BUDGET,
                   _NN_RADIUS_SQ_MAX - 0.2 - const_used)
        c = max(np.sqrt(2.0 * n_ret), r_max / np.sqrt(room))
        scale = np.where(constant, const_factor, sd * c)
        return cls(shift=tuple(shift), scale=tuple(scale),
                   constant=tuple(bool(v) for v in constant))

    @classmethod
    def identity(cls) -> "Standardizer":
        return cls(shift=tuple(np.zeros(STATE_DIM)),
                   scale=tuple(np.ones(STATE_DIM)),
                   constant=tuple([True] * STATE_DIM))

    def transform(self, X: np.ndarray) -> np.ndarray:
        X = np.asarray(X, dtype=float)
        return (X - np.asarray(self.shift)) / np.asarray(self.scale)

    def gradient_chain(self) -> np.ndarray:
        """d z_d / d x_d, the per-dimension chain-rule factors."""
        return 1.0 / np.asarray(self.scale)


# -- kernel internals (standardized coordinates) -------------------------------

def _check_nn_radius(Z: np.ndarray, what: str) -> None:
    r2 = np.sum(np.asarray(Z) ** 2, axis=-1)
    worst = float(np.max(r2)) if r2.size else 0.0
    if worst >= _NN_RADIUS_SQ_MAX:
        raise NumericError(
            f"{what} standardized squared radius {worst:.3f} >= 2, outside "
            "the neural-network kernel domain; the query is too far from "
            "the training envelope")


def _asin_arg(arg: np.ndarray) -> np.ndarray:
    worst = float(np.max(np.abs(arg))) if np.size(arg) else 0.0
    if worst > 1.0 + _ASIN_TOL:
        raise NumericError(
            f"neural-network kernel argument {worst:.15g} outside [-1, 1] "
            "beyond clamp tolerance")
    return np.clip(arg, -1.0, 1.0)


def _nn_gram(Z: np.ndarray) -> np.ndarray:
    d = 1.0 + 0.5 * np.sum(Z ** 2, axis=1)
    arg = (Z @ Z.T) / np.sqrt(np.outer(d, d))
    return np.arcsin(_asin_arg(arg))


def _nn_cross(Zq: np.ndarray, Zt: np.ndarray) -> np.ndarray:
    dq = 1.0 + 0.5 * np.sum(Zq ** 2, axis=1)
    dt = 1.0 + 0.5 * np.sum(Zt ** 2, axis=1)
    arg = (Zq @ Zt.T) / np.sqrt(np.outer(dq, dt))
    return np.arcsin(_asin_arg(arg))


def _nn_diag(Zq: np.ndarray) -> np.ndarray:
    r2 = np.sum(Zq ** 2, axis=1)
    return np.arcsin(_asin_arg(r2 / (1.0 + 0.5 * r2)))


def _se_cross(Zq: np.ndarray, Zt: np.ndarray, ell: np.ndarray,
              s2: float) -> np.ndarray:
    d = (Zq[:, None, :] - Zt[None, :, :]) / ell
    return s2 * np.exp(-0.5 * np.sum(d ** 2, axis=2))


def kernel_eval(spec: KernelSpec, x, x_prime) -> float:
    """Raw kernel value between two 8-vectors, exactly as given.

    No standardization is applied here; fitted models standardize before
    calling the same formulas.
    """
    x = np.asarray(x, dtype=float).reshape(-1)
    xp = np.asarray(x_prime, dtype=float).reshape(-1)
    if x.shape != xp.shape:
        raise ValidationError("kernel_eval inputs must have matching shape")
    if not (np.all(np.isfinite(x)) and np.all(np.isfinite(xp))):
        raise ValidationError("kernel_eval inputs must be finite")
    if spec.kind == KERNEL_NN:
        d1 = 1.0 + 0.5 * float(x @ x)
        d2 = 1.0 + 0.5 * float(xp @ xp)
        arg = float(x @ xp) / np.sqrt(d1 * d2)
        return float(np.arcsin(_asin_arg(np.asarray(arg))))
    if len(spec.length_scales) == 1:
        ell = np.full(x.size, spec.length_scales[0])
    elif len(spec.length_scales) == x.size:
        ell = np.asarray(spec.length_scales)
    else:
        raise ValidationError(
            f"length_scales has {len(spec.length_scales)} entries but the "
            f"inputs have {x.size}")
    d = (x - xp) / ell
    return float(spec.signal_variance * np.exp(-0.5 * float(d @ d)))


# -- the model -----------------------------------------------------------------

_JITTER_START_REL = 1e-10
_JITTER_RETRIES = 3


@dataclass
class GpModel:
    """Fitted (or zero-data prior) Gaussian process for one channel.

    Treat instances as immutable: every field is set at fit time and
    queries never mutate, so a model is safe to share across threads.
    """

    kernel: KernelSpec
    mean_model: Optional[GenericAeroModel]
    standardizer: Standardizer
    channel: str
    X: np.ndarray          # (n, 8) raw training inputs
    Z: np.ndarray          # (n, 8) standardized training inputs
    y: np.ndarray          # (n,) training targets
    resid: np.ndarray      # (n,) y - m(X)
    A: np.ndarray          # (n,) (K + nu I)^-1 (y - m(X))
    chol: np.ndarray       # (n, n) lower factor of K + nu I + jitter I
    nu: float
    jitter: float

    # ---- construction --------------------------------------------------------

    @classmethod
    def prior(cls, kernel: KernelSpec, mean_model: Optional[GenericAeroModel],
              channel: str) -> "GpModel":
        """Zero-data model: posterior mean/gradient equal the prior's."""
        empty = np.empty((0, STATE_DIM))
        return cls(kernel=kernel, mean_model=mean_model,
                   standardizer=Standardizer.identity(), channel=channel,
                   X=empty, Z=empty, y=np.empty(0), resid=np.empty(0),
                   A=np.empty(0), chol=np.empty((0, 0)), nu=0.0, jitter=0.0)

    @property
    def n(self) -> int:
        return self.X.shape[0]

    # ---- mean function -------------------------------------------------------

    def _ref_chord(self) -> float:
        return self.mean_model.ref_chord_m if self.mean_model is not None else 1.0

    def _mean_values(self, X: np.ndarray) -> np.ndarray:
        if self.mean_model is None:
            return np.zeros(X.shape[0])
        out = np.empty(X.shape[0])
        for i, row in enumerate(X):
            a, qt, de = project_state(FlightState.from_vector(row),
                                      self._ref_chord())
            out[i] = self.mean_model.evaluate_vars(a, qt, de, check_hull=False)
        return out

    # ---- kernel dispatch -----------------------------------------------------

    def _cross(self, Zq: np.ndarray) -> np.ndarray:
        if self.kernel.kind == KERNEL_NN:
            return _nn_cross(Zq, self.Z)
        return _se_cross(Zq, self.Z, self.kernel.ell_vector(),
                         self.kernel.signal_variance)

    def _diag(self, Zq: np.ndarray) -> np.ndarray:
        if self.kernel.kind == KERNEL_NN:
            return _nn_diag(Zq)
        return np.full(Zq.shape[0], self.kernel.signal_variance)

    def _check_query(self, Zq: np.ndarray) -> None:
        if self.kernel.kind == KERNEL_NN and self.n > 0:
            _check_nn_radius(Zq, "query")

    # ---- queries -------------------------------------------------------------

    @staticmethod
    def _rows(x) -> np.ndarray:
        if isinstance(x, FlightState):
            return x.as_vector()[None, :]
        arr = np.asarray(x, dtype=float)
        return arr[None, :] if arr.ndim == 1 else arr

    def predict_mean(self, x) -> Union[float, np.ndarray]:
        """Posterior mean mu(x) = m(x) + k(x, X) A; scalar for one query."""
        Xq = self._rows(x)
        m = self._mean_values(Xq)
        if self.n > 0:
            Zq = self.standardizer.transform(Xq)
            self._check_query(Zq)
            m = m + self._cross(Zq) @ self.A
        return float(m[0]) if Xq.shape[0] == 1 else m

    def predict_variance(self, x) -> Union[float, np.ndarray]:
        """Posterior variance, clamped to 0 where round-off turns negative."""
        s2, _ = self.predict_variance_detail(x)
        return s2

    def predict_variance_detail(self, x):
        """(clamped variance, raw pre-clamp variance); raw is diagnostic."""
        Xq = self._rows(x)
        if self.n == 0:
            # prior variance: the kernel diagonal; with no data to set a
            # scale, the NN diagonal is reported at its supremum pi/2
            if self.kernel.kind == KERNEL_NN:
                raw = np.full(Xq.shape[0], np.pi / 2.0)
            else:
                raw = np.full(Xq.shape[0], self.kernel.signal_variance)
        else:
            Zq = self.standardizer.transform(Xq)
            self._check_query(Zq)
            kstar = self._cross(Zq)
            v = np.linalg.solve(self.chol, kstar.T)
            raw = self._diag(Zq) - np.sum(v ** 2, axis=0)
        clamped = np.maximum(raw, 0.0)
        n_neg = int(np.count_nonzero(raw < 0.0))
        if n_neg:
            log.warning("clamped %d negative posterior variance value(s); "
                        "worst %.3e", n_neg, float(raw.min()))
        if Xq.shape[0] == 1:
            return float(clamped[0]), float(raw[0])
        return clamped, raw

    def posterior_gradient(self, x) -> np.ndarray:
        """Analytic gradient of the posterior mean, physical input units.

        d mu/d x = d m/d x + sum_i A_i d k(x, x_i)/d x, with the mean
        differentiated through the state->(alpha, qtilde, delta_e)
        projection and the kernel term chained through the standardizer.
        """
        Xq = self._rows(x)
        if Xq.shape[0] != 1:
            raise ValidationError("posterior_gradient takes a single query")
        row = Xq[0]
        grad = np.zeros(STATE_DIM)
        if self.mean_model is not None:
            fs = FlightState.from_vector(row)
            a, qt, de = project_state(fs, self._ref_chord())
            ga, gq, gd = self.mean_model.gradient_vars(a, qt, de,
                                                       check_hull=False)
            jac = project_state_jacobian(fs, self._ref_chord())
            grad += jac.T @ np.array([ga, gq, gd])
        if self.n == 0:
            return grad
        z = self.standardizer.transform(row[None, :])[0]
        self._check_query(z[None, :])
        if self.kernel.kind == KERNEL_NN:
            d1 = 1.0 + 0.5 * float(z @ z)
            d2 = 1.0 + 0.5 * np.sum(self.Z ** 2, axis=1)
            s = self.Z @ z
            root = np.sqrt(d1 * d2)
            u = s / root
            du = (self.Z - np.outer(s / (2.0 * d1), z)) / root[:, None]
            dk = du / np.sqrt(np.maximum(1.0 - u ** 2, 1e-30))[:, None]
        else:
            ell = self.kernel.ell_vector()
            diff = (self.Z - z) / ell
            k = self.kernel.signal_variance * np.exp(
                -0.5 * np.sum(diff ** 2, axis=1))
            dk = k[:, None] * diff / ell
        grad_std = dk.T @ self.A
        grad += grad_std * self.standardizer.gradient_chain()
        return grad

    # ---- diagnostics ---------------------------------------------------------

    def fit_report(self) -> dict:
        """Read-only fit summary: size, conditioning, noise, jitter, residual."""
        out = {"n": self.n, "nu": self.nu, "jitter": self.jitter,
               "channel": self.channel, "kernel": self.kernel.kind}
        if self.n == 0:
            out["condition_estimate"] = 1.0
            out["training_residual_rms"] = 0.0
            return out
        d = np.diag(self.chol)
        out["condition_estimate"] = float((d.max() / d.min()) ** 2)
        pred = self.predict_mean(self.X)
        pred = np.atleast_1d(pred)
        out["training_residual_rms"] = float(
            np.sqrt(np.mean((self.y - pred) ** 2)))
        return out

    # ---- persistence ---------------------------------------------------------

    def save(self, path) -> None:
        """Checkpoint to a .npz archive; reload reproduces predictions exactly."""
        header = {
            "version": CHECKPOINT_VERSION,
            "channel": self.channel,
            "nu": self.nu,
            "jitter": self.jitter,
            "kernel": {
                "kind": self.kernel.kind,
                "length_scales": list(self.kernel.length_scales),
                "signal_variance": self.kernel.signal_variance,
            },
            "standardizer": {
                "shift": list(self.standardizer.shift),
                "scale": list(self.standardizer.scale),
                "constant": [bool(c) for c in self.standardizer.constant],
            },
            "mean_model": _mean_model_to_dict(self.mean_model),
        }
        with open(path, "wb") as fh:
            np.savez(fh, header=np.frombuffer(
                json.dumps(header).encode(), dtype=np.uint8),
                X=self.X, Z=self.Z, y=self.y, resid=self.resid, A=self.A,
                chol=self.chol)


def _mean_model_to_dict(m: Optional[GenericAeroModel]):
    if m is None:
        return None
    return {
        "channel": m.channel,
        "ref_chord_m": m.ref_chord_m,
        "hull": {"alpha": list(m.hull.alpha), "qtilde": list(m.hull.qtilde),
                 "delta_e": list(m.hull.delta_e)},
        "terms": [{"theta": t.theta, "exp_alpha": t.exp_alpha,
                   "exp_qtilde": t.exp_qtilde, "exp_deltae": t.exp_deltae}
                  for t in m.terms],
    }


def _mean_model_from_dict(d) -> Optional[GenericAeroModel]:
    if d is None:
        return None
    hull = Hull(alpha=tuple(d["hull"]["alpha"]),
                qtilde=tuple(d["hull"]["qtilde"]),
                delta_e=tuple(d["hull"]["delta_e"]))
    terms = tuple(AeroTerm(theta=float(t["theta"]),
                           exp_alpha=int(t["exp_alpha"]),
                           exp_qtilde=int(t["exp_qtilde"]),
                           exp_deltae=int(t["exp_deltae"]))
                  for t in d["terms"])
    return GenericAeroModel(channel=d["channel"], terms=terms, hull=hull,
                            ref_chord_m=float(d["ref_chord_m"]))


def load_checkpoint(path) -> GpModel:
    """Rebuild a GpModel from a .npz checkpoint written by GpModel.save."""
    with np.load(path) as z:
        header = json.loads(bytes(z["header"]).decode())
        if header.get("version") != CHECKPOINT_VERSION:
            raise ValidationError(
                f"checkpoint version {header.get('version')!r} not supported "
                f"(expected {CHECKPOINT_VERSION})")
        ks = header["kernel"]
        kernel = KernelSpec(kind=ks["kind"],
                            length_scales=ks["length_scales"],
                            signal_variance=ks["signal_variance"])
        sd = header["standardizer"]
        standardizer = Standardizer(shift=tuple(sd["shift"]),
                                    scale=tuple(sd["scale"]),
                                    constant=tuple(sd["constant"]))
        return GpModel(
            kernel=kernel,
            mean_model=_mean_model_from_dict(header["mean_model"]),
            standardizer=standardizer, channel=header["channel"],
            X=z["X"], Z=z["Z"], y=z["y"], resid=z["resid"], A=z["A"],
            chol=z["chol"], nu=float(header["nu"]),
            jitter=float(header["jitter"]),
        )


# -- fitting -------------------------------------------------------------------

def estimate_noise_variance(y: np.ndarray) -> float:
    """Default nu: variance of the high-frequency residual of the targets.

    The residual is the target minus its window-5 moving median, a cheap
    split of measurement noise from the smooth surface underneath.  Fewer
    than 5 samples give no frequency separation; returns 0 there.
    """
    y = np.asarray(y, dtype=float)
    if y.size < 5:
        return 0.0
    smooth = median_filter(y, size=5, mode="nearest")
    return float(np.var(y - smooth))


def fit_arrays(X: np.ndarray, y: np.ndarray,
               mean_model: Optional[GenericAeroModel], kernel: KernelSpec,
               nu: Optional[float] = None, channel: str = "Cm") -> GpModel:
    """Fit from raw arrays; see fit() for the sample-list front end."""
    X = np.atleast_2d(np.asarray(X, dtype=float))
    y = np.asarray(y, dtype=float).reshape(-1)
    if X.shape[0] != y.size:
        raise ValidationError(
            f"X has {X.shape[0]} rows but y has {y.size} entries")
    if X.shape[0] < 1:
        raise InsufficientDataError("fit requires at least one sample")
    if X.shape[1] != STATE_DIM:
        raise ValidationError(f"X needs {STATE_DIM} columns, got {X.shape[1]}")
    if not (np.all(np.isfinite(X)) and np.all(np.isfinite(y))):
        raise ValidationError("training data must be finite")
    if nu is None:
        nu = estimate_noise_variance(y)
    if nu < 0.0:
        raise ValidationError("nu must be non-negative")

    model_stub = GpModel.prior(kernel, mean_model, channel)
    m = model_stub._mean_values(X)
    resid = y - m

    standardizer = Standardizer.from_data(X)
    Z = standardizer.transform(X)
    if kernel.kind == KERNEL_NN:
        _check_nn_radius(Z, "training")
        K = _nn_gram(Z)
    else:
        K = _se_cross(Z, Z, kernel.ell_vector(), kernel.signal_variance)
    Ky = K + nu * np.eye(K.shape[0])

    mean_diag = float(np.trace(Ky)) / Ky.shape[0]
    jitters = [0.0] + [_JITTER_START_REL * 10 ** k * mean_diag
                       for k in range(_JITTER_RETRIES + 1)]
    L = None
    jitter_used = 0.0
    for j in jitters:
        try:
            L = cholesky(Ky + j * np.eye(Ky.shape[0]), lower=True)
            jitter_used = j
            break
        except np.linalg.LinAlgError:
            continue
    if L is None:
        smallest = float(np.linalg.eigvalsh(Ky)[0])
        raise ConditioningError(
            f"Gram matrix factorization failed after jitter escalation to "
            f"{jitters[-1]:.3e}; smallest pivot estimate {smallest:.3e}")

    A = cho_solve((L, True), resid)
    return GpModel(kernel=kernel, mean_model=mean_model,
                   standardizer=standardizer, channel=channel, X=X, Z=Z,
                   y=y, resid=resid, A=A, chol=L, nu=float(nu),
                   jitter=float(jitter_used))


def fit(samples: Sequence[CoefficientSample],
        mean_model: Optional[GenericAeroModel], kernel: KernelSpec,
        nu: Optional[float] = None) -> GpModel:
    """Fit a GP to coefficient samples from one channel.

    nu is the target noise variance; None estimates it from the samples'
    high-frequency content (estimate_noise_variance).  nu = 0 is permitted
    and relies on jitter escalation for conditioning.
    """
    samples = list(samples)
    if not samples:
        raise InsufficientDataError("fit requires at least one sample")
    channels = {s.channel for s in samples}
    if len(channels) != 1:
        raise ValidationError(
            f"samples mix channels {sorted(channels)}; fit one channel at "
            "a time")
    channel = samples[0].channel
    if mean_model is not None and mean_model.channel != channel:
        raise ValidationError(
            f"mean model channel {mean_model.channel} does not match "
            f"sample channel {channel}")
    X = np.array([s.x.as_vector() for s in samples])
    y = np.array([s.y for s in samples])
    return fit_arrays(X, y, mean_model, kernel, nu=nu, channel=channel)
