"""Self-contained property suites for quick installation checks.

Each suite re-derives a core numerical guarantee with randomized inputs:
analytic posterior gradients against central finite differences for both
kernels, closed-form short-period formulas against an eigenvalue solver,
and exact interpolation of a near-noiseless fit.  The command-line
`verify` subcommand runs all three and reports pass/fail per suite.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .aeromean import AeroTerm, GenericAeroModel, Hull, evaluate
from .flightstate import FlightState
from .gpr import KernelSpec, fit_arrays
from .lineardyn import (
    DimensionalDerivatives,
    short_period_from_eigenvalues,
    two_dof_short_period,
)

__all__ = [
    "VerifySuiteResult",
    "run_all",
    "run_eigen_suite",
    "run_gradient_suite",
    "run_interpolation_suite",
]


@dataclass(frozen=True)
class VerifySuiteResult:
    name: str
    n_checks: int
    max_error: float
    tolerance: float

    @property
    def passed(self) -> bool:
        return self.max_error <= self.tolerance


_HULL = Hull(alpha=(-0.3, 0.5), qtilde=(-0.1, 0.1), delta_e=(-0.4, 0.4))

_MEAN_MODEL = GenericAeroModel(
    channel="Cm", ref_chord_m=2.0, hull=_HULL,
    terms=(
        AeroTerm(theta=0.02, exp_alpha=0, exp_qtilde=0, exp_deltae=0),
        AeroTerm(theta=-0.45, exp_alpha=1, exp_qtilde=0, exp_deltae=0),
        AeroTerm(theta=-9.0, exp_alpha=0, exp_qtilde=1, exp_deltae=0),
        AeroTerm(theta=-0.9, exp_alpha=0, exp_qtilde=0, exp_deltae=1),
    ),
)


def _random_states(rng: np.random.Generator, n: int) -> np.ndarray:
    """Plausible flight-state matrix with varied, bounded channels."""
    x = np.empty((n, 8))
    x[:, 0] = rng.uniform(0.55, 0.85, n)          # mach
    x[:, 1] = rng.uniform(0.45, 1.0, n)           # rho
    x[:, 2] = rng.uniform(7000.0, 25000.0, n)     # qbar
    x[:, 3] = rng.normal(0.0, 0.002, n)           # p
    x[:, 4] = rng.normal(0.0, 0.05, n)            # q
    x[:, 5] = rng.normal(0.0, 0.002, n)           # r
    x[:, 6] = rng.uniform(-0.05, 0.25, n)         # alpha
    x[:, 7] = rng.uniform(-0.15, 0.15, n)         # delta_e
    return x


def _fit_synthetic(kernel: KernelSpec, rng: np.random.Generator, n: int = 60,
                   nu: float = 1e-6):
    X = _random_states(rng, n)
    y = np.array([evaluate(_MEAN_MODEL, FlightState.from_vector(v)) for v in X])
    y = y + 0.02 * np.sin(3.0 * X[:, 6]) + 0.01 * X[:, 7] ** 2
    return fit_arrays(X, y, _MEAN_MODEL, kernel, nu=nu)


def run_gradient_suite(seed: int = 0, n_points: int = 20,
                       tolerance: float = 1e-5) -> VerifySuiteResult:
    """Analytic posterior gradient vs central finite differences."""
    rng = np.random.default_rng(seed)
    worst = 0.0
    checks = 0
    for kind in ("nn", "se"):
        model = _fit_synthetic(KernelSpec(kind), rng)
        queries = _random_states(rng, n_points)
        for v in queries:
            x = FlightState.from_vector(v)
            grad = model.posterior_gradient(x)
            for dim in range(8):
                h = max(1e-6 * abs(v[dim]), 1e-7)
                hi, lo = v.copy(), v.copy()
                hi[dim] += h
                lo[dim] -= h
                fd = (model.predict_mean(FlightState.from_vector(hi))
                      - model.predict_mean(FlightState.from_vector(lo))) / (2 * h)
                scale = max(abs(fd), abs(grad[dim]), 1e-8)
                worst = max(worst, abs(grad[dim] - fd) / scale)
                checks += 1
    return VerifySuiteResult("gradient", checks, worst, tolerance)


def run_eigen_suite(seed: int = 0, n_sets: int = 1000,
                    tolerance: float = 1e-10) -> VerifySuiteResult:
    """Closed-form frequency/damping vs the eigenvalue route."""
    rng = np.random.default_rng(seed)
    worst = 0.0
    checks = 0
    while checks < n_sets:
        d = DimensionalDerivatives(
            M_alpha=-float(rng.uniform(0.5, 40.0)),
            M_q=-float(rng.uniform(0.1, 4.0)),
            M_alphadot=-float(rng.uniform(0.0, 1.5)),
            M_delta_e=-float(rng.uniform(1.0, 60.0)),
            Z_alpha=-float(rng.uniform(20.0, 900.0)),
            Z_delta_e=-float(rng.uniform(5.0, 120.0)),
            U1=float(rng.uniform(60.0, 400.0)),
        )
        closed = two_dof_short_period(d)
        eig = short_period_from_eigenvalues(d)
        if not (closed.oscillatory and eig.oscillatory):
            continue
        worst = max(worst,
                    abs(closed.omega_sp - eig.omega_sp) / eig.omega_sp,
                    abs(closed.zeta_sp - eig.zeta_sp) / abs(eig.zeta_sp))
        checks += 1
    return VerifySuiteResult("eigen", checks, worst, tolerance)


def run_interpolation_suite(seed: int = 0,
                            tolerance: float = 1e-6) -> VerifySuiteResult:
    """Near-noiseless fits must interpolate their training targets."""
    rng = np.random.default_rng(seed)
    worst = 0.0
    checks = 0
    for kind in ("nn", "se"):
        model = _fit_synthetic(KernelSpec(kind), rng, n=30, nu=1e-12)
        for v, target in zip(model.X, model.y):
            mu = model.predict_mean(FlightState.from_vector(v))
            worst = max(worst, abs(mu - target))
            checks += 1
    return VerifySuiteResult("interpolation", checks, worst, tolerance)


def run_all(seed: int = 0) -> list[VerifySuiteResult]:
    return [
        run_gradient_suite(seed),
        run_eigen_suite(seed),
        run_interpolation_suite(seed),
    ]
