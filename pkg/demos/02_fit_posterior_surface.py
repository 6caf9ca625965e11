"""
Fitting a coefficient hypersurface with a physics-prior GP
==========================================================

The inverse process turns one maneuver's telemetry into training samples for
a Gaussian process over the 8-dimensional flight state.  The GP's mean
function is a polynomial physics model — here a deliberately wrong one — and
the kernel learns the residual between that prior and what the data say.
Where the aircraft actually flew, the data win; far outside, the posterior
falls back to the prior and says so through its variance.
"""

import numpy as np

from aerosid import (
    GpModel,
    KIND_ROLLERCOASTER,
    KernelSpec,
    ManeuverSpec,
    NoiseSpec,
    TruthModel,
    atmosphere as atmo,
    decimate_samples,
    extract_cm,
    fit,
    fly,
    load_shipped_prior,
)

truth_entry = load_shipped_prior("truthlike")
wrong_entry = load_shipped_prior("wrongprior")
truth = TruthModel(truth_entry.models)
geom = truth_entry.geometry

# Fly one 30-second maneuver at 16 kPa with measurement noise.
altitude = atmo.altitude_for_qbar_mach(16000.0, 0.7)
spec = ManeuverSpec(kind=KIND_ROLLERCOASTER, duration_s=30.0,
                    mach_target=0.7, altitude_target_m=altitude,
                    exc_amplitude=0.005)
noise = NoiseSpec(sigma_rate=5e-4, sigma_alpha=3e-4, sigma_delta_e=2.3e-4,
                  sigma_qbar=160.0, seed=7)
record = fly(truth, geom, spec, noise=noise)

# Extract pitch-moment coefficient samples from measured rates and decimate
# to a workable training-set size.
samples = decimate_samples(extract_cm(record, geom), 800)
print(f"{len(samples)} Cm training samples from {record.n} telemetry rows")

# Fit twice: once with the truth-like prior mean, once with the wrong prior.
kernel = KernelSpec("se", length_scales=0.8, signal_variance=0.04)
gp_truth_prior = fit(samples, truth_entry.models.cm, kernel, nu=4e-4)
gp_wrong_prior = fit(samples, wrong_entry.models.cm, kernel, nu=4e-4)

# Query a state the maneuver actually visited.  A zero-data GP built from the
# same wrong mean model shows what the prior alone would have said there.
wrong_prior_only = GpModel.prior(kernel, wrong_entry.models.cm, "Cm")
mid = record.state_at(record.n // 2)
cm_true = record.truth.cm[record.n // 2]
print(f"\nquery inside the flown envelope (alpha={mid.alpha:+.4f} rad):")
print(f"  truth Cm                = {cm_true:+.5f}")
print(f"  posterior, truth prior  = {gp_truth_prior.predict_mean(mid):+.5f}")
print(f"  posterior, wrong prior  = {gp_wrong_prior.predict_mean(mid):+.5f}")
print(f"  wrong prior by itself   = "
      f"{wrong_prior_only.predict_mean(mid):+.5f}   <- data overruled it")

# Far outside the flown envelope the posterior reverts to the prior and the
# predictive variance grows toward the kernel's own scale.
inside = mid.as_vector()
outside = inside.copy()
outside[2] = 31000.0  # dynamic pressure 30% past anything flown
var_in = gp_wrong_prior.predict_variance(inside)
var_out = gp_wrong_prior.predict_variance(outside)
print(f"\npredictive variance inside the envelope : {var_in:.2e}")
print(f"predictive variance 30% beyond it       : {var_out:.2e}")
print(f"kernel signal variance                  : {kernel.signal_variance:.2e}")

# Checkpoints round-trip through a single-file archive.
import tempfile
from pathlib import Path

from aerosid import load_checkpoint

path = Path(tempfile.mkdtemp(prefix="aerosid_demo_")) / "cm.gpz"
gp_wrong_prior.save(path)
reloaded = load_checkpoint(path)
assert reloaded.predict_mean(mid) == gp_wrong_prior.predict_mean(mid)
print(f"\ncheckpoint round trip exact: {path}")
