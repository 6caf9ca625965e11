"""Shared fixtures: shipped model catalogs and a cached noise-free maneuver."""

from pathlib import Path

import pytest

from aerosid import (
    KIND_ROLLERCOASTER,
    ManeuverSpec,
    TruthModel,
    load_prior,
)

PKG_DIR = Path(__file__).resolve().parents[1] / "src" / "aerosid"
PRIORS_DIR = PKG_DIR / "priors"
TRUTH_PRIOR_PATH = PRIORS_DIR / "truthlike.json"
WRONG_PRIOR_PATH = PRIORS_DIR / "wrongprior.json"


@pytest.fixture(scope="session")
def truth_entry():
    return load_prior(TRUTH_PRIOR_PATH)


@pytest.fixture(scope="session")
def wrong_entry():
    return load_prior(WRONG_PRIOR_PATH)


@pytest.fixture(scope="session")
def geom(truth_entry):
    return truth_entry.geometry


@pytest.fixture(scope="session")
def truth_model(truth_entry):
    return TruthModel(truth_entry.models)


@pytest.fixture(scope="session")
def clean_rollercoaster(truth_model, geom):
    """One noise-free excited rollercoaster record, shared across modules."""
    from aerosid import fly_rollercoaster

    spec = ManeuverSpec(
        kind=KIND_ROLLERCOASTER, duration_s=16.0, mach_target=0.7,
        altitude_target_m=6082.9, g_low=0.0, g_high=2.0, g_rate=0.5,
        exc_amplitude=0.005, label="shared_rc")
    return fly_rollercoaster(truth_model, geom, spec, noise=None)
