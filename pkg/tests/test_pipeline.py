"""Orchestration layer: config parsing and validation, forward/inverse
processes, sweeps with flagged-row continuation, fixtures, deterministic
end-to-end runs."""

import json
import math

import numpy as np
import pytest

from aerosid import (
    GpModel,
    KIND_ROLLERCOASTER,
    KernelSpec,
    ManeuverRecord,
    ManeuverSpec,
    TruthModel,
    fly_trim_shots,
)
from aerosid import atmosphere as atmo
from aerosid.errors import (
    ConfigError,
    DataError,
    InsufficientDataError,
    NumericError,
)
from aerosid.lineardyn import (
    dimensionalize,
    linearize_truth,
    short_period_with_mq_substitution,
)
from aerosid.pipeline import (
    FLAG_NO_BUCKET,
    FLAG_OK,
    SHIPPED_FIXTURE,
    RunConfig,
    SweepGrid,
    SweepResult,
    SweepRow,
    compare_to_fixture,
    forward_process,
    gather_extra_shots,
    gather_records,
    inverse_process,
    load_run_config,
    load_trim_functions,
    parse_run_config,
    read_sweep_csv,
    run_experiment,
    save_trim_functions,
    stability_derivatives_at,
    sweep_short_period,
    _config_to_echo,
)
from aerosid.trimfit import fit_trim_functions, trim_state

from conftest import TRUTH_PRIOR_PATH, WRONG_PRIOR_PATH

SE_KERNEL = KernelSpec("se", length_scales=0.8, signal_variance=0.04)
TRIM_QBARS = (7000.0, 9000.0, 11000.0, 13500.0, 16000.0, 19000.0,
              22000.0, 24500.0)


def base_config(prior=WRONG_PRIOR_PATH, **overrides):
    kw = dict(
        prior_path=str(prior),
        out_dir="unused",
        seed=42,
        truth_prior_path=str(TRUTH_PRIOR_PATH),
        maneuvers=(
            ManeuverSpec(kind=KIND_ROLLERCOASTER, duration_s=24.0,
                         mach_target=0.7, altitude_target_m=10808.6,
                         exc_amplitude=0.002),
            ManeuverSpec(kind=KIND_ROLLERCOASTER, duration_s=40.0,
                         mach_target=0.7, altitude_target_m=3015.5,
                         exc_amplitude=0.008),
        ),
        trim_shot_conditions=tuple((0.7, q) for q in TRIM_QBARS),
        kernel=SE_KERNEL,
        nu=4e-4,
        decimation_limit=800,
        sweep=SweepGrid(qbar_min_pa=8000.0, qbar_max_pa=24000.0,
                        qbar_step_pa=2000.0, machs=(0.7,)),
    )
    kw.update(overrides)
    return RunConfig(**kw)


@pytest.fixture(scope="module")
def noiseless_inverse():
    """One shared noiseless two-maneuver fit against the wrong prior."""
    config = base_config()
    prepared = forward_process(config)
    records = gather_records(config)
    shots = gather_extra_shots(config)
    inverse = inverse_process(config, prepared, records, extra_shots=shots)
    return config, prepared, records, shots, inverse


# -- config ----------------------------------------------------------------------

def test_sweep_grid_qbar_endpoints():
    grid = SweepGrid(qbar_min_pa=8000.0, qbar_max_pa=24000.0,
                     qbar_step_pa=2000.0, machs=(0.7,))
    q = grid.qbars()
    assert q[0] == 8000.0 and q[-1] == 24000.0 and len(q) == 9
    ragged = SweepGrid(qbar_min_pa=0.0, qbar_max_pa=10.0, qbar_step_pa=3.0,
                       machs=(0.7,))
    assert np.array_equal(ragged.qbars(), [0.0, 3.0, 6.0, 9.0])


def test_config_echo_parses_back_to_same_config():
    config = base_config(out_dir="/tmp/echo_case", seed=7,
                         noise_sigmas=(5e-4, 3e-4, 2.3e-4, 160.0))
    echo = _config_to_echo(config)
    assert parse_run_config(echo) == config


def test_parse_overrides_out_dir_and_seed():
    echo = _config_to_echo(base_config(out_dir="/tmp/a", seed=1))
    config = parse_run_config(echo, out_dir="/tmp/b", seed=9)
    assert config.out_dir == "/tmp/b"
    assert config.seed == 9


def test_config_validation_errors(tmp_path):
    echo = _config_to_echo(base_config(out_dir="/tmp/x"))

    both = dict(echo, telemetry=["some.csv"])
    with pytest.raises(ConfigError, match="exactly one mode"):
        parse_run_config(both)
    neither = dict(echo, truth_prior=None)
    with pytest.raises(ConfigError, match="exactly one mode"):
        parse_run_config(neither)
    with pytest.raises(ConfigError, match="unknown config keys"):
        parse_run_config(dict(echo, bogus=1))
    with pytest.raises(ConfigError, match="missing 'sweep'"):
        parse_run_config({k: v for k, v in echo.items() if k != "sweep"})
    with pytest.raises(ConfigError, match="at least one maneuver"):
        parse_run_config(dict(echo, maneuvers=[]))
    with pytest.raises(ConfigError, match="sweep is missing"):
        parse_run_config(dict(echo, sweep={"qbar_min_pa": 1.0}))
    with pytest.raises(ConfigError, match="qbar_step_pa"):
        parse_run_config(dict(
            echo, sweep=dict(echo["sweep"], qbar_step_pa=0.0)))
    with pytest.raises(ConfigError, match="noise is missing"):
        parse_run_config(dict(echo, noise={"sigma_rate": 1e-3}))
    with pytest.raises(ConfigError, match="unknown noise keys"):
        parse_run_config(dict(echo, noise={
            "sigma_rate": 0.0, "sigma_alpha": 0.0, "sigma_delta_e": 0.0,
            "sigma_qbar": 0.0, "sigma_extra": 0.0}))
    with pytest.raises(ConfigError, match="maneuver 0 is missing"):
        parse_run_config(dict(echo, maneuvers=[{"kind": "rollercoaster"}]))
    with pytest.raises(ConfigError, match="unknown maneuver 0 keys"):
        parse_run_config(dict(echo, maneuvers=[
            dict(echo["maneuvers"][0], wingspan=3)]))
    with pytest.raises(ConfigError, match="nu must be non-negative"):
        parse_run_config(dict(echo, nu=-1.0))
    with pytest.raises(ConfigError, match="decimation_limit"):
        parse_run_config(dict(echo, decimation_limit=1))
    with pytest.raises(ConfigError, match="seed"):
        parse_run_config(dict(echo, seed=-3))
    with pytest.raises(ConfigError, match="kernel"):
        parse_run_config(dict(echo, kernel={"length_scales": 1.0}))

    replay = {k: v for k, v in echo.items()
              if k not in ("truth_prior", "maneuvers", "trim_shot_conditions",
                           "noise")}
    replay["telemetry"] = [str(tmp_path / "t.csv")]
    replay["trim_shot_conditions"] = [[0.7, 16000.0]]
    with pytest.raises(ConfigError, match="simulation mode"):
        parse_run_config(replay)

    assert parse_run_config(dict(echo, nu="auto")).nu is None


def test_load_run_config_file_errors(tmp_path):
    with pytest.raises(ConfigError, match="not found"):
        load_run_config(tmp_path / "absent.json")
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    with pytest.raises(ConfigError, match="not valid JSON"):
        load_run_config(bad)
    good = tmp_path / "good.json"
    good.write_text(json.dumps(_config_to_echo(base_config(out_dir="/tmp/y"))))
    config, echo = load_run_config(good)
    assert config.seed == 42
    assert echo["seed"] == 42


# -- forward process ----------------------------------------------------------------

def test_forward_process_binds_prior_and_settings():
    config = base_config(prior=TRUTH_PRIOR_PATH)
    prepared = forward_process(config)
    assert prepared.channels == ("Cm", "Cz")
    assert prepared.kernel == SE_KERNEL
    assert prepared.nu == 4e-4
    assert prepared.cm_model.channel == "Cm"
    assert prepared.cz_model.channel == "Cz"
    assert prepared.entry.geometry.cbar == pytest.approx(2.3)


def test_forward_process_names_missing_channel(tmp_path):
    raw = json.loads(TRUTH_PRIOR_PATH.read_text())
    raw["models"] = [m for m in raw["models"] if m["channel"] != "Cz"]
    crippled = tmp_path / "nocz.json"
    crippled.write_text(json.dumps(raw))
    config = base_config(prior=crippled)
    with pytest.raises(ConfigError, match="Cz"):
        forward_process(config)


def test_forward_process_file_errors(tmp_path):
    with pytest.raises(ConfigError, match="not found"):
        forward_process(base_config(prior=tmp_path / "absent.json"))
    bad = tmp_path / "bad.json"
    bad.write_text("[")
    with pytest.raises(ConfigError, match="not valid JSON"):
        forward_process(base_config(prior=bad))


# -- inverse process ------------------------------------------------------------------

def test_inverse_needs_records(noiseless_inverse):
    config, prepared, _, shots, _ = noiseless_inverse
    with pytest.raises(InsufficientDataError):
        inverse_process(config, prepared, [], extra_shots=shots)


def test_inverse_error_names_offending_record(noiseless_inverse):
    config, prepared, _, shots, _ = noiseless_inverse
    n = 4  # too short for the derivative stencil
    zeros = np.zeros(n)
    stub = ManeuverRecord(
        t=np.arange(n) * 0.01, mach=np.full(n, 0.7), rho=np.full(n, 0.9),
        qbar=np.full(n, 16000.0), p=zeros, q=zeros, r=zeros,
        alpha=np.full(n, 0.05), delta_e=np.full(n, -0.02), nz=np.ones(n),
        u_body=np.full(n, 220.0), w_body=np.full(n, 11.0),
        theta=np.full(n, 0.05), label="stub_leg")
    with pytest.raises(InsufficientDataError, match="stub_leg"):
        inverse_process(config, prepared, [stub], extra_shots=shots)


def test_inverse_requires_trim_shots(noiseless_inverse):
    config, prepared, records, _, _ = noiseless_inverse
    with pytest.raises(InsufficientDataError, match="trim shots"):
        inverse_process(config, prepared, records, extra_shots=[])


def test_decimation_budget_split_across_records(noiseless_inverse):
    config, _, _, _, inverse = noiseless_inverse
    assert inverse.n_records == 2
    # per-record decimation may keep one extra endpoint sample each
    assert inverse.n_samples_per_channel <= config.decimation_limit + 2
    assert inverse.n_samples_per_channel >= config.decimation_limit // 2
    assert inverse.n_trim_shots == len(TRIM_QBARS)
    assert set(inverse.timings_s) == {"extract", "fit_cm", "fit_cz",
                                      "fit_trim"}


def test_incremental_refit_lands_on_batch_model(noiseless_inverse):
    config, prepared, records, shots, batch = noiseless_inverse
    incremental = inverse_process(config, prepared, records,
                                  extra_shots=shots, incremental=True)
    queries = [
        np.array([0.7, 0.9, 16000.0, 0.0, 0.01, 0.0, 0.05, -0.02]),
        np.array([0.7, 1.1, 22000.0, 0.0, -0.02, 0.0, 0.03, -0.01]),
    ]
    for x in queries:
        assert incremental.cm.predict_mean(x) == batch.cm.predict_mean(x)
        assert incremental.cz.predict_mean(x) == batch.cz.predict_mean(x)
    assert incremental.trim_functions == batch.trim_functions


# -- sweeps ------------------------------------------------------------------------

def test_zero_data_sweep_equals_linearized_prior(truth_entry, truth_model,
                                                 geom):
    conds = [(0.7, atmo.altitude_for_qbar_mach(q, 0.7))
             for q in (8000.0, 11000.0, 14000.0, 17000.0, 20000.0, 24000.0)]
    tfs = tuple(fit_trim_functions(fly_trim_shots(truth_model, geom, conds)))
    prior_cm = GpModel.prior(KernelSpec("nn"), truth_entry.models.cm, "Cm")
    prior_cz = GpModel.prior(KernelSpec("nn"), truth_entry.models.cz, "Cz")
    sweep = sweep_short_period(prior_cm, prior_cz, tfs, geom,
                               np.arange(9000.0, 23000.1, 2000.0), [0.7])
    assert len(sweep.ok_rows()) == 8
    for row in sweep.ok_rows():
        h = atmo.altitude_for_qbar_mach(row.qbar_pa, 0.7)
        tp = trim_state(tfs[0], row.qbar_pa, atmo.density(h))
        c = linearize_truth(truth_entry.models, tp.state.alpha,
                            tp.state.delta_e)
        sp = short_period_with_mq_substitution(
            dimensionalize(c, geom, row.qbar_pa, tp.U1))
        assert row.omega_sp_rad_s == pytest.approx(sp.omega_sp, rel=1e-6)
        assert row.zeta_sp == pytest.approx(sp.zeta_sp, rel=1e-6)


def test_recovery_is_insensitive_to_fitting_prior(noiseless_inverse):
    config, prepared, records, shots, wrong_fit = noiseless_inverse
    truth_config = base_config(prior=TRUTH_PRIOR_PATH)
    truth_prepared = forward_process(truth_config)
    truth_fit = inverse_process(truth_config, truth_prepared, records,
                                extra_shots=shots)
    geom = prepared.entry.geometry
    qbars = config.sweep.qbars()
    sweep_wrong = sweep_short_period(wrong_fit.cm, wrong_fit.cz,
                                     wrong_fit.trim_functions, geom, qbars,
                                     (0.7,))
    sweep_truth = sweep_short_period(truth_fit.cm, truth_fit.cz,
                                     truth_fit.trim_functions, geom, qbars,
                                     (0.7,))
    by_q = {r.qbar_pa: r for r in sweep_truth.ok_rows()}
    compared = 0
    for row in sweep_wrong.ok_rows():
        ref = by_q.get(row.qbar_pa)
        if ref is None:
            continue
        assert row.omega_sp_rad_s == pytest.approx(ref.omega_sp_rad_s,
                                                   rel=0.03)
        assert row.zeta_sp == pytest.approx(ref.zeta_sp, rel=0.10)
        compared += 1
    assert compared >= 7


def test_posterior_variance_grows_beyond_flown_envelope(noiseless_inverse):
    _, _, _, _, inverse = noiseless_inverse
    inside = np.array([0.7, 0.9, 16000.0, 0.0, 0.0, 0.0, 0.05, -0.02])
    outside = inside.copy()
    outside[2] = 1.3 * 24000.0
    var_in = inverse.cm.predict_variance(inside)
    var_out = inverse.cm.predict_variance(outside)
    assert var_out > var_in
    assert var_in < SE_KERNEL.signal_variance


def test_sweep_flags_and_continuation(noiseless_inverse, geom):
    _, _, _, _, inverse = noiseless_inverse
    # 30 kPa sits beyond the fitted trim domain's 20% overhang -> refusal;
    # mach 2.0 has no bucket; both flag their row and the sweep continues
    sweep = sweep_short_period(inverse.cm, inverse.cz,
                               inverse.trim_functions, geom,
                               [30000.0, 16000.0], [0.7, 2.0])
    flags = {(r.qbar_pa, r.mach): r.flag for r in sweep.rows}
    assert flags[(30000.0, 0.7)] == "error:ExtrapolationError"
    assert flags[(30000.0, 2.0)] == FLAG_NO_BUCKET
    assert flags[(16000.0, 2.0)] == FLAG_NO_BUCKET
    assert flags[(16000.0, 0.7)] == FLAG_OK
    ok = sweep.ok_rows()
    assert [(r.qbar_pa, r.mach) for r in ok] == [(16000.0, 0.7)]
    error_row = next(r for r in sweep.rows if r.flag.startswith("error:"))
    assert math.isnan(error_row.omega_sp_rad_s)
    assert math.isnan(error_row.zeta_sp)


def test_sweep_rows_must_be_sorted():
    row = SweepRow(qbar_pa=2.0, mach=0.7, omega_sp_rad_s=1.0, zeta_sp=0.3,
                   cm_alpha=-1.0, cm_q_nd=-10.0, cm_delta_e=-1.0,
                   cz_alpha=-4.0, sigma_cm=0.01)
    first = SweepRow(qbar_pa=1.0, mach=0.7, omega_sp_rad_s=1.0, zeta_sp=0.3,
                     cm_alpha=-1.0, cm_q_nd=-10.0, cm_delta_e=-1.0,
                     cz_alpha=-4.0, sigma_cm=0.01)
    SweepResult(rows=(first, row))
    with pytest.raises(NumericError):
        SweepResult(rows=(row, first))


def test_sweep_csv_round_trip(tmp_path, noiseless_inverse, geom):
    _, _, _, _, inverse = noiseless_inverse
    sweep = sweep_short_period(inverse.cm, inverse.cz,
                               inverse.trim_functions, geom,
                               [30000.0, 12000.0, 20000.0], [0.7, 2.0])
    path = tmp_path / "sweep.csv"
    sweep.to_csv(path)
    loaded = read_sweep_csv(path)
    assert len(loaded.rows) == len(sweep.rows)
    for got, want in zip(loaded.rows, sweep.rows):
        assert got.flag == want.flag
        for name in ("qbar_pa", "mach", "omega_sp_rad_s", "zeta_sp",
                     "cm_alpha", "cm_q_nd", "cm_delta_e", "cz_alpha",
                     "sigma_cm"):
            g, w = getattr(got, name), getattr(want, name)
            assert (math.isnan(g) and math.isnan(w)) or g == w, name


def test_sweep_csv_rejects_tampering(tmp_path, noiseless_inverse, geom):
    _, _, _, _, inverse = noiseless_inverse
    sweep = sweep_short_period(inverse.cm, inverse.cz,
                               inverse.trim_functions, geom, [16000.0], [0.7])
    path = tmp_path / "sweep.csv"
    sweep.to_csv(path)
    lines = path.read_text().splitlines()
    bad_header = tmp_path / "h.csv"
    bad_header.write_text("\n".join(["qbar,extra"] + lines[1:]) + "\n")
    with pytest.raises(DataError):
        read_sweep_csv(bad_header)
    bad_row = tmp_path / "r.csv"
    bad_row.write_text("\n".join(lines + ["1,2,3"]) + "\n")
    with pytest.raises(DataError):
        read_sweep_csv(bad_row)


# -- stability estimates ---------------------------------------------------------------

def test_stability_estimate_has_stable_signs(truth_entry, truth_model, geom):
    conds = [(0.7, atmo.altitude_for_qbar_mach(q, 0.7))
             for q in (10000.0, 14000.0, 18000.0)]
    tf = fit_trim_functions(fly_trim_shots(truth_model, geom, conds))[0]
    prior_cm = GpModel.prior(KernelSpec("nn"), truth_entry.models.cm, "Cm")
    prior_cz = GpModel.prior(KernelSpec("nn"), truth_entry.models.cz, "Cz")
    h = atmo.altitude_for_qbar_mach(14000.0, 0.7)
    est = stability_derivatives_at(prior_cm, prior_cz, tf, 14000.0,
                                   atmo.density(h), geom)
    assert est.coeff.cm_alpha < 0.0
    assert est.coeff.cm_q_nd < 0.0
    assert est.coeff.cz_alpha < 0.0
    assert est.dim.M_alpha < 0.0
    assert est.sigma_cm == pytest.approx(math.sqrt(math.pi / 2.0))
    assert est.trim.state.q == 0.0


# -- fixture -----------------------------------------------------------------------------

def test_shipped_fixture_rows_are_verbatim():
    rows = {r.method: r for r in SHIPPED_FIXTURE.rows}
    lin = rows["Linear Model"]
    assert (lin.cm_alpha, lin.cm_delta_e, lin.cm_q) == (-0.285, -0.525, -3.240)
    assert (lin.omega_sp, lin.zeta_sp) == (0.250, 0.219)
    gp = rows["GP Estimates"]
    assert (gp.cm_alpha, gp.cm_delta_e, gp.cm_q) == (-0.442, -1.045, -15.590)
    assert (gp.omega_sp, gp.zeta_sp) == (0.317, 0.329)
    fs = rows["frequency-sweep system identification"]
    assert (fs.cm_alpha, fs.cm_delta_e, fs.cm_q) == (-0.562, -1.285, -12.720)
    assert (fs.omega_sp, fs.zeta_sp) == (0.380, 0.290)
    assert "Mach 0.7" in SHIPPED_FIXTURE.condition


def test_compare_to_fixture_is_labeled_context_only(noiseless_inverse, geom):
    report = compare_to_fixture(None)
    assert "NOT an acceptance test" in report["label"]
    assert report["sweep_at_condition"] is None
    assert len(report["fixture_rows"]) == 3

    empty = SweepResult(rows=())
    assert compare_to_fixture(empty)["sweep_at_condition"] is None

    _, _, _, _, inverse = noiseless_inverse
    sweep = sweep_short_period(inverse.cm, inverse.cz,
                               inverse.trim_functions, geom,
                               [14000.0, 16000.0], [0.7])
    report = compare_to_fixture(sweep)
    nearest = report["sweep_at_condition"]["nearest_row"]
    assert nearest["mach"] == 0.7
    assert report["sweep_at_condition"]["qbar_pa_reference"] > 0.0


# -- trim-function JSON -------------------------------------------------------------------

def test_trim_functions_json_round_trip(tmp_path, noiseless_inverse):
    _, _, _, _, inverse = noiseless_inverse
    path = tmp_path / "trim.json"
    save_trim_functions(path, inverse.trim_functions)
    assert load_trim_functions(path) == inverse.trim_functions
    path.write_text("{}")
    with pytest.raises(DataError):
        load_trim_functions(path)


# -- end-to-end runs ----------------------------------------------------------------------

def small_noisy_config(out_dir):
    return base_config(
        out_dir=str(out_dir),
        seed=7,
        maneuvers=(
            ManeuverSpec(kind=KIND_ROLLERCOASTER, duration_s=14.0,
                         mach_target=0.7, altitude_target_m=6082.9,
                         exc_amplitude=0.005),
        ),
        noise_sigmas=(5e-4, 3e-4, 2.3e-4, 160.0),
        trim_shot_conditions=((0.7, 12000.0), (0.7, 16000.0),
                              (0.7, 20000.0)),
        decimation_limit=400,
        sweep=SweepGrid(qbar_min_pa=12000.0, qbar_max_pa=20000.0,
                        qbar_step_pa=4000.0, machs=(0.7,)),
    )


def test_run_experiment_products_and_determinism(tmp_path):
    first = run_experiment(small_noisy_config(tmp_path / "run_a"))
    for name in ("config.json", "cm.gpz", "cz.gpz", "trim_functions.json",
                 "sweep.csv", "report.json", "timings.json"):
        assert (tmp_path / "run_a" / name).exists(), name
    assert not (tmp_path / "run_a" / "failure_manifest.json").exists()
    assert first.sweep.ok_rows()
    assert first.inverse.n_records == 1
    assert first.timings_s["inverse_s"] > 0.0

    second = run_experiment(small_noisy_config(tmp_path / "run_b"))
    bytes_a = (tmp_path / "run_a" / "sweep.csv").read_bytes()
    bytes_b = (tmp_path / "run_b" / "sweep.csv").read_bytes()
    assert bytes_a == bytes_b
    assert second.sweep == first.sweep

    report = json.loads((tmp_path / "run_a" / "report.json").read_text())
    assert "NOT an acceptance test" in report["label"]


def test_run_experiment_different_seed_changes_sweep(tmp_path):
    config = small_noisy_config(tmp_path / "run_seed")
    result = run_experiment(config)
    echo = _config_to_echo(config)
    other = parse_run_config(echo, out_dir=str(tmp_path / "run_seed2"),
                             seed=8)
    result2 = run_experiment(other)
    a = [r.omega_sp_rad_s for r in result.sweep.ok_rows()]
    b = [r.omega_sp_rad_s for r in result2.sweep.ok_rows()]
    assert a != b


def test_run_experiment_writes_failure_manifest(tmp_path):
    config = base_config(prior=tmp_path / "absent.json",
                         out_dir=str(tmp_path / "run_fail"))
    with pytest.raises(ConfigError):
        run_experiment(config)
    manifest = json.loads(
        (tmp_path / "run_fail" / "failure_manifest.json").read_text())
    assert manifest["stage"] == "forward"
    assert manifest["error"] == "ConfigError"
