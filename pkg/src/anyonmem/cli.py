"""Experiment orchestration and command-line entry point.

Each command reproduces one family of experiments at desk scale: ensemble
decay curves, the independent-error decoding threshold, lifetime scans
against the mean-field prediction, equilibrium anyon counts, the
nonsplit-pair regime, single-pair decay collapse, closed-form analytics
and the cavity parameter calculators. Curves are written as RFC-4180 CSV
(columns t, mean, stderr, n_runs) next to a metadata JSON that embeds the
full configuration, its hash, and all derived seeds.

Exit codes: 0 success, 2 configuration error, 3 statistically inconclusive.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import os
import sys
import time
from importlib import resources
from pathlib import Path

import numpy as np

from . import __version__
from .analytics import (
    critical_radius,
    lifetime_interacting,
    lifetime_noninteracting,
    single_pair_bare_z_scaled,
    single_pair_corrected_z_scaled,
)
from .bath import ExplicitRatesBath, SpinBosonBath
from .cavity import (
    CavitySpec,
    bogoliubov_frequencies,
    effective_parameters,
    honeycomb_gap,
    plaquette_coupling,
)
from .config import ConfigError, ExperimentConfig
from .decoder import corrected_logical_z
from .dynamics import (
    decay_threshold_time,
    ensemble_average,
    ensemble_run,
    inject_iid_errors,
    make_sample_schedule,
)
from .equilibrium import (
    exact_partition_equilibrium,
    metropolis_sample,
    nonsplit_pair_ode,
    pair_partition_quasistationary,
    solve_mean_field,
)
from .lattice import build_lattice

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_INCONCLUSIVE = 3


class InsufficientDataError(ValueError):
    """Fewer data points than a fit requires."""


# -- output helpers ----------------------------------------------------------

def _write_csv(path: Path, header: list[str], rows,
               config_hash: str | None = None) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        if config_hash:
            fh.write(f"# config_hash={config_hash}\r\n")
        w = csv.writer(fh, lineterminator="\r\n")
        w.writerow(header)
        for row in rows:
            w.writerow(row)


def read_csv_rows(path) -> list[dict]:
    """Read one of our CSV files, skipping the config-hash comment line."""
    with open(path, newline="", encoding="utf-8") as fh:
        lines = [ln for ln in fh if not ln.startswith("#")]
    return list(csv.DictReader(lines))


def _write_curve_csv(path: Path, times, mean, err, n_runs,
                     config_hash: str | None = None) -> None:
    _write_csv(path, ["t", "mean", "stderr", "n_runs"],
               ((f"{t:.10g}", f"{m:.10g}", f"{e:.10g}", n_runs)
                for t, m, e in zip(times, mean, err)),
               config_hash=config_hash)


def _write_meta(outdir: Path, cfg: ExperimentConfig, extra: dict) -> None:
    outdir.mkdir(parents=True, exist_ok=True)
    outputs = sorted(p.name for p in outdir.iterdir()
                     if p.name != "metadata.json")
    meta = {
        "config": cfg.to_dict(),
        "config_hash": cfg.config_hash(),
        "version": __version__,
        "outputs": outputs,
        "generated_at": time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime()),
    }
    meta.update(extra)
    with open(outdir / "metadata.json", "w", encoding="utf-8") as fh:
        json.dump(meta, fh, indent=2, sort_keys=True, default=_json_default)
        fh.write("\n")


def _json_default(obj):
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    raise TypeError(f"not JSON-serializable: {type(obj)}")


# -- f_c fitting -------------------------------------------------------------

def fit_fc(threshold_times, predictions) -> float:
    """Least-squares fit of the single threshold fraction f_c.

    ``threshold_times`` are measured decay times tau_i and ``predictions``
    the corresponding model values evaluated at f_c = 1; since the model is
    strictly linear in f_c, the log-space least-squares solution is the
    geometric mean of the ratios.
    """
    taus = np.asarray(list(threshold_times), dtype=float)
    preds = np.asarray(list(predictions), dtype=float)
    ok = np.isfinite(taus) & np.isfinite(preds) & (taus > 0) & (preds > 0)
    if ok.sum() < 3:
        raise InsufficientDataError(
            f"f_c fit needs >= 3 valid (tau, prediction) points, got {ok.sum()}")
    return float(np.exp(np.mean(np.log(taus[ok]) - np.log(preds[ok]))))


# -- experiment: simulate ----------------------------------------------------

def run_simulate(cfg: ExperimentConfig, workers: int) -> dict:
    est = cfg.estimated_memory_mb(workers)
    if est > cfg.memory_budget_mb:
        raise ConfigError(
            f"estimated memory {est:.0f} MB for L={max(cfg.sizes)} x "
            f"{workers} workers exceeds budget {cfg.memory_budget_mb} MB; "
            "reduce sizes, workers, or raise memory_budget_mb")
    spec = cfg.interaction_spec()
    bath = cfg.bath_spec()
    ppd, decades = cfg.sampling_params()
    outdir = Path(cfg.out)
    summary = {"sizes": {}}
    for li, L in enumerate(cfg.sizes):
        schedule = make_sample_schedule(cfg.t_max, ppd, decades)
        base_seed = int(np.random.SeedSequence(
            (cfg.seed, li)).generate_state(1)[0])
        trajs = ensemble_run(L, spec, bath, cfg.t_max, runs=cfg.runs,
                             base_seed=base_seed, workers=workers,
                             schedule=schedule,
                             decoder_mode=cfg.decoder.get("mode", "auto"))
        curves = ensemble_average(trajs)
        h = cfg.config_hash()
        _write_curve_csv(outdir / f"z_L{L}.csv", curves.times,
                         curves.z_mean, curves.z_err, curves.n_runs,
                         config_hash=h)
        _write_curve_csv(outdir / f"zec_L{L}.csv", curves.times,
                         curves.zec_mean, curves.zec_err, curves.n_runs,
                         config_hash=h)
        _write_curve_csv(outdir / f"n_L{L}.csv", curves.times,
                         curves.n_mean, curves.n_err, curves.n_runs,
                         config_hash=h)
        t90 = decay_threshold_time(curves.times, curves.zec_mean, 0.9)
        summary["sizes"][str(L)] = {
            "base_seed": base_seed,
            "events_first_run": trajs[0].meta["n_events"],
            "t90_zec": t90 if t90 is not None else f">{cfg.t_max}",
        }
    _write_meta(outdir, cfg, {"summary": summary})
    return summary


# -- experiment: threshold ---------------------------------------------------

def _zec_batch(L: int, f: float, count: int, seed_key, mode: str) -> np.ndarray:
    geometry = build_lattice(L)
    ss = np.random.SeedSequence(entropy=seed_key[0], spawn_key=seed_key[1:])
    seeds = ss.generate_state(count, np.uint64)
    out = np.empty(count, dtype=np.int8)
    for i in range(count):
        pattern = inject_iid_errors(L, f, int(seeds[i]), geometry=geometry)
        out[i] = corrected_logical_z(pattern, geometry, mode=mode)
    return out


def _zec_batch_job(args):
    return _zec_batch(*args)


def _mean_zec(L, f, syndromes, seed, li, fi, workers, mode) -> tuple[float, float]:
    chunks = max(1, workers * 2)
    per = [syndromes // chunks + (1 if i < syndromes % chunks else 0)
           for i in range(chunks)]
    jobs = [(L, f, c, (seed, li, fi, ci), mode)
            for ci, c in enumerate(per) if c > 0]
    if workers <= 1:
        parts = [_zec_batch_job(j) for j in jobs]
    else:
        from .dynamics import pool_context

        with pool_context().Pool(workers) as pool:
            parts = list(pool.map(_zec_batch_job, jobs))
    vals = np.concatenate(parts).astype(float)
    return float(vals.mean()), float(vals.std(ddof=1) / math.sqrt(len(vals)))


def run_threshold(cfg: ExperimentConfig, workers: int) -> dict:
    blk = cfg.threshold
    if blk.get("dynamical", False):
        return _run_threshold_dynamical(cfg, workers)
    f_grid = blk.get("f_grid", [0.06, 0.08, 0.10, 0.12, 0.14])
    syndromes = int(blk.get("syndromes", 2000))
    bisect_iters = int(blk.get("bisect_iters", 3))
    mode = cfg.decoder.get("mode", "auto")
    outdir = Path(cfg.out)

    rows = []
    curves: dict[int, dict[float, tuple[float, float]]] = {}
    for li, L in enumerate(cfg.sizes):
        curves[L] = {}
        for fi, f in enumerate(f_grid):
            m, e = _mean_zec(L, float(f), syndromes, cfg.seed, li, fi,
                             workers, mode)
            curves[L][float(f)] = (m, e)
            rows.append((L, f"{f:.6g}", f"{m:.6g}", f"{e:.6g}", syndromes))
    _write_csv(outdir / "zec_vs_f.csv",
               ["L", "f", "zec_mean", "stderr", "n_syndromes"], rows,
               config_hash=cfg.config_hash())

    # locate crossings of successive-L curves, refining by bisection
    crossings = []
    for li in range(len(cfg.sizes) - 1):
        L1, L2 = cfg.sizes[li], cfg.sizes[li + 1]
        diff = [(f, curves[L2][f][0] - curves[L1][f][0],
                 math.hypot(curves[L2][f][1], curves[L1][f][1]))
                for f in sorted(curves[L1])]
        bracket = None
        for (fa, da, _), (fb, db, _) in zip(diff, diff[1:]):
            if da > 0 >= db or da >= 0 > db:
                bracket = [fa, fb, da, db]
                break
        if bracket is None:
            continue
        fa, fb, da, db = bracket
        for it in range(bisect_iters):
            fm = 0.5 * (fa + fb)
            m1, e1 = _mean_zec(L1, fm, syndromes, cfg.seed, 1000 + li,
                               100 + it, workers, mode)
            m2, e2 = _mean_zec(L2, fm, syndromes, cfg.seed, 2000 + li,
                               100 + it, workers, mode)
            dm = m2 - m1
            if dm > 0:
                fa, da = fm, dm
            else:
                fb, db = fm, dm
        slope = (db - da) / (fb - fa) if fb > fa else -1.0
        f_cross = fa + da * (fb - fa) / (da - db) if da != db else 0.5 * (fa + fb)
        noise = math.hypot(curves[L1][diff[0][0]][1],
                           curves[L2][diff[0][0]][1])
        err = max(0.5 * (fb - fa), abs(noise / slope) if slope != 0 else 0.0)
        crossings.append({"L_pair": [L1, L2], "f_c": f_cross, "err": err})

    if not crossings:
        result = {"status": "inconclusive",
                  "reason": "no curve crossing on the f grid"}
        _write_meta(outdir, cfg, {"threshold": result})
        return result
    fcs = np.array([c["f_c"] for c in crossings])
    errs = np.array([c["err"] for c in crossings])
    f_c = float(fcs.mean())
    f_c_err = float(math.hypot(errs.mean(), fcs.std() if len(fcs) > 1 else 0.0))
    result = {"status": "ok", "f_c": f_c, "f_c_err": f_c_err,
              "crossings": crossings}
    _write_meta(outdir, cfg, {"threshold": result})
    return result


def _run_threshold_dynamical(cfg: ExperimentConfig, workers: int) -> dict:
    """Flipped-spin fraction at the decay time of the non-interacting memory."""
    blk = cfg.threshold
    temperatures = blk.get("temperatures", [cfg.temperature()])
    level = float(blk.get("level", 0.5))
    L = max(cfg.sizes)
    ppd, decades = cfg.sampling_params()
    outdir = Path(cfg.out)
    rows = []
    results = []
    for ti, T in enumerate(temperatures):
        from .bath import balanced_explicit_bath

        bath = balanced_explicit_bath(T=float(T), J=cfg.interaction_spec().J)
        schedule = make_sample_schedule(cfg.t_max, ppd, decades)
        base_seed = int(np.random.SeedSequence(
            (cfg.seed, 77, ti)).generate_state(1)[0])
        trajs = ensemble_run(L, cfg.interaction_spec(), bath, cfg.t_max,
                             runs=cfg.runs, base_seed=base_seed,
                             workers=workers, schedule=schedule)
        curves = ensemble_average(trajs)
        tau = decay_threshold_time(curves.times, curves.zec_mean, level)
        if tau is None:
            results.append({"T": T, "status": "inconclusive"})
            continue
        frac = np.stack([tr.n_flipped for tr in trajs]).mean(axis=0) \
            / (2.0 * L * L)
        f_tau = float(np.interp(tau, curves.times, frac))
        rows.append((f"{T:.6g}", f"{tau:.6g}", f"{f_tau:.6g}"))
        results.append({"T": T, "tau": tau, "f_tau": f_tau, "status": "ok"})
    _write_csv(outdir / "dynamical_threshold.csv", ["T", "tau", "f_tau"],
               rows, config_hash=cfg.config_hash())
    status = "ok" if all(r["status"] == "ok" for r in results) else "inconclusive"
    out = {"status": status, "points": results, "level": level, "L": L}
    _write_meta(outdir, cfg, {"threshold_dynamical": out})
    return out


# -- experiment: lifetime scan ----------------------------------------------

def run_lifetime_scan(cfg: ExperimentConfig, workers: int) -> dict:
    blk = cfg.lifetime
    alphas = blk.get("alphas", [cfg.interaction_spec().alpha])
    level = float(blk.get("level", 0.9))
    fc_guess = float(blk.get("fc_guess", 0.03))
    t_factor = float(blk.get("t_max_factor", 6.0))
    T = cfg.temperature()
    bath = cfg.bath_spec()
    if not isinstance(bath, SpinBosonBath):
        raise ConfigError("lifetime-scan requires a spin-boson bath")
    ppd, decades = cfg.sampling_params()
    outdir = Path(cfg.out)
    rows = []
    scans = []
    for ai, alpha in enumerate(alphas):
        spec = cfg.interaction_spec(alpha=float(alpha))
        taus, preds_unit, Ls = [], [], []
        for li, L in enumerate(cfg.sizes):
            pred = lifetime_interacting(L, spec, bath, T, fc_guess)
            t_max = blk.get("t_max") or t_factor * pred.tau
            schedule = make_sample_schedule(t_max, ppd, decades)
            base_seed = int(np.random.SeedSequence(
                (cfg.seed, ai, li)).generate_state(1)[0])
            trajs = ensemble_run(L, spec, bath, t_max, runs=cfg.runs,
                                 base_seed=base_seed, workers=workers,
                                 schedule=schedule,
                                 decoder_mode=cfg.decoder.get("mode", "auto"))
            curves = ensemble_average(trajs)
            tau_ec = decay_threshold_time(curves.times, curves.zec_mean, level)
            tau_bare = decay_threshold_time(curves.times, curves.z_mean, level)
            unit = lifetime_interacting(L, spec, bath, T, fc_guess)
            taus.append(tau_ec if tau_ec is not None else float("nan"))
            preds_unit.append(unit.tau / fc_guess)  # prediction at f_c = 1
            Ls.append(L)
            rows.append((alpha, L,
                         _fmt(tau_bare), _fmt(tau_ec),
                         _fmt(unit.tau_asymptotic), unit.regime))
        try:
            fc = fit_fc(taus, preds_unit)
        except InsufficientDataError:
            fc = float("nan")
        scans.append({
            "alpha": alpha,
            "tau_ec": dict(zip(map(str, Ls), taus)),
            "fitted_f_c": fc,
            "tau_fit": {str(L): fc * p for L, p in zip(Ls, preds_unit)}
            if math.isfinite(fc) else {},
        })
    _write_csv(outdir / "lifetimes.csv",
               ["alpha", "L", "tau_bare", "tau_ec", "tau_asymptotic",
                "regime"], rows, config_hash=cfg.config_hash())
    out = {"scans": scans, "level": level}
    _write_meta(outdir, cfg, {"lifetime_scan": out})
    return out


def _fmt(x):
    return "" if x is None or (isinstance(x, float) and not math.isfinite(x)) \
        else f"{x:.8g}"


# -- experiment: equilibrium -------------------------------------------------

def run_equilibrium(cfg: ExperimentConfig, workers: int) -> dict:
    blk = cfg.equilibrium
    alphas = blk.get("alphas", [cfg.interaction_spec().alpha])
    sweeps = int(blk.get("sweeps", 30_000))
    T = cfg.temperature()
    outdir = Path(cfg.out)
    rows = []
    points = []
    for ai, alpha in enumerate(alphas):
        spec = cfg.interaction_spec(alpha=float(alpha))
        for li, L in enumerate(cfg.sizes):
            mf = solve_mean_field(L, spec, T)
            seed = int(np.random.SeedSequence(
                (cfg.seed, ai, li)).generate_state(1)[0])
            met = metropolis_sample(L, spec, T, sweeps=sweeps, seed=seed)
            exact = (exact_partition_equilibrium(L, spec, T)
                     if spec.constant_interaction else None)
            rows.append((L, alpha, spec.A, T,
                         f"{mf.n_mf:.10g}", f"{mf.N_mf:.10g}",
                         f"{mf.epsilon_mf:.10g}", f"{met.mean_N:.10g}",
                         f"{met.stderr:.4g}", _fmt(exact)))
            points.append({"L": L, "alpha": alpha, "N_mf": mf.N_mf,
                           "N_metropolis": met.mean_N,
                           "stderr": met.stderr, "N_exact": exact})
    _write_csv(outdir / "equilibrium.csv",
               ["L", "alpha", "A", "T", "n_mf", "N_mf", "epsilon_mf",
                "N_metropolis", "stderr", "N_exact"], rows,
               config_hash=cfg.config_hash())
    out = {"points": points, "sweeps": sweeps}
    _write_meta(outdir, cfg, {"equilibrium": out})
    return out


# -- experiment: nonsplit-pair -----------------------------------------------

def run_nonsplit(cfg: ExperimentConfig, workers: int) -> dict:
    spec = cfg.interaction_spec()
    bath = cfg.bath_spec()
    T = cfg.temperature()
    ppd, decades = cfg.sampling_params()
    outdir = Path(cfg.out)
    results = []
    for li, L in enumerate(cfg.sizes):
        schedule = make_sample_schedule(cfg.t_max, ppd, decades)
        base_seed = int(np.random.SeedSequence(
            (cfg.seed, li)).generate_state(1)[0])
        trajs = ensemble_run(L, spec, bath, cfg.t_max, runs=cfg.runs,
                             base_seed=base_seed, workers=workers,
                             schedule=schedule, record_zec=False)
        curves = ensemble_average(trajs)
        ode = nonsplit_pair_ode(L, spec, bath, cfg.t_max, times=schedule)
        npp = pair_partition_quasistationary(L, spec, T)
        z_pred = np.exp(-ode.n_star / (2.0 * L))
        rows = ((f"{t:.8g}", f"{n:.8g}", f"{e:.4g}", f"{o:.8g}",
                 f"{z:.8g}", f"{ze:.4g}", f"{zp:.8g}")
                for t, n, e, o, z, ze, zp in zip(
                    curves.times, curves.n_mean, curves.n_err,
                    ode.n_star, curves.z_mean, curves.z_err, z_pred))
        _write_csv(outdir / f"nonsplit_L{L}.csv",
                   ["t", "N_sim", "N_err", "N_ode", "z_sim", "z_err",
                    "z_pred"], rows, config_hash=cfg.config_hash())
        results.append({"L": L, "quasi_stationary_root": ode.quasi_stationary,
                        "pair_partition_N": npp,
                        "sim_N_final": float(curves.n_mean[-1])})
    out = {"sizes": results}
    _write_meta(outdir, cfg, {"nonsplit": out})
    return out


# -- experiment: single-pair -------------------------------------------------

def run_single_pair(cfg: ExperimentConfig, workers: int) -> dict:
    blk = cfg.single_pair
    q_max = float(blk.get("q_max", 0.5))
    q_points = int(blk.get("q_points", 20))
    bath = cfg.bath_spec()
    if not isinstance(bath, ExplicitRatesBath) or bath.gamma_minus != 0:
        raise ConfigError(
            "single-pair runs need bath.kind='explicit' with gamma_minus=0")
    outdir = Path(cfg.out)
    q_grid = np.linspace(q_max / q_points, q_max, q_points)
    formula_zec = np.array([single_pair_corrected_z_scaled(q) for q in q_grid])
    formula_z = np.array([single_pair_bare_z_scaled(q) for q in q_grid])
    results = []
    for li, L in enumerate(cfg.sizes):
        times = q_grid * L * L / bath.gamma0
        base_seed = int(np.random.SeedSequence(
            (cfg.seed, li)).generate_state(1)[0])
        trajs = ensemble_run(L, cfg.interaction_spec(), bath,
                             float(times[-1]), runs=cfg.runs,
                             base_seed=base_seed, workers=workers,
                             schedule=times, kind="single_pair")
        curves = ensemble_average(trajs)
        rows = ((f"{q:.8g}", f"{t:.8g}", f"{zm:.8g}", f"{ze:.4g}",
                 f"{zem:.8g}", f"{zee:.4g}", f"{fz:.8g}", f"{fe:.8g}")
                for q, t, zm, ze, zem, zee, fz, fe in zip(
                    q_grid, times, curves.z_mean, curves.z_err,
                    curves.zec_mean, curves.zec_err, formula_z,
                    formula_zec))
        _write_csv(outdir / f"single_pair_L{L}.csv",
                   ["q", "t", "z_sim", "z_err", "zec_sim", "zec_err",
                    "z_formula", "zec_formula"], rows,
                   config_hash=cfg.config_hash())
        dev_z = np.max(np.abs(curves.z_mean - formula_z)
                       / np.maximum(curves.z_err, 1e-9))
        dev_zec = np.max(np.abs(curves.zec_mean - formula_zec)
                         / np.maximum(curves.zec_err, 1e-9))
        results.append({"L": L, "max_sigma_dev_z": float(dev_z),
                        "max_sigma_dev_zec": float(dev_zec)})
    out = {"sizes": results, "q_grid": q_grid.tolist()}
    _write_meta(outdir, cfg, {"single_pair": out})
    return out


# -- experiment: analytics ---------------------------------------------------

def run_analytics(cfg: ExperimentConfig, workers: int) -> dict:
    blk = cfg.analytics
    f_c = float(blk.get("f_c", 0.1))
    alphas = blk.get("alphas", [cfg.interaction_spec().alpha])
    T = cfg.temperature()
    bath_blk = dict(cfg.bath) or {"kind": "spin-boson", "n": 1}
    bath_blk.setdefault("kind", "spin-boson")
    if bath_blk["kind"] != "spin-boson":
        raise ConfigError("analytics requires a spin-boson bath")
    bath = SpinBosonBath(n=int(bath_blk.get("n", 1)), T=T,
                         kappa=float(bath_blk.get("kappa", 1.0)))
    outdir = Path(cfg.out)
    rows = []
    for alpha in alphas:
        spec = cfg.interaction_spec(alpha=float(alpha))
        for L in cfg.sizes:
            p = lifetime_interacting(L, spec, bath, T, f_c)
            rows.append((L, alpha, f"{p.tau:.10g}",
                         _fmt(p.tau_asymptotic), p.regime, f_c,
                         f"{p.mean_field.n_mf:.10g}",
                         f"{p.mean_field.epsilon_mf:.10g}"))
    _write_csv(outdir / "lifetime_predictions.csv",
               ["L", "alpha", "tau_formula", "tau_asymptotic", "regime",
                "f_c", "n_mf", "epsilon_mf"], rows,
               config_hash=cfg.config_hash())
    spec = cfg.interaction_spec()
    scalars = {
        "tau_noninteracting": lifetime_noninteracting(bath, spec.J, f_c).tau,
        "critical_radius": critical_radius(spec, T),
        "f_c": f_c,
    }
    _write_meta(outdir, cfg, {"analytics": scalars})
    return scalars


# -- experiment: cavity ------------------------------------------------------

def run_cavity(cfg: ExperimentConfig, workers: int) -> dict:
    blk = cfg.cavity
    try:
        spec = CavitySpec(
            omega1=float(blk["omega1"]), omega2=float(blk["omega2"]),
            g=float(blk.get("g", 0.0)), nb1=float(blk.get("nb1", 0.0)),
            nb2=float(blk.get("nb2", 0.0)), Jx=float(blk.get("Jx", 1.0)),
            Jy=float(blk.get("Jy", 1.0)), Jz=float(blk.get("Jz", 1.0)),
            delta_x=float(blk.get("delta_x", 0.0)),
            delta_y=float(blk.get("delta_y", 0.0)))
    except KeyError as exc:
        raise ConfigError(f"cavity block missing required key {exc}")
    N = int(blk.get("N", 0))
    o1, o2, theta = bogoliubov_frequencies(spec, N)
    j_eff, a_eff = effective_parameters(spec)
    out = {
        "Omega1": o1, "Omega2": o2, "theta": theta,
        "J0": honeycomb_gap(spec.Jx, spec.Jy, spec.Jz),
        "g_from_couplings": plaquette_coupling(
            spec.Jx, spec.Jy, spec.Jz, spec.delta_x, spec.delta_y),
        "J_eff": j_eff, "A_eff": a_eff, "N": N,
        "perturbative": spec.perturbative,
    }
    outdir = Path(cfg.out)
    _write_meta(outdir, cfg, {"cavity": out})
    return out


# -- entry point -------------------------------------------------------------

_RUNNERS = {
    "simulate": run_simulate,
    "threshold": run_threshold,
    "lifetime-scan": run_lifetime_scan,
    "equilibrium": run_equilibrium,
    "nonsplit-pair": run_nonsplit,
    "single-pair": run_single_pair,
    "analytics": run_analytics,
    "cavity": run_cavity,
}


def available_recipes() -> list[str]:
    root = resources.files("anyonmem") / "recipes"
    return sorted(p.name[:-5] for p in root.iterdir() if p.name.endswith(".json"))


def load_recipe(name: str) -> dict:
    path = resources.files("anyonmem") / "recipes" / f"{name}.json"
    if not path.is_file():
        raise ConfigError(
            f"unknown recipe {name!r}; available: {available_recipes()}")
    return json.loads(path.read_text(encoding="utf-8"))


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="anyonmem",
        description="Toric-code quantum memory with long-range repulsive "
                    "anyon interactions: simulation and analysis toolkit.")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)
    for kind in _RUNNERS:
        p = sub.add_parser(kind, help=f"run a {kind} experiment")
        src = p.add_mutually_exclusive_group()
        src.add_argument("--config", help="path to a JSON config file")
        src.add_argument("--recipe", help="name of a packaged recipe "
                                          "(see `anyonmem recipes`)")
        p.add_argument("--set", action="append", default=[], metavar="K=V",
                       help="override a config field (dotted paths allowed)")
        p.add_argument("--out", help="output directory")
        p.add_argument("--seed", type=int, help="base seed (overrides config)")
        p.add_argument("--workers", type=int,
                       default=int(os.environ.get("ANYONMEM_WORKERS", "1")),
                       help="parallel worker processes over ensemble runs")
    sub.add_parser("recipes", help="list packaged experiment recipes")
    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    if args.command == "recipes":
        for name in available_recipes():
            print(name)
        return EXIT_OK
    try:
        if args.recipe:
            raw = load_recipe(args.recipe)
        elif args.config:
            raw = json.loads(Path(args.config).read_text(encoding="utf-8"))
        else:
            raw = {"experiment": args.command}
        raw.setdefault("experiment", args.command)
        if raw["experiment"] != args.command:
            raise ConfigError(
                f"config is for experiment {raw['experiment']!r} but the "
                f"command line says {args.command!r}")
        cfg = ExperimentConfig.from_dict(raw)
        if args.out:
            cfg.out = args.out
        if args.seed is not None:
            cfg.seed = args.seed
        cfg.apply_overrides(args.set)
    except (ConfigError, OSError, json.JSONDecodeError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    try:
        result = _RUNNERS[args.command](cfg, workers=max(1, args.workers))
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except InsufficientDataError as exc:
        print(f"inconclusive: {exc}", file=sys.stderr)
        return EXIT_INCONCLUSIVE

    if isinstance(result, dict) and result.get("status") == "inconclusive":
        print("inconclusive statistics; see metadata.json", file=sys.stderr)
        return EXIT_INCONCLUSIVE
    print(json.dumps(result, indent=2, default=_json_default))
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
