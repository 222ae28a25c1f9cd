"""Command-line front end.

Four subcommands cover the whole workflow:

    analytic   closed-form operating curves as CSV
    simulate   Monte Carlo empirical rates as CSV
    compare    align curve files on a common grid, report |delta P_D| gaps
    preset     canned experiment bundles (fig2..fig5) writing several CSVs

Exit codes: 0 success, 1 a compare gap exceeded --tolerance, 2 usage or
configuration errors.  CSV output is stable: fixed header order, 12
significant digits, line-feed endings, and fully determined by --seed.
"""

from __future__ import annotations

import argparse
import csv
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from obsense.analytic import (
    ANALYTIC_MODELS,
    CFAR_BASES,
    cfar_threshold,
    pd_exact,
    roc_analytic,
    threshold_for_pfa,
    variances_for,
)
from obsense.model import (
    ALPHA_DEFAULT,
    QUANTIZERS,
    RSSI_MODES,
    SensingConfig,
    parse_config_file,
)
from obsense.montecarlo import (
    DEFAULT_GRID_POINTS,
    DEFAULT_TRIALS,
    DENSE_GRID_POINTS,
    FULL_TRIALS,
    TrialPlan,
    pfa_spaced_grid,
    roc_compare,
    run,
)

DEFAULT_SEED = 20250810

ANALYTIC_HEADER = ["model", "N", "M", "L", "snr_db", "lambda", "pfa", "pd"]
ANALYTIC_VAR_COLUMNS = ["var_h0", "var_h1"]
SIM_HEADER = [
    "model", "N", "M", "L", "snr_db", "trials", "seed",
    "lambda", "pfa_hat", "pd_hat", "pfa_se", "pd_se",
]
SWEEP_HEADER = [
    "model", "N", "M", "L", "snr_db", "trials", "seed", "target_pfa",
    "lambda", "pfa_hat", "pd_hat", "pd_onebit", "pd_exact",
]

_SIGNAL_FLAG_TO_MODEL = {"cscg": "cscg", "qam4": "qam4-block-fading"}


def _fmt(value) -> str:
    if isinstance(value, (bool, np.bool_)):
        return str(int(value))
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return f"{float(value):.12g}"
    return str(value)


def _write_rows(out_path, header, rows) -> None:
    if out_path is None:
        writer = csv.writer(sys.stdout, lineterminator="\n")
        writer.writerow(header)
        writer.writerows([_fmt(v) for v in row] for row in rows)
        return
    with open(out_path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        writer.writerows([_fmt(v) for v in row] for row in rows)


# --- experiment presets ------------------------------------------------------


@dataclass(frozen=True)
class ExperimentPreset:
    """Parameter bundle reproducing one of the canned result figures."""

    name: str
    kind: str  # "roc", "m-sweep" or "snr-sweep"
    n_subbands: int = 1024
    m_occupied: int = 100
    avg_captures: int = 8
    snr_dbs: tuple = (0.0,)
    quantizers: tuple = ("none",)
    analytic_models: tuple = ()
    m_values: tuple = ()
    l_values: tuple = ()
    target_pfas: tuple = ()


PRESETS = {
    # Exact vs Gaussian-approximated vs simulated full-precision ROC.
    "fig2": ExperimentPreset(
        name="fig2",
        kind="roc",
        avg_captures=8,
        m_occupied=100,
        snr_dbs=(-3.0, 0.0, 3.0),
        quantizers=("none",),
        analytic_models=("exact", "normal"),
    ),
    # One-bit detection rate vs spectrum utilization at fixed target pfa.
    "fig3": ExperimentPreset(
        name="fig3",
        kind="m-sweep",
        avg_captures=4,
        snr_dbs=(0.0,),
        m_values=tuple(range(50, 501, 50)),
        target_pfas=(0.1, 0.3, 0.5),
        quantizers=("one-bit",),
    ),
    # One-bit vs full-precision ROC across SNRs.
    "fig4": ExperimentPreset(
        name="fig4",
        kind="roc",
        avg_captures=8,
        m_occupied=100,
        snr_dbs=(-3.0, 0.0, 3.0),
        quantizers=("none", "one-bit"),
        analytic_models=("exact", "onebit"),
    ),
    # Detection rate vs SNR for several averaging depths at pfa 0.1.
    "fig5": ExperimentPreset(
        name="fig5",
        kind="snr-sweep",
        m_occupied=100,
        l_values=(4, 8, 16),
        target_pfas=(0.1,),
        snr_dbs=tuple(float(s) for s in range(-10, 11)),
        quantizers=("one-bit",),
    ),
}


# --- scenario assembly -------------------------------------------------------


def build_config(args) -> SensingConfig:
    """Merge config-file values with CLI flags (flags win) into a scenario."""
    values = parse_config_file(args.config) if args.config else {}

    def pick(flag_value, key, default):
        if flag_value is not None:
            return flag_value
        return values.get(key, default)

    signal_model = values.get("signal_model", "cscg")
    if getattr(args, "signal", None) is not None:
        signal_model = _SIGNAL_FLAG_TO_MODEL[args.signal]

    snr = values.get("snr")
    signal_var = values.get("signal_var")
    snr_db = getattr(args, "snr_db", None)
    if snr_db is not None:
        snr = None
        signal_var = None

    cfg = SensingConfig.make(
        n_subbands=pick(getattr(args, "n", None), "n_subbands", 1024),
        m_occupied=pick(getattr(args, "m", None), "m_occupied", 100),
        avg_captures=pick(getattr(args, "avg", None), "avg_captures", 8),
        noise_var=pick(getattr(args, "noise_var", None), "noise_var", 1.0),
        signal_var=signal_var,
        snr=snr,
        snr_db=snr_db,
        subband_bandwidth=values.get("subband_bandwidth", 1e6),
        quantizer=pick(getattr(args, "quantizer", None), "quantizer", "none"),
        rssi_mode=pick(getattr(args, "rssi", None), "rssi_mode", "ideal"),
        signal_model=signal_model,
        leakage_alpha=pick(getattr(args, "alpha", None), "leakage_alpha", ALPHA_DEFAULT),
    )
    file_rate = values.get("sample_rate")
    if file_rate is not None and file_rate != cfg.sample_rate:
        raise ValueError(
            f"sample_rate {file_rate!r} contradicts n_subbands * subband_bandwidth "
            f"= {cfg.sample_rate!r}"
        )
    return cfg


def _parse_grid_spec(text: str, flag: str):
    parts = text.split(":")
    if len(parts) != 3:
        raise ValueError(f"{flag} expects LO:HI:POINTS, got {text!r}")
    try:
        lo, hi, points = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError:
        raise ValueError(f"{flag} expects numeric LO:HI:POINTS, got {text!r}") from None
    return lo, hi, points


def _resolve_seed(args) -> int:
    if args.seed is not None:
        return args.seed
    print(f"seed: {DEFAULT_SEED} (default; set --seed to override)", file=sys.stderr)
    return DEFAULT_SEED


def _threshold_grid(args, config: SensingConfig, vacant_var: float) -> np.ndarray:
    """Threshold grid from --lambda-grid, or falses-alarm spaced otherwise."""
    if args.lambda_grid is not None:
        lo, hi, points = _parse_grid_spec(args.lambda_grid, "--lambda-grid")
        if points < 1:
            raise ValueError("--lambda-grid needs at least 1 point")
        if points == 1:
            return np.array([lo], dtype=np.float64)
        grid = np.linspace(lo, hi, points)
        if np.any(grid < 0.0) or np.any(np.diff(grid) <= 0.0):
            raise ValueError("--lambda-grid must be non-negative and increasing")
        return grid
    lo, hi, points = _parse_grid_spec(args.pfa_grid, "--pfa-grid")
    if args.dense:
        points = DENSE_GRID_POINTS
    return pfa_spaced_grid(config.avg_captures, vacant_var, points=points, lo=lo, hi=hi)


# --- analytic ----------------------------------------------------------------


def _analytic_rows(config: SensingConfig, model: str, grid, include_vars: bool):
    curve = roc_analytic(config, model, grid)
    hv = variances_for(config, model)
    rows = []
    for lam, pfa, pd in curve.points:
        row = [
            model,
            config.n_subbands,
            config.m_occupied,
            config.avg_captures,
            config.snr_db,
            lam,
            pfa,
            pd,
        ]
        if include_vars:
            row += [hv.var_h0, hv.var_h1]
        rows.append(row)
    return rows


def cmd_analytic(args) -> int:
    config = build_config(args)
    models = args.model or ["exact"]
    include_vars = "onebit" in models
    header = ANALYTIC_HEADER + (ANALYTIC_VAR_COLUMNS if include_vars else [])
    rows = []
    for model in models:
        grid = _threshold_grid(args, config, variances_for(config, model).var_h0)
        rows.extend(_analytic_rows(config, model, grid, include_vars))
    _write_rows(args.out, header, rows)
    return 0


# --- simulate ----------------------------------------------------------------


def _sim_label(config: SensingConfig) -> str:
    return f"simulated-{config.quantizer}"


def _sim_rows(config: SensingConfig, trials: int, seed: int, rates):
    label = _sim_label(config)
    rows = []
    pfa_hat, pd_hat = rates.pfa_hat, rates.pd_hat
    pfa_se, pd_se = rates.pfa_se, rates.pd_se
    for i, lam in enumerate(rates.thresholds):
        rows.append(
            [
                label,
                config.n_subbands,
                config.m_occupied,
                config.avg_captures,
                config.snr_db,
                trials,
                seed,
                lam,
                pfa_hat[i],
                pd_hat[i],
                pfa_se[i],
                pd_se[i],
            ]
        )
    return rows


def _run_sim(config, grid, trials, seed, workers):
    plan = TrialPlan(trials=trials, master_seed=seed, lambda_grid=grid, config=config)
    rates, _ = run(plan, workers=workers)
    return rates


def _sim_vacant_var(config: SensingConfig, basis: str) -> float:
    if config.quantizer == "one-bit" and basis == "quantized":
        return variances_for(config, "onebit").var_h0
    return config.noise_var


def cmd_simulate(args) -> int:
    seed = _resolve_seed(args)
    if args.trials < 1:
        raise ValueError(f"--trials must be at least 1, got {args.trials}")
    if args.preset is not None:
        rows, header = _preset_sim_rows(
            PRESETS[args.preset], args, seed, trials=args.trials, workers=args.workers
        )
        _write_rows(args.out, header, rows)
        return 0
    config = build_config(args)
    grid = _threshold_grid(args, config, _sim_vacant_var(config, args.cfar_basis))
    rates = _run_sim(config, grid, args.trials, seed, args.workers)
    _write_rows(args.out, SIM_HEADER, _sim_rows(config, args.trials, seed, rates))
    return 0


# --- presets -----------------------------------------------------------------


def _preset_roc_configs(preset: ExperimentPreset, args):
    for quantizer in preset.quantizers:
        for snr_db in preset.snr_dbs:
            yield SensingConfig.make(
                n_subbands=preset.n_subbands,
                m_occupied=preset.m_occupied,
                avg_captures=preset.avg_captures,
                snr_db=snr_db,
                quantizer=quantizer,
                leakage_alpha=args.alpha if args.alpha is not None else ALPHA_DEFAULT,
            )


def _roc_points(args) -> int:
    return DENSE_GRID_POINTS if args.dense else DEFAULT_GRID_POINTS


def _preset_sim_rows(preset: ExperimentPreset, args, seed: int, trials: int, workers: int):
    """Simulation rows for a preset, as (rows, header)."""
    if preset.kind == "roc":
        rows = []
        for config in _preset_roc_configs(preset, args):
            grid = pfa_spaced_grid(
                config.avg_captures,
                _sim_vacant_var(config, args.cfar_basis),
                points=_roc_points(args),
            )
            rates = _run_sim(config, grid, trials, seed, workers)
            rows.extend(_sim_rows(config, trials, seed, rates))
        return rows, SIM_HEADER
    return _preset_sweep_rows(preset, args, seed, trials, workers), SWEEP_HEADER


def _preset_sweep_rows(preset: ExperimentPreset, args, seed: int, trials: int, workers: int):
    """CFAR sweep rows: one simulated point per (scenario, target pfa).

    Each row carries the one-bit closed form at the simulated threshold
    (pd_onebit) and the full-precision baseline at its own raw-noise
    threshold for the same target (pd_exact).
    """
    alpha = args.alpha if args.alpha is not None else ALPHA_DEFAULT
    if preset.kind == "m-sweep":
        scenarios = [
            (m, preset.avg_captures, preset.snr_dbs[0]) for m in preset.m_values
        ]
    elif preset.kind == "snr-sweep":
        scenarios = [
            (preset.m_occupied, captures, snr_db)
            for captures in preset.l_values
            for snr_db in preset.snr_dbs
        ]
    else:
        raise ValueError(f"preset {preset.name!r} is not a sweep")
    targets = tuple(sorted(preset.target_pfas, reverse=True))  # ascending thresholds
    rows = []
    for m_occupied, captures, snr_db in scenarios:
        config = SensingConfig.make(
            n_subbands=preset.n_subbands,
            m_occupied=m_occupied,
            avg_captures=captures,
            snr_db=snr_db,
            quantizer=preset.quantizers[0],
            leakage_alpha=alpha,
        )
        grid = np.array(
            [cfar_threshold(config, t, basis=args.cfar_basis) for t in targets]
        )
        rates = _run_sim(config, grid, trials, seed, workers)
        onebit = variances_for(config, "onebit")
        for i, target in enumerate(targets):
            lam_raw = threshold_for_pfa(target, captures, config.noise_var)
            rows.append(
                [
                    _sim_label(config),
                    config.n_subbands,
                    m_occupied,
                    captures,
                    config.snr_db,
                    trials,
                    seed,
                    target,
                    grid[i],
                    rates.pfa_hat[i],
                    rates.pd_hat[i],
                    pd_exact(grid[i], captures, onebit.var_h1),
                    pd_exact(lam_raw, captures, config.noise_var + config.signal_var),
                ]
            )
    return rows


_QUANTIZER_FILE_TAG = {"none": "unquantized", "one-bit": "onebit"}


def cmd_preset(args) -> int:
    preset = PRESETS[args.name]
    seed = _resolve_seed(args)
    if args.trials < 1:
        raise ValueError(f"--trials must be at least 1, got {args.trials}")
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []

    if preset.kind == "roc":
        for model in preset.analytic_models:
            rows = []
            include_vars = model == "onebit"
            header = ANALYTIC_HEADER + (ANALYTIC_VAR_COLUMNS if include_vars else [])
            for config in _preset_roc_configs(preset, args):
                if config.quantizer != "none":
                    continue
                cfg = config.with_updates(quantizer="one-bit") if model == "onebit" else config
                grid = pfa_spaced_grid(
                    cfg.avg_captures,
                    variances_for(cfg, model).var_h0,
                    points=_roc_points(args),
                )
                rows.extend(_analytic_rows(cfg, model, grid, include_vars))
            path = out_dir / f"{preset.name}_analytic_{model}.csv"
            _write_rows(path, header, rows)
            written.append(path)
        for quantizer in preset.quantizers:
            rows = []
            for config in _preset_roc_configs(preset, args):
                if config.quantizer != quantizer:
                    continue
                grid = pfa_spaced_grid(
                    config.avg_captures,
                    _sim_vacant_var(config, args.cfar_basis),
                    points=_roc_points(args),
                )
                rates = _run_sim(config, grid, args.trials, seed, args.workers)
                rows.extend(_sim_rows(config, args.trials, seed, rates))
            path = out_dir / f"{preset.name}_sim_{_QUANTIZER_FILE_TAG[quantizer]}.csv"
            _write_rows(path, SIM_HEADER, rows)
            written.append(path)
    else:
        rows = _preset_sweep_rows(preset, args, seed, args.trials, args.workers)
        path = out_dir / f"{preset.name}_sweep.csv"
        _write_rows(path, SWEEP_HEADER, rows)
        written.append(path)

    for path in written:
        print(path)
    return 0


# --- compare -----------------------------------------------------------------


@dataclass(frozen=True)
class LoadedCurve:
    label: str
    scenario_key: tuple
    domain: str
    x: np.ndarray
    y: np.ndarray


def _float(row, column, path):
    try:
        return float(row[column])
    except (KeyError, TypeError):
        raise ValueError(f"{path}: missing column {column!r}") from None
    except ValueError:
        raise ValueError(f"{path}: non-numeric {column!r} value {row[column]!r}") from None


def _key_float(value: float) -> float:
    return round(value, 9)


def load_curves(path) -> list:
    """Parse an analytic, simulate or sweep CSV into comparable curves."""
    path = Path(path)
    with open(path, "r", newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        fields = reader.fieldnames or []
        rows = list(reader)
    if not rows:
        raise ValueError(f"{path}: no data rows")

    if "target_pfa" in fields:
        y_col = "pd_hat"
        if y_col not in fields:
            raise ValueError(f"{path}: sweep file lacks a pd_hat column")
        groups: dict = {}
        for row in rows:
            gk = (row.get("model", ""), row["N"], row["L"], row["target_pfa"])
            groups.setdefault(gk, []).append(row)
        curves = []
        for (model, n, captures, target), grp in groups.items():
            snrs = np.array([_float(r, "snr_db", path) for r in grp])
            ms = np.array([_float(r, "M", path) for r in grp])
            y = np.array([_float(r, y_col, path) for r in grp])
            if np.unique(snrs).size > 1:
                domain, x, const = "snr_db", snrs, _key_float(ms[0])
            else:
                domain, x, const = "m", ms, _key_float(snrs[0])
            key = (
                "sweep",
                int(float(n)),
                int(float(captures)),
                _key_float(float(target)),
                domain,
                const,
            )
            curves.append(
                LoadedCurve(
                    label=f"{path.name}:{model or 'sweep'}:L={captures},pfa={target}",
                    scenario_key=key,
                    domain=domain,
                    x=x,
                    y=y,
                )
            )
        return curves

    if "pfa" in fields and "pd" in fields:
        x_col, y_col = "pfa", "pd"
    elif "pfa_hat" in fields and "pd_hat" in fields:
        x_col, y_col = "pfa_hat", "pd_hat"
    else:
        raise ValueError(f"{path}: expected pfa/pd or pfa_hat/pd_hat columns")
    if "lambda" not in fields:
        raise ValueError(f"{path}: missing column 'lambda'")
    groups = {}
    for row in rows:
        gk = (
            row.get("model", ""),
            row.get("N", ""),
            row.get("M", ""),
            row.get("L", ""),
            row.get("snr_db", ""),
        )
        groups.setdefault(gk, []).append(row)
    curves = []
    for (model, n, m, captures, snr_db), grp in groups.items():
        x = np.array([_float(r, x_col, path) for r in grp])
        y = np.array([_float(r, y_col, path) for r in grp])
        key = (
            "roc",
            int(float(n)),
            int(float(m)),
            int(float(captures)),
            _key_float(float(snr_db)),
        )
        curves.append(
            LoadedCurve(
                label=f"{path.name}:{model or 'curve'}@{snr_db}dB",
                scenario_key=key,
                domain="pfa",
                x=x,
                y=y,
            )
        )
    return curves


def _match_pairs(reference: list, others: list) -> list:
    ref_by_key: dict = {}
    for curve in reference:
        if curve.scenario_key in ref_by_key:
            raise ValueError(
                "reference file holds several curves for one scenario; "
                "write one model per file before comparing"
            )
        ref_by_key[curve.scenario_key] = curve
    pairs = []
    for curve in others:
        ref = ref_by_key.get(curve.scenario_key)
        if ref is None:
            if len(reference) == 1 and len(others) == 1:
                ref = reference[0]
            else:
                raise ValueError(
                    f"no reference curve matches scenario of {curve.label!r}"
                )
        pairs.append((ref, curve))
    return pairs


_DOMAIN_LABEL = {"pfa": "P_FA", "snr_db": "SNR (dB)", "m": "occupied sub-bands M"}


def _write_plot(path, curves, domain) -> None:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(figsize=(6.0, 4.5))
    for curve in curves:
        order = np.argsort(curve.x, kind="stable")
        ax.plot(curve.x[order], curve.y[order], marker=".", linewidth=1.2, label=curve.label)
    ax.set_xlabel(_DOMAIN_LABEL.get(domain, domain))
    ax.set_ylabel("P_D")
    ax.grid(True, alpha=0.3)
    ax.legend(fontsize=7, loc="lower right")
    fig.tight_layout()
    fig.savefig(path, format="svg")
    plt.close(fig)


def cmd_compare(args) -> int:
    if len(args.files) < 2:
        raise ValueError("compare needs at least two CSV files")
    reference = load_curves(args.files[0])
    pairs = []
    all_curves = list(reference)
    for other_path in args.files[1:]:
        others = load_curves(other_path)
        pairs.extend(_match_pairs(reference, others))
        all_curves.extend(others)

    max_gap = 0.0
    gap_arrays = []
    for ref, other in pairs:
        if ref.domain != other.domain:
            raise ValueError(
                f"cannot compare {other.label!r} ({other.domain}) against "
                f"{ref.label!r} ({ref.domain})"
            )
        report = roc_compare((ref.x, ref.y), (other.x, other.y), points=args.points)
        gap_arrays.append(np.abs(report.pd_values[1] - report.pd_values[0]))
        print(
            f"{other.label} vs {ref.label}: "
            f"max |dPd| = {report.max_gap:.6f}, mean |dPd| = {report.mean_gap:.6f}"
        )
        max_gap = max(max_gap, report.max_gap)
    mean_gap = float(np.mean(np.concatenate(gap_arrays))) if gap_arrays else 0.0
    print(f"overall: max |dPd| = {max_gap:.6f}, mean |dPd| = {mean_gap:.6f}")

    if args.plot is not None:
        domains = {c.domain for c in all_curves}
        if len(domains) > 1:
            raise ValueError(f"cannot plot curves over mixed domains {sorted(domains)}")
        _write_plot(args.plot, all_curves, domains.pop())
        print(f"plot written to {args.plot}")

    if args.tolerance is not None and max_gap > args.tolerance:
        print(f"FAIL: max gap {max_gap:.6f} exceeds tolerance {args.tolerance:.6f}")
        return 1
    return 0


# --- parser ------------------------------------------------------------------


def _add_scenario_flags(sp) -> None:
    sp.add_argument("--config", metavar="PATH", help="key=value scenario file")
    sp.add_argument("--n", type=int, metavar="N", help="number of sub-bands (default 1024)")
    sp.add_argument("--m", type=int, metavar="M", help="occupied sub-bands (default 100)")
    sp.add_argument("--avg", type=int, metavar="L", help="captures per window (default 8)")
    sp.add_argument("--snr-db", type=float, help="per-sub-band SNR in dB (default 0)")
    sp.add_argument("--noise-var", type=float, help="per-sub-band noise power (default 1)")
    sp.add_argument("--alpha", type=float, help="one-bit leakage fraction (default 1/e)")
    sp.add_argument("--quantizer", choices=QUANTIZERS, help="receive pipeline front end")
    sp.add_argument("--rssi", choices=RSSI_MODES, help="power reading mode")
    sp.add_argument("--signal", choices=sorted(_SIGNAL_FLAG_TO_MODEL), help="primary signal model")


def _add_grid_flags(sp) -> None:
    sp.add_argument(
        "--pfa-grid",
        default="1e-3:1:50",
        metavar="LO:HI:POINTS",
        help="log-spaced false-alarm grid mapped to thresholds (default 1e-3:1:50)",
    )
    sp.add_argument(
        "--lambda-grid",
        metavar="LO:HI:POINTS",
        help="linear threshold grid; overrides --pfa-grid",
    )
    sp.add_argument(
        "--dense", action="store_true", help=f"use {DENSE_GRID_POINTS} grid points"
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="obsense",
        description="Wideband spectrum sensing: one-bit quantized energy detection toolkit.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_analytic = sub.add_parser("analytic", help="closed-form operating curves as CSV")
    _add_scenario_flags(p_analytic)
    _add_grid_flags(p_analytic)
    p_analytic.add_argument(
        "--model",
        action="append",
        choices=ANALYTIC_MODELS,
        help="curve model; repeat for several (default: exact)",
    )
    p_analytic.add_argument("--out", metavar="PATH", help="CSV path (default: stdout)")
    p_analytic.set_defaults(func=cmd_analytic)

    p_sim = sub.add_parser("simulate", help="Monte Carlo empirical rates as CSV")
    _add_scenario_flags(p_sim)
    _add_grid_flags(p_sim)
    p_sim.add_argument(
        "--trials",
        type=int,
        default=DEFAULT_TRIALS,
        help=f"windows to draw (default {DEFAULT_TRIALS}; {FULL_TRIALS} for full-scale runs)",
    )
    p_sim.add_argument("--seed", type=int, help=f"master seed (default {DEFAULT_SEED})")
    p_sim.add_argument("--workers", type=int, default=1, help="worker processes")
    p_sim.add_argument(
        "--cfar-basis",
        choices=CFAR_BASES,
        default="quantized",
        help="vacant-band variance used to place false-alarm spaced thresholds",
    )
    p_sim.add_argument(
        "--preset", choices=sorted(PRESETS), help="run a figure preset's simulation part"
    )
    p_sim.add_argument("--out", metavar="PATH", help="CSV path (default: stdout)")
    p_sim.set_defaults(func=cmd_simulate)

    p_cmp = sub.add_parser("compare", help="report |delta P_D| gaps between curve files")
    p_cmp.add_argument("files", nargs="+", metavar="CSV", help="reference file first")
    p_cmp.add_argument("--tolerance", type=float, help="exit 1 if the max gap exceeds this")
    p_cmp.add_argument("--points", type=int, default=101, help="alignment grid points")
    p_cmp.add_argument("--plot", metavar="PATH.svg", help="write an overlay plot")
    p_cmp.set_defaults(func=cmd_compare)

    p_preset = sub.add_parser("preset", help="run a full figure preset into CSV files")
    p_preset.add_argument("name", choices=sorted(PRESETS))
    p_preset.add_argument(
        "--trials",
        type=int,
        default=DEFAULT_TRIALS,
        help=f"windows per curve (default {DEFAULT_TRIALS}; {FULL_TRIALS} for full scale)",
    )
    p_preset.add_argument("--seed", type=int, help=f"master seed (default {DEFAULT_SEED})")
    p_preset.add_argument("--workers", type=int, default=1)
    p_preset.add_argument("--alpha", type=float, help="one-bit leakage fraction")
    p_preset.add_argument(
        "--cfar-basis", choices=CFAR_BASES, default="quantized",
        help="vacant-band variance for threshold placement",
    )
    p_preset.add_argument("--dense", action="store_true")
    p_preset.add_argument("--out", default=".", metavar="DIR", help="output directory")
    p_preset.set_defaults(func=cmd_preset)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
