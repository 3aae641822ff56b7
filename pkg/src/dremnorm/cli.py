"""Command-line interface.

Verbs:
    run        full plant pipeline (simulate, filter, mix, normalize, estimate)
    synthetic  synthetic exponentially decaying regressor runs
    bounds     excitation report of a synthetic regressor, no estimation output
    sweep      excitation-normalized loop over a list of gains

Exit codes: 0 success, 1 configuration error, 2 numerical failure.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import yaml

from . import analysis, experiment
from .errors import ConfigError, NumericalError
from .signals import SampledSignal


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", type=Path, help="YAML configuration file")
    p.add_argument("--preset", help=f"bundled preset: {experiment.preset_names()}")
    p.add_argument("--out-dir", type=Path, default=Path("out"), help="output directory")


def _add_synthetic_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument(
        "--amplitude",
        type=float,
        action="append",
        help="regressor amplitude (repeatable; default from config)",
    )
    p.add_argument("--rate", type=float, help="decay rate (default from config)")
    p.add_argument("--eta-min", type=float, help="override the order floor")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dremnorm",
        description="Identification experiments with excitation-normalized gradient loops",
    )
    sub = parser.add_subparsers(dest="verb", required=True)

    p_run = sub.add_parser("run", help="run the full plant pipeline")
    _add_common(p_run)
    p_run.add_argument("--noise", type=float, help="override output-noise amplitude")
    p_run.add_argument("--seed", type=int, help="override noise seed")
    p_run.add_argument(
        "--ub-mode", choices=experiment.UB_MODES, help="upper-bound curve mode"
    )

    p_syn = sub.add_parser("synthetic", help="synthetic decaying-regressor runs")
    _add_common(p_syn)
    _add_synthetic_flags(p_syn)

    p_bounds = sub.add_parser("bounds", help="excitation report only")
    _add_common(p_bounds)
    _add_synthetic_flags(p_bounds)
    p_bounds.add_argument(
        "--gamma", type=float, default=1.0, help="gain used in the printed bounds"
    )

    p_sweep = sub.add_parser("sweep", help="gain sweep of the normalized loop")
    _add_common(p_sweep)
    p_sweep.add_argument(
        "--gamma-sweep",
        default=",".join(str(g) for g in experiment.DEFAULT_GAMMA_SWEEP),
        help="comma-separated gain values",
    )
    return parser


def _load(args, default_preset: str):
    if args.config is not None and args.preset is not None:
        raise ConfigError("give either --config or --preset, not both")
    if args.config is not None:
        return experiment.load_config(args.config)
    return experiment.load_preset(args.preset or default_preset)


def _require_plant(cfg) -> experiment.ExperimentConfig:
    if not isinstance(cfg, experiment.ExperimentConfig):
        raise ConfigError("this verb needs a plant configuration (a 'plant' section)")
    return cfg


def _require_synthetic(cfg) -> experiment.SyntheticConfig:
    if not isinstance(cfg, experiment.SyntheticConfig):
        raise ConfigError("this verb needs a synthetic configuration (kind: exp_decay)")
    return cfg


def _cmd_run(args) -> None:
    cfg = _require_plant(_load(args, "plant_steps"))
    overrides = cfg.to_dict()
    if args.noise is not None:
        overrides["noise_amplitude"] = args.noise
    if args.seed is not None:
        overrides["seed"] = args.seed
    if args.ub_mode is not None:
        overrides["ub_mode"] = args.ub_mode
    cfg = experiment.ExperimentConfig.from_dict(overrides)
    result = experiment.run_experiment(cfg)
    args.out_dir.mkdir(parents=True, exist_ok=True)
    csv_path = experiment.emit_csv(result, args.out_dir / "run.csv")
    plot_paths = experiment.emit_plot(result, args.out_dir)
    experiment.save_config(cfg, args.out_dir / "config.yaml")
    for run in result.runs:
        print(
            f"u = {run.u_amp:g}: regression identity residual "
            f"{run.identity_residual:.3e}"
        )
    for p in [csv_path, *plot_paths]:
        print(p)


def _synthetic_results(args, cfg) -> list[experiment.SyntheticResult]:
    if args.eta_min is not None:
        data = cfg.to_dict()
        data["eta_min"] = args.eta_min
        cfg = experiment.parse_config(data)
    amplitudes = args.amplitude or [cfg.amplitude]
    rate = args.rate if args.rate is not None else cfg.decay_rate
    return [
        experiment.run_synthetic(experiment.EXP_DECAY, a, rate, cfg)
        for a in amplitudes
    ]


def _report_dict(res: experiment.SyntheticResult) -> dict:
    rep = res.report
    return {
        "amplitude": res.amplitude,
        "decay_rate": res.decay_rate,
        "t_s": rep.t_s,
        "T": rep.T,
        "alpha": rep.alpha,
        "phi_energy": rep.phi_energy,
        "eta_min": rep.eta_min,
        "T_j": rep.T_j,
        "delta_min": rep.delta_min,
        "alpha_classical": rep.alpha_classical,
    }


def _cmd_synthetic(args) -> None:
    cfg = _require_synthetic(_load(args, "exp_decay_unit"))
    results = _synthetic_results(args, cfg)
    args.out_dir.mkdir(parents=True, exist_ok=True)
    csv_path = experiment.emit_synthetic_csv(results, args.out_dir / "synthetic.csv")
    print(csv_path)
    for res in results:
        summary = _report_dict(res)
        summary["final_errors"] = {
            v: vt.err_final for v, vt in res.trajectories.items()
        }
        print(yaml.safe_dump({"run": summary}, sort_keys=True), end="")


def _cmd_bounds(args) -> None:
    cfg = _require_synthetic(_load(args, "exp_decay_unit"))
    results = _synthetic_results(args, cfg)
    for res in results:
        out = _report_dict(res)
        signal = SampledSignal(dt=cfg.dt, samples=res.omega)
        regime = analysis.classify_regime(signal, 0.0, cfg.window, res.report.eta_min)
        out["regime"] = regime.value if regime is not None else None
        if regime is not None:
            lower, upper = analysis.error_bounds(res.report, args.gamma, 1.0, regime)
            out["bounds"] = {"gamma": args.gamma, "lower": lower, "upper": upper}
        print(yaml.safe_dump({"report": out}, sort_keys=True), end="")


def _cmd_sweep(args) -> None:
    cfg = _require_plant(_load(args, "plant_steps"))
    try:
        gammas = [float(v) for v in str(args.gamma_sweep).split(",") if v.strip()]
    except ValueError as exc:
        raise ConfigError(f"bad --gamma-sweep value: {exc}") from exc
    if not gammas:
        raise ConfigError("--gamma-sweep needs at least one value")
    sweep = experiment.run_gamma_sweep(cfg, gammas)
    args.out_dir.mkdir(parents=True, exist_ok=True)
    print(experiment.emit_sweep_csv(sweep, args.out_dir / "sweep.csv"))
    print(experiment.emit_sweep_plot(sweep, args.out_dir))


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    handlers = {
        "run": _cmd_run,
        "synthetic": _cmd_synthetic,
        "bounds": _cmd_bounds,
        "sweep": _cmd_sweep,
    }
    try:
        handlers[args.verb](args)
    except (ConfigError, OSError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 1
    except ValueError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 1
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
