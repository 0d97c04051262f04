"""Command-line harness.

Subcommands: experiment {pendulum|chain|wave}, train, predict,
diagnose-separability, check-bounds.  Exit codes: 0 success, 1 runtime
failure, 2 configuration error.
"""

from __future__ import annotations

import argparse
import os
import sys as _sys

import numpy as np

from .config import EXPERIMENTS, SCALES, load_config
from .data import build_hb_dataset, sample_states, separability_diagnostic
from .errors import ConfigError, SymkernError
from .experiment import build_system, run_experiment, run_training, sampler_for
from .ioutil import ensure_dir, read_json, write_csv
from .predictor import PredictorModel, contraction_margin, rollout
from .surrogate import surrogate_from_dict
from .systems import resonance_check, step_size_bound


def _common_flags(p):
    p.add_argument("--config", default=None, help="JSON config file")
    p.add_argument("--out", default="out", help="artifact directory")
    p.add_argument("--seed", type=int, default=None, help="override the global seed")
    p.add_argument("--scale", choices=SCALES, default=None, help="desk or paper sizes")


def build_parser():
    parser = argparse.ArgumentParser(prog="symkern",
                                     description="symplectic kernel predictor harness")
    sub = parser.add_subparsers(dest="command", required=True)

    p_exp = sub.add_parser("experiment", help="run one benchmark end to end")
    p_exp.add_argument("name", choices=EXPERIMENTS)
    _common_flags(p_exp)

    p_train = sub.add_parser("train", help="sample data and train models only")
    _common_flags(p_train)

    p_pred = sub.add_parser("predict", help="roll out a trained model")
    p_pred.add_argument("--model", required=True, help="model JSON file")
    p_pred.add_argument("--x0", required=True, help="comma-separated initial state")
    p_pred.add_argument("--steps", type=int, required=True, help="macro steps")
    p_pred.add_argument("--out", default="out", help="artifact directory")

    p_diag = sub.add_parser("diagnose-separability",
                            help="emit the separable-vs-mixed data tables")
    _common_flags(p_diag)

    p_chk = sub.add_parser("check-bounds",
                           help="step-size bound, resonance set, contraction margin")
    _common_flags(p_chk)
    p_chk.add_argument("--model", default=None, help="model JSON for the contraction margin")

    return parser


def _cmd_experiment(args):
    cfg = load_config(args.config, experiment=args.name, scale=args.scale, seed=args.seed)
    summary = run_experiment(cfg, args.out)
    for tag, info in summary["per_dt"].items():
        print(f"dT={tag}: kernel={info['kernel']['family']}(eps={info['kernel']['epsilon']}) "
              f"centers={info['centers']} rel_final={info['rel_pred_final']:.3e} "
              f"baseline={info['rel_baseline_final']:.3e}")
    print(f"artifacts: {summary['out_dir']}")
    return 0


def _cmd_train(args):
    cfg = load_config(args.config, scale=args.scale, seed=args.seed)
    summary = run_training(cfg, args.out)
    for tag, info in summary["per_dt"].items():
        print(f"dT={tag}: kernel={info['kernel']['family']}(eps={info['kernel']['epsilon']}) "
              f"centers={info['centers']} train_residual={info['train_residual']:.3e}")
    print(f"artifacts: {summary['out_dir']}")
    return 0


def _cmd_predict(args):
    doc = read_json(args.model)
    surr, delta_t = surrogate_from_dict(doc)
    x0 = np.array([float(v) for v in args.x0.split(",")], dtype=float)
    model = PredictorModel(surr, delta_t)
    traj = rollout(model, x0, args.steps)
    ensure_dir(args.out)
    n = surr.dim // 2
    header = (["t"] + [f"q_{k + 1}" for k in range(n)] + [f"p_{k + 1}" for k in range(n)]
              + ["solver_iterations"])
    rows = [
        (traj.times[k],) + tuple(traj.states[k]) + (int(traj.solver_iterations[k]),)
        for k in range(traj.states.shape[0])
    ]
    path = os.path.join(args.out, "rollout.csv")
    write_csv(path, header, rows)
    print(f"wrote {path}")
    return 0


def _cmd_diagnose(args):
    cfg = load_config(args.config, experiment="pendulum" if args.config is None else None,
                      scale=args.scale, seed=args.seed)
    sys_, _ = build_system(cfg)
    states = sample_states(sys_, sampler_for(cfg, sys_))
    data = build_hb_dataset(sys_, states, cfg["delta_t_list"][0], cfg["micro_dt"])
    table_a, table_b = separability_diagnostic(data)
    ensure_dir(args.out)
    path_a = os.path.join(args.out, "separability_a.csv")
    path_b = os.path.join(args.out, "separability_b.csv")
    write_csv(path_a, ["component", "input", "output"],
              list(zip(table_a["component"], table_a["input"], table_a["output"])))
    write_csv(path_b, ["xi_q", "xi_p", "y_q", "y_p"],
              list(zip(table_b["xi_q"], table_b["xi_p"], table_b["y_q"], table_b["y_p"])))
    print(f"wrote {path_a} and {path_b}")
    return 0


def _cmd_check_bounds(args):
    cfg = load_config(args.config, scale=args.scale, seed=args.seed)
    sys_, _ = build_system(cfg)
    states = sample_states(sys_, sampler_for(cfg, sys_))
    horizon = cfg["test"]["horizon"]
    bound = step_size_bound(sys_, states, horizon)
    print(f"system={sys_.name} certified macro step bound: {bound:.6e} (horizon {horizon})")
    for dt in cfg["delta_t_list"]:
        marker = "OK" if dt < bound else "beyond the certified bound"
        print(f"  dT={dt}: {marker}")
        if sys_.quadratic:
            det_d, resonant = resonance_check(sys_, dt)
            print(f"  dT={dt}: det D = {det_d:.6e} resonant={resonant}")
    if args.model:
        surr, delta_t = surrogate_from_dict(read_json(args.model))
        model = PredictorModel(surr, delta_t)
        sample = states[: min(50, states.shape[0])]
        margin = contraction_margin(model, sample)
        status = "contractive" if margin < 1.0 else "NOT certified contractive"
        print(f"model dT={delta_t}: contraction margin {margin:.6e} ({status})")
    return 0


_HANDLERS = {
    "experiment": _cmd_experiment,
    "train": _cmd_train,
    "predict": _cmd_predict,
    "diagnose-separability": _cmd_diagnose,
    "check-bounds": _cmd_check_bounds,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return _HANDLERS[args.command](args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=_sys.stderr)
        return 2
    except (SymkernError, OSError, np.linalg.LinAlgError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=_sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
