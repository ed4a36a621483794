"""Command-line front end.

Exit codes: 0 success, 2 invalid input, 3 numerical failure.  Reports go to
stdout (json or csv); wall time goes to stderr so stdout stays reproducible.
When simulate/experiment stream CSV to stdout, the report moves to stderr.
"""
from __future__ import annotations

import argparse
import csv
import dataclasses
import hashlib
import io
import json
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import hinfnorm, model, positivity, riccati, simulate, synthesis
from .errors import NumericError, ParseError, ValidationError


@dataclass
class CommandReport:
    command: str
    inputs: dict = field(default_factory=dict)  # path -> sha256
    results: dict = field(default_factory=dict)
    tolerances: dict = field(default_factory=dict)
    wall_time: float = 0.0

    def add_input(self, path):
        self.inputs[str(path)] = hashlib.sha256(Path(path).read_bytes()).hexdigest()

    def render(self, fmt="json") -> str:
        body = {"command": self.command, "inputs": self.inputs,
                "results": _plain(self.results), "tolerances": self.tolerances}
        if fmt == "json":
            return json.dumps(body, indent=2, sort_keys=True) + "\n"
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["section", "key", "value"])
        for section in ("inputs", "results", "tolerances"):
            for k, v in sorted(body[section].items()):
                w.writerow([section, k, json.dumps(v)])
        return buf.getvalue()


def _plain(obj):
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _plain(obj.tolist())
    if isinstance(obj, (np.floating, float)):
        return float(obj) + 0.0
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj


def _load_system(args, report, path=None):
    path = path or args.system
    report.add_input(path)
    return model.load_system(path, args.sym_tol, args.stab_margin)


def _norm_tols(args):
    return {"bisect_tol": args.tol, "imag_tol": hinfnorm.IMAG_TOL}


# --- subcommands --------------------------------------------------------------

def cmd_synth(args, report):
    sys_ = _load_system(args, report)
    report.tolerances.update(sym_tol=args.sym_tol, stab_margin=args.stab_margin,
                             cond_limit=synthesis.COND_LIMIT, **_norm_tols(args))
    if args.weights:
        report.add_input(args.weights)
        w = model.load_weights(args.weights)
        gain = synthesis.synth_weighted(sys_, w)
        ss = hinfnorm.closed_loop(sys_, gain, w)
        report.results["gain"] = gain.l
        report.results["gamma"] = hinfnorm.hinf_norm_bisect(ss, args.tol).gamma
        report.results["gamma_source"] = "norm oracle (weighted output)"
    else:
        gain = synthesis.synth_optimal(sys_)
        report.results["gain"] = gain.l
        report.results["gamma"] = synthesis.optimal_gamma(sys_)
        report.results["gamma_source"] = "closed form"
    if args.out:
        model.save_gain(gain, args.out)
        report.results["written"] = str(args.out)


def cmd_norm(args, report):
    if args.ss:
        report.add_input(args.ss)
        ss = model.load_statespace(args.ss)
    else:
        if not (args.system and args.gain):
            raise ValidationError("norm needs --ss FILE or both --system and --gain")
        sys_ = _load_system(args, report)
        report.add_input(args.gain)
        ss = hinfnorm.closed_loop(sys_, model.load_gain(args.gain))
    res = hinfnorm.hinf_norm_bisect(ss, args.tol)
    report.results.update(dataclasses.asdict(res))
    report.tolerances.update(_norm_tols(args))


def cmd_verify(args, report):
    sys_ = _load_system(args, report)
    g_formula = synthesis.optimal_gamma(sys_)
    lstar = synthesis.synth_optimal(sys_)
    g_bisect = hinfnorm.hinf_norm_bisect(hinfnorm.closed_loop(sys_, lstar), args.tol).gamma
    lg, g_are = riccati.synth_are(sys_, args.gamma_tol)
    bisect_bound = max(1e-6, 1e-6 * g_formula)
    are_bound = max(1e-4, 1e-4 * g_formula)
    report.results.update(
        gamma_formula=g_formula, gamma_bisection=g_bisect, gamma_are=g_are,
        gain_optimal=lstar.l, gain_are=lg.l,
        bisection_agrees=abs(g_bisect - g_formula) <= bisect_bound,
        are_agrees=abs(g_are - g_formula) <= are_bound,
    )
    report.tolerances.update(_norm_tols(args), gamma_tol=args.gamma_tol,
                             bisection_agreement=bisect_bound, are_agreement=are_bound)
    if not (report.results["bisection_agrees"] and report.results["are_agrees"]):
        raise NumericError("oracles disagree beyond tolerance")


def cmd_coord(args, report):
    report.add_input(args.blocks)
    obj = model.load_json(args.blocks)
    raw = obj.get("blocks")
    if not isinstance(raw, list) or not raw:
        raise ParseError(f"{args.blocks}: field 'blocks' must be a non-empty list")
    blocks = []
    for k, blk in enumerate(raw):
        if not isinstance(blk, dict):
            raise ParseError(f"{args.blocks}: blocks[{k}] must be an object")
        src = f"{args.blocks}: blocks[{k}]"
        blocks.append((model.matrix_field(blk, "a", src), model.matrix_field(blk, "b", src)))
    plant = synthesis.CoordinatedPlant(tuple(blocks))
    cg = synthesis.synth_coordinated(plant)
    stacked = cg.stacked()
    m = plant.m
    row_sum = sum(stacked[i * m:(i + 1) * m] for i in range(plant.nu))
    report.results.update(nu=plant.nu, local_terms=list(cg.local_terms),
                          global_terms=list(cg.global_terms), stacked=stacked,
                          max_abs_input_sum=float(np.max(np.abs(row_sum))))
    report.tolerances["input_sum"] = 1e-12
    if args.out:
        model.save_gain(model.GainMatrix(stacked), args.out)
        report.results["written"] = str(args.out)


def cmd_positivity(args, report):
    sys_ = _load_system(args, report)
    if args.gain:
        report.add_input(args.gain)
        gain = model.load_gain(args.gain)
        gain.check_conforms(sys_)
    else:
        gain = synthesis.synth_optimal(sys_)
    cert = positivity.internal_positivity(positivity.state_map(sys_, gain), args.pos_tol)
    report.results.update(dataclasses.asdict(cert), verdict=cert.verdict)
    if not args.gain and not np.any(sys_.a - np.diag(np.diag(sys_.a))):
        report.results["minus_bbt_metzler"] = positivity.closed_loop_positivity_condition(
            sys_, args.pos_tol)
    report.tolerances["pos_tol"] = args.pos_tol


def cmd_simulate(args, report):
    sys_ = _load_system(args, report)
    if args.gain:
        report.add_input(args.gain)
        gain = model.load_gain(args.gain)
    else:
        gain = synthesis.synth_optimal(sys_)
    try:
        w = np.ones(sys_.n) if args.w is None else np.array(
            [float(v) for v in args.w.split(",")])
    except ValueError as exc:
        raise ValidationError(f"--w: {exc}") from exc
    if w.shape != (sys_.n,):
        raise ValidationError(f"--w needs {sys_.n} comma-separated values")
    ss = hinfnorm.closed_loop(sys_, gain)
    traj = simulate.step_response(ss, w, args.horizon, args.dt, gain=gain)
    text = traj.to_csv()
    if args.out:
        Path(args.out).write_text(text)
        report.results["written"] = str(args.out)
    report.results.update(steps=len(traj.times) - 1, final_state=traj.states[-1],
                          min_state=float(traj.states.min()))
    report.tolerances.update(horizon=args.horizon, dt=args.dt)
    return None if args.out else text


def cmd_experiment(args, report):
    params = {}
    if args.config:
        report.add_input(args.config)
        params.update(model.load_json(args.config))
    for k in ("seed", "horizon", "dt", "num_systems", "workers"):
        v = getattr(args, k)
        if v is not None:
            params[k] = v
    try:
        cfg = simulate.ExperimentConfig(**params)
    except (TypeError, ValueError) as exc:
        raise ValidationError(f"bad experiment config: {exc}") from exc
    res = simulate.run_comparison_experiment(cfg)
    text = res.to_csv()
    if args.out:
        Path(args.out).write_text(text)
        report.results["written"] = str(args.out)
    worst = max((abs(d.norms["Lstar"] - d.norms["LG"]) / d.gamma_star for d in res.draws),
                default=float("nan"))
    report.results.update(
        used=res.used, failed=[list(f) for f in res.failures],
        max_relative_norm_gap=worst,
        peaks={f"{c}_{d}_x{i + 1}": res.peak(c, d, i)
               for c in simulate.CONTROLLERS for d in res.disturbances for i in range(3)},
    )
    report.tolerances.update(dataclasses.asdict(cfg))
    report.tolerances.pop("workers")
    return None if args.out else text


COMMANDS = {
    "synth": cmd_synth, "norm": cmd_norm, "verify": cmd_verify, "coord": cmd_coord,
    "positivity": cmd_positivity, "simulate": cmd_simulate, "experiment": cmd_experiment,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--tol", type=float, default=hinfnorm.BISECT_TOL,
                        help="relative bisection tolerance of the norm oracle")
    common.add_argument("--gamma-tol", type=float, default=riccati.GAMMA_TOL)
    common.add_argument("--sym-tol", type=float, default=model.SYM_TOL)
    common.add_argument("--stab-margin", type=float, default=model.STAB_MARGIN)
    common.add_argument("--pos-tol", type=float, default=positivity.POS_TOL)
    common.add_argument("--out", type=Path)
    common.add_argument("--format", choices=("json", "csv"), default="json")

    p = argparse.ArgumentParser(prog="symhinf", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("synth", parents=[common], help="closed-form optimal gain")
    s.add_argument("system", type=Path)
    s.add_argument("--weights", type=Path)

    s = sub.add_parser("norm", parents=[common], help="H-infinity norm by bisection")
    s.add_argument("--ss", type=Path, help="state-space file {a,b,c,d}")
    s.add_argument("--system", type=Path)
    s.add_argument("--gain", type=Path)

    s = sub.add_parser("verify", parents=[common], help="formula vs bisection vs Riccati")
    s.add_argument("system", type=Path)

    s = sub.add_parser("coord", parents=[common], help="coordinated gain (sum u_i = 0)")
    s.add_argument("blocks", type=Path)

    s = sub.add_parser("positivity", parents=[common], help="internal positivity of w -> x")
    s.add_argument("system", type=Path)
    s.add_argument("--gain", type=Path)

    for name, helptext in (("simulate", "closed-loop step response CSV"),
                           ("experiment", "randomized L* vs Riccati comparison CSV")):
        s = sub.add_parser(name, parents=[common], help=helptext)
        s.add_argument("--horizon", type=float, default=None if name == "experiment" else 10.0)
        s.add_argument("--dt", type=float, default=None if name == "experiment" else 0.01)
        if name == "simulate":
            s.add_argument("system", type=Path)
            s.add_argument("--gain", type=Path)
            s.add_argument("--w", help="comma-separated constant disturbance (default all ones)")
        else:
            s.add_argument("config", type=Path, nargs="?")
            s.add_argument("--seed", type=int)
            s.add_argument("--num-systems", type=int)
            s.add_argument("--workers", type=int)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    report = CommandReport(args.command)
    start = time.perf_counter()
    try:
        extra = COMMANDS[args.command](args, report)
    except ValidationError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    except (FileNotFoundError, IsADirectoryError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except NumericError as exc:
        if report.results:
            sys.stdout.write(report.render(args.format))
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 3
    report.wall_time = time.perf_counter() - start
    if extra is not None:
        # CSV payload owns stdout; the report moves to stderr
        sys.stdout.write(extra)
        sys.stderr.write(report.render(args.format))
    else:
        sys.stdout.write(report.render(args.format))
    print(f"wall_time_s={report.wall_time:.6f}", file=sys.stderr)
    return 0


if __name__ == "__main__":
    sys.exit(main())
