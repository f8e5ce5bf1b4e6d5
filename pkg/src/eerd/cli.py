"""Command line interface.

Every subcommand prints a JSON document to stdout and, when an output
directory is set, writes its artifacts there.  The exit status is 0 iff
every check the subcommand executed passed.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .errors import EERDError
from .scenarios import NAMES, resolve

EXIT_FAILED = 1
EXIT_ERROR = 2


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        # JSON has no inf/nan; keep them readable and parseable
        return v if np.isfinite(v) else repr(v)
    return obj


def dumps(doc) -> str:
    return json.dumps(_jsonable(doc), indent=2) + "\n"


class Context:
    def __init__(self, args):
        self.args = args
        self.cfg = resolve(args.config)
        if args.seed is not None:
            self.cfg.simulation["seed"] = args.seed
            self.cfg.verify["seed"] = args.seed
        out = args.out if args.out is not None else self.cfg.output["out_dir"]
        self.out = Path(out)
        self.formats = set(self.cfg.output["formats"])

    def write(self, name: str, text: str, fmt: str):
        if fmt not in self.formats:
            return None
        self.out.mkdir(parents=True, exist_ok=True)
        path = self.out / name
        path.write_text(text)
        return path


def cmd_check_model(ctx: Context) -> tuple[dict, bool]:
    from .model import check_hypotheses

    rep = check_hypotheses(ctx.cfg.model)
    doc = {"scenario": ctx.cfg.name, "model": ctx.cfg.model.to_dict(), **rep.to_dict()}
    ctx.write("check_model.json", dumps(doc), "json")
    return doc, rep.passed


def cmd_equilibrium(ctx: Context) -> tuple[dict, bool]:
    from .equilibrium import compute_equilibrium, verify_equilibrium

    g = ctx.cfg.grid
    eq = compute_equilibrium(ctx.cfg.E0, 0.0, g, ctx.cfg.model)
    checks = verify_equilibrium(eq, ctx.cfg.model, g)
    doc = {"scenario": ctx.cfg.name, "equilibrium": eq.to_dict(), "checks": checks}
    ctx.write("equilibrium.json", dumps(doc), "json")
    return doc, checks["passed"]


def cmd_constants(ctx: Context) -> tuple[dict, bool]:
    from .pipeline import constants_document, setup

    st = setup(ctx.cfg)
    doc = {"scenario": ctx.cfg.name, "constants": constants_document(st)}
    ctx.write("constants.json", dumps(doc), "json")
    return doc, True


def _simulate(ctx: Context):
    from .pipeline import setup, simulate, trajectory_summary
    from .simulator import write_trajectory_csv

    st = setup(ctx.cfg)
    traj = simulate(st)
    summary = trajectory_summary(st, traj)
    if "csv" in ctx.formats:
        ctx.out.mkdir(parents=True, exist_ok=True)
        write_trajectory_csv(ctx.out / "trajectory.csv", traj)
    return st, traj, summary


def cmd_simulate(ctx: Context) -> tuple[dict, bool]:
    _, _, summary = _simulate(ctx)
    ctx.write("simulate.json", dumps(summary), "json")
    return summary, summary["passed"]


def _read_trajectory_csv(path) -> dict:
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    header, body = rows[0], np.array(rows[1:], dtype=float)
    return {name: body[:, i] for i, name in enumerate(header)}


def cmd_plot(ctx: Context) -> tuple[dict, bool]:
    from .plotting import plot_conservation, plot_decay

    csv_path = ctx.out / "trajectory.csv"
    if csv_path.exists():
        cols = _read_trajectory_csv(csv_path)
        summary_path = ctx.out / "simulate.json"
        rate = json.loads(summary_path.read_text())["predicted_rate"] if summary_path.exists() else None
    else:
        cols = None
        rate = None
    if cols is None or rate is None:
        st, traj, summary = _simulate(ctx)
        cols, rate = traj.columns(), st.ec.rate
    ctx.out.mkdir(parents=True, exist_ok=True)
    written = []
    if "svg" in ctx.formats:
        plot_decay(cols, rate, ctx.out / "decay.svg", title=f"{ctx.cfg.name}: relative entropy")
        plot_conservation(cols, ctx.out / "conservation.svg", title=f"{ctx.cfg.name}: conserved quantities")
        written = ["decay.svg", "conservation.svg"]
    doc = {"scenario": ctx.cfg.name, "figures": written}
    return doc, True


def cmd_verify(ctx: Context) -> tuple[dict, bool]:
    from .verifier import battery

    a = ctx.args
    configs = [resolve(s) for s in a.scenario] if a.scenario else [ctx.cfg]
    states = a.states if a.states is not None else ctx.cfg.verify["states"]
    margin = a.margin if a.margin is not None else ctx.cfg.verify["margin"]
    seed = a.seed if a.seed is not None else ctx.cfg.verify["seed"]
    rep = battery(configs, int(states), int(seed), float(margin))
    doc = {
        "scenarios": [c.name for c in configs],
        "states_per_scenario": int(states),
        "seed": int(seed),
        "margin": float(margin),
        **rep.to_dict(),
    }
    ctx.write("verify.json", dumps(doc), "json")
    return doc, rep.passed


def cmd_report(ctx: Context) -> tuple[dict, bool]:
    doc = {"scenario": ctx.cfg.name, "config": ctx.cfg.to_dict()}
    ok = True
    for key, fn in (("check_model", cmd_check_model), ("equilibrium", cmd_equilibrium),
                    ("constants", cmd_constants), ("simulate", cmd_simulate),
                    ("plot", cmd_plot), ("verify", cmd_verify)):
        sub, passed = fn(ctx)
        doc[key] = sub
        ok = ok and passed
    doc["passed"] = ok
    ctx.write("report.json", dumps(doc), "json")
    return doc, ok


COMMANDS = {
    "check-model": (cmd_check_model, "check the structural hypotheses of the model functions"),
    "equilibrium": (cmd_equilibrium, "compute and verify the equilibrium for the configured energy"),
    "constants": (cmd_constants, "compute every explicit constant of the decay estimates"),
    "simulate": (cmd_simulate, "integrate from the configured initial state and check decay"),
    "verify-eep": (cmd_verify, "check the functional inequalities on random admissible states"),
    "report": (cmd_report, "run every subcommand and aggregate the results"),
    "plot": (cmd_plot, "render SVG figures of a trajectory"),
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="eerd",
        description="Electro-energy-reaction-diffusion simulator and entropy-method verifier.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")
    for name, (_, help_text) in COMMANDS.items():
        p = sub.add_parser(name, help=help_text, description=help_text)
        p.add_argument("--config", default="reference",
                       help=f"TOML file or built-in scenario ({', '.join(NAMES)}); default: reference")
        p.add_argument("--out", default=None, help="output directory (default: [output] out_dir)")
        p.add_argument("--seed", type=int, default=None, help="override the random seed")
        if name in ("verify-eep", "report"):
            p.add_argument("--states", type=int, default=None, help="random states per scenario")
            p.add_argument("--margin", type=float, default=None, help="slack factor on every bound")
            p.add_argument("--scenario", action="append", default=None,
                           help="scenario config to include (repeatable); default: --config")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    for attr in ("states", "margin", "scenario"):
        if not hasattr(args, attr):
            setattr(args, attr, None)
    try:
        ctx = Context(args)
        doc, passed = COMMANDS[args.command][0](ctx)
    except EERDError as exc:
        print(f"eerd: error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_ERROR
    sys.stdout.write(dumps(doc))
    return 0 if passed else EXIT_FAILED


if __name__ == "__main__":
    sys.exit(main())
