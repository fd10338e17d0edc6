"""Command-line experiment runner.

Subcommands ``pure``, ``chain``, ``fluct``, ``cat`` and ``verify``. Curves are
written as CSV (fixed columns, 17 significant digits) or JSON with a full
config echo. Exit codes: 0 ok, 1 verification failure, 2 usage error,
3 internal disagreement between closed form and numeric oracle.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from dataclasses import asdict, dataclass
from typing import Optional

import numpy as np

from . import __version__, gme, kernels, models, verify
from .errors import GmeError
from .spin_core import PureState, named_state, random_state

EXIT_OK, EXIT_VERIFY, EXIT_USAGE, EXIT_INTERNAL = 0, 1, 2, 3
CSV_COLUMNS = ("t", "E_closed", "E_numeric", "ax", "ay", "az", "residual")
PURE_TOL = 1e-8
CURVE_TOL = {"chain": 1e-10, "delta-pair": 1e-10, "gaussian": 1e-8, "empirical": 1e-10, "cat": 1e-12}

DEFAULTS = {
    "n": 2,
    "omega": 1.0,
    "chi": 0.0,
    "tau": 1.0,
    "dist": "delta-pair",
    "init": None,
    "t_min": 0.0,
    "t_max": 1.0,
    "steps": 100,
    "seed": 0,
    "restarts": 20,
    "output": None,
    "format": "csv",
    "samples": None,
}


class UsageError(Exception):
    pass


@dataclass
class CurveRecord:
    t: float
    E_closed: float
    E_numeric: Optional[float]
    ax: Optional[float]
    ay: Optional[float]
    az: Optional[float]
    residual: Optional[float]

    def __post_init__(self):
        for e in (self.E_closed, self.E_numeric):
            if e is not None and not 0.0 <= e <= 0.5:
                raise ValueError(f"entanglement {e!r} outside [0, 1/2]")


def _fmt(x):
    return "" if x is None else format(float(x), ".17g")


def _json_safe(obj):
    if isinstance(obj, dict):
        return {k: _json_safe(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_json_safe(v) for v in obj]
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    return obj


def curve_to_csv(records):
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for r in records:
        writer.writerow([_fmt(getattr(r, c)) for c in CSV_COLUMNS])
    return buf.getvalue()


def curve_to_json(command, config, records):
    doc = {
        "command": command,
        "version": __version__,
        "seed": config["seed"],
        "config": config,
        "records": [asdict(r) for r in records],
    }
    return json.dumps(_json_safe(doc), indent=2, sort_keys=True) + "\n"


def _emit(text, output):
    if output:
        with open(output, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def time_grid(cfg):
    steps, t_min, t_max = int(cfg["steps"]), float(cfg["t_min"]), float(cfg["t_max"])
    if steps < 1:
        raise UsageError("--steps must be >= 1")
    if t_max < t_min:
        raise UsageError("--t-max must be >= --t-min")
    return np.linspace(t_min, t_max, steps)


def resolve_config(args):
    """Built-in defaults < JSON config file < explicit flags."""
    cfg = dict(DEFAULTS)
    if getattr(args, "config", None):
        try:
            with open(args.config) as fh:
                file_cfg = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise UsageError(f"cannot read config {args.config}: {exc}") from None
        for key, value in file_cfg.items():
            key = key.replace("-", "_")
            if key not in DEFAULTS and key != "initial":
                raise UsageError(f"unknown config key {key!r}")
            cfg[key] = value
    for key in list(DEFAULTS):
        value = getattr(args, key, None)
        if value is not None:
            cfg[key] = value
    if cfg["format"] not in ("csv", "json"):
        raise UsageError("--format must be csv or json")
    return cfg


def _finish(command, cfg, records, tol):
    text = curve_to_csv(records) if cfg["format"] == "csv" else curve_to_json(command, cfg, records)
    _emit(text, cfg["output"])
    worst = max((r.residual for r in records if r.residual is not None), default=0.0)
    if worst > tol:
        print(f"{command}: closed form and numeric oracle disagree, max residual {worst:.3e} > {tol:.1e}", file=sys.stderr)
        return EXIT_INTERNAL
    return EXIT_OK


# ---------------------------------------------------------------- pure


def parse_state(spec, seed=0, dims=None, normalize=False):
    spec = spec.strip()
    head, _, arg = spec.partition(":")
    if head.lower() == "random":
        rng = np.random.default_rng(int(arg) if arg else seed)
        return random_state(dims or (2, 2), rng)
    if "," in spec and head.lower() != "product":
        try:
            amps = np.array([complex(x.replace(" ", "")) for x in spec.split(",")])
        except ValueError:
            raise UsageError(f"cannot parse amplitude list {spec!r}") from None
        if normalize:
            amps = amps / np.linalg.norm(amps)
        return PureState(amps, dims)
    return named_state(spec)


def run_pure(args):
    dims = tuple(int(x) for x in args.dims.split(",")) if args.dims else None
    try:
        psi = parse_state(args.state, args.seed or 0, dims, args.normalize)
    except (GmeError, ValueError) as exc:
        raise UsageError(str(exc)) from None
    if psi.n_sites > 2:
        psi = PureState(psi.amplitudes, (2, psi.dim // 2))
    by_mean = gme.gme_pure_mean_spin(psi).value
    by_schmidt = gme.gme_pure_schmidt(psi).value
    by_oracle = gme.gme_pure_oracle(psi).value
    report = {
        "state": args.state,
        "dims": list(psi.dims),
        "E_mean_spin": by_mean,
        "E_schmidt": by_schmidt,
        "E_oracle": by_oracle,
        "residual_schmidt": abs(by_mean - by_schmidt),
        "residual_oracle": abs(by_mean - by_oracle),
    }
    if args.format == "json":
        text = json.dumps(report, indent=2, sort_keys=True) + "\n"
    else:
        text = "".join(f"{k}: {_fmt(v) if isinstance(v, float) else v}\n" for k, v in report.items())
    _emit(text, args.output)
    if max(report["residual_schmidt"], report["residual_oracle"]) > PURE_TOL:
        print("pure: methods disagree", file=sys.stderr)
        return EXIT_INTERNAL
    return EXIT_OK


# ---------------------------------------------------------------- chain


def chain_params(cfg):
    n, omega = int(cfg["n"]), float(cfg["omega"])
    if cfg.get("initial") is not None:
        angles = [tuple(map(float, pair)) for pair in cfg["initial"]]
        if len(angles) != n:
            raise UsageError(f"config 'initial' has {len(angles)} sites, expected {n}")
        return models.ChainParams.from_angles(omega, angles)
    init = cfg["init"] or "all-up"
    if init.startswith("angles:"):
        try:
            angles = [tuple(float(v) for v in pair.split(",")) for pair in init[len("angles:"):].split(";")]
        except ValueError:
            raise UsageError(f"cannot parse {init!r}; expected angles:th,ph;th,ph;...") from None
        if len(angles) != n:
            raise UsageError(f"{len(angles)} angle pairs given for {n} sites")
        return models.ChainParams.from_angles(omega, angles)
    return models.ChainParams.named(init, n, omega, np.random.default_rng(int(cfg["seed"])))


def run_chain(cfg):
    params = chain_params(cfg)
    records = []
    for t in time_grid(cfg):
        closed = models.chain_gme_closed(params, t)
        numeric = models.chain_gme_numeric(params, t)
        s = numeric.diagnostics["mean_spin"]
        records.append(CurveRecord(t, closed.value, numeric.value, s[0], s[1], s[2], abs(closed.value - numeric.value)))
    return _finish("chain", cfg, records, CURVE_TOL["chain"])


# ---------------------------------------------------------------- fluct


def distribution(cfg):
    kind = cfg["dist"]
    if kind == "delta-pair":
        return models.DeltaPair(float(cfg["chi"]))
    if kind == "gaussian":
        return models.Gaussian(float(cfg["tau"]))
    if kind == "empirical":
        if not cfg["samples"]:
            raise UsageError("--dist empirical needs --samples FILE (two-column CSV: Omega, weight)")
        return models.Empirical.from_csv(cfg["samples"])
    raise UsageError(f"unknown distribution {kind!r}")


def run_fluct(cfg):
    init = (cfg["init"] or "aligned").replace("-", "_")
    params = models.FluctParams(float(cfg["omega"]), distribution(cfg), init)
    records = []
    for t in time_grid(cfg):
        closed = models.fluct_gme(params, t)
        numeric = models.fluct_gme_numeric(params, t)
        a = closed.diagnostics["bloch"]
        records.append(CurveRecord(t, closed.value, numeric.value, a.ax, a.ay, a.az, abs(closed.value - numeric.value)))
    return _finish("fluct", cfg, records, CURVE_TOL[cfg["dist"]])


# ---------------------------------------------------------------- cat


def run_cat(cfg):
    params = models.CatParams(int(cfg["n"]), float(cfg["tau"]))
    records = []
    for t in time_grid(cfg):
        closed = models.cat_gme(params, t)
        numeric = models.cat_gme_assembled(params, t)
        a = numeric.diagnostics["bloch"]
        records.append(CurveRecord(t, closed.value, numeric.value, a.ax, a.ay, a.az, abs(closed.value - numeric.value)))
    return _finish("cat", cfg, records, CURVE_TOL["cat"])


# ---------------------------------------------------------------- verify


def run_verify(args):
    report = verify.run(args.suite, seed=args.seed or 0, budget=args.budget, restarts=args.restarts or 20)
    report["version"] = __version__
    report["kernel_backend"] = kernels.BACKEND
    _emit(json.dumps(report, indent=2, sort_keys=True) + "\n", args.output)
    return EXIT_OK if report["passed"] else EXIT_VERIFY


# ---------------------------------------------------------------- parser


def _curve_flags(p, n=True):
    if n:
        p.add_argument("--n", type=int, help="number of spins")
    p.add_argument("--omega", type=float, help="Ising coupling J/hbar")
    p.add_argument("--t-min", dest="t_min", type=float)
    p.add_argument("--t-max", dest="t_max", type=float)
    p.add_argument("--steps", type=int, help="number of grid points")
    p.add_argument("--seed", type=int)
    p.add_argument("--output", help="output file (default stdout)")
    p.add_argument("--format", choices=("csv", "json"))
    p.add_argument("--config", help="JSON file mirroring the flags; flags override it")


def build_parser():
    parser = argparse.ArgumentParser(prog="gmespin", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("pure", help="GME of a pure state by three methods")
    p.add_argument("--state", required=True,
                   help="bell | ghz[:N] | all-up[:N] | product:up,down,plus,... | random[:SEED] | a0,a1,... amplitudes")
    p.add_argument("--dims", help="factor dimensions for random/amplitude states, e.g. 2,4")
    p.add_argument("--normalize", action="store_true", help="divide amplitude lists by their norm")
    p.add_argument("--seed", type=int)
    p.add_argument("--output")
    p.add_argument("--format", choices=("text", "json"), default="text")

    p = sub.add_parser("chain", help="Ising chain entanglement curve")
    _curve_flags(p)
    p.add_argument("--init", help="all-up | x-plus | random | angles:th,ph;th,ph;...")

    p = sub.add_parser("fluct", help="two spins in a fluctuating transverse field")
    _curve_flags(p, n=False)
    p.add_argument("--dist", choices=("delta-pair", "gaussian", "empirical"))
    p.add_argument("--chi", type=float)
    p.add_argument("--tau", type=float)
    p.add_argument("--samples", help="two-column CSV (Omega, weight) for --dist empirical")
    p.add_argument("--init", choices=("aligned", "anti-aligned"))

    p = sub.add_parser("cat", help="Schroedinger cat decoherence")
    _curve_flags(p)
    p.add_argument("--tau", type=float)

    p = sub.add_parser("verify", help="run oracle suites")
    p.add_argument("suite", choices=verify.SUITES + ("all",))
    p.add_argument("--seed", type=int)
    p.add_argument("--budget", choices=tuple(verify.BUDGETS), default="quick")
    p.add_argument("--restarts", type=int, help="convex-roof restarts per state")
    p.add_argument("--output")
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "pure":
            return run_pure(args)
        if args.command == "verify":
            return run_verify(args)
        cfg = resolve_config(args)
        runner = {"chain": run_chain, "fluct": run_fluct, "cat": run_cat}[args.command]
        return runner(cfg)
    except (UsageError, GmeError, ValueError) as exc:
        if isinstance(exc, GmeError) and not isinstance(exc, ValueError):
            print(f"gmespin {args.command}: {exc}", file=sys.stderr)
            return EXIT_INTERNAL
        print(f"gmespin {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
