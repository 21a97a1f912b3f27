"""Command-line interface: ``dbcs stream | simulate | eval | tune-eta``."""

from __future__ import annotations

import argparse
import json
import sys
from typing import List, Optional

from . import __version__
from .boundaries import exact_eta, tune_eta
from .core import BoundaryConfig
from .dgps import DEFAULTS, KINDS, DgpSpec, realize
from .engine import Decision, Engine, EngineSpec, StopRule, group_steps
from .errors import ContractError, DbcsError
from .evalsuite import SCENARIOS, peeking_ttest_curve, rows_to_csv, svg_curve
from .io import BAND_HEADER, band_row, fmt, open_input, read_records, write_records

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_USAGE = 2
EXIT_STOPPED = 3

_RULE_KINDS = {
    "null-exclusion": "null_exclusion",
    "harm": "harm_threshold",
    "futility": "futility_below_epsilon",
    "horizon": "horizon",
}


class UsageError(Exception):
    """Flag values that are individually valid but inconsistent."""


def _prob(text: str) -> float:
    v = float(text)
    if not (0.0 < v < 1.0):
        raise argparse.ArgumentTypeError(f"must lie in (0, 1), got {text}")
    return v


def _positive(text: str) -> float:
    v = float(text)
    if not v > 0.0:
        raise argparse.ArgumentTypeError(f"must be positive, got {text}")
    return v


def _pos_int(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError(f"must be a positive integer, got {text}")
    return v


def _nonneg_int(text: str) -> int:
    v = int(text)
    if v < 0:
        raise argparse.ArgumentTypeError(f"must be a nonnegative integer, got {text}")
    return v


def _seed(text: str) -> int:
    v = int(text)
    if not (0 <= v < 2**64):
        raise argparse.ArgumentTypeError("seed must be a 64-bit unsigned integer")
    return v


def _engine_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--design", choices=["fixed", "bandit", "timeseries", "panel"], default="fixed")
    p.add_argument("--boundary", choices=["exact", "asymptotic", "mixture"], default="asymptotic")
    p.add_argument("--alpha", type=_prob, default=0.05)
    p.add_argument("--eta", type=_positive, default=0.77)
    p.add_argument("--m-bound", type=_positive, default=None, help="M / p_min for exact and mixture boundaries")
    p.add_argument("--rho", type=_positive, default=1.0)
    p.add_argument("--proxy", action="store_true", help="use the residual y - yhat")
    p.add_argument("--rule", action="append", choices=sorted(_RULE_KINDS), default=None,
                   help="stop rule; may be repeated")
    p.add_argument("--epsilon", type=float, default=None)
    p.add_argument("--horizon", type=_pos_int, default=None)
    p.add_argument("--warmup", type=_nonneg_int, default=0)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="dbcs", description="Design-based anytime-valid confidence sequences")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    ps = sub.add_parser("stream", help="confidence bands for a JSONL record stream")
    ps.add_argument("input", nargs="?", default="-", help="JSONL file or - for stdin")
    _engine_flags(ps)
    ps.add_argument("--snapshot-out", default=None)
    ps.add_argument("--snapshot-in", default=None)
    ps.add_argument("--strict", action="store_true", help="reject unknown record keys")
    ps.add_argument("--every", type=_pos_int, default=1, help="emit every k-th band (state is unaffected)")

    pm = sub.add_parser("simulate", help="write a synthetic record stream and its truth path")
    pm.add_argument("--kind", choices=KINDS, required=True)
    pm.add_argument("--seed", type=_seed, default=0)
    pm.add_argument("--replicate", type=_nonneg_int, default=0)
    pm.add_argument("--horizon", type=_pos_int, default=500)
    pm.add_argument("--param", action="append", default=[], metavar="KEY=VALUE")
    pm.add_argument("--proxy-model", choices=["ols", "running_mean"], default=None)
    pm.add_argument("--out", default="-")
    pm.add_argument("--truth-out", default=None)

    pe = sub.add_parser("eval", help="run a Monte-Carlo scenario and write tidy CSV")
    pe.add_argument("--scenario", choices=sorted(SCENARIOS), required=True)
    pe.add_argument("--reps", type=_pos_int, default=None)
    pe.add_argument("--seed", type=_seed, default=0)
    pe.add_argument("--out", default="-")
    pe.add_argument("--svg", default=None, help="fig1 only: also write an SVG of the curves")

    pt = sub.add_parser("tune-eta", help="eta minimising the unit-variance width at t_star")
    pt.add_argument("alpha", type=_prob)
    pt.add_argument("t_star", type=_pos_int, nargs="?", default=10)
    pt.add_argument("--exact", action="store_true", help="exact stationary point instead of the reference rule")
    return parser


def _rules(args) -> List[StopRule]:
    out = []
    for name in args.rule or []:
        kind = _RULE_KINDS[name]
        if kind in ("harm_threshold", "futility_below_epsilon"):
            if args.epsilon is None:
                raise UsageError(f"--rule {name} needs --epsilon")
            out.append(StopRule(kind, epsilon=args.epsilon))
        elif kind == "horizon":
            if args.horizon is None:
                raise UsageError("--rule horizon needs --horizon")
            out.append(StopRule(kind, horizon=args.horizon))
        else:
            out.append(StopRule(kind))
    return out


def _spec(args) -> EngineSpec:
    try:
        cfg = BoundaryConfig(alpha=args.alpha, eta=args.eta, m_bound=args.m_bound, rho=args.rho)
        return EngineSpec(args.design, args.boundary, args.proxy, cfg, args.warmup)
    except ContractError as exc:
        raise UsageError(str(exc)) from None


def _out(path: str):
    return sys.stdout if path in (None, "-") else open(path, "w", encoding="utf-8", newline="")


def cmd_stream(args) -> int:
    spec = _spec(args)
    rules = _rules(args)
    if args.snapshot_in:
        with open(args.snapshot_in, "r", encoding="utf-8") as fh:
            record = json.load(fh)
        for key in ("design", "boundary"):
            if key in record and record[key] != getattr(spec, key):
                raise ContractError(f"snapshot was taken with {key}={record[key]!r}, not {getattr(spec, key)!r}")
        if "proxy" in record and (record["proxy"] == "1") != spec.proxy:
            raise ContractError("snapshot proxy flag does not match --proxy")
        engine = Engine.from_snapshot(spec, record)
    else:
        engine = Engine(spec)
    out = sys.stdout
    out.write(",".join(BAND_HEADER) + "\n")
    code = EXIT_OK
    fh = open_input(args.input)
    try:
        for batch in group_steps(read_records(fh, args.strict, sys.stderr)):
            band = engine.step(batch)
            decision = engine.decide(band, rules) if rules else Decision.CONTINUE
            if decision.stops:
                out.write(band_row(band, batch[0].time, decision.value) + "\n")
                code = EXIT_STOPPED
                break
            if band.step % args.every == 0:
                out.write(band_row(band, batch[0].time, decision.value) + "\n")
    finally:
        if fh is not sys.stdin:
            fh.close()
    if args.snapshot_out:
        snap = engine.snapshot()
        snap.update({"design": spec.design, "boundary": spec.boundary, "proxy": "1" if spec.proxy else "0"})
        with open(args.snapshot_out, "w", encoding="utf-8") as fh:
            json.dump(snap, fh, sort_keys=True)
            fh.write("\n")
    out.flush()
    return code


def _parse_params(kind: str, items: List[str]) -> dict:
    defaults = DEFAULTS[kind]
    params = {}
    for item in items:
        key, sep, raw = item.partition("=")
        if not sep:
            raise UsageError(f"--param expects KEY=VALUE, got {item!r}")
        if key not in defaults:
            raise UsageError(f"unknown parameter {key!r} for {kind}; known: {sorted(defaults)}")
        ref = defaults[key]
        if raw.lower() in ("none", "null"):
            params[key] = None
        else:
            try:
                params[key] = int(raw) if isinstance(ref, int) and not isinstance(ref, bool) else float(raw)
            except ValueError:
                raise UsageError(f"--param {key} expects a number, got {raw!r}") from None
    return params


def cmd_simulate(args) -> int:
    try:
        spec = DgpSpec(args.kind, _parse_params(args.kind, args.param), args.seed, args.proxy_model)
    except ContractError as exc:
        raise UsageError(str(exc)) from None
    real = realize(spec, args.horizon, args.replicate)
    out = _out(args.out)
    try:
        write_records(real.observations(), out)
    finally:
        if out is not sys.stdout:
            out.close()
    if args.truth_out:
        running = real.truth.running
        with open(args.truth_out, "w", encoding="utf-8", newline="") as fh:
            fh.write("step,value,running_mean\n")
            for t, (v, r) in enumerate(zip(real.truth.values, running), start=1):
                fh.write(f"{t},{fmt(v)},{fmt(r)}\n")
    return EXIT_OK


def cmd_eval(args) -> int:
    fn = SCENARIOS[args.scenario]
    kwargs = {"seed": args.seed}
    if args.reps is not None:
        kwargs["reps"] = args.reps
    rows = fn(**kwargs)
    out = _out(args.out)
    try:
        out.write(rows_to_csv(rows))
    finally:
        if out is not sys.stdout:
            out.close()
    if args.svg and args.scenario == "fig1":
        reps = args.reps or 5000
        curves = {f"alpha={a:g}": peeking_ttest_curve(a, 500, reps, args.seed) for a in (0.05, 0.10)}
        with open(args.svg, "w", encoding="utf-8") as fh:
            fh.write(svg_curve(curves))
    return EXIT_OK


def cmd_tune_eta(args) -> int:
    choice = exact_eta(args.alpha, args.t_star) if args.exact else tune_eta(args.alpha, args.t_star)
    print(fmt(choice.eta))
    return EXIT_OK


COMMANDS = {"stream": cmd_stream, "simulate": cmd_simulate, "eval": cmd_eval, "tune-eta": cmd_tune_eta}


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"dbcs: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (DbcsError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
