"""Command line entry point: ``protolife run|sweep|ode|analyze``.

Bad configs and bad input files exit with status 1; runtime and I/O failures exit with 2.
"""
from __future__ import annotations

import argparse
import contextlib
import csv
import io
import json
import sys
from collections import defaultdict
from pathlib import Path

from . import arms_chem, config as cfgmod, infometrics, lambda_chem, organization, reactor
from .errors import (ConfigError, DimensionMismatch, MalformedLog, MissingInstanceIds,
                     NonFiniteState)


def fmt(x: float) -> str:
    return format(float(x), ".17g")


class InputError(Exception):
    """Bad user input; maps to exit code 1."""


@contextlib.contextmanager
def _open_out(path):
    if path is None or path == "-":
        yield sys.stdout
        return
    with open(path, "w", encoding="utf-8", newline="") as fh:
        yield fh


def _load(cls, path, seed=None):
    data = cfgmod.load_json(path)
    if seed is not None:
        if not isinstance(data, dict):
            raise ConfigError("config must be a JSON object")
        data = {**data, "seed": seed}
    return cfgmod.from_dict(cls, data)


# -- run ---------------------------------------------------------------------


def cmd_run(args) -> int:
    cfg = _load(cfgmod.ExperimentConfig, args.config, args.seed)
    # validate chemistry blocks before touching any output file
    cfgmod.chemistry_params(cfg)
    cfgmod.initial_population(cfg)
    out = cfg.outputs
    with contextlib.ExitStack() as stack:
        try:
            ev = stack.enter_context(open(out.event_log, "w", encoding="utf-8", newline="")) \
                if out.event_log else None
            ts = stack.enter_context(open(out.timeseries, "w", encoding="utf-8", newline="")) \
                if out.timeseries else None
        except OSError as exc:
            print(f"error: cannot open output: {exc}", file=sys.stderr)
            return 2
        result = reactor.run(cfg, ev, ts)
    pop = result.population
    h = infometrics.population_entropy(pop) if pop.total else 0.0
    summary = {"steps": result.steps, "events": result.events, "outcome": result.outcome,
               "final_population": pop.total, "species": len(pop.counts), "final_entropy_bits": h}
    print(f"steps={result.steps} events={result.events} outcome={result.outcome} "
          f"final_population={pop.total} species={len(pop.counts)} final_entropy_bits={fmt(h)}")
    if out.report:
        report = {"config": cfgmod.to_dict(cfg), "summary": summary}
        with open(out.report, "w", encoding="utf-8") as fh:
            json.dump(report, fh, ensure_ascii=False, indent=2)
            fh.write("\n")
    return 0


# -- sweep -------------------------------------------------------------------


def cmd_sweep(args) -> int:
    cfg = _load(cfgmod.SweepConfig, args.config, args.seed)
    rp = cfg.run_params
    params = arms_chem.SweepParams(rp.n_rules, rp.alphabet_size, rp.max_side_size,
                                   rp.initial_size, rp.max_steps, rp.stochastic_rule_choice)
    rows = arms_chem.sweep(cfg.seed, cfg.grid, cfg.runs_per_point, params, cfg.workers)
    text = arms_chem.sweep_csv(rows)
    with _open_out(cfg.output) as fh:
        fh.write(text)
    return 0


# -- ode ---------------------------------------------------------------------


def ode_csv(times, states) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["t"] + [f"x_{i}" for i in range(states.shape[1])])
    for t, x in zip(times, states):
        w.writerow([fmt(t)] + [fmt(v) for v in x])
    return buf.getvalue()


def cmd_ode(args) -> int:
    from . import replicator_ode

    cfg = _load(cfgmod.OdeConfig, args.config)
    try:
        times, states = replicator_ode.integrate(cfg.x0, cfg.W, cfg.t_end, cfg.dt)
    except DimensionMismatch as exc:
        raise ConfigError(str(exc)) from exc
    with _open_out(cfg.output) as fh:
        fh.write(ode_csv(times, states))
    return 0


# -- analyze -----------------------------------------------------------------


def entropy_series(rows) -> list[tuple[int, float]]:
    """``t,species_key,count`` rows to ``(t, H)`` pairs."""
    by_t: dict = defaultdict(dict)
    for row in rows:
        try:
            t, key, n = int(row["t"]), row["species_key"], int(row["count"])
        except (KeyError, TypeError, ValueError) as exc:
            raise InputError(f"malformed time-series row {row!r}") from exc
        by_t[t][key] = n
    return [(t, infometrics.population_entropy(c)) for t, c in sorted(by_t.items())]


def cmd_analyze(args) -> int:
    try:
        with open(args.log, encoding="utf-8") as fh:
            events = reactor.read_events(fh)
    except OSError as exc:
        raise InputError(f"cannot read log: {exc}") from exc

    keys = {k for ev in events for k in ev.reactants + ev.products}
    chem = args.chemistry if args.chemistry != "auto" else organization.infer_chemistry(keys)
    functional = None
    if args.eq == "functional":
        probes = args.probe or list(organization.DEFAULT_PROBES)
        try:
            functional = organization.FunctionalProbe(
                tuple(lambda_chem.parse(p) for p in probes),
                lambda_chem.ReductionBudget(args.probe_steps, args.probe_nodes))
        except SyntaxError as exc:
            raise InputError(f"bad probe term: {exc}") from exc
    eq = organization.EquivalenceSpec(args.eq, args.rotations, args.reflections, functional)
    organization.make_classifier(eq, chem)

    net = organization.build_network(events)
    replicators = []
    note = None
    try:
        replicators = organization.detect_replicators(events, eq, args.max_period, chem)
    except MissingInstanceIds as exc:
        note = str(exc)
        print(f"warning: replicator detection skipped: {exc}", file=sys.stderr)
    orgs = organization.classify_organizations(net, replicators)
    cycles = organization.detect_hypercycles(net, args.max_cycle_length, args.max_cycles)

    entropy_file = None
    if args.timeseries:
        try:
            with open(args.timeseries, encoding="utf-8", newline="") as fh:
                series = entropy_series(csv.DictReader(fh))
        except OSError as exc:
            raise InputError(f"cannot read time series: {exc}") from exc
        entropy_file = args.entropy_out or str(Path(args.timeseries).with_suffix(".entropy.csv"))
        with open(entropy_file, "w", encoding="utf-8", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["t", "H_bits"])
            for t, h in series:
                w.writerow([t, fmt(h)])

    report = {
        "organizations": orgs.to_dict(),
        "replicators": [r.to_dict() for r in replicators],
        "hypercycles": cycles,
        "entropy_series_file": entropy_file,
        "options": {"log": args.log, "eq": args.eq, "max_period": args.max_period,
                    "chemistry": chem, "rotations": args.rotations,
                    "reflections": args.reflections,
                    "max_cycle_length": args.max_cycle_length, "max_cycles": args.max_cycles},
    }
    if note:
        report["replicators_skipped"] = note
    with _open_out(args.report) as fh:
        json.dump(report, fh, ensure_ascii=False, indent=2)
        fh.write("\n")
    return 0


# -- entry -------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="protolife", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    r = sub.add_parser("run", help="run a reactor experiment")
    r.add_argument("config")
    r.add_argument("--seed", type=int, help="override the config seed")
    r.set_defaults(func=cmd_run)

    s = sub.add_parser("sweep", help="ARMS order-parameter sweep")
    s.add_argument("config")
    s.add_argument("--seed", type=int)
    s.set_defaults(func=cmd_sweep)

    o = sub.add_parser("ode", help="integrate replicator dynamics")
    o.add_argument("config")
    o.set_defaults(func=cmd_ode)

    a = sub.add_parser("analyze", help="analyze a JSONL event log")
    a.add_argument("log")
    a.add_argument("--eq", choices=("exact", "tileshape", "functional"), default="exact")
    a.add_argument("--max-period", type=int, default=5)
    a.add_argument("--report", help="output JSON path (default: stdout)")
    a.add_argument("--chemistry", choices=("auto", "lambda", "tile", "arms"), default="auto")
    a.add_argument("--timeseries", help="species-count CSV from `run`")
    a.add_argument("--entropy-out", help="entropy CSV path (default: next to --timeseries)")
    a.add_argument("--rotations", action="store_true", help="tile shapes up to rotation")
    a.add_argument("--reflections", action="store_true", help="tile shapes up to reflection")
    a.add_argument("--probe", action="append", help="probe term for --eq functional (repeatable)")
    a.add_argument("--probe-steps", type=int, default=1000)
    a.add_argument("--probe-nodes", type=int, default=10_000)
    a.add_argument("--max-cycle-length", type=int, default=8)
    a.add_argument("--max-cycles", type=int, default=1000)
    a.set_defaults(func=cmd_analyze)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, InputError, MalformedLog) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (OSError, NonFiniteState, RuntimeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
