"""Command-line entry point: ``majcert <command> ...``.

Exit codes: 0 success / global accept, 1 verifier reject (or a fuzzing
violation, or a failed ``--check``), 2 input error, 3 honest prover refused
a NO instance, 4 exhaustive budget exceeded.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

import numpy as np

from . import __version__, analysis, gadgets, oracle
from .certification import bundle, composite, count_ones, election_pred, fuzz
from .certification.election_pred import ProverRefusal
from .dynamics import DynamicsError, format_config, orbit, parse_config
from .graph import GraphError, read_graph, write_graph

EXIT_OK, EXIT_REJECT, EXIT_INPUT, EXIT_REFUSED, EXIT_BUDGET = 0, 1, 2, 3, 4


class InputError(Exception):
    pass


def _config_arg(text: str, n: int):
    """A literal bit string, or a path to a file holding one."""
    if text is None:
        raise InputError("missing configuration")
    if os.path.exists(text):
        text = Path(text).read_text()
    try:
        return parse_config(text, n)
    except ValueError as exc:
        raise InputError(str(exc)) from None


def _graph_arg(path):
    if path is None:
        raise InputError("--graph is required")
    try:
        return read_graph(path)
    except (OSError, GraphError, ValueError) as exc:
        raise InputError(f"cannot read graph {path}: {exc}") from None


def _write_manifest(args, out, path=None, **extra):
    """Run manifest, by default ``<out>.manifest.json`` next to the main output."""
    if not out:
        return
    params = {k: v for k, v in vars(args).items() if k not in ("func", "command") and v is not None}
    doc = {
        "command": args.command,
        "version": __version__,
        "generator": "numpy.PCG64(SeedSequence(seed))",
        "parameters": params,
        "outputs": [str(out)],
        **extra,
    }
    Path(path or str(out) + ".manifest.json").write_text(json.dumps(doc, indent=1, sort_keys=True, default=str) + "\n")


# --------------------------------------------------------------------------


def cmd_simulate(args) -> int:
    g = _graph_arg(args.graph)
    x = _config_arg(args.config, g.n)
    orb = orbit(g, x)
    if args.until_attractor:
        steps = orb.transient + orb.period
    elif args.steps is not None:
        if args.steps < 0:
            raise InputError("--steps must be >= 0")
        steps = args.steps
    else:
        raise InputError("give --steps or --until-attractor")
    if not args.quiet:
        for t in range(steps + 1):
            print(format_config(orb.state(t)))
    print(f"transient={orb.transient} period={orb.period}")
    return EXIT_OK


def _instance(args, g):
    """Inputs for a certification problem."""
    x = _config_arg(args.config, g.n)
    N = g.n if args.N is None else args.N
    if N < g.n:
        raise InputError(f"N = {N} is smaller than n = {g.n}")
    if args.problem in ("pred", "prediction"):
        if args.T is None or args.T < 1:
            raise InputError("-T must be given and >= 1")
    if args.problem == "pred":
        return {"x": x, "y": _config_arg(args.target, g.n), "T": args.T, "N": N}
    if args.problem == "prediction":
        return {"x": x, "T": args.T, "N": N}
    if args.k is None:
        raise InputError("-k is required for count-ones")
    return {"z": x, "k": args.k, "N": N}


def _prove(problem, g, inst):
    if problem == "pred":
        return election_pred.prove_election_pred(g, inst["x"], inst["y"], inst["T"], inst["N"])
    if problem == "prediction":
        return composite.prove_election_prediction(g, inst["x"], inst["T"], inst["N"])
    return count_ones.prove_count_ones(g, inst["z"], inst["k"])


def _verify(problem, g, inst, certs):
    if problem == "pred":
        return election_pred.verify_election_pred(g, inst["x"], inst["y"], inst["T"], inst["N"], certs)
    if problem == "prediction":
        return composite.verify_election_prediction(g, inst["x"], inst["T"], inst["N"], certs)
    return count_ones.verify_count_ones(g, inst["z"], inst["k"], certs)


def cmd_prove(args) -> int:
    g = _graph_arg(args.graph)
    inst = _instance(args, g)
    try:
        certs = _prove(args.problem, g, inst)
    except ProverRefusal as exc:
        print(f"refused: {exc}", file=sys.stderr)
        return EXIT_REFUSED
    rep = bundle.size_report(args.problem, certs, inst["N"])
    params = {k: (format_config(v) if isinstance(v, np.ndarray) else v) for k, v in inst.items()}
    text = bundle.dumps(args.problem, certs, **params)
    if args.out:
        Path(args.out).write_text(text + "\n")
        _write_manifest(args, args.out)
    else:
        print(text)
    print(f"total_bits={rep['total_bits']} max_node_bits={rep['max_node_bits']} nodes={rep['nodes']}")
    return EXIT_OK


def cmd_verify(args) -> int:
    g = _graph_arg(args.graph)
    inst = _instance(args, g)
    try:
        problem, certs, _ = bundle.loads(Path(args.certs).read_text())
    except (OSError, ValueError, KeyError, TypeError) as exc:
        raise InputError(f"cannot read certificates: {exc}") from None
    if problem != args.problem:
        raise InputError(f"bundle is for {problem!r}, not {args.problem!r}")
    if len(certs) != g.n:
        raise InputError(f"bundle has {len(certs)} records for {g.n} nodes")
    verdict = _verify(args.problem, g, inst, certs)
    for line in verdict.lines():
        print(line)
    if verdict.accepted:
        print("global: accept")
        return EXIT_OK
    print(f"global: reject ({len(verdict.rejecting)} rejecting: {verdict.rejecting})")
    return EXIT_REJECT


def cmd_fuzz(args) -> int:
    ss = np.random.SeedSequence(args.seed)
    rng = np.random.Generator(np.random.PCG64(ss))
    if args.graph:
        g = _graph_arg(args.graph)
        inst = _instance(args, g)
        if args.problem == "pred":
            insts = [fuzz.PredInstance(g, inst["x"], inst["y"], inst["T"], inst["N"])]
        elif args.problem == "prediction":
            insts = [fuzz.PredictionInstance(g, inst["x"], inst["T"], inst["N"])]
        else:
            insts = [fuzz.CountOnesInstance(g, inst["z"], inst["k"])]
        if insts[0].is_yes():
            raise InputError("fuzzing needs a NO instance")
    else:
        insts = fuzz.random_no_instances(args.problem, args.instances, rng)
    total = fuzz.FuzzReport(args.problem)
    for child, inst in zip(ss.spawn(len(insts)), insts):
        total.merge(fuzz.fuzz_soundness(inst, args.problem, args.trials, child))
    print(total.summary())
    if args.out:
        doc = {
            "protocol": args.problem,
            "trials": total.trials,
            "accepts": total.accepts,
            "per_strategy": {k: list(v) for k, v in sorted(total.per_strategy.items())},
            "violations": [vars(v) for v in total.violations],
        }
        Path(args.out).write_text(json.dumps(doc, indent=1, sort_keys=True) + "\n")
        _write_manifest(args, args.out)
    return EXIT_OK if total.ok else EXIT_REJECT


def _bits(text, name):
    if text is None:
        raise InputError(f"--{name} is required")
    try:
        return [int(c) for c in parse_config(text)]
    except ValueError as exc:
        raise InputError(f"--{name}: {exc}") from None


def cmd_gadget(args) -> int:
    fails: list[str] = []
    rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence(args.seed)))
    try:
        if args.kind == "timer":
            inst = gadgets.build_timer(args.n, args.timer_kind)
            if args.check:
                S = gadgets.random_scripts(rng, 100, args.n + 6, len(inst.external_ports))
                fails = gadgets.check_timer(inst, gadgets.simulate_driven(inst, S))
                if not fails:
                    print(f"timer ok: all {2 * args.n} distinguished trajectories match [t >= k]")
            g, x, manifest = inst.g, inst.init, inst.manifest()
        elif args.kind == "sequencer":
            u = _bits(args.u, "u")
            inst = gadgets.build_sequencer(u)
            if args.check:
                S = gadgets.random_scripts(rng, 100, len(u) + 6, 1)
                fails = gadgets.check_sequencer(inst, gadgets.simulate_driven(inst, S))
                if not fails:
                    print(f"sequencer ok: v emits {args.u} then holds {u[-1]}")
            g, x, manifest = inst.g, inst.init, inst.manifest()
        elif args.kind == "amplifier":
            inst = gadgets.build_amplifier(args.strips)
            if args.check:
                fails = gadgets.check_amplifier(args.strips, rng=rng)
                if not fails:
                    print(f"amplifier ok: strips={args.strips} alpha={gadgets.ALPHA}")
            g, x, manifest = inst.g, inst.init, inst.manifest()
        else:
            a, b = _bits(args.a, "a"), _bits(args.b, "b")
            inst = gadgets.build_disj_instance(a, b)
            g, x = inst.h, inst.x
            manifest = {
                "kind": "disj", "a": args.a, "b": args.b, "n": g.n, "m": g.m, "T": inst.T,
                "strips": inst.strips, "nodes": inst.nodes, "sizes": inst.sizes,
            }
            if args.check:
                out = gadgets.run_disj(inst)
                hits = inst.intersections()
                where = f"intersection at i={hits[0]}" if hits else "disjoint"
                print(f"majority={out.majority} ({where}) fixed_at={out.fixed_at} T={inst.T}")
                if out.majority != inst.expected():
                    fails.append("majority does not match the intersection test")
                if out.fixed_at is None:
                    fails.append(f"no fixed point within T={inst.T}")
    except gadgets.GadgetError as exc:
        raise InputError(str(exc)) from None
    for f in fails:
        print("FAIL", f)
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        write_graph(g, out / "graph.txt")
        (out / "config.txt").write_text(format_config(x) + "\n")
        (out / "manifest.json").write_text(json.dumps(manifest, indent=1, sort_keys=True) + "\n")
        _write_manifest(args, out, path=out / "run.json")
    return EXIT_REJECT if fails else EXIT_OK


def cmd_bounds(args) -> int:
    if args.family not in analysis.FAMILIES:
        raise InputError(f"unknown family {args.family!r}; choose from {sorted(analysis.FAMILIES)}")
    try:
        sizes = [int(s) for s in args.sizes.split(",") if s.strip()]
        rows = analysis.scaling_experiment(args.family, sizes, args.samples, args.seed)
    except ValueError as exc:
        raise InputError(str(exc)) from None
    text = analysis.rows_to_csv(rows)
    if args.out:
        Path(args.out).write_text(text)
        _write_manifest(args, args.out)
    else:
        sys.stdout.write(text)
    if len(rows) >= 2:
        fit = analysis.fit_log_growth([r.n for r in rows], [max(r.max_changes, 0) for r in rows])
        print(f"# max_changes ~ {fit['intercept']:.3f} + {fit['slope']:.3f} log2 n; c = {fit['c']:.3f}", file=sys.stderr)
    return EXIT_OK


def cmd_bruteforce(args) -> int:
    g = _graph_arg(args.graph)
    try:
        summary = oracle.enumerate_dynamics(g, Path(args.graph).stem)
    except oracle.BudgetExceeded as exc:
        print(f"budget exceeded: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    text = summary.to_json()
    if args.out:
        Path(args.out).write_text(text + "\n")
        _write_manifest(args, args.out)
    else:
        print(text)
    return EXIT_OK


# --------------------------------------------------------------------------


def _instance_flags(p):
    p.add_argument("--problem", choices=["pred", "prediction", "count-ones"], required=True)
    p.add_argument("--graph")
    p.add_argument("--config", help="initial configuration x (or input bits z for count-ones)")
    p.add_argument("--target", help="target configuration y (pred)")
    p.add_argument("-T", type=int)
    p.add_argument("-N", type=int, help="upper bound on n known to all nodes (default n)")
    p.add_argument("-k", type=int, help="claimed number of ones (count-ones)")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="majcert", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=__version__)
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="run majority dynamics")
    p.add_argument("--graph", required=True)
    p.add_argument("--config", required=True)
    p.add_argument("--steps", type=int)
    p.add_argument("--until-attractor", action="store_true")
    p.add_argument("--quiet", action="store_true", help="only print the orbit summary")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("prove", help="write honest certificates")
    _instance_flags(p)
    p.add_argument("--out")
    p.set_defaults(func=cmd_prove)

    p = sub.add_parser("verify", help="run the one-round verifier")
    _instance_flags(p)
    p.add_argument("--certs", required=True)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("fuzz", help="soundness fuzzing on NO instances")
    _instance_flags(p)
    p.add_argument("--instances", type=int, default=10, help="random NO instances when --graph is absent")
    p.add_argument("--trials", type=int, default=10, help="trials per strategy and instance")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")
    p.set_defaults(func=cmd_fuzz)

    p = sub.add_parser("gadget", help="build a gadget bundle")
    p.add_argument("kind", choices=["timer", "sequencer", "amplifier", "disj"])
    p.add_argument("--n", type=int, default=3, help="timer length")
    p.add_argument("--timer-kind", choices=[gadgets.ZERO_TO_ONE, gadgets.ONE_TO_ZERO], default=gadgets.ZERO_TO_ONE)
    p.add_argument("--u", help="sequencer output bits")
    p.add_argument("--strips", type=int, default=gadgets.STRIPS_MIN)
    p.add_argument("--a")
    p.add_argument("--b")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--check", action="store_true")
    p.add_argument("--out", help="directory for graph.txt, config.txt, manifest.json")
    p.set_defaults(func=cmd_gadget)

    p = sub.add_parser("bounds", help="two-step change scaling experiment (CSV)")
    p.add_argument("--family", required=True)
    p.add_argument("--sizes", required=True, help="comma-separated, increasing")
    p.add_argument("--samples", type=int, default=32)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")
    p.set_defaults(func=cmd_bounds)

    p = sub.add_parser("bruteforce", help="exhaustive dynamics summary (JSON)")
    p.add_argument("--graph", required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_bruteforce)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (InputError, GraphError, DynamicsError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
