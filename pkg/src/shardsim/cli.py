"""Command-line front end: gen, compile, simulate, estimate, bench."""

from __future__ import annotations

import argparse
import csv
import io
import shlex
import sys

import numpy as np

from . import __version__
from .circuit import RandomCircuitSpec, generate_random_circuit, read_circuit, serialize_circuit
from .compiler import COUNT_MODES, PassConfig, comm_counts, comm_gate_fraction, compile_circuit
from .costmodel import estimate_circuit, parse_model
from .dag import DAG_RULES, build_dag
from .experiments import COLUMNS, SWEEPS, ExperimentSpec, aggregate, run_sweep
from .layout import ShardConfig
from .simulator import dense_reference_run, init_state


class CliError(Exception):
    pass


def _write_text(path: str | None, text: str) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)


def _provenance(argv: list[str]) -> str:
    return f"# shardsim {__version__} " + " ".join(shlex.quote(a) for a in argv) + "\n"


def _shard_config(args, n: int) -> ShardConfig:
    if args.m is not None:
        return ShardConfig.from_local(n, args.m)
    return ShardConfig(n, args.k)


def _float_list(text: str) -> list[float]:
    try:
        return [float(x) for x in text.split(",") if x]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _add_layout_args(p: argparse.ArgumentParser) -> None:
    g = p.add_mutually_exclusive_group()
    g.add_argument("-k", type=int, default=1, help="number of shards (power of two)")
    g.add_argument("-m", type=int, default=None, help="number of local qubits")


def cmd_gen(args, argv) -> None:
    spec = RandomCircuitSpec(args.n, args.gates, args.p, args.seed)
    circuit = generate_random_circuit(spec)
    _write_text(args.output, serialize_circuit(circuit) + "\n")
    print(f"seed={args.seed}", file=sys.stderr)


def cmd_compile(args, argv) -> None:
    circuit = read_circuit(args.input)
    cfg = _shard_config(args, circuit.num_qubits)
    if args.dot:
        _write_text(args.dot, build_dag(circuit, args.dag_rules).to_dot() + "\n")
    compiled = compile_circuit(circuit, PassConfig(cfg, args.count_mode, args.dag_rules)).to_circuit()
    _write_text(args.output, serialize_circuit(compiled) + "\n")
    if args.report:
        comm_before = comm_counts(circuit, cfg)[0]
        comm_after = comm_counts(compiled, cfg)[0]
        report = {
            "gates": len(circuit.gates),
            "permutes": compiled.num_permutes,
            "comm_gates_before": comm_before,
            "comm_gates_after": comm_after,
            "frac_before": comm_gate_fraction(circuit, cfg),
            "frac_after": comm_gate_fraction(compiled, cfg),
        }
        print("\n".join(f"{k}={v}" for k, v in report.items()), file=sys.stderr)


def cmd_simulate(args, argv) -> None:
    circuit = read_circuit(args.input)
    cfg = _shard_config(args, circuit.num_qubits)
    try:
        state = init_state(cfg, count_only=args.count_only).run(circuit)
    except MemoryError as exc:
        raise CliError(f"{exc}; use --count-only") from None
    print(state.stats.to_text())
    if args.count_only:
        return
    if args.dump_state:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["index", "re", "im"])
        for i, a in enumerate(state.to_vector()):
            w.writerow([i, repr(float(a.real)), repr(float(a.imag))])
        _write_text(args.dump_state, buf.getvalue())
    if args.check_against:
        ref = read_circuit(args.check_against)
        if ref.num_qubits != circuit.num_qubits:
            raise CliError("reference circuit has a different qubit count")
        dense = dense_reference_run(ref)
        dev = float(np.abs(state.to_vector() - dense.amplitudes).max())
        print(f"max_deviation={dev!r}")
        if dev > args.tol:
            raise CliError(f"deviation {dev:.3e} exceeds tolerance {args.tol:.1e}")


def cmd_estimate(args, argv) -> None:
    original = read_circuit(args.input)
    cfg = _shard_config(args, original.num_qubits)
    if args.compiled:
        compiled = read_circuit(args.compiled)
    else:
        compiled = compile_circuit(original, PassConfig(cfg, args.count_mode, args.dag_rules)).to_circuit()
    model = parse_model(args.model, cfg)
    t_orig = estimate_circuit(original, cfg, model)
    t_opt = estimate_circuit(compiled, cfg, model)
    buf = io.StringIO()
    buf.write(_provenance(argv))
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["t_orig", "t_opt", "reduction"])
    w.writerow([repr(t_orig), repr(t_opt), repr(1.0 - t_opt / t_orig if t_orig else 0.0)])
    _write_text(args.output, buf.getvalue())


def _format_cell(value) -> str:
    if isinstance(value, float):
        return repr(value)
    return str(value)


def cmd_bench(args, argv) -> None:
    defaults = {
        "p": [round(0.1 * i, 10) for i in range(11)],
        "globalfrac": [round(0.1 * i, 10) for i in range(1, 10)],
        "n": [float(x) for x in range(20, 51, 5)],
    }
    points = args.points if args.points is not None else defaults[args.sweep]
    if args.sweep == "p" and args.m is None and args.k == 1 and args.num_global is None:
        raise CliError("p-sweep needs -k, -m or --global")
    n = args.n
    num_global = args.num_global
    if num_global is None and args.sweep == "p":
        num_global = n - _shard_config(args, n).m
    # model tables are tied to one shard layout; only the step model varies freely
    model = parse_model(args.model, ShardConfig.from_local(n, n - (num_global or 0)))
    spec = ExperimentSpec(
        sweep=args.sweep,
        points=points,
        n=n,
        num_global=num_global,
        p=args.p,
        gates=args.gates,
        seeds=args.seeds,
        base_seed=args.base_seed,
        global_ratio=args.global_ratio,
        model=model,
        count_mode=args.count_mode,
        dag_rules=args.dag_rules,
    )
    rows = run_sweep(spec, workers=args.workers)
    if args.no_timing:
        for r in rows:
            r["runtime_ms"] = 0.0
    rows = rows + aggregate(rows)

    buf = io.StringIO()
    buf.write(_provenance(argv))
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(COLUMNS)
    for r in rows:
        w.writerow([_format_cell(r[c]) for c in COLUMNS])
    _write_text(args.output, buf.getvalue())


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="shardsim", description=__doc__)
    parser.add_argument("--version", action="version", version=f"shardsim {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="generate a random H/Y/CNOT circuit")
    p.add_argument("-n", type=int, required=True, help="number of qubits")
    p.add_argument("-g", "--gates", type=int, required=True, help="number of gates")
    p.add_argument("-p", type=float, default=0.3, help="probability of a CNOT")
    p.add_argument("-s", "--seed", type=int, default=0)
    p.add_argument("-o", "--output", default=None)
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("compile", help="insert PERMUTE instructions to avoid communication")
    p.add_argument("input")
    p.add_argument("-o", "--output", default=None)
    _add_layout_args(p)
    p.add_argument("--count-mode", choices=COUNT_MODES, default="cascade")
    p.add_argument("--dag-rules", choices=DAG_RULES, default="full")
    p.add_argument("--report", action="store_true", help="print pass statistics to stderr")
    p.add_argument("--dot", default=None, help="write the dependency DAG as DOT")
    p.set_defaults(func=cmd_compile)

    p = sub.add_parser("simulate", help="run a circuit on the sharded simulator")
    p.add_argument("input")
    _add_layout_args(p)
    p.add_argument("--dump-state", default=None, metavar="PATH", help="write index,re,im CSV")
    p.add_argument("--check-against", default=None, metavar="REF", help="compare with dense run of REF")
    p.add_argument("--tol", type=float, default=1e-12)
    p.add_argument("--count-only", action="store_true", help="track communication only, no amplitudes")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("estimate", help="estimate simulated time before/after compilation")
    p.add_argument("input")
    p.add_argument("compiled", nargs="?", default=None)
    _add_layout_args(p)
    p.add_argument("--model", default="step:R=8", help="step[:R=8,t_local=1] or table:<csv>")
    p.add_argument("--count-mode", choices=COUNT_MODES, default="cascade")
    p.add_argument("--dag-rules", choices=DAG_RULES, default="full")
    p.add_argument("-o", "--output", default=None)
    p.set_defaults(func=cmd_estimate)

    p = sub.add_parser("bench", help="run a random-circuit sweep and write CSV")
    p.add_argument("--sweep", choices=SWEEPS, required=True)
    p.add_argument("--points", type=_float_list, default=None, help="comma-separated sweep values")
    p.add_argument("-n", type=int, default=35)
    _add_layout_args(p)
    p.add_argument("--global", dest="num_global", type=int, default=None, help="number of global qubits")
    p.add_argument("--global-ratio", type=float, default=0.2, help="global/total ratio for the n-sweep")
    p.add_argument("-p", type=float, default=0.3)
    p.add_argument("--gates", type=int, default=None, help="gates per circuit (default 30*n)")
    p.add_argument("--seeds", type=int, default=20)
    p.add_argument("--base-seed", type=int, default=0)
    p.add_argument("--model", default="step:R=8")
    p.add_argument("--count-mode", choices=COUNT_MODES, default="cascade")
    p.add_argument("--dag-rules", choices=DAG_RULES, default="full")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--no-timing", action="store_true", help="write runtime_ms as 0 for reproducible output")
    p.add_argument("-o", "--output", default=None)
    p.set_defaults(func=cmd_bench)
    return parser


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    args = build_parser().parse_args(argv)
    try:
        args.func(args, argv)
    except (CliError, ValueError, OSError, MemoryError, RuntimeError) as exc:
        print(f"shardsim: error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
