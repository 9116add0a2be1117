"""Random-circuit sweeps: compile, count communication and estimate time."""

from __future__ import annotations

import statistics
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

from .circuit import RandomCircuitSpec, generate_random_circuit
from .compiler import PassConfig, comm_gate_fraction, compile_circuit
from .costmodel import CostModel, StepCostModel, estimate_circuit
from .layout import ShardConfig

SWEEPS = ("p", "globalfrac", "n")
COLUMNS = ("sweep_param", "seed", "frac_orig", "frac_opt", "t_orig", "t_opt", "reduction", "permutes", "runtime_ms")


@dataclass(frozen=True)
class Cell:
    """One (sweep point, seed) experiment."""

    sweep_param: float
    n: int
    m: int
    num_gates: int
    p: float
    seed: int


@dataclass
class ExperimentSpec:
    sweep: str
    points: list[float]
    n: int = 35
    num_global: int | None = None
    p: float = 0.3
    gates: int | None = None
    gates_per_qubit: int = 30
    seeds: int = 20
    base_seed: int = 0
    global_ratio: float = 0.2
    model: CostModel = field(default_factory=StepCostModel)
    count_mode: str = "cascade"
    dag_rules: str = "full"

    def __post_init__(self) -> None:
        if self.sweep not in SWEEPS:
            raise ValueError(f"sweep must be one of {SWEEPS}, got {self.sweep!r}")
        if not self.points:
            raise ValueError("sweep needs at least one point")
        if self.seeds < 1:
            raise ValueError("need at least one seed")
        if self.gates is not None and self.gates < 1:
            raise ValueError("gate count must be >= 1")

    def cells(self) -> list[Cell]:
        out = []
        for x in self.points:
            n, p, g = self.n, self.p, self.num_global
            if self.sweep == "p":
                p = x
            elif self.sweep == "globalfrac":
                g = round(x * n)
            else:
                n = int(x)
                g = round(self.global_ratio * n)
            if g is None:
                raise ValueError("p-sweep needs a global qubit count")
            if not 0 <= g < n:
                raise ValueError(f"global qubit count {g} invalid for n={n}")
            gates = self.gates if self.gates is not None else self.gates_per_qubit * n
            for s in range(self.seeds):
                out.append(Cell(x, n, n - g, gates, p, self.base_seed + s))
        return out


def run_cell(cell: Cell, model: CostModel, count_mode: str = "cascade", dag_rules: str = "full") -> dict:
    start = time.perf_counter()
    cfg = ShardConfig.from_local(cell.n, cell.m)
    circuit = generate_random_circuit(RandomCircuitSpec(cell.n, cell.num_gates, cell.p, cell.seed))
    compiled = compile_circuit(circuit, PassConfig(cfg, count_mode, dag_rules)).to_circuit()
    t_orig = estimate_circuit(circuit, cfg, model)
    t_opt = estimate_circuit(compiled, cfg, model)
    return {
        "sweep_param": cell.sweep_param,
        "seed": cell.seed,
        "frac_orig": comm_gate_fraction(circuit, cfg),
        "frac_opt": comm_gate_fraction(compiled, cfg),
        "t_orig": t_orig,
        "t_opt": t_opt,
        "reduction": 1.0 - t_opt / t_orig if t_orig else 0.0,
        "permutes": compiled.num_permutes,
        "runtime_ms": (time.perf_counter() - start) * 1e3,
    }


def _run_cell_args(args) -> dict:
    return run_cell(*args)


def run_sweep(spec: ExperimentSpec, workers: int = 1) -> list[dict]:
    """Per-cell rows in (sweep point, seed) order."""
    cells = spec.cells()
    jobs = [(c, spec.model, spec.count_mode, spec.dag_rules) for c in cells]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(_run_cell_args, jobs, chunksize=4))
    return [_run_cell_args(j) for j in jobs]


def aggregate(rows: list[dict]) -> list[dict]:
    """Mean and sample standard deviation per sweep point."""
    groups: dict[float, list[dict]] = {}
    for row in rows:
        groups.setdefault(row["sweep_param"], []).append(row)
    out = []
    for x, grp in groups.items():
        for label, fn in (("mean", statistics.fmean), ("std", _stdev)):
            agg = {"sweep_param": x, "seed": label}
            for col in COLUMNS[2:]:
                agg[col] = fn([r[col] for r in grp])
            out.append(agg)
    return out


def _stdev(values: list[float]) -> float:
    return statistics.stdev(values) if len(values) > 1 else 0.0


def mean_by_point(rows: list[dict], column: str) -> dict[float, float]:
    return {r["sweep_param"]: r[column] for r in aggregate(rows) if r["seed"] == "mean"}
