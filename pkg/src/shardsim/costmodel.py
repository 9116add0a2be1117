"""Simulated-time estimates by summing per-instruction costs.

Two models: ``StepCostModel`` only knows local vs. communicating
(one local-gate unit vs. ``R`` units); ``TableCostModel`` looks costs up by
bit position, e.g. from a benchmark of every gate on every position.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np

from .circuit import Circuit, Gate, Instruction, Permute
from .layout import (
    QubitPermutation,
    ShardConfig,
    decompose_permutation,
    needs_communication,
    position_map,
)


class CostTableError(ValueError):
    pass


@dataclass(frozen=True)
class StepCostModel:
    t_local: float = 1.0
    R: float = 8.0

    def __post_init__(self) -> None:
        if not self.t_local > 0:
            raise ValueError("t_local must be positive")
        if not self.R >= 1:
            raise ValueError("communication overhead R must be >= 1")

    def gate_cost(self, gate: Gate, perm: QubitPermutation, cfg: ShardConfig) -> float:
        return self.t_local * (self.R if needs_communication(gate, perm, cfg) else 1.0)

    def permute_cost(self, local_changed: bool, global_changed: bool, pairs) -> float:
        cost = self.t_local if local_changed else 0.0
        if global_changed:
            cost += self.R * self.t_local
        return cost + self.R * self.t_local * len(pairs)

    def to_table(self, cfg: ShardConfig) -> TableCostModel:
        """Position-resolved table giving the same estimates as this model."""
        n, m = cfg.n, cfg.m
        glob = np.arange(n) >= m
        one = np.where(glob, self.R * self.t_local, self.t_local)
        two = np.tile(one, (n, 1))
        np.fill_diagonal(two, np.nan)
        swap = np.full((n, n), np.nan)
        swap[:m, m:] = self.R * self.t_local
        swap[m:, :m] = self.R * self.t_local
        return TableCostModel(cfg, one, two, swap, self.t_local, self.R * self.t_local)


@dataclass(frozen=True, eq=False)
class TableCostModel:
    """Costs indexed by bit position.

    ``two_qubit_cost[c, t]`` is for control position ``c`` and target
    position ``t``; ``swap_cost[a, b]`` is for exchanging positions ``a`` and
    ``b`` (symmetric). Entries that can never be used are NaN.
    """

    cfg: ShardConfig
    one_qubit_cost: np.ndarray
    two_qubit_cost: np.ndarray
    swap_cost: np.ndarray
    local_reorder_cost: float
    global_reorder_cost: float

    def gate_cost(self, gate: Gate, perm: QubitPermutation, cfg: ShardConfig) -> float:
        t = perm.map[gate.target]
        if gate.control is None:
            return float(self.one_qubit_cost[t])
        return float(self.two_qubit_cost[perm.map[gate.control], t])

    def permute_cost(self, local_changed: bool, global_changed: bool, pairs) -> float:
        cost = self.local_reorder_cost if local_changed else 0.0
        if global_changed:
            cost += self.global_reorder_cost
        for a, b in pairs:
            c = self.swap_cost[a, b]
            if not math.isfinite(c):
                raise CostTableError(f"no swap cost for positions {a},{b}")
            cost += float(c)
        return cost


CostModel = StepCostModel | TableCostModel


def instruction_cost(
    instr: Instruction, perm: QubitPermutation, cfg: ShardConfig, model: CostModel
) -> float:
    """Cost of ``instr`` when the layout before it is ``perm``."""
    if isinstance(instr, Gate):
        return model.gate_cost(instr, perm, cfg)
    new = instr.perm
    if new == perm:
        return 0.0
    s1, s2 = decompose_permutation(perm, new, cfg.m)
    move = position_map(s2, new)
    pairs = [(p, move[p]) for p in range(cfg.m) if move[p] != p]
    return model.permute_cost(s1 != perm, s2 != s1, pairs)


def estimate_circuit(
    circuit: Circuit, cfg: ShardConfig, model: CostModel, perm: QubitPermutation | None = None
) -> float:
    """Total cost, threading the layout (identity unless ``perm`` is given)
    through PERMUTE instructions."""
    if perm is None:
        perm = QubitPermutation.identity(cfg.n)
    total = 0.0
    for instr in circuit.instructions:
        total += instruction_cost(instr, perm, cfg, model)
        if isinstance(instr, Permute):
            perm = instr.perm
    return total


@dataclass(frozen=True)
class TimeEstimate:
    t_orig: float
    t_opt: float

    @property
    def reduction(self) -> float:
        return 1.0 - self.t_opt / self.t_orig


def estimate_reduction(original: Circuit, compiled: Circuit, cfg: ShardConfig, model: CostModel) -> TimeEstimate:
    return TimeEstimate(estimate_circuit(original, cfg, model), estimate_circuit(compiled, cfg, model))


def closed_form_reduction(f_orig: float, f_opt: float, R: float) -> float:
    """Step-model reduction from communicating-instruction fractions."""
    return 1.0 - ((1 - f_opt) + f_opt * R) / ((1 - f_orig) + f_orig * R)


def load_cost_table(path, cfg: ShardConfig) -> TableCostModel:
    """Read a cost table CSV.

    Rows: ``1q,<pos>,<cost>``, ``2q,<ctrl>,<tgt>,<cost>``,
    ``swap,<pos_a>,<pos_b>,<cost>``, ``reorder,local,<cost>``,
    ``reorder,global,<cost>``. Lines starting with ``#`` are ignored. Every
    position, ordered position pair and local/global swap pair must be
    present.
    """
    n, m = cfg.n, cfg.m
    one = np.full(n, np.nan)
    two = np.full((n, n), np.nan)
    swap = np.full((n, n), np.nan)
    reorder: dict[str, float] = {}

    def cost_of(tok: str, lineno: int) -> float:
        try:
            value = float(tok)
        except ValueError:
            raise CostTableError(f"line {lineno}: bad cost {tok!r}") from None
        if not (math.isfinite(value) and value > 0):
            raise CostTableError(f"line {lineno}: cost must be positive and finite, got {tok}")
        return value

    def pos_of(tok: str, lineno: int) -> int:
        try:
            p = int(tok)
        except ValueError:
            raise CostTableError(f"line {lineno}: bad position {tok!r}") from None
        if not 0 <= p < n:
            raise CostTableError(f"line {lineno}: position {p} out of range for {n} qubits")
        return p

    with open(path, newline="", encoding="utf-8") as fh:
        for lineno, row in enumerate(csv.reader(fh), start=1):
            row = [c.strip() for c in row]
            if not row or not row[0] or row[0].startswith("#"):
                continue
            kind = row[0]
            if kind == "1q" and len(row) == 3:
                one[pos_of(row[1], lineno)] = cost_of(row[2], lineno)
            elif kind == "2q" and len(row) == 4:
                c, t = pos_of(row[1], lineno), pos_of(row[2], lineno)
                if c == t:
                    raise CostTableError(f"line {lineno}: control and target positions coincide")
                two[c, t] = cost_of(row[3], lineno)
            elif kind == "swap" and len(row) == 4:
                a, b = pos_of(row[1], lineno), pos_of(row[2], lineno)
                if a == b:
                    raise CostTableError(f"line {lineno}: swap positions coincide")
                swap[a, b] = swap[b, a] = cost_of(row[3], lineno)
            elif kind == "reorder" and len(row) == 3 and row[1] in ("local", "global"):
                reorder[row[1]] = cost_of(row[2], lineno)
            else:
                raise CostTableError(f"line {lineno}: malformed row {','.join(row)!r}")

    for p in range(n):
        if np.isnan(one[p]):
            raise CostTableError(f"missing row 1q,{p}")
    for c in range(n):
        for t in range(n):
            if c != t and np.isnan(two[c, t]):
                raise CostTableError(f"missing row 2q,{c},{t}")
    for a in range(m):
        for b in range(m, n):
            if np.isnan(swap[a, b]):
                raise CostTableError(f"missing row swap,{a},{b}")
    for which in ("local", "global"):
        if which not in reorder:
            raise CostTableError(f"missing row reorder,{which}")
    return TableCostModel(cfg, one, two, swap, reorder["local"], reorder["global"])


def write_cost_table(model: TableCostModel, path) -> None:
    n, m = model.cfg.n, model.cfg.m
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        for p in range(n):
            w.writerow(["1q", p, repr(float(model.one_qubit_cost[p]))])
        for c in range(n):
            for t in range(n):
                if c != t:
                    w.writerow(["2q", c, t, repr(float(model.two_qubit_cost[c, t]))])
        for a in range(m):
            for b in range(m, n):
                w.writerow(["swap", a, b, repr(float(model.swap_cost[a, b]))])
        w.writerow(["reorder", "local", repr(float(model.local_reorder_cost))])
        w.writerow(["reorder", "global", repr(float(model.global_reorder_cost))])


def parse_model(text: str, cfg: ShardConfig) -> CostModel:
    """Parse ``step``, ``step:R=8``, ``step:R=8,t_local=1`` or ``table:<csv path>``."""
    kind, _, rest = text.partition(":")
    if kind == "table":
        if not rest:
            raise ValueError("table model needs a CSV path: table:<path>")
        return load_cost_table(rest, cfg)
    if kind != "step":
        raise ValueError(f"unknown cost model {text!r}")
    params = {}
    for item in filter(None, rest.split(",")):
        key, eq, value = item.partition("=")
        if not eq or key not in ("R", "t_local"):
            raise ValueError(f"bad step model parameter {item!r}")
        params[key] = float(value)
    return StepCostModel(**params)
