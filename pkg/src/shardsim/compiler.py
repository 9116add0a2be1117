"""Communication-avoiding compiler pass.

Greedy list scheduling over the dependency DAG: emit every ready gate that
needs no communication under the current layout; when stuck, try every
exchange of one local and one global position and insert a PERMUTE for the
exchange that unblocks the most gates. If no exchange helps, the earliest
ready gate is emitted with communication.
"""

from __future__ import annotations

import heapq
from collections import Counter
from dataclasses import dataclass, field

from .circuit import Circuit, CircuitError, Gate, Instruction, Permute
from .dag import DAG_RULES, CircuitDag, build_dag
from .layout import QubitPermutation, ShardConfig, needs_communication

COUNT_MODES = ("ready", "cascade")


@dataclass(frozen=True)
class PassConfig:
    cfg: ShardConfig
    count_mode: str = "cascade"
    dag_rules: str = "full"

    def __post_init__(self) -> None:
        if self.count_mode not in COUNT_MODES:
            raise ValueError(f"count_mode must be one of {COUNT_MODES}, got {self.count_mode!r}")
        if self.dag_rules not in DAG_RULES:
            raise ValueError(f"dag_rules must be one of {DAG_RULES}, got {self.dag_rules!r}")


@dataclass
class CompiledCircuit:
    num_qubits: int
    instructions: list[Instruction] = field(default_factory=list)
    final_perm: QubitPermutation | None = None

    @property
    def num_permutes(self) -> int:
        return sum(isinstance(i, Permute) for i in self.instructions)

    @property
    def gates(self) -> list[Gate]:
        return [i for i in self.instructions if isinstance(i, Gate)]

    def to_circuit(self) -> Circuit:
        return Circuit(self.num_qubits, list(self.instructions))


def _is_local_gate(gate: Gate, positions, m: int) -> bool:
    return positions[gate.target] < m


def score_candidate(dag: CircuitDag, perm: QubitPermutation, pc: PassConfig) -> int:
    """Number of gates a layout lets us run without communication.

    ``ready`` counts ready gates that become communication-free; ``cascade``
    also counts the gates they unblock, transitively.
    """
    positions = perm.map
    m = pc.cfg.m
    frontier = [v for v in dag.ready if _is_local_gate(dag.gates[v], positions, m)]
    if pc.count_mode == "ready":
        return len(frontier)
    return _cascade(dag, frontier, positions, m)


def _cascade(dag: CircuitDag, frontier: list[int], positions, m: int) -> int:
    gates, succs, indegree = dag.gates, dag.succs, dag.indegree
    done: dict[int, int] = {}
    stack = list(frontier)
    count = 0
    while stack:
        v = stack.pop()
        count += 1
        for s in succs[v]:
            d = done.get(s, 0) + 1
            done[s] = d
            if d == indegree[s] and positions[gates[s].target] < m:
                stack.append(s)
    return count


def compile_circuit(circuit: Circuit, pc: PassConfig) -> CompiledCircuit:
    cfg = pc.cfg
    if circuit.num_qubits != cfg.n:
        raise ValueError(f"circuit has {circuit.num_qubits} qubits, shard config has {cfg.n}")
    if any(isinstance(i, Permute) for i in circuit.instructions):
        raise CircuitError("compiler input must not contain PERMUTE instructions")

    dag = build_dag(circuit, pc.dag_rules)
    m, n = cfg.m, cfg.n
    perm = QubitPermutation.identity(n)
    out: list[Instruction] = []

    while len(dag):
        _drain_local(dag, perm, m, out)
        if not len(dag):
            break

        # Every ready gate is blocked on its target; only moving one of
        # those targets to a local position can score above zero.
        blocked_positions = {perm.map[dag.gates[v].target] for v in dag.ready}
        best_score, best_perm = 0, None
        for lpos in range(m):
            for gpos in range(m, n):
                if gpos not in blocked_positions:
                    continue
                cand = perm.swap_positions(lpos, gpos)
                score = score_candidate(dag, cand, pc)
                if score > best_score:
                    best_score, best_perm = score, cand

        if best_score > 0:
            perm = best_perm
            out.append(Permute(perm))
        else:
            vid = min(dag.ready)
            out.append(dag.remove_vertex(vid))

    return CompiledCircuit(n, out, perm)


def _drain_local(dag: CircuitDag, perm: QubitPermutation, m: int, out: list[Instruction]) -> None:
    """Emit ready communication-free gates until none is left, earliest first."""
    positions = perm.map
    heap = [v for v in dag.ready if positions[dag.gates[v].target] < m]
    heapq.heapify(heap)
    while heap:
        vid = heapq.heappop(heap)
        succs = list(dag.succs[vid])
        out.append(dag.remove_vertex(vid))
        for s in succs:
            if s in dag.ready and positions[dag.gates[s].target] < m:
                heapq.heappush(heap, s)


def comm_counts(circuit: Circuit | CompiledCircuit, cfg: ShardConfig) -> tuple[int, int, int]:
    """(communicating gates, PERMUTE instructions, gates), with the layout
    threaded through the PERMUTE instructions."""
    perm = QubitPermutation.identity(cfg.n)
    comm = permutes = gates = 0
    for instr in circuit.instructions:
        if isinstance(instr, Permute):
            permutes += 1
            perm = instr.perm
        else:
            gates += 1
            if needs_communication(instr, perm, cfg):
                comm += 1
    return comm, permutes, gates


def comm_gate_fraction(circuit: Circuit | CompiledCircuit, cfg: ShardConfig) -> float:
    """(communicating gates + PERMUTE instructions) / number of gates."""
    comm, permutes, gates = comm_counts(circuit, cfg)
    return (comm + permutes) / gates if gates else 0.0


def gate_multiset(instructions) -> Counter:
    return Counter(i for i in instructions if isinstance(i, Gate))
