"""Gate dependency DAG with commutation-aware, transitively reduced edges.

Two gates are ordered when they share a qubit on which their roles clash.
Roles are ``"c"`` (CNOT control), ``"t"`` (CNOT target) or ``"x"``
(anything else). With the ``full`` rule set, CNOT controls commute with
each other and so do CNOT targets; with ``disjoint`` only gates on
disjoint qubits commute.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .circuit import Circuit, CircuitError, Gate, Permute

DAG_RULES = ("disjoint", "full")


def qubit_roles(gate: Gate, rules: str = "full") -> list[tuple[int, str]]:
    if rules == "full" and gate.kind == "CNOT":
        return [(gate.control, "c"), (gate.target, "t")]
    return [(q, "x") for q in gate.qubits]


def _compatible(a: str, b: str) -> bool:
    return a == b and a != "x"


def gates_commute(a: Gate, b: Gate, rules: str = "full") -> bool:
    """Commutation as decided by the rule set (sound, not complete)."""
    roles_b = dict(qubit_roles(b, rules))
    for q, ra in qubit_roles(a, rules):
        rb = roles_b.get(q)
        if rb is not None and not _compatible(ra, rb):
            return False
    return True


@dataclass
class CircuitDag:
    """Mutable dependency graph; vertex ids are gate positions in the source circuit."""

    num_qubits: int
    gates: dict[int, Gate] = field(default_factory=dict)
    succs: dict[int, list[int]] = field(default_factory=dict)
    preds: dict[int, list[int]] = field(default_factory=dict)
    indegree: dict[int, int] = field(default_factory=dict)
    ready: set[int] = field(default_factory=set)

    def __len__(self) -> int:
        return len(self.gates)

    def __contains__(self, vid: int) -> bool:
        return vid in self.gates

    @property
    def edges(self) -> list[tuple[int, int]]:
        return sorted((u, v) for u, vs in self.succs.items() for v in vs)

    def ready_vertices(self) -> list[int]:
        return sorted(self.ready)

    def remove_vertex(self, vid: int) -> Gate:
        if vid not in self.gates:
            raise KeyError(f"vertex {vid} not in DAG")
        if vid not in self.ready:
            raise ValueError(f"vertex {vid} still has unresolved predecessors")
        gate = self.gates.pop(vid)
        self.ready.discard(vid)
        del self.indegree[vid]
        self.preds.pop(vid, None)
        for s in self.succs.pop(vid, ()):
            self.indegree[s] -= 1
            if self.indegree[s] == 0:
                self.ready.add(s)
        return gate

    def to_dot(self) -> str:
        lines = ["digraph circuit {"]
        for vid in sorted(self.gates):
            g = self.gates[vid]
            label = f"{g.kind} {' '.join(map(str, g.qubits))}"
            lines.append(f'  g{vid} [label="{vid}: {label}"];')
        for u, v in self.edges:
            lines.append(f"  g{u} -> g{v};")
        lines.append("}")
        return "\n".join(lines)


def build_dag(circuit: Circuit, rules: str = "full") -> CircuitDag:
    """Dependency DAG of a gate-only circuit.

    Per qubit we keep the current run of mutually commuting gates and the
    run before it. A new gate joining the current run depends on the
    previous run, otherwise on the current one. Redundant candidate edges
    are dropped using ancestor bitsets, which leaves the transitive
    reduction of the dependency order.
    """
    if rules not in DAG_RULES:
        raise ValueError(f"unknown DAG rule set {rules!r}")
    dag = CircuitDag(circuit.num_qubits)
    # qubit -> (role of current run, current run, previous run)
    runs: dict[int, tuple[str, list[int], list[int]]] = {}
    # Ancestor bitsets, kept only while a vertex can still be a candidate.
    ancestors: dict[int, int] = {}
    live: dict[int, int] = {}

    def release(vids: list[int]) -> None:
        for u in vids:
            live[u] -= 1
            if not live[u]:
                del live[u], ancestors[u]

    for vid, instr in enumerate(circuit.instructions):
        if isinstance(instr, Permute):
            raise CircuitError(f"instruction {vid}: DAG input must not contain PERMUTE")
        candidates: set[int] = set()
        roles = qubit_roles(instr, rules)
        live[vid] = len(roles)
        for q, role in roles:
            state = runs.get(q)
            if state is None:
                runs[q] = (role, [vid], [])
                continue
            run_role, current, previous = state
            if _compatible(run_role, role):
                candidates.update(previous)
                current.append(vid)
            else:
                candidates.update(current)
                runs[q] = (role, [vid], current)
                release(previous)

        direct: list[int] = []
        covered = 0
        for u in sorted(candidates, reverse=True):
            if not (covered >> u) & 1:
                direct.append(u)
                covered |= ancestors[u]
        anc = 0
        for u in direct:
            anc |= ancestors[u] | (1 << u)
        ancestors[vid] = anc

        dag.gates[vid] = instr
        dag.succs[vid] = []
        dag.preds[vid] = sorted(direct)
        dag.indegree[vid] = len(direct)
        for u in direct:
            dag.succs[u].append(vid)
        if not direct:
            dag.ready.add(vid)
    return dag


def ready_vertices(dag: CircuitDag) -> list[int]:
    return dag.ready_vertices()


def remove_vertex(dag: CircuitDag, vid: int) -> Gate:
    return dag.remove_vertex(vid)
