"""Sharded state-vector simulation with communication-avoiding qubit layouts."""

__version__ = "0.1.0"

from .circuit import (
    CNOT,
    CU,
    H,
    U1,
    Y,
    Circuit,
    CircuitError,
    CircuitParseError,
    Gate,
    Permute,
    RandomCircuitSpec,
    generate_random_circuit,
    parse_circuit,
    serialize_circuit,
)
from .compiler import CompiledCircuit, PassConfig, comm_gate_fraction, compile_circuit, score_candidate
from .costmodel import (
    StepCostModel,
    TableCostModel,
    TimeEstimate,
    estimate_circuit,
    instruction_cost,
    load_cost_table,
)
from .dag import CircuitDag, build_dag
from .layout import (
    QubitPermutation,
    ShardConfig,
    amplitude_index,
    decompose_permutation,
    is_local,
    needs_communication,
    permutation_distance,
)
from .simulator import CommStats, DenseState, ShardedState, dense_reference_run, init_state
