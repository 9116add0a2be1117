"""Gates, circuits, the text format and the random-circuit generator.

Text format, one instruction per line, ``#`` starts a comment::

    qubits 3
    H 0
    CNOT 0 2
    U1 1 <8 reals>          # row-major 2x2 matrix as re/im pairs
    CU 0 1 <8 reals>        # block applied when the control is 1
    PERMUTE 2,0,1           # image list perm[0],perm[1],...

Random circuits use numpy's ``default_rng`` (PCG64) seeded with the
spec's 64-bit seed; draws per gate are: one uniform for the 1q/2q choice,
then either (control, target) or (H/Y coin, qubit).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterator, Sequence, Union

import numpy as np

from .layout import QubitPermutation

ONE_QUBIT_KINDS = ("H", "Y", "U1")
CONTROLLED_KINDS = ("CNOT", "CU")

_S = 1 / math.sqrt(2)
FIXED_MATRICES: dict[str, tuple[complex, complex, complex, complex]] = {
    "H": (_S, _S, _S, -_S),
    "Y": (0, -1j, 1j, 0),
    "CNOT": (0, 1, 1, 0),
}

UNITARY_TOL = 1e-12


class CircuitError(ValueError):
    """Invalid gate, circuit or circuit text."""


class CircuitParseError(CircuitError):
    def __init__(self, lineno: int, message: str):
        super().__init__(f"line {lineno}: {message}")
        self.lineno = lineno


@dataclass(frozen=True)
class Gate:
    """1-qubit or controlled-1-qubit gate.

    ``entries`` holds the row-major 2x2 block; it is filled in automatically
    for the fixed kinds H, Y and CNOT.
    """

    kind: str
    target: int
    control: int | None = None
    entries: tuple[complex, complex, complex, complex] | None = None

    def __post_init__(self) -> None:
        if self.kind not in ONE_QUBIT_KINDS + CONTROLLED_KINDS:
            raise CircuitError(f"unknown gate kind {self.kind!r}")
        if self.kind in CONTROLLED_KINDS:
            if self.control is None:
                raise CircuitError(f"{self.kind} needs a control qubit")
            if self.control == self.target:
                raise CircuitError(f"{self.kind}: control equals target ({self.target})")
        elif self.control is not None:
            raise CircuitError(f"{self.kind} takes no control qubit")
        if self.target < 0 or (self.control is not None and self.control < 0):
            raise CircuitError("negative qubit index")

        if self.kind in FIXED_MATRICES:
            if self.entries is not None and not np.allclose(
                self.entries, FIXED_MATRICES[self.kind], atol=UNITARY_TOL
            ):
                raise CircuitError(f"{self.kind} has a fixed matrix")
            object.__setattr__(self, "entries", tuple(complex(x) for x in FIXED_MATRICES[self.kind]))
        else:
            if self.entries is None or len(self.entries) != 4:
                raise CircuitError(f"{self.kind} needs a 2x2 matrix")
            ents = tuple(complex(x) for x in self.entries)
            object.__setattr__(self, "entries", ents)
            mat = np.array(ents).reshape(2, 2)
            if np.abs(mat.conj().T @ mat - np.eye(2)).max() > UNITARY_TOL:
                raise CircuitError(f"{self.kind} matrix is not unitary")

    @property
    def matrix(self) -> np.ndarray:
        return np.array(self.entries, dtype=np.complex128).reshape(2, 2)

    @property
    def is_controlled(self) -> bool:
        return self.control is not None

    @property
    def qubits(self) -> tuple[int, ...]:
        if self.control is None:
            return (self.target,)
        return (self.control, self.target)


def H(q: int) -> Gate:
    return Gate("H", q)


def Y(q: int) -> Gate:
    return Gate("Y", q)


def CNOT(control: int, target: int) -> Gate:
    return Gate("CNOT", target, control)


def U1(q: int, matrix) -> Gate:
    return Gate("U1", q, entries=tuple(np.asarray(matrix, dtype=complex).ravel()))


def CU(control: int, target: int, matrix) -> Gate:
    return Gate("CU", target, control, tuple(np.asarray(matrix, dtype=complex).ravel()))


@dataclass(frozen=True)
class Permute:
    """Change of memory layout to ``perm``."""

    perm: QubitPermutation


Instruction = Union[Gate, Permute]


@dataclass
class Circuit:
    num_qubits: int
    instructions: list[Instruction] = field(default_factory=list)

    def __post_init__(self) -> None:
        if self.num_qubits < 1:
            raise CircuitError(f"qubit count must be positive, got {self.num_qubits}")
        for instr in self.instructions:
            self._check(instr)

    def _check(self, instr: Instruction) -> None:
        if isinstance(instr, Permute):
            if instr.perm.n != self.num_qubits:
                raise CircuitError(
                    f"permutation has {instr.perm.n} entries, circuit has {self.num_qubits} qubits"
                )
        else:
            for q in instr.qubits:
                if q >= self.num_qubits:
                    raise CircuitError(f"qubit {q} out of range for {self.num_qubits} qubits")

    def append(self, instr: Instruction) -> None:
        self._check(instr)
        self.instructions.append(instr)

    @property
    def gates(self) -> list[Gate]:
        return [g for g in self.instructions if isinstance(g, Gate)]

    @property
    def num_permutes(self) -> int:
        return sum(isinstance(i, Permute) for i in self.instructions)

    def __len__(self) -> int:
        return len(self.instructions)

    def __iter__(self) -> Iterator[Instruction]:
        return iter(self.instructions)


def _format_real(x: float) -> str:
    return repr(float(x))


def _format_entries(entries: Sequence[complex]) -> str:
    return " ".join(f"{_format_real(z.real)} {_format_real(z.imag)}" for z in entries)


def format_instruction(instr: Instruction) -> str:
    if isinstance(instr, Permute):
        return f"PERMUTE {instr.perm.to_text()}"
    if instr.kind in ("H", "Y"):
        return f"{instr.kind} {instr.target}"
    if instr.kind == "CNOT":
        return f"CNOT {instr.control} {instr.target}"
    if instr.kind == "U1":
        return f"U1 {instr.target} {_format_entries(instr.entries)}"
    return f"CU {instr.control} {instr.target} {_format_entries(instr.entries)}"


def serialize_circuit(circuit: Circuit) -> str:
    lines = [f"qubits {circuit.num_qubits}"]
    lines.extend(format_instruction(i) for i in circuit.instructions)
    return "\n".join(lines)


def _int_token(tok: str, lineno: int, what: str) -> int:
    try:
        value = int(tok)
    except ValueError:
        raise CircuitParseError(lineno, f"expected integer {what}, got {tok!r}") from None
    if value < 0:
        raise CircuitParseError(lineno, f"negative {what} {value}")
    return value


def _matrix_tokens(toks: Sequence[str], lineno: int) -> tuple[complex, ...]:
    if len(toks) != 8:
        raise CircuitParseError(lineno, f"expected 8 reals for the matrix, got {len(toks)}")
    try:
        reals = [float(t) for t in toks]
    except ValueError:
        raise CircuitParseError(lineno, "matrix entries must be reals") from None
    return tuple(complex(reals[2 * i], reals[2 * i + 1]) for i in range(4))


def _parse_line(toks: list[str], lineno: int, n: int) -> Instruction:
    op, args = toks[0], toks[1:]
    arity = {"H": 1, "Y": 1, "CNOT": 2, "U1": 9, "CU": 10, "PERMUTE": 1}
    if op not in arity:
        raise CircuitParseError(lineno, f"unknown instruction {op!r}")
    if len(args) != arity[op]:
        raise CircuitParseError(lineno, f"{op} takes {arity[op]} arguments, got {len(args)}")

    if op == "PERMUTE":
        try:
            perm = QubitPermutation.from_text(args[0])
        except ValueError as exc:
            raise CircuitParseError(lineno, f"malformed permutation: {exc}") from None
        if perm.n != n:
            raise CircuitParseError(lineno, f"permutation has {perm.n} entries, expected {n}")
        return Permute(perm)

    nq = 1 if op in ("H", "Y", "U1") else 2
    qubits = [_int_token(t, lineno, "qubit") for t in args[:nq]]
    for q in qubits:
        if q >= n:
            raise CircuitParseError(lineno, f"qubit {q} out of range for {n} qubits")
    try:
        if op in ("H", "Y"):
            return Gate(op, qubits[0])
        if op == "CNOT":
            return CNOT(*qubits)
        entries = _matrix_tokens(args[nq:], lineno)
        if op == "U1":
            return Gate("U1", qubits[0], entries=entries)
        return Gate("CU", qubits[1], qubits[0], entries)
    except CircuitError as exc:
        raise CircuitParseError(lineno, str(exc)) from None


def parse_circuit(text: str) -> Circuit:
    circuit: Circuit | None = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        toks = raw.split("#", 1)[0].split()
        if not toks:
            continue
        if circuit is None:
            if toks[0] != "qubits" or len(toks) != 2:
                raise CircuitParseError(lineno, "expected header 'qubits <n>'")
            n = _int_token(toks[1], lineno, "qubit count")
            if n < 1:
                raise CircuitParseError(lineno, "qubit count must be positive")
            circuit = Circuit(n)
            continue
        circuit.instructions.append(_parse_line(toks, lineno, circuit.num_qubits))
    if circuit is None:
        raise CircuitParseError(1, "missing header 'qubits <n>'")
    return circuit


def read_circuit(path) -> Circuit:
    with open(path, encoding="utf-8") as fh:
        return parse_circuit(fh.read())


def write_circuit(circuit: Circuit, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(serialize_circuit(circuit) + "\n")


@dataclass(frozen=True)
class RandomCircuitSpec:
    n: int
    num_gates: int
    p: float
    seed: int

    def __post_init__(self) -> None:
        if not 0.0 <= self.p <= 1.0:
            raise CircuitError(f"p must lie in [0, 1], got {self.p}")
        if self.num_gates < 0:
            raise CircuitError("num_gates must be non-negative")
        if self.n < 1:
            raise CircuitError("n must be positive")
        if self.n < 2 and self.p > 0:
            raise CircuitError("two-qubit gates need n >= 2")


def generate_random_circuit(spec: RandomCircuitSpec) -> Circuit:
    """Random H/Y/CNOT sequence: each gate is a CNOT with probability ``p``."""
    rng = np.random.default_rng(spec.seed)
    n = spec.n
    gates: list[Instruction] = []
    for _ in range(spec.num_gates):
        if rng.random() < spec.p:
            control = int(rng.integers(n))
            target = int(rng.integers(n - 1))
            if target >= control:
                target += 1
            gates.append(Gate("CNOT", target, control))
        else:
            kind = "H" if rng.random() < 0.5 else "Y"
            gates.append(Gate(kind, int(rng.integers(n))))
    return Circuit(n, gates)
