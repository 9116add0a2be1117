"""Sharded state-vector simulator with layout permutations.

The ``2**n`` amplitudes live in ``k`` numpy buffers of ``2**m`` entries.
Basis state ``i`` is stored at vector index ``j = amplitude_index(i, perm)``,
i.e. in shard ``j >> m`` at offset ``j & (2**m - 1)``. Any amplitude read
by a shard other than its owner counts as communication.

Inside a shard the buffer is viewed as an ``m``-dimensional tensor of
shape ``(2,) * m``; position ``p`` is tensor axis ``m - 1 - p``.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np

from .circuit import Circuit, Gate, Instruction, Permute
from .layout import (
    QubitPermutation,
    ShardConfig,
    amplitude_index,
    decompose_permutation,
    needs_communication,
    position_map,
)

AMPLITUDE_BYTES = 16
MAX_FULL_QUBITS = 30
MAX_DENSE_QUBITS = 14


@dataclass
class CommStats:
    gates_local: int = 0
    gates_comm: int = 0
    permutes: int = 0
    local_reorders: int = 0
    global_reorders: int = 0
    pair_exchanges: int = 0
    bytes_crossed: int = 0

    def as_dict(self) -> dict[str, int]:
        return asdict(self)

    def to_text(self) -> str:
        return "\n".join(f"{k}={v}" for k, v in self.as_dict().items())


class ShardedState:
    """State of ``cfg.n`` qubits split into ``cfg.k`` shards.

    With ``count_only=True`` no amplitudes are stored; gates and permutes
    only update the layout and the communication counters, which are
    computed from the same formulas as in full mode.
    """

    def __init__(self, cfg: ShardConfig, count_only: bool = False, max_qubits: int = MAX_FULL_QUBITS):
        if not count_only and cfg.n > max_qubits:
            raise MemoryError(f"{cfg.n} qubits exceed the full-simulation limit of {max_qubits}")
        self.cfg = cfg
        self.count_only = count_only
        self.perm = QubitPermutation.identity(cfg.n)
        self.stats = CommStats()
        self.shards: list[np.ndarray] | None = None
        if not count_only:
            self.shards = [np.zeros(cfg.shard_size, dtype=np.complex128) for _ in range(cfg.k)]
            self.shards[0][0] = 1.0

    # -- readout -----------------------------------------------------------

    def read_amplitude(self, i: int) -> complex:
        if not 0 <= i < 1 << self.cfg.n:
            raise IndexError(f"basis index {i} out of range for {self.cfg.n} qubits")
        self._require_amplitudes()
        j = amplitude_index(i, self.perm)
        return complex(self.shards[j >> self.cfg.m][j & (self.cfg.shard_size - 1)])

    def to_vector(self) -> np.ndarray:
        """All amplitudes in basis order ``i`` (identity layout)."""
        self._require_amplitudes()
        n, m = self.cfg.n, self.cfg.m
        stored = np.concatenate(self.shards).reshape((2,) * n)
        # stored axis n-1-p holds position p; qubit q sits at position perm[q]
        axes = [n - 1 - self.perm.map[n - 1 - a] for a in range(n)]
        return np.transpose(stored, axes).reshape(-1)

    def norm(self) -> float:
        self._require_amplitudes()
        return float(sum(np.vdot(s, s).real for s in self.shards))

    def _require_amplitudes(self) -> None:
        if self.shards is None:
            raise RuntimeError("state was created in counting-only mode")

    # -- gates -------------------------------------------------------------

    def apply_gate(self, gate: Gate) -> None:
        cfg = self.cfg
        for q in gate.qubits:
            if q >= cfg.n:
                raise IndexError(f"qubit {q} out of range for {cfg.n} qubits")
        m = cfg.m
        tpos = self.perm.map[gate.target]
        cpos = None if gate.control is None else self.perm.map[gate.control]

        if needs_communication(gate, self.perm, cfg):
            self.stats.gates_comm += 1
            self.stats.bytes_crossed += self._gate_traffic(tpos, cpos)
        else:
            self.stats.gates_local += 1
        if self.shards is None:
            return

        mat = gate.matrix
        if tpos < m:
            for r, shard in enumerate(self.shards):
                if cpos is not None and cpos >= m and not (r >> (cpos - m)) & 1:
                    continue
                self._apply_local(shard, mat, tpos, cpos if cpos is not None and cpos < m else None)
        else:
            bit = 1 << (tpos - m)
            for r in range(cfg.k):
                if r & bit:
                    continue
                if cpos is not None and cpos >= m and not (r >> (cpos - m)) & 1:
                    continue
                lo, hi = self.shards[r], self.shards[r | bit]
                if cpos is not None and cpos < m:
                    sel = self._slicer(cpos, 1)
                    a0, a1 = lo[sel].copy(), hi[sel].copy()
                    lo[sel] = mat[0, 0] * a0 + mat[0, 1] * a1
                    hi[sel] = mat[1, 0] * a0 + mat[1, 1] * a1
                else:
                    a0 = lo.copy()
                    lo *= mat[0, 0]
                    lo += mat[0, 1] * hi
                    hi *= mat[1, 1]
                    hi += mat[1, 0] * a0

    def _gate_traffic(self, tpos: int, cpos: int | None) -> int:
        """Bytes read across shard boundaries by a gate with a global target."""
        cfg = self.cfg
        pairs = cfg.k // 2
        per_shard = cfg.shard_size
        if cpos is not None:
            if cpos >= cfg.m:
                pairs //= 2
            else:
                per_shard //= 2
        return pairs * 2 * per_shard * AMPLITUDE_BYTES

    def _slicer(self, pos: int, value: int) -> tuple:
        """Flat-buffer index selecting entries whose bit ``pos`` equals ``value``."""
        size = self.cfg.shard_size
        return np.nonzero(((np.arange(size) >> pos) & 1) == value)[0]

    def _apply_local(self, shard: np.ndarray, mat: np.ndarray, tpos: int, cpos: int | None) -> None:
        m = self.cfg.m
        view = shard.reshape((2,) * m)
        idx0: list = [slice(None)] * m
        idx1: list = [slice(None)] * m
        idx0[m - 1 - tpos] = 0
        idx1[m - 1 - tpos] = 1
        if cpos is not None:
            idx0[m - 1 - cpos] = 1
            idx1[m - 1 - cpos] = 1
        idx0, idx1 = tuple(idx0), tuple(idx1)
        a0 = view[idx0].copy()
        a1 = view[idx1].copy()
        view[idx0] = mat[0, 0] * a0 + mat[0, 1] * a1
        view[idx1] = mat[1, 0] * a0 + mat[1, 1] * a1

    # -- layout changes ----------------------------------------------------

    def permute_qubits(self, new: QubitPermutation) -> None:
        """Move amplitudes so that ``new`` becomes the layout.

        Runs in three steps: reorder local positions inside each shard,
        relabel shards (global positions), then exchange one local and one
        global position per remaining pair.
        """
        cfg = self.cfg
        if new.n != cfg.n:
            raise ValueError(f"permutation has {new.n} entries, state has {cfg.n} qubits")
        if new == self.perm:
            return
        m = cfg.m
        self.stats.permutes += 1
        step1, step2 = decompose_permutation(self.perm, new, m)

        if step1 != self.perm:
            self.stats.local_reorders += 1
            if self.shards is not None:
                move = position_map(self.perm, step1)
                # new axis for position move[p] takes old axis for position p
                axes = [0] * m
                for p in range(m):
                    axes[m - 1 - move[p]] = m - 1 - p
                self.shards = [
                    np.ascontiguousarray(np.transpose(s.reshape((2,) * m), axes)).reshape(-1)
                    for s in self.shards
                ]

        if step2 != step1:
            self.stats.global_reorders += 1
            move = position_map(step1, step2)
            relabel = []
            for r in range(cfg.k):
                dest = 0
                for b in range(cfg.num_global):
                    if (r >> b) & 1:
                        dest |= 1 << (move[m + b] - m)
                relabel.append(dest)
            displaced = sum(1 for r, d in enumerate(relabel) if r != d)
            self.stats.bytes_crossed += displaced * cfg.shard_size * AMPLITUDE_BYTES
            if self.shards is not None:
                shards = [None] * cfg.k
                for r, d in enumerate(relabel):
                    shards[d] = self.shards[r]
                self.shards = shards

        move = position_map(step2, new)
        for lpos in range(m):
            gpos = move[lpos]
            if gpos == lpos:
                continue
            self.stats.pair_exchanges += 1
            self.stats.bytes_crossed += cfg.k * (cfg.shard_size // 2) * AMPLITUDE_BYTES
            if self.shards is not None:
                self._exchange(lpos, gpos)
        self.perm = new

    def _exchange(self, lpos: int, gpos: int) -> None:
        """SWAP-like exchange of local position ``lpos`` with global position ``gpos``."""
        bit = 1 << (gpos - self.cfg.m)
        hi_half = self._slicer(lpos, 1)
        lo_half = self._slicer(lpos, 0)
        for r in range(self.cfg.k):
            if r & bit:
                continue
            a, b = self.shards[r], self.shards[r | bit]
            tmp = a[hi_half].copy()
            a[hi_half] = b[lo_half]
            b[lo_half] = tmp

    def apply_instruction(self, instr: Instruction) -> None:
        if isinstance(instr, Permute):
            self.permute_qubits(instr.perm)
        else:
            self.apply_gate(instr)

    def run(self, circuit: Circuit) -> ShardedState:
        if circuit.num_qubits != self.cfg.n:
            raise ValueError(f"circuit has {circuit.num_qubits} qubits, state has {self.cfg.n}")
        for instr in circuit.instructions:
            self.apply_instruction(instr)
        return self


def init_state(cfg: ShardConfig, count_only: bool = False, max_qubits: int = MAX_FULL_QUBITS) -> ShardedState:
    return ShardedState(cfg, count_only=count_only, max_qubits=max_qubits)


def run_sharded(circuit: Circuit, cfg: ShardConfig, count_only: bool = False) -> ShardedState:
    return init_state(cfg, count_only=count_only).run(circuit)


@dataclass
class DenseState:
    """Reference state: one buffer in identity layout."""

    n: int
    amplitudes: np.ndarray

    def read_amplitude(self, i: int) -> complex:
        return complex(self.amplitudes[i])


def dense_reference_run(circuit: Circuit, n: int | None = None) -> DenseState:
    """Straightforward single-buffer simulation; PERMUTE lines are no-ops."""
    n = circuit.num_qubits if n is None else n
    if n > MAX_DENSE_QUBITS:
        raise MemoryError(f"dense reference is limited to {MAX_DENSE_QUBITS} qubits, got {n}")
    psi = np.zeros(1 << n, dtype=np.complex128)
    psi[0] = 1.0
    idx = np.arange(1 << n)
    for instr in circuit.instructions:
        if isinstance(instr, Permute):
            continue
        u = instr.matrix
        tbit = 1 << instr.target
        sel = (idx & tbit) == 0
        if instr.control is not None:
            sel &= (idx >> instr.control) & 1 == 1
        i0 = idx[sel]
        i1 = i0 | tbit
        a0, a1 = psi[i0], psi[i1]
        psi[i0], psi[i1] = u[0, 0] * a0 + u[0, 1] * a1, u[1, 0] * a0 + u[1, 1] * a1
    return DenseState(n, psi)
