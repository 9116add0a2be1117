"""Qubit layout: permutations, shard configuration and locality rules.

Vocabulary used throughout the package: a *position* is a bit index of the
stored vector index, and qubit ``q`` lives at position ``perm[q]``.
Positions below ``m`` are local (inside a shard), positions ``>= m`` are
global (they select the shard).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import TYPE_CHECKING, Iterable, Sequence

if TYPE_CHECKING:  # pragma: no cover
    from .circuit import Gate


@dataclass(frozen=True)
class QubitPermutation:
    """Bijection from qubit ids to bit positions, with a cached inverse."""

    map: tuple[int, ...]
    inv: tuple[int, ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        mapping = tuple(int(x) for x in self.map)
        n = len(mapping)
        inv = [-1] * n
        for q, p in enumerate(mapping):
            if not 0 <= p < n or inv[p] != -1:
                raise ValueError(f"not a permutation of 0..{n - 1}: {list(mapping)}")
            inv[p] = q
        object.__setattr__(self, "map", mapping)
        object.__setattr__(self, "inv", tuple(inv))

    @classmethod
    def identity(cls, n: int) -> QubitPermutation:
        return cls(tuple(range(n)))

    @classmethod
    def from_inverse(cls, inv: Sequence[int]) -> QubitPermutation:
        """Build from the position -> qubit table."""
        mapping = [0] * len(inv)
        for p, q in enumerate(inv):
            mapping[q] = p
        return cls(tuple(mapping))

    @property
    def n(self) -> int:
        return len(self.map)

    def __len__(self) -> int:
        return len(self.map)

    def __call__(self, q: int) -> int:
        return self.map[q]

    def is_identity(self) -> bool:
        return all(q == p for q, p in enumerate(self.map))

    def then(self, other: QubitPermutation) -> QubitPermutation:
        """Apply ``self`` first, then ``other``: ``q -> other(self(q))``."""
        if other.n != self.n:
            raise ValueError("size mismatch")
        return QubitPermutation(tuple(other.map[p] for p in self.map))

    def inverse(self) -> QubitPermutation:
        return QubitPermutation(self.inv)

    def swap_positions(self, a: int, b: int) -> QubitPermutation:
        """Exchange the qubits currently sitting at positions ``a`` and ``b``."""
        mapping = list(self.map)
        qa, qb = self.inv[a], self.inv[b]
        mapping[qa], mapping[qb] = b, a
        return QubitPermutation(tuple(mapping))

    def to_text(self) -> str:
        return ",".join(str(p) for p in self.map)

    @classmethod
    def from_text(cls, text: str) -> QubitPermutation:
        return cls(tuple(int(tok) for tok in text.split(",")))


@dataclass(frozen=True)
class ShardConfig:
    """``n`` qubits split over ``k`` shards (``k`` a power of two).

    ``m = n - log2(k)`` qubits are local.
    """

    n: int
    k: int = 1

    def __post_init__(self) -> None:
        if self.n < 1:
            raise ValueError(f"need at least one qubit, got n={self.n}")
        if self.k < 1 or self.k & (self.k - 1):
            raise ValueError(f"shard count must be a power of two >= 1, got k={self.k}")
        if self.num_global >= self.n:
            raise ValueError(f"k={self.k} leaves no local qubit for n={self.n}")

    @classmethod
    def from_local(cls, n: int, m: int) -> ShardConfig:
        if not 1 <= m <= n:
            raise ValueError(f"local qubit count must be in [1, {n}], got m={m}")
        return cls(n, 1 << (n - m))

    @property
    def num_global(self) -> int:
        return self.k.bit_length() - 1

    @property
    def m(self) -> int:
        return self.n - self.num_global

    @property
    def shard_size(self) -> int:
        return 1 << self.m


def amplitude_index(i: int, perm: QubitPermutation) -> int:
    """Vector index of basis state ``i`` under layout ``perm``."""
    j = 0
    q = 0
    while i:
        if i & 1:
            j |= 1 << perm.map[q]
        i >>= 1
        q += 1
    return j


def is_local(q: int, perm: QubitPermutation, cfg: ShardConfig) -> bool:
    return perm.map[q] < cfg.m


def needs_communication(gate: Gate, perm: QubitPermutation, cfg: ShardConfig) -> bool:
    # Only the target position matters: a global control just selects shards.
    return perm.map[gate.target] >= cfg.m


def _check_pair(perm: QubitPermutation, new: QubitPermutation) -> None:
    if perm.n != new.n:
        raise ValueError(f"permutation sizes differ: {perm.n} vs {new.n}")


def decompose_permutation(
    perm: QubitPermutation, new: QubitPermutation, cfg: ShardConfig | int
) -> tuple[QubitPermutation, QubitPermutation]:
    """Split ``perm -> new`` into ``perm -> s1 -> s2 -> new``.

    ``s1`` only reorders local positions, ``s2`` only reorders global
    positions, and the remaining move ``s2 -> new`` is a set of disjoint
    local/global position exchanges. ``cfg`` may be a ShardConfig or the
    local qubit count ``m`` directly.
    """
    _check_pair(perm, new)
    m = cfg.m if isinstance(cfg, ShardConfig) else int(cfg)
    n = perm.n
    if not 0 <= m <= n:
        raise ValueError(f"local qubit count out of range: m={m}")
    target = new.map

    # Local positions: follow position chains through global positions until
    # they land back on a local position.
    inv1 = list(perm.inv)
    for p in range(m):
        dest = target[perm.inv[p]]
        while dest >= m:
            dest = target[perm.inv[dest]]
        inv1[dest] = perm.inv[p]

    # Same for global positions, starting from the step-1 layout.
    inv2 = list(inv1)
    for p in range(m, n):
        dest = target[inv1[p]]
        while dest < m:
            dest = target[inv1[dest]]
        inv2[dest] = inv1[p]

    return QubitPermutation.from_inverse(inv1), QubitPermutation.from_inverse(inv2)


def exchange_pairs(
    perm: QubitPermutation, new: QubitPermutation, cfg: ShardConfig | int
) -> list[tuple[int, int]]:
    """Position pairs ``(local, global)`` exchanged by the last step of a decomposition."""
    m = cfg.m if isinstance(cfg, ShardConfig) else int(cfg)
    _, s2 = decompose_permutation(perm, new, m)
    pairs = []
    for p in range(m):
        dest = new.map[s2.inv[p]]
        if dest != p:
            pairs.append((p, dest))
    return pairs


@dataclass(frozen=True)
class PermutationDistance:
    local_changed: bool
    global_changed: bool
    num_pairs: int


def permutation_distance(
    perm: QubitPermutation, new: QubitPermutation, cfg: ShardConfig | int
) -> PermutationDistance:
    """Which of the three reordering steps are needed to go from ``perm`` to ``new``."""
    m = cfg.m if isinstance(cfg, ShardConfig) else int(cfg)
    s1, s2 = decompose_permutation(perm, new, m)
    pairs = sum(1 for p in range(m) if new.map[s2.inv[p]] != p)
    return PermutationDistance(
        local_changed=s1 != perm,
        global_changed=s2 != s1,
        num_pairs=pairs,
    )


def local_qubits(perm: QubitPermutation, cfg: ShardConfig) -> list[int]:
    return [perm.inv[p] for p in range(cfg.m)]


def global_qubits(perm: QubitPermutation, cfg: ShardConfig) -> list[int]:
    return [perm.inv[p] for p in range(cfg.m, cfg.n)]


def position_map(before: QubitPermutation, after: QubitPermutation) -> list[int]:
    """Position move ``after o before^-1``: entry ``p`` is where position ``p`` goes."""
    _check_pair(before, after)
    return [after.map[q] for q in before.inv]


def parse_positions(values: Iterable[int], n: int) -> QubitPermutation:
    perm = QubitPermutation(tuple(values))
    if perm.n != n:
        raise ValueError(f"permutation has {perm.n} entries, expected {n}")
    return perm
