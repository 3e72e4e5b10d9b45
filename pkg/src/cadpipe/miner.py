"""Level-wise Apriori over bitset columns, and itemset-to-feature injection.

Each column is held as a Python ``int`` whose bit ``r`` is row ``r``; the
support of an itemset is ``popcount`` of the AND of its member columns.
Frequent k-itemsets keep their AND-ed bitset so a level-(k+1) candidate
costs one AND with the last item's column.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import groupby
from typing import Iterable, Sequence

import numpy as np

from .binarize import BinaryMatrix
from .dataset import DataError

ITEM_SEPARATOR = "^"


@dataclass(frozen=True)
class Itemset:
    items: tuple[int, ...]
    support_count: int
    n_records: int
    name: str = ""

    @property
    def k(self) -> int:
        return len(self.items)

    @property
    def support(self) -> float:
        return self.support_count / self.n_records


@dataclass(frozen=True)
class MinerConfig:
    min_sup: float
    max_k: int | None = None

    def __post_init__(self):
        if not 0.0 < self.min_sup < 1.0:
            raise DataError(f"min_sup must lie in (0, 1), got {self.min_sup}")
        if self.max_k is not None and self.max_k < 1:
            raise DataError(f"max_k must be >= 1, got {self.max_k}")


def min_count(min_sup: float, n_records: int) -> int:
    """Smallest support count that meets ``min_sup``: ceil(min_sup * n)."""
    # round first so 0.1 * 30 = 3.0000000000000004 does not ceil to 4
    return max(1, math.ceil(round(min_sup * n_records, 9)))


def column_bitsets(X: np.ndarray) -> list[int]:
    X = np.asarray(X, dtype=bool)
    packed = np.packbits(X, axis=0, bitorder="little")
    return [int.from_bytes(packed[:, j].tobytes(), "little") for j in range(X.shape[1])]


def bitset_to_array(bits: int, n: int) -> np.ndarray:
    raw = bits.to_bytes((n + 7) // 8, "little")
    return np.unpackbits(np.frombuffer(raw, dtype=np.uint8), bitorder="little")[:n].astype(bool)


def apriori_gen(frequent_prev: Sequence[tuple[int, ...]]) -> list[tuple[int, ...]]:
    """Join (k-1)-itemsets sharing a (k-2)-prefix, then prune by downward closure.

    ``frequent_prev`` must hold canonical (strictly increasing) tuples of one
    size, sorted. The output is sorted and duplicate-free.
    """
    if not frequent_prev:
        return []
    known = set(frequent_prev)
    out: list[tuple[int, ...]] = []
    for _, group in groupby(frequent_prev, key=lambda s: s[:-1]):
        members = list(group)
        for a_pos, a in enumerate(members):
            for b in members[a_pos + 1 :]:
                cand = a + (b[-1],)
                # the two subsets dropping the last or second-last item are a and b
                if all(cand[:i] + cand[i + 1 :] in known for i in range(len(cand) - 2)):
                    out.append(cand)
    return out


def _mine_levels(columns: list[int], n: int, threshold: int, max_k: int | None):
    level: dict[tuple[int, ...], int] = {}
    for j, bits in enumerate(columns):
        if bits.bit_count() >= threshold:
            level[(j,)] = bits
    k = 1
    while level:
        yield level
        if max_k is not None and k >= max_k:
            return
        keys = sorted(level)
        nxt: dict[tuple[int, ...], int] = {}
        for cand in apriori_gen(keys):
            bits = level[cand[:-1]] & columns[cand[-1]]
            if bits.bit_count() >= threshold:
                nxt[cand] = bits
        level = nxt
        k += 1


def _name(items: Iterable[int], names: Sequence[str] | None) -> str:
    if names is None:
        return ITEM_SEPARATOR.join(str(i) for i in items)
    return ITEM_SEPARATOR.join(names[i] for i in items)


def mine_frequent_itemsets(matrix: BinaryMatrix, config: MinerConfig) -> list[Itemset]:
    """All itemsets with support >= ``config.min_sup``, sorted by (k, items)."""
    if matrix.n_records == 0:
        raise DataError("cannot mine an empty matrix")
    return list(_mine(matrix, config, keep_bits=False)[0])


def _mine(matrix: BinaryMatrix, config: MinerConfig, keep_bits: bool):
    n = matrix.n_records
    threshold = min_count(config.min_sup, n)
    columns = column_bitsets(matrix.X)
    out: list[Itemset] = []
    bitsets: list[int] = []
    for level in _mine_levels(columns, n, threshold, config.max_k):
        for items in sorted(level):
            bits = level[items]
            out.append(Itemset(items, bits.bit_count(), n, _name(items, matrix.feature_names)))
            if keep_bits:
                bitsets.append(bits)
    return out, bitsets


@dataclass
class AugmentedMatrix:
    """Base items plus one injected column per frequent itemset.

    1-itemsets are the base columns themselves, so they are recorded in
    ``aliases`` (itemset name -> base column name) instead of being copied.
    """

    base: BinaryMatrix
    injected: list[tuple[Itemset, np.ndarray]] = field(default_factory=list)
    aliases: dict[str, str] = field(default_factory=dict)

    @property
    def feature_names(self) -> list[str]:
        return [*self.base.feature_names, *(s.name for s, _ in self.injected)]

    @property
    def n_features(self) -> int:
        return self.base.n_features + len(self.injected)

    @property
    def X(self) -> np.ndarray:
        if not self.injected:
            return self.base.X
        return np.column_stack([self.base.X, *(c for _, c in self.injected)])

    @property
    def target(self) -> np.ndarray:
        return self.base.target

    def to_matrix(self) -> BinaryMatrix:
        return BinaryMatrix(self.feature_names, self.X, self.base.target, self.base.target_name)


def inject_features(matrix: BinaryMatrix, itemsets: Sequence[Itemset]) -> AugmentedMatrix:
    """Append the row-wise AND of each itemset's members as a new column."""
    aug = AugmentedMatrix(matrix)
    existing = set(matrix.feature_names)
    for s in itemsets:
        if any(i < 0 or i >= matrix.n_features for i in s.items):
            raise DataError(f"itemset {s.items} out of range for {matrix.n_features} columns")
        column = np.logical_and.reduce(matrix.X[:, list(s.items)], axis=1)
        if s.k == 1:
            aug.aliases[s.name] = matrix.feature_names[s.items[0]]
            continue
        if s.name in existing:
            raise DataError(f"injected column {s.name!r} collides with an existing column")
        existing.add(s.name)
        aug.injected.append((s, column))
    return aug


def mine_and_inject(matrix: BinaryMatrix, config: MinerConfig) -> tuple[list[Itemset], AugmentedMatrix]:
    itemsets, bitsets = _mine(matrix, config, keep_bits=True)
    aug = AugmentedMatrix(matrix)
    n = matrix.n_records
    for s, bits in zip(itemsets, bitsets):
        if s.k == 1:
            aug.aliases[s.name] = matrix.feature_names[s.items[0]]
        else:
            aug.injected.append((s, bitset_to_array(bits, n)))
    return itemsets, aug


def sweep_min_sup(matrix: BinaryMatrix, values: Sequence[float], max_k: int | None = None) -> list[tuple[float, int]]:
    """Itemset count for each ``min_sup`` in ``values``."""
    n = matrix.n_records
    columns = column_bitsets(matrix.X)
    out = []
    for v in values:
        cfg = MinerConfig(v, max_k)
        count = sum(len(level) for level in _mine_levels(columns, n, min_count(cfg.min_sup, n), max_k))
        out.append((v, count))
    return out


def format_itemsets(itemsets: Sequence[Itemset]) -> str:
    """Tab-separated table: name, k, support_count, support."""
    lines = ["name\tk\tsupport_count\tsupport"]
    for s in itemsets:
        lines.append(f"{s.name}\t{s.k}\t{s.support_count}\t{s.support:.6f}")
    return "\n".join(lines) + "\n"
