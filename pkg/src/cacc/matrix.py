"""Communication matrices of iterated local rules.

For a split (n, i) Alice holds the leftmost i cells of the 2rn+1 cell window
and Bob the rest. Row and column indices are the lexicographic ranks of the
two parts, so the matrix is just the truth table of f^n reshaped.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .config import DEFAULT_BUDGET, DEFAULT_PRIMES
from .errors import BudgetExceeded, InvalidInput, Unsupported
from .linalg import ranks_mod_primes
from .rules import RuleTable, Word, as_word, format_rule, iterate, truth_table, word_index, word_str


@dataclass(frozen=True)
class SplitSpec:
    n: int
    i: int

    def __post_init__(self):
        if self.n < 1:
            raise InvalidInput(f"iteration count must be >= 1, got {self.n}")
        if self.i < 0:
            raise InvalidInput(f"split position must be >= 0, got {self.i}")

    def check(self, rule: RuleTable) -> None:
        if self.i > rule.window(self.n):
            raise InvalidInput(
                f"split i={self.i} is outside 0..{rule.window(self.n)} for n={self.n}"
            )

    def bob_cells(self, rule: RuleTable) -> int:
        return rule.window(self.n) - self.i


@dataclass(frozen=True, eq=False)
class IterationMatrix:
    """A matrix over 0..states-1. Binary matrices keep rows bit-packed."""

    n_rows: int
    n_cols: int
    states: int
    data: np.ndarray
    rule: RuleTable | None = None
    split: SplitSpec | None = None

    @property
    def packed(self) -> bool:
        return self.states == 2

    @classmethod
    def from_array(cls, values, states: int | None = None, **kw) -> IterationMatrix:
        values = np.asarray(values, dtype=np.uint8)
        if values.ndim != 2:
            raise InvalidInput("matrix must be two-dimensional")
        if states is None:
            states = max(2, int(values.max(initial=0)) + 1)
        data = np.packbits(values, axis=1) if states == 2 else np.ascontiguousarray(values)
        return cls(values.shape[0], values.shape[1], states, data, **kw)

    @property
    def nbytes(self) -> int:
        return self.data.nbytes

    def dense(self) -> np.ndarray:
        if self.packed:
            return np.unpackbits(self.data, axis=1, count=self.n_cols)
        return self.data

    def entry(self, x, y) -> int:
        r = x if isinstance(x, (int, np.integer)) else word_index(as_word(x), self.states)
        c = y if isinstance(y, (int, np.integer)) else word_index(as_word(y), self.states)
        if self.packed:
            return int(self.data[r, c >> 3] >> (7 - (c & 7))) & 1
        return int(self.data[r, c])

    def row_keys(self) -> np.ndarray:
        """One byte string per row; equal rows have equal keys."""
        return self.data

    def column_keys(self, chunk_rows: int = 1 << 16) -> np.ndarray:
        if not self.packed:
            return np.ascontiguousarray(self.data.T)
        # bit plane b of byte column k is matrix column 8k + b
        chunk_rows = max(8, chunk_rows - chunk_rows % 8)
        n_bytes = self.data.shape[1]
        out = np.zeros((n_bytes * 8, (self.n_rows + 7) // 8), dtype=np.uint8)
        for start in range(0, self.n_rows, chunk_rows):
            block_t = np.ascontiguousarray(self.data[start:start + chunk_rows].T)
            dest = slice(start // 8, (start + block_t.shape[1] + 7) // 8)
            for b in range(8):
                plane = (block_t >> (7 - b)) & 1
                out[b::8, dest] = np.packbits(plane, axis=1)
        return out[: self.n_cols]

    def transpose(self) -> IterationMatrix:
        if self.packed:
            return IterationMatrix.from_array(self.dense().T, states=2)
        return IterationMatrix(self.n_cols, self.n_rows, self.states, self.column_keys())


def build_matrix(rule: RuleTable, split: SplitSpec, budget: int = DEFAULT_BUDGET) -> IterationMatrix:
    """Matrix of f^n_i: entry (x, y) = f^n(x + y)."""
    split.check(rule)
    s, length = rule.states, rule.window(split.n)
    required = s**length
    if required > budget:
        raise BudgetExceeded(f"matrix of f^{split.n} split at {split.i}", required, budget)
    table = truth_table(rule, split.n, budget)
    values = table.reshape(s**split.i, s ** (length - split.i))
    return IterationMatrix.from_array(values, states=s, rule=rule, split=split)


# -- distinct rows ---------------------------------------------------------

_HASH_SEED = 0x5EED_CAFE


def _as_words(keys: np.ndarray) -> np.ndarray:
    keys = np.ascontiguousarray(keys, dtype=np.uint8)
    pad = (-keys.shape[1]) % 8
    if pad:
        keys = np.concatenate([keys, np.zeros((keys.shape[0], pad), np.uint8)], axis=1)
    return keys.view(np.uint64)


def row_classes(keys: np.ndarray) -> tuple[np.ndarray, int]:
    """Compact class id per row, and the number of classes.

    Rows of at most 8 bytes are compared as integers. Longer rows are hashed
    to 64 bits; every row is then compared in full against its class
    representative, and a collision falls back to an exact sort.
    """
    if keys.shape[0] == 0:
        return np.zeros(0, np.int64), 0
    if keys.shape[1] == 0:
        return np.zeros(keys.shape[0], np.int64), 1
    words = _as_words(keys)
    if words.shape[1] == 1:
        uniq, inv = np.unique(words[:, 0], return_inverse=True)
        return inv.ravel(), len(uniq)
    rng = np.random.default_rng(_HASH_SEED)
    mult = rng.integers(0, 2**63, size=words.shape[1], dtype=np.uint64) * np.uint64(2) + np.uint64(1)
    mixed = words ^ (words >> np.uint64(29))
    h = (mixed * mult[None, :]).sum(axis=1, dtype=np.uint64)
    h ^= h >> np.uint64(31)
    uniq, first, inv = np.unique(h, return_index=True, return_inverse=True)
    inv = inv.ravel()
    if np.array_equal(words, words[first[inv]]):
        return inv, len(uniq)
    uniq, inv = np.unique(words, axis=0, return_inverse=True)
    return inv.ravel(), len(uniq)


def count_distinct_rows(keys: np.ndarray) -> int:
    return row_classes(keys)[1]


def distinct_counts(matrix: IterationMatrix) -> tuple[int, int, int]:
    """(distinct rows, distinct columns, d = the smaller of the two)."""
    rows = count_distinct_rows(matrix.row_keys())
    cols = count_distinct_rows(matrix.column_keys())
    return rows, cols, min(rows, cols)


def cc1_from_d(d: int) -> int:
    """ceil(log2 d), with d = 1 giving 0."""
    return (d - 1).bit_length()


def _first_occurrence(ids: np.ndarray, count: int) -> np.ndarray:
    first = np.empty(count, dtype=np.int64)
    first[ids[::-1]] = np.arange(len(ids) - 1, -1, -1)
    return np.sort(first)


def reduced_matrix(matrix: IterationMatrix) -> np.ndarray:
    """Dense submatrix keeping one copy of each distinct row and column."""
    r_ids, r_count = row_classes(matrix.row_keys())
    c_ids, c_count = row_classes(matrix.column_keys())
    rows = _first_occurrence(r_ids, r_count)
    cols = _first_occurrence(c_ids, c_count)
    if matrix.packed:
        sub = np.unpackbits(matrix.data[rows], axis=1, count=matrix.n_cols)
    else:
        sub = matrix.data[rows]
    return sub[:, cols]


def rank_lower_bound(matrix: IterationMatrix, primes: Sequence[int] = DEFAULT_PRIMES) -> int:
    """max over `primes` of the rank modulo p; never exceeds the rational rank."""
    return max(ranks_mod_primes(reduced_matrix(matrix), primes).values())


# -- whole-profile counting by split refinement -----------------------------
#
# Row x at split i is the concatenation of rows x.0, ..., x.(s-1) at split
# i+1, so row classes at i are tuples of classes at i+1. Column y at split i
# interleaves columns 0.y, ..., (s-1).y at split i-1. Both passes are exact.


def _small_uint(limit: int):
    for dt in (np.uint8, np.uint16, np.uint32, np.uint64):
        if limit <= np.iinfo(dt).max + 1:
            return dt
    raise Unsupported("class count overflow")


def _pair_classes(a: np.ndarray, b: np.ndarray, ka: int, kb: int) -> tuple[np.ndarray, int]:
    span = ka * kb
    dt = _small_uint(span)
    key = a.astype(dt)
    key *= dt(kb)
    key += b
    if span <= max(4 * len(key), 1 << 12):
        present = np.zeros(span, dtype=bool)
        present[key] = True
        count = int(np.count_nonzero(present))
        remap = (np.cumsum(present) - 1).astype(_small_uint(count))
        return remap[key], count
    uniq, inv = np.unique(key, return_inverse=True)
    return inv.ravel().astype(_small_uint(len(uniq))), len(uniq)


def _combine(parts: list[np.ndarray], k: int) -> tuple[np.ndarray, int]:
    ids, count = parts[0], k
    for part in parts[1:]:
        ids, count = _pair_classes(ids, part, count, k)
    return ids, count


def _base_classes(table: np.ndarray, states: int) -> tuple[np.ndarray, int]:
    if states == 2:
        if table.min() == table.max():
            return np.zeros_like(table), 1
        return table, 2
    present = np.bincount(table, minlength=states) > 0
    remap = (np.cumsum(present) - 1).astype(np.uint8)
    return remap[table], int(np.count_nonzero(present))


def refine_row_classes(table: np.ndarray, states: int, length: int, keep: Iterable[int] = ()):
    """Distinct-row count for every split, plus class ids for splits in `keep`."""
    keep = set(keep)
    counts = [0] * (length + 1)
    saved = {}
    ids, k = _base_classes(table, states)
    counts[length] = k
    if length in keep:
        saved[length] = ids
    lowest = min(keep) if keep else 0
    for i in range(length - 1, lowest - 1 if keep else -1, -1):
        grid = ids.reshape(-1, states)
        ids, k = _combine([grid[:, b] for b in range(states)], k)
        counts[i] = k
        if i in keep:
            saved[i] = ids
    return counts, saved


def refine_col_classes(table: np.ndarray, states: int, length: int, keep: Iterable[int] = ()):
    keep = set(keep)
    counts = [0] * (length + 1)
    saved = {}
    ids, k = _base_classes(table, states)
    counts[0] = k
    if 0 in keep:
        saved[0] = ids
    highest = max(keep) if keep else length
    for i in range(1, highest + 1):
        grid = ids.reshape(states, -1)
        ids, k = _combine([grid[b] for b in range(states)], k)
        counts[i] = k
        if i in keep:
            saved[i] = ids
    return counts, saved


@dataclass(frozen=True)
class SplitRecord:
    i: int
    rows: int
    cols: int

    @property
    def d(self) -> int:
        return min(self.rows, self.cols)

    @property
    def cc1(self) -> int:
        return cc1_from_d(self.d)

    def to_dict(self) -> dict:
        return {"i": self.i, "rows": self.rows, "cols": self.cols, "d": self.d, "cc1": self.cc1}


@dataclass
class CCProfile:
    rule: str
    n: int
    splits: list[SplitRecord]
    rank_by_prime: dict[int, int] = field(default_factory=dict)
    rank_lb: int | None = None

    @property
    def worst_cc1(self) -> int:
        return max(s.cc1 for s in self.splits)

    @property
    def worst_d(self) -> int:
        return max(s.d for s in self.splits)

    @property
    def s_n(self) -> list[int]:
        top = self.worst_cc1
        return [s.i for s in self.splits if s.cc1 == top]

    @property
    def d_argmax(self) -> list[int]:
        top = self.worst_d
        return [s.i for s in self.splits if s.d == top]

    def to_dict(self) -> dict:
        return {
            "rule": self.rule,
            "n": self.n,
            "splits": [s.to_dict() for s in self.splits],
            "worst_cc1": self.worst_cc1,
            "worst_d": self.worst_d,
            "s_n": self.s_n,
            "rank_lb": self.rank_lb,
            "rank_by_prime": {str(p): r for p, r in sorted(self.rank_by_prime.items())},
        }

    def csv_rows(self) -> list[dict]:
        worst = set(self.s_n)
        return [
            {"rule": self.rule, "n": self.n, **s.to_dict(), "in_s_n": int(s.i in worst)}
            for s in self.splits
        ]


PROFILE_CSV_FIELDS = ["rule", "n", "i", "rows", "cols", "d", "cc1", "in_s_n"]


def profiles_to_csv(profiles: Iterable[CCProfile]) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=PROFILE_CSV_FIELDS, lineterminator="\n")
    writer.writeheader()
    for p in profiles:
        writer.writerows(p.csv_rows())
    return buf.getvalue()


def cc1_profile(
    rule: RuleTable,
    n: int,
    budget: int = DEFAULT_BUDGET,
    primes: Sequence[int] | None = DEFAULT_PRIMES,
) -> CCProfile:
    """Distinct counts for every split of f^n, the worst splits, and a rank bound.

    The rank bound is taken over the splits in s_n; pass ``primes=None`` to
    skip it.
    """
    if n < 1:
        raise InvalidInput(f"iteration count must be >= 1, got {n}")
    s, length = rule.states, rule.window(n)
    if s**length > budget:
        raise BudgetExceeded(f"profile of f^{n} ({s}^{length} entries)", s**length, budget)
    table = truth_table(rule, n, budget)
    rows, _ = refine_row_classes(table, s, length)
    cols, _ = refine_col_classes(table, s, length)
    profile = CCProfile(
        format_rule(rule), n, [SplitRecord(i, rows[i], cols[i]) for i in range(length + 1)]
    )
    if primes:
        best: dict[int, int] = {}
        for sub in _worst_submatrices(table, s, length, profile.s_n):
            for p, r in ranks_mod_primes(sub, primes).items():
                best[p] = max(best.get(p, 0), r)
        profile.rank_by_prime = best
        profile.rank_lb = max(best.values())
    return profile


def _worst_submatrices(table, s, length, splits):
    _, row_ids = refine_row_classes(table, s, length, keep=splits)
    _, col_ids = refine_col_classes(table, s, length, keep=splits)
    for i in splits:
        r = _first_occurrence(row_ids[i], int(row_ids[i].max()) + 1)
        c = _first_occurrence(col_ids[i], int(col_ids[i].max()) + 1)
        yield table.reshape(s**i, s ** (length - i))[np.ix_(r, c)]


# -- partition number ---------------------------------------------------------

PARTITION_CAP = 64


def partition_number_exact(matrix) -> int:
    """Fewest monochromatic rectangles partitioning the matrix (tiny inputs only).

    Duplicate rows and columns are merged first; this leaves the partition
    number unchanged.
    """
    values = matrix.dense() if isinstance(matrix, IterationMatrix) else np.asarray(matrix)
    if values.ndim != 2:
        raise InvalidInput("matrix must be two-dimensional")
    if values.size > PARTITION_CAP:
        raise Unsupported(f"partition search is capped at {PARTITION_CAP} entries, got {values.size}")
    if values.size == 0:
        return 0
    values = np.unique(values, axis=0)
    values = np.unique(values, axis=1)
    if values.shape[0] > values.shape[1]:
        values = values.T
    n_rows, n_cols = values.shape

    def bit(r, c):
        return 1 << (r * n_cols + c)

    rects_by_cell: dict[int, list[int]] = {}
    for row_set in range(1, 1 << n_rows):
        rs = [r for r in range(n_rows) if row_set >> r & 1]
        block = values[rs]
        for v in np.unique(block[0]):
            ok = [c for c in range(n_cols) if np.all(block[:, c] == v)]
            for sub in range(1, 1 << len(ok)):
                cs = [ok[j] for j in range(len(ok)) if sub >> j & 1]
                mask = 0
                for r in rs:
                    for c in cs:
                        mask |= bit(r, c)
                low = (mask & -mask).bit_length() - 1
                rects_by_cell.setdefault(low, []).append(mask)
    for masks in rects_by_cell.values():
        masks.sort(key=lambda m: -bin(m).count("1"))

    full = (1 << (n_rows * n_cols)) - 1
    best = n_rows * n_cols
    memo: dict[int, int] = {}

    def search(covered: int, used: int) -> None:
        nonlocal best
        if covered == full:
            best = min(best, used)
            return
        if used + 1 >= best or memo.get(covered, best + 1) <= used:
            return
        memo[covered] = used
        free = full & ~covered
        cell = (free & -free).bit_length() - 1
        # the lowest free cell is the lowest cell of whichever rectangle covers it
        for mask in rects_by_cell.get(cell, ()):
            if mask & covered == 0:
                search(covered | mask, used + 1)

    search(0, 0)
    return best


# -- fooling sets ---------------------------------------------------------------


@dataclass(frozen=True)
class FoolingSet:
    pairs: tuple[tuple[Word, Word], ...]
    value: int

    def __len__(self) -> int:
        return len(self.pairs)


@dataclass(frozen=True)
class FoolingVerdict:
    holds: bool
    size: int
    violation: str | None = None

    @property
    def cc_lower_bound(self) -> int:
        return cc1_from_d(self.size) if self.holds else 0


def verify_fooling_set(rule: RuleTable, split: SplitSpec, fs: FoolingSet) -> FoolingVerdict:
    """Check the diagonal value and that every cross pair breaks it somewhere."""
    split.check(rule)
    bob = split.bob_cells(rule)
    for k, (x, y) in enumerate(fs.pairs):
        if len(x) != split.i or len(y) != bob:
            raise InvalidInput(
                f"pair {k} has lengths ({len(x)}, {len(y)}), split needs ({split.i}, {bob})"
            )
    n = split.n

    def f(x, y):
        return iterate(rule, n, tuple(x) + tuple(y))

    for k, (x, y) in enumerate(fs.pairs):
        got = f(x, y)
        if got != fs.value:
            return FoolingVerdict(
                False, len(fs), f"pair {k} ({word_str(x)}, {word_str(y)}) gives {got}, not {fs.value}"
            )
    for k, (xk, yk) in enumerate(fs.pairs):
        for j in range(k + 1, len(fs.pairs)):
            xj, yj = fs.pairs[j]
            if f(xk, yj) == fs.value and f(xj, yk) == fs.value:
                return FoolingVerdict(False, len(fs), f"pairs {k} and {j} share a monochromatic rectangle")
    return FoolingVerdict(True, len(fs))


# -- portable bitmap / graymap --------------------------------------------------


def export_matrix_image(matrix: IterationMatrix) -> bytes:
    """P1 bitmap for binary matrices, P2 graymap otherwise; one text row per matrix row."""
    if matrix.states > 256:
        raise Unsupported("graymap export supports at most 256 states")
    values = matrix.dense()
    if matrix.states == 2:
        header = f"P1\n{matrix.n_cols} {matrix.n_rows}\n".encode()
        if matrix.n_cols == 0:
            return header + b"\n" * matrix.n_rows
        text = np.full((matrix.n_rows, 2 * matrix.n_cols), ord(" "), dtype=np.uint8)
        text[:, 0::2] = values + ord("0")
        text[:, -1] = ord("\n")
        return header + text.tobytes()
    header = f"P2\n{matrix.n_cols} {matrix.n_rows}\n{matrix.states - 1}\n"
    body = "".join(" ".join(str(int(v)) for v in row) + "\n" for row in values)
    return (header + body).encode()


def parse_matrix_image(data: bytes) -> np.ndarray:
    """Read back a plain P1/P2 image as a uint8 array."""
    tokens = []
    for line in data.decode("ascii").splitlines():
        tokens.extend(line.split("#", 1)[0].split())
    if not tokens or tokens[0] not in ("P1", "P2"):
        raise InvalidInput("not a plain PBM/PGM image")
    cols, rows = int(tokens[1]), int(tokens[2])
    start = 3 if tokens[0] == "P1" else 4
    body = tokens[start:]
    if tokens[0] == "P1" and len(body) != rows * cols:
        # plain PBM may also pack digits without separators
        body = list("".join(body))
    if len(body) != rows * cols:
        raise InvalidInput(f"expected {rows * cols} samples, found {len(body)}")
    return np.array([int(t) for t in body], dtype=np.uint8).reshape(rows, cols)
