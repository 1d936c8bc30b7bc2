"""The tree function separating one-round from multi-round cost.

Nodes of the complete binary tree of height h are numbered in heap order
(root 0, children of k at 2k+1 and 2k+2); the root is level 1 and the leaves
are level h+1. Alice owns the odd levels, Bob the even ones. The path turns
left on label 0 and right on label 1; the value is the label of the leaf it
reaches.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import InvalidInput, Unsupported
from .matrix import IterationMatrix

TREE_MATRIX_MAX_HEIGHT = 4
# exhaustive transcript checks enumerate 2^(2^(h+1)-1) labelings
TREE_VERIFY_MAX_HEIGHT = 3


def node_level(k: int) -> int:
    return (k + 1).bit_length()


def owner_nodes(h: int, alice: bool) -> list[int]:
    """Heap indices owned by one party, in increasing order."""
    return [k for k in range(2 ** (h + 1) - 1) if (node_level(k) % 2 == 1) == alice]


@dataclass(frozen=True)
class TreeInstance:
    h: int
    labels: tuple[int, ...]

    def __post_init__(self):
        if self.h < 1:
            raise InvalidInput(f"height must be >= 1, got {self.h}")
        object.__setattr__(self, "labels", tuple(int(v) for v in self.labels))
        if len(self.labels) != 2 ** (self.h + 1) - 1:
            raise InvalidInput(f"height {self.h} needs {2 ** (self.h + 1) - 1} labels, got {len(self.labels)}")
        if any(v not in (0, 1) for v in self.labels):
            raise InvalidInput("labels must be bits")

    @classmethod
    def from_parts(cls, h: int, alice_bits: Sequence[int], bob_bits: Sequence[int]) -> TreeInstance:
        labels = [0] * (2 ** (h + 1) - 1)
        a_nodes, b_nodes = owner_nodes(h, True), owner_nodes(h, False)
        if len(alice_bits) != len(a_nodes) or len(bob_bits) != len(b_nodes):
            raise InvalidInput(f"height {h} needs {len(a_nodes)} Alice and {len(b_nodes)} Bob labels")
        for k, v in zip(a_nodes, alice_bits):
            labels[k] = v
        for k, v in zip(b_nodes, bob_bits):
            labels[k] = v
        return cls(h, tuple(labels))


def tree_value(inst: TreeInstance) -> int:
    k = 0
    for _ in range(inst.h):
        k = 2 * k + 1 + inst.labels[k]
    return inst.labels[k]


@dataclass(frozen=True)
class Transcript:
    speakers: tuple[str, ...]
    bits: tuple[int, ...]
    value: int

    def __len__(self) -> int:
        return len(self.bits)


def tree_multiround_cost(inst: TreeInstance) -> Transcript:
    """The owner of the current node announces its label, one bit per level."""
    k, speakers, bits = 0, [], []
    for level in range(1, inst.h + 1):
        speakers.append("alice" if level % 2 else "bob")
        bits.append(inst.labels[k])
        k = 2 * k + 1 + inst.labels[k]
    # the leaf owner now knows the whole path and reads off its label
    return Transcript(tuple(speakers), tuple(bits), inst.labels[k])


def _bits_of(count: int, width: int) -> np.ndarray:
    """All `width`-bit words, one per row, first bit most significant."""
    idx = np.arange(count, dtype=np.int64)
    return ((idx[:, None] >> np.arange(width - 1, -1, -1)) & 1).astype(bool)


def tree_matrix(h: int, chunk_rows: int = 1 << 15) -> IterationMatrix:
    """Rows: Alice's labelings; columns: Bob's; entry: tree_value.

    Labelings are read in heap order of the owner's nodes, first node most
    significant. Columns are packed into 64-bit words and every node value
    is evaluated bottom-up for a block of rows at once.
    """
    if not 1 <= h <= TREE_MATRIX_MAX_HEIGHT:
        raise Unsupported(f"tree_matrix supports 1 <= h <= {TREE_MATRIX_MAX_HEIGHT}, got {h}")
    a_nodes, b_nodes = owner_nodes(h, True), owner_nodes(h, False)
    n_rows, n_cols = 2 ** len(a_nodes), 2 ** len(b_nodes)
    a_pos = {k: j for j, k in enumerate(a_nodes)}
    words = -(-n_cols // 64)
    cols = _bits_of(n_cols, len(b_nodes))
    padded = np.zeros((words * 64, len(b_nodes)), dtype=bool)
    padded[:n_cols] = cols
    weights = np.uint64(1) << np.arange(63, -1, -1, dtype=np.uint64)
    # bob_mask[j]: packed column bits where Bob's node j has label 1
    bob_mask = (padded.T.reshape(len(b_nodes), words, 64) * weights).sum(axis=2, dtype=np.uint64)
    b_pos = {k: j for j, k in enumerate(b_nodes)}
    full = np.uint64(0xFFFF_FFFF_FFFF_FFFF)
    if n_cols % 64:
        tail = np.uint64(((1 << (n_cols % 64)) - 1) << (64 - n_cols % 64))
    else:
        tail = full
    valid = np.full(words, full, dtype=np.uint64)
    valid[-1] = tail

    out = np.empty((n_rows, words), dtype=np.uint64)
    n_nodes = 2 ** (h + 1) - 1
    first_leaf = 2**h - 1
    for start in range(0, n_rows, chunk_rows):
        idx = np.arange(start, min(start + chunk_rows, n_rows), dtype=np.int64)
        rows = ((idx[:, None] >> np.arange(len(a_nodes) - 1, -1, -1)) & 1).astype(bool)
        count = rows.shape[0]
        val: dict[int, np.ndarray] = {}
        for k in range(n_nodes - 1, -1, -1):
            if k >= first_leaf:
                if k in a_pos:
                    val[k] = np.where(rows[:, a_pos[k], None], valid, np.uint64(0))
                else:
                    val[k] = np.broadcast_to(bob_mask[b_pos[k]], (count, words))
                continue
            left, right = val.pop(2 * k + 1), val.pop(2 * k + 2)
            if k in a_pos:
                val[k] = np.where(rows[:, a_pos[k], None], right, left)
            else:
                m = bob_mask[b_pos[k]]
                val[k] = (right & m) | (left & ~m & valid)
        out[start:start + count] = val[0]
    data = out.astype(">u8").view(np.uint8)[:, : -(-n_cols // 8)]
    return IterationMatrix(n_rows, n_cols, 2, np.ascontiguousarray(data))
