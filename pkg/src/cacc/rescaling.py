"""Rescaling (packing, iterating, shifting), sub-automata and simulation.

Shift convention: sigma_z(c)(k) = c(k + z), so z > 0 moves the picture left.
A block of m cells is encoded as its base-s word index, leftmost cell most
significant; then the index of a neighborhood of blocks equals the index of
the unpacked cell word, which keeps the rescaled table a plain reshape.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .config import DEFAULT_BUDGET
from .errors import BudgetExceeded, InvalidInput, Unsupported
from .matrix import cc1_profile
from .rules import RuleTable, Word, as_word, step_word, truth_table

MAX_SEARCH_STATES = 8


@dataclass(frozen=True)
class RescalingParams:
    m: int = 1
    t: int = 1
    z: int = 0

    def __post_init__(self):
        if self.m < 1 or self.t < 1:
            raise InvalidInput(f"need m >= 1 and t >= 1, got m={self.m}, t={self.t}")

    def radius(self, rule: RuleTable) -> int:
        """Block radius covering the shifted dependency cone."""
        return -(-(rule.radius * self.t + abs(self.z)) // self.m)


def pack(w: Sequence[int], m: int, states: int) -> Word:
    """b_m on a finite word: consecutive m-cell blocks, each as one state."""
    w = as_word(w)
    if m < 1 or len(w) % m:
        raise InvalidInput(f"word length {len(w)} is not a multiple of m={m}")
    out = []
    for k in range(0, len(w), m):
        v = 0
        for c in w[k:k + m]:
            v = v * states + c
        out.append(v)
    return tuple(out)


def unpack(blocks: Sequence[int], m: int, states: int) -> Word:
    out = []
    for b in as_word(blocks):
        if not 0 <= b < states**m:
            raise InvalidInput(f"block state {b} is outside 0..{states**m - 1}")
        cells = []
        for _ in range(m):
            b, c = divmod(b, states)
            cells.append(c)
        out.extend(reversed(cells))
    return tuple(out)


def rescale(rule: RuleTable, p: RescalingParams, budget: int = DEFAULT_BUDGET) -> RuleTable:
    """Local rule of b_m o sigma_z o G^t o b_m^-1 with radius `p.radius(rule)`.

    Output cell j of the block at 0 is cell j + z of G^t(c), which reads cells
    j + z - rt .. j + z + rt; inside the (2R+1)m cell window starting at -Rm
    that sub-window starts at offset Rm + j + z - rt.
    """
    s, r, m, t = rule.states, rule.radius, p.m, p.t
    big_r = p.radius(rule)
    length = m * (2 * big_r + 1)
    block_states = s**m
    if block_states > 256:
        raise Unsupported(f"{block_states} block states exceeds the 256-state limit")
    size = s**length
    if size > budget:
        raise BudgetExceeded(f"rescaled table ({block_states}^{2 * big_r + 1} entries)", size, budget)
    cone = 2 * r * t + 1
    inner = truth_table(rule, t, budget)
    idx = np.arange(size, dtype=np.int64)
    out = np.zeros(size, dtype=np.int64)
    for j in range(m):
        start = big_r * m + j + p.z - r * t
        sub = (idx // s ** (length - start - cone)) % s**cone
        out = out * s + inner[sub]
    return RuleTable(block_states, big_r, tuple(out.tolist()))


def rescaled_window_oracle(rule: RuleTable, p: RescalingParams, w: Sequence[int]) -> Word:
    """Direct unpack, iterate, shift, pack on a finite word of whole blocks.

    Returns the blocks the rescaled rule can determine, i.e. what one step of
    `rescale(rule, p)` yields on `pack(w)`. Independent of `rescale`.
    """
    w = as_word(w)
    s, m, rt = rule.states, p.m, rule.radius * p.t
    big_r = p.radius(rule)
    blocks = len(w) // m
    if len(w) % m or blocks < 2 * big_r + 1:
        raise InvalidInput("word must hold at least 2R+1 whole blocks")
    g = w
    for _ in range(p.t):
        g = step_word(rule, g)
    # g[q] is cell q + rt of w
    cells = [g[(big_r + b) * m + j + p.z - rt] for b in range(blocks - 2 * big_r) for j in range(m)]
    return pack(cells, m, s)


@dataclass(frozen=True)
class InjectionWitness:
    mapping: tuple[int, ...]  # mapping[a] = image of state a

    def __post_init__(self):
        if len(set(self.mapping)) != len(self.mapping):
            raise InvalidInput(f"state map {self.mapping} is not injective")

    def to_dict(self) -> dict:
        return {"map": {str(a): b for a, b in enumerate(self.mapping)}}


def _neighborhoods(states: int, width: int) -> np.ndarray:
    idx = np.arange(states**width, dtype=np.int64)
    powers = states ** np.arange(width - 1, -1, -1, dtype=np.int64)
    return (idx[:, None] // powers[None, :]) % states


def commutes(a: RuleTable, b: RuleTable, mapping: Sequence[int]) -> bool:
    """f_B(iota(u)) = iota(f_A(u)) on every neighborhood u of A."""
    if a.radius != b.radius:
        raise InvalidInput(f"radii differ ({a.radius} vs {b.radius})")
    iota = np.asarray(mapping, dtype=np.int64)
    hoods = _neighborhoods(a.states, a.width)
    powers = b.states ** np.arange(a.width - 1, -1, -1, dtype=np.int64)
    image_idx = iota[hoods] @ powers
    return bool(np.array_equal(b.lut[image_idx], iota[a.lut]))


def find_subautomaton(a: RuleTable, b: RuleTable) -> InjectionWitness | None:
    """Lexicographically smallest injection iota with iota o G_A = G_B o iota."""
    if a.radius != b.radius:
        raise InvalidInput(f"radii differ ({a.radius} vs {b.radius}); rescale first")
    if b.states > MAX_SEARCH_STATES:
        raise Unsupported(f"injection search is capped at {MAX_SEARCH_STATES} target states, got {b.states}")
    if a.states > b.states:
        return None
    for mapping in itertools.permutations(range(b.states), a.states):
        if commutes(a, b, mapping):
            witness = InjectionWitness(tuple(mapping))
            assert commutes(a, b, witness.mapping)
            return witness
    return None


def check_simulation(
    a: RuleTable,
    b: RuleTable,
    p1: RescalingParams,
    p2: RescalingParams,
    budget: int = DEFAULT_BUDGET,
) -> InjectionWitness | None:
    """Witness that <A>_p1 is a sub-automaton of <B>_p2, if one exists."""
    ra, rb = rescale(a, p1, budget), rescale(b, p2, budget)
    if ra.radius != rb.radius:
        raise InvalidInput(f"rescaled radii differ ({ra.radius} vs {rb.radius})")
    return find_subautomaton(ra, rb)


def compare_cc_sequences(
    phi1: Sequence[int],
    phi2: Sequence[int],
    alpha: int,
    beta: float,
    gamma: int,
    n_max: int | None = None,
) -> bool:
    """phi1(alpha n) <= beta phi2(gamma n) for n = 1..n_max.

    phi[k] is the value at n = k + 1. Checks the given constants only.
    """
    if alpha < 1 or gamma < 1 or beta < 1:
        raise InvalidInput("alpha, beta, gamma must all be >= 1")
    if int(alpha) != alpha or int(gamma) != gamma:
        raise InvalidInput("alpha and gamma must be integers")
    alpha, gamma = int(alpha), int(gamma)
    limit = min(len(phi1) // alpha, len(phi2) // gamma)
    if n_max is None:
        n_max = limit
    if n_max < 1:
        raise InvalidInput("no sample n with alpha*n and gamma*n inside both sequences")
    if n_max > limit:
        raise InvalidInput(
            f"n_max={n_max} needs phi1 up to {alpha * n_max} and phi2 up to {gamma * n_max}, "
            f"have {len(phi1)} and {len(phi2)}"
        )
    return all(phi1[alpha * n - 1] <= beta * phi2[gamma * n - 1] for n in range(1, n_max + 1))


# -- packing and distinct counts -------------------------------------------------


@dataclass(frozen=True)
class PackedSplit:
    i: int
    d_packed: int
    rows: int
    cols: int
    component_splits: tuple[int, ...]
    d_components: tuple[int, ...]
    row_product: int
    col_product: int

    def to_dict(self) -> dict:
        return {"i": self.i, "d_packed": self.d_packed, "rows": self.rows, "cols": self.cols,
                "component_splits": list(self.component_splits),
                "d_components": list(self.d_components),
                "row_product": self.row_product, "col_product": self.col_product}


def packed_splits(rule: RuleTable, n: int, m: int, budget: int = DEFAULT_BUDGET) -> list[PackedSplit]:
    """Distinct counts of the n-th iterate of the m-packed rule, next to its components.

    Output cell j of the packed iterate is f^n on cells j - rn .. j + rn, and
    a block split at i hands Alice m*i - Rmn + rn - j of those cells. Each
    packed row is therefore fixed by the tuple of component rows, so
    rows <= row_product and cols <= col_product always hold.
    """
    p = RescalingParams(m, 1, 0)
    packed = rescale(rule, p, budget)
    big_r, r = packed.radius, rule.radius
    outer = cc1_profile(packed, n, budget, primes=None)
    inner = cc1_profile(rule, n, budget, primes=None).splits
    length = rule.window(n)
    out = []
    for rec in outer.splits:
        comps = tuple(min(max(m * rec.i - big_r * m * n + r * n - j, 0), length) for j in range(m))
        out.append(PackedSplit(
            rec.i, rec.d, rec.rows, rec.cols, comps,
            tuple(inner[a].d for a in comps),
            int(np.prod([inner[a].rows for a in comps])),
            int(np.prod([inner[a].cols for a in comps])),
        ))
    return out
