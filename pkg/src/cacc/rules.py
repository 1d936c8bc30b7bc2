"""Local rules of one-dimensional cellular automata and their iterates.

A rule with state count ``s`` and radius ``r`` is stored as a lookup table of
length ``s**(2r+1)``, indexed by the neighborhood read as a base-``s`` number
with the leftmost cell most significant. For elementary automata this is
exactly the Wolfram numbering: entry ``4a + 2b + c`` is bit ``4a + 2b + c`` of
the code.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

from .errors import BudgetExceeded, InvalidInput, Unsupported

Word = tuple[int, ...]

SYMMETRIES = ("reflex", "conjugate", "reflex_conjugate")


def as_word(w: str | Iterable[int]) -> Word:
    """Accept ``"0110"`` or any iterable of ints."""
    if isinstance(w, str):
        return tuple(int(ch, 36) for ch in w)
    return tuple(int(v) for v in w)


def word_str(w: Sequence[int]) -> str:
    return "".join(np.base_repr(v, 36).lower() for v in w)


def word_index(w: Sequence[int], states: int) -> int:
    idx = 0
    for v in w:
        idx = idx * states + int(v)
    return idx


def index_word(idx: int, length: int, states: int) -> Word:
    out = [0] * length
    for j in range(length - 1, -1, -1):
        idx, out[j] = divmod(idx, states)
    return tuple(out)


def all_words(length: int, states: int) -> np.ndarray:
    """Every word of `length`, one per row, in lexicographic index order."""
    idx = np.arange(states**length, dtype=np.int64)
    powers = states ** np.arange(length - 1, -1, -1, dtype=np.int64)
    return ((idx[:, None] // powers[None, :]) % states).astype(np.uint8)


def _uint_dtype(limit: int):
    for dt in (np.uint8, np.uint16, np.uint32, np.uint64):
        if limit <= np.iinfo(dt).max + 1:
            return dt
    raise Unsupported(f"index range {limit} does not fit in 64 bits")


@dataclass(frozen=True)
class RuleTable:
    states: int
    radius: int
    table: tuple[int, ...]

    def __post_init__(self):
        if self.states < 2:
            raise InvalidInput(f"need at least 2 states, got {self.states}")
        if self.radius < 0:
            raise InvalidInput(f"radius must be >= 0, got {self.radius}")
        if self.states > 256:
            raise Unsupported("more than 256 states")
        object.__setattr__(self, "table", tuple(int(v) for v in self.table))
        expected = self.states ** (2 * self.radius + 1)
        if len(self.table) != expected:
            raise InvalidInput(
                f"table has {len(self.table)} entries, expected {expected} "
                f"(= {self.states}^{2 * self.radius + 1})"
            )
        for k, v in enumerate(self.table):
            if not 0 <= v < self.states:
                raise InvalidInput(f"table entry {k} is {v}, not a state in 0..{self.states - 1}")

    @property
    def width(self) -> int:
        return 2 * self.radius + 1

    @cached_property
    def lut(self) -> np.ndarray:
        return np.asarray(self.table, dtype=np.uint8)

    def window(self, n: int) -> int:
        """Number of cells that f^n reads."""
        return 2 * self.radius * n + 1

    def __call__(self, *cells: int) -> int:
        return self.table[word_index(cells, self.states)]

    def __str__(self) -> str:
        return format_rule(self)


def make_rule(states: int, radius: int, table: Iterable[int]) -> RuleTable:
    return RuleTable(states, radius, tuple(table))


def make_eca(code: int) -> RuleTable:
    """Elementary rule from its Wolfram code."""
    if not isinstance(code, (int, np.integer)) or not 0 <= code <= 255:
        raise InvalidInput(f"Wolfram code must be in 0..255, got {code!r}")
    return RuleTable(2, 1, tuple((int(code) >> k) & 1 for k in range(8)))


def eca_code(rule: RuleTable) -> int | None:
    """Wolfram code of `rule`, or None when it is not elementary."""
    if rule.states != 2 or rule.radius != 1:
        return None
    return sum(v << k for k, v in enumerate(rule.table))


def _check_word(rule: RuleTable, w: Sequence[int]) -> Word:
    w = as_word(w)
    for k, v in enumerate(w):
        if not 0 <= v < rule.states:
            raise InvalidInput(f"symbol {v} at position {k} is not a state of the rule")
    return w


def step_word(rule: RuleTable, w: Sequence[int]) -> Word:
    """One synchronous update of a finite word; the result is 2r cells shorter."""
    w = _check_word(rule, w)
    k = rule.width
    if len(w) < k:
        raise InvalidInput(f"word of length {len(w)} is shorter than the neighborhood ({k})")
    return _step(rule.table, rule.states, k, w)


def _step(table, s: int, k: int, w: Word) -> Word:
    span = s**k
    idx = word_index(w[:k - 1], s)
    out = []
    for v in w[k - 1:]:
        idx = (idx * s + v) % span
        out.append(table[idx])
    return tuple(out)


def iterate(rule: RuleTable, n: int, w: Sequence[int]) -> int:
    """f^n(w): the center cell after n steps, for a window of 2rn+1 cells."""
    if n < 0:
        raise InvalidInput("n must be >= 0")
    w = _check_word(rule, w)
    if len(w) != rule.window(n):
        raise InvalidInput(f"f^{n} reads {rule.window(n)} cells, got {len(w)}")
    for _ in range(n):
        w = _step(rule.table, rule.states, rule.width, w)
    return w[0]


def truth_table(rule: RuleTable, n: int, budget: int | None = None) -> np.ndarray:
    """Values of f^n on every window, indexed like `word_index`.

    Uses f^n(w) = f(f^(n-1)(w[0:]), ..., f^(n-1)(w[2r:])). Over the full
    index range the sub-window lookups are plain repeat/tile patterns of the
    previous table, so no gather is needed.
    """
    if n < 0:
        raise InvalidInput("n must be >= 0")
    s, r = rule.states, rule.radius
    size = s ** rule.window(n)
    if budget is not None and size > budget:
        raise BudgetExceeded(f"truth table of f^{n} ({s}^{rule.window(n)} entries)", size, budget)
    lut = rule.lut
    idx_dt = _uint_dtype(len(lut))
    table = np.arange(s, dtype=np.uint8)
    width = rule.width
    for _ in range(n):
        idx = None
        for j in range(width):
            part = np.tile(np.repeat(table, s ** (width - 1 - j)), s**j).astype(idx_dt)
            if idx is None:
                idx = part
            else:
                idx *= idx_dt(s)
                idx += part
            del part
        table = lut[idx]
        del idx
    return table


def _reflex_table(rule: RuleTable) -> list[int]:
    s, k = rule.states, rule.width
    return [rule.table[word_index(index_word(u, k, s)[::-1], s)] for u in range(len(rule.table))]


def _conjugate_table(rule: RuleTable) -> list[int]:
    top = len(rule.table) - 1
    return [1 - rule.table[top - u] for u in range(len(rule.table))]


def symmetry(rule: RuleTable, variant: str) -> RuleTable:
    """Reflex (mirror), conjugate (swap 0/1) or both."""
    if variant not in SYMMETRIES:
        raise InvalidInput(f"unknown symmetry {variant!r}; choose from {SYMMETRIES}")
    if variant != "reflex" and rule.states != 2:
        raise Unsupported("conjugation is only defined for two-state rules")
    if variant == "reflex":
        return RuleTable(rule.states, rule.radius, tuple(_reflex_table(rule)))
    if variant == "conjugate":
        return RuleTable(2, rule.radius, tuple(_conjugate_table(rule)))
    return symmetry(symmetry(rule, "reflex"), "conjugate")


def orbit(code: int) -> tuple[int, ...]:
    """Sorted distinct Wolfram codes equivalent to `code` under reflex/conjugation."""
    rule = make_eca(code)
    codes = {code} | {eca_code(symmetry(rule, v)) for v in SYMMETRIES}
    return tuple(sorted(codes))


def canonical_code(code: int) -> tuple[int, int]:
    """(smallest code in the symmetry orbit, orbit size)."""
    members = orbit(code)
    return members[0], len(members)


def canonical_codes() -> list[int]:
    return sorted({canonical_code(c)[0] for c in range(256)})


def dependent_cells(rule: RuleTable, n: int, budget: int | None = None) -> frozenset[int]:
    """Offsets k in -rn..rn such that changing cell k alone can change f^n.

    Exhaustive: every window is compared with every single-cell variation.
    """
    table = truth_table(rule, n, budget)
    s, length, rn = rule.states, rule.window(n), rule.radius * n
    out = set()
    for p in range(length):
        view = table.reshape(s**p, s, s ** (length - 1 - p))
        if np.any(view != view[:, :1, :]):
            out.add(p - rn)
    return frozenset(out)


@dataclass(frozen=True)
class LinearityCertificate:
    kind: str  # "xor-linear", "affine" or "none"
    offset: int = 0

    def __post_init__(self):
        if self.kind == "xor-linear" and self.offset != 0:
            raise InvalidInput("an xor-linear rule has offset 0")

    @property
    def is_linear(self) -> bool:
        return self.kind != "none"


def _is_xor_linear(values: np.ndarray) -> bool:
    u = np.arange(len(values))
    return bool(np.all(values[u[:, None] ^ u[None, :]] == (values[:, None] ^ values[None, :])))


def detect_linearity(rule: RuleTable) -> LinearityCertificate:
    """Linearity for XOR on two states, checked over all neighborhood pairs."""
    if rule.states != 2:
        raise Unsupported("linearity is only checked for XOR on two states")
    f = rule.lut
    if _is_xor_linear(f):
        return LinearityCertificate("xor-linear", 0)
    if f[0] == 1 and _is_xor_linear(f ^ 1):
        return LinearityCertificate("affine", 1)
    return LinearityCertificate("none", 0)


def format_rule(rule: RuleTable) -> str:
    """``eca:<code>`` for elementary rules, ``rule:<states>:<radius>:<hex>`` otherwise."""
    code = eca_code(rule)
    if code is not None:
        return f"eca:{code}"
    digits = len(f"{rule.states - 1:x}")
    body = "".join(f"{v:0{digits}x}" for v in rule.table)
    return f"rule:{rule.states}:{rule.radius}:{body}"


def parse_rule(text: str) -> RuleTable:
    """Inverse of `format_rule`. A bare integer is read as a Wolfram code."""
    text = text.strip()
    try:
        if text.isdigit():
            return make_eca(int(text))
        kind, _, rest = text.partition(":")
        if kind == "eca":
            return make_eca(int(rest))
        if kind == "rule":
            states_s, radius_s, body = rest.split(":")
            states, radius = int(states_s), int(radius_s)
            digits = len(f"{states - 1:x}")
            if len(body) % digits:
                raise InvalidInput(f"hex table length {len(body)} is not a multiple of {digits}")
            table = [int(body[k:k + digits], 16) for k in range(0, len(body), digits)]
            return make_rule(states, radius, table)
    except ValueError as exc:
        if isinstance(exc, InvalidInput):
            raise
        raise InvalidInput(f"malformed rule spec {text!r}: {exc}") from None
    raise InvalidInput(f"unknown rule spec {text!r}; use eca:<code> or rule:<states>:<radius>:<hex>")
