"""One-round protocols for iterated rules and an exhaustive checker.

A one-round protocol has a sender, who maps their part of the window to a
fixed-length bit string, and a receiver, who outputs the state from their
own part and the message. `verify_one_round` compares the protocol with the
truth table of f^n on every input of a split.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .config import DEFAULT_BUDGET
from .errors import BudgetExceeded, InvalidInput
from .matrix import FoolingSet, SplitSpec
from .rules import (
    RuleTable,
    Word,
    all_words,
    detect_linearity,
    format_rule,
    iterate,
    make_eca,
    make_rule,
    truth_table,
    word_str,
)

ALICE_TO_BOB = "alice_to_bob"
BOB_TO_ALICE = "bob_to_alice"

RULE_178 = make_eca(178)
RULE_218 = make_eca(218)


def bits(value: int, width: int) -> str:
    if value < 0 or value >> width:
        raise InvalidInput(f"{value} does not fit in {width} bits")
    return format(value, f"0{width}b") if width else ""


def bit_width(count: int) -> int:
    """Bits needed to write any of `count` distinct values."""
    return (count - 1).bit_length()


@dataclass(frozen=True)
class OneRoundProtocol:
    name: str
    direction: str
    cost: int
    encode: Callable[[Word], str] = field(repr=False)
    decode: Callable[[Word, str], int] = field(repr=False)
    split: SplitSpec | None = None

    def __post_init__(self):
        if self.direction not in (ALICE_TO_BOB, BOB_TO_ALICE):
            raise InvalidInput(f"unknown direction {self.direction!r}")

    def message(self, sender: Word) -> str:
        msg = self.encode(tuple(sender))
        if len(msg) != self.cost or set(msg) - {"0", "1"}:
            raise InvalidInput(f"{self.name}: message {msg!r} is not a {self.cost}-bit string")
        return msg

    def run(self, x: Sequence[int], y: Sequence[int]) -> int:
        """Value computed on Alice's word x and Bob's word y."""
        x, y = tuple(x), tuple(y)
        if self.direction == ALICE_TO_BOB:
            return self.decode(y, self.message(x))
        return self.decode(x, self.message(y))


@dataclass(frozen=True)
class Counterexample:
    x: Word
    y: Word
    expected: int
    got: int

    def to_dict(self) -> dict:
        return {"x": word_str(self.x), "y": word_str(self.y), "expected": self.expected, "got": self.got}


@dataclass
class VerificationReport:
    rule: str
    n: int
    protocol: str
    domain_size: int
    counterexamples: list[Counterexample]
    cost: int
    distinct_messages: int

    @property
    def ok(self) -> bool:
        return not self.counterexamples

    def to_dict(self, limit: int = 32) -> dict:
        return {
            "rule": self.rule,
            "n": self.n,
            "protocol": self.protocol,
            "cost": self.cost,
            "distinct_messages": self.distinct_messages,
            "domain_size": self.domain_size,
            "counterexample_count": len(self.counterexamples),
            "first_counterexamples": [c.to_dict() for c in self.counterexamples[:limit]],
        }


def verify_one_round(
    p: OneRoundProtocol,
    rule: RuleTable,
    split: SplitSpec,
    center_constraint: int | None = None,
    budget: int = DEFAULT_BUDGET,
) -> VerificationReport:
    """Every (x, y) on which the protocol disagrees with f^n, sorted by (x, y).

    The receiver's decode is a pure function of its word and the message, so
    it is evaluated once per (receiver word, distinct message) and then
    compared against the oracle on all pairs.
    """
    split.check(rule)
    s, length = rule.states, rule.window(split.n)
    if s**length > budget:
        raise BudgetExceeded(f"verification domain {s}^{length}", s**length, budget)
    oracle = truth_table(rule, split.n, budget).reshape(s**split.i, s ** (length - split.i))
    x_words = all_words(split.i, s)
    y_words = all_words(length - split.i, s)
    x_idx = np.arange(len(x_words))
    y_idx = np.arange(len(y_words))
    if center_constraint is not None:
        c = rule.radius * split.n
        if c < split.i:
            x_idx = x_idx[x_words[:, c] == center_constraint]
        else:
            y_idx = y_idx[y_words[:, c - split.i] == center_constraint]
    oracle = oracle[np.ix_(x_idx, y_idx)]

    if p.direction == ALICE_TO_BOB:
        senders, receivers = x_words[x_idx], y_words[y_idx]
    else:
        senders, receivers = y_words[y_idx], x_words[x_idx]
    msg_ids: dict[str, int] = {}
    sender_msg = np.array(
        [msg_ids.setdefault(p.message(tuple(int(v) for v in w)), len(msg_ids)) for w in senders],
        dtype=np.int64,
    )
    messages = sorted(msg_ids, key=msg_ids.get)
    answers = np.empty((len(receivers), len(messages)), dtype=np.int64)
    for r, w in enumerate(receivers):
        word = tuple(int(v) for v in w)
        for m, msg in enumerate(messages):
            answers[r, m] = p.decode(word, msg)
    predicted = answers[:, sender_msg]
    if p.direction == ALICE_TO_BOB:
        predicted = predicted.T
    bad_r, bad_c = np.nonzero(predicted != oracle)
    found = [
        Counterexample(
            tuple(int(v) for v in x_words[x_idx[a]]),
            tuple(int(v) for v in y_words[y_idx[b]]),
            int(oracle[a, b]),
            int(predicted[a, b]),
        )
        for a, b in zip(bad_r, bad_c)
    ]
    return VerificationReport(
        format_rule(rule), split.n, p.name, int(oracle.size), found, p.cost, len(messages)
    )


# -- rule 178 ----------------------------------------------------------------------


def rule178_message(y: Sequence[int]) -> tuple[int, int]:
    """(c, k): Bob's center value and the length of its run from the left of his part."""
    c = y[0]
    k = 0
    while k < len(y) and y[k] == c:
        k += 1
    return c, k


def rule178_protocol(n: int) -> OneRoundProtocol:
    """Bob tells Alice where the first 01 or 10 boundary of his part is."""
    if n < 1:
        raise InvalidInput("n must be >= 1")
    width = bit_width(n + 2)

    def encode(y: Word) -> str:
        c, k = rule178_message(y)
        return bits(c, 1) + bits(k, width)

    def decode(x: Word, msg: str) -> int:
        c, k = int(msg[0]), int(msg[1:], 2)
        guess = [c] * k
        if k <= n:
            guess.append(1 - c)
        guess += [0] * (n + 1 - len(guess))
        return iterate(RULE_178, n, x + tuple(guess))

    return OneRoundProtocol("rule178", BOB_TO_ALICE, 1 + width, encode, decode, SplitSpec(n, n))


def rule178_fooling_set(n: int) -> FoolingSet:
    """Pairs (0^(n-2k-1) 1 0^(2k), c^(2k) c' c^(n-2k)) for 0 <= 2k <= n-1, c in {0, 1}."""
    if n < 1:
        raise InvalidInput("n must be >= 1")
    pairs = []
    for k in range(0, (n - 1) // 2 + 1):
        x = (0,) * (n - 2 * k - 1) + (1,) + (0,) * (2 * k)
        for c in (0, 1):
            y = (c,) * (2 * k) + (1 - c,) + (c,) * (n - 2 * k)
            pairs.append((x, y))
    return FoolingSet(tuple(pairs), n % 2)


def rule178_fooling_subset(n: int) -> FoolingSet:
    """The c = 0 half of `rule178_fooling_set`, which is a fooling set.

    Its Alice words are pairwise distinct, f^n is (n+1) mod 2 on the diagonal,
    and for i < j exactly one of the two cross values differs from it.
    """
    full = rule178_fooling_set(n)
    pairs = tuple(p for p in full.pairs if p[1][-1] == 0)
    return FoolingSet(pairs, (n + 1) % 2)


def rule178_fooling_set_formula_size(n: int) -> int:
    """Size quoted alongside the set, 2 * floor(n / 2); differs from len() for odd n."""
    return 2 * (n // 2)


# -- rule 218 ----------------------------------------------------------------------


def additive(w: Sequence[int]) -> bool:
    """1s are isolated and consecutive 1s are separated by an odd number of 0s."""
    last = None
    for pos, v in enumerate(w):
        if v == 1:
            if last is not None and (pos - last - 1) % 2 == 0:
                return False
            last = pos
    return True


@dataclass(frozen=True)
class Rule218Params:
    alpha: int
    beta: int
    l: int
    r: int
    x_prime: Word
    y_prime: Word
    a: int


def _alice_218(x: Word) -> tuple[int, int, Word, int]:
    """alpha, l, x' and a from Alice's word (x_n ... x_1, x_1 next to the center)."""
    n = len(x)
    alpha = max(i for i in range(n + 1) if additive(x[n - i:] + (0,)))
    ones = [i for i in range(1, n + 1) if x[n - i] == 1]
    l = ones[0] if ones else 0
    x_prime = x[n - alpha:]
    a = iterate(RULE_218, alpha, x_prime + (0,) + (0,) * alpha) if alpha else 0
    return alpha, l, x_prime, a


def _bob_218(y: Word) -> tuple[int, int, Word]:
    """beta, r and y' from Bob's cells right of the center (y_1 ... y_n)."""
    n = len(y)
    beta = max(j for j in range(n + 1) if additive((0,) + y[:j]))
    ones = [j for j in range(1, n + 1) if y[j - 1] == 1]
    r = ones[0] if ones else 0
    return beta, r, y[:beta]


def rule218_params(x: Sequence[int], y: Sequence[int]) -> Rule218Params:
    x, y = tuple(x), tuple(y)
    if len(x) != len(y):
        raise InvalidInput(f"x and y must have equal length, got {len(x)} and {len(y)}")
    alpha, l, x_prime, a = _alice_218(x)
    beta, r, y_prime = _bob_218(y)
    return Rule218Params(alpha, beta, l, r, x_prime, y_prime, a)


def rule218_decide(n: int, alpha: int, l: int, a: int, y: Word) -> int:
    """Bob's output given Alice's (alpha, l, a) and his cells y_1 ... y_n."""
    f = RULE_218
    if l == 0:
        return iterate(f, n, (0,) * n + (0,) + y)
    beta, r, y_prime = _bob_218(y)
    if r == 0:
        return a if alpha == n else 1
    if abs(l + r - 1) % 2 == 1:
        if abs(alpha - beta) >= 1:
            return 1
        k = alpha
        return a ^ iterate(f, k, (0,) * k + (0,) + y_prime)
    if l >= r - 1:
        if l >= r + 3:
            return iterate(f, n, (1,) * (n - l + 1) + (0,) * (l - 1) + (0,) + y)
        return 1
    return a if r == alpha + 1 else 1


def rule218_protocol(n: int) -> OneRoundProtocol:
    """Alice sends alpha, l and a; valid when the center cell is 0."""
    if n < 1:
        raise InvalidInput("n must be >= 1")
    width = bit_width(n + 1)

    def encode(x: Word) -> str:
        alpha, l, _, a = _alice_218(x)
        return bits(alpha, width) + bits(l, width) + bits(a, 1)

    def decode(bob: Word, msg: str) -> int:
        alpha, l, a = int(msg[:width], 2), int(msg[width:2 * width], 2), int(msg[-1])
        return rule218_decide(n, alpha, l, a, bob[1:])

    return OneRoundProtocol("rule218", ALICE_TO_BOB, 2 * width + 1, encode, decode, SplitSpec(n, n))


def rule218_family(n: int) -> list[list[Word]]:
    """S_3, S_5, ...: sets of Alice words with pairwise distinct rows."""
    if n < 3:
        raise InvalidInput("n must be >= 3")
    family = []
    for k in range(1, (n - 1) // 2 + 1):
        head = (1,) * (n - 2 * k - 1)
        members = [head + (0,) * (2 * k + 1)]
        for a in range(1, 2 * k, 2):
            b = 2 * k - a
            if b >= 3 and b % 2 == 1:
                members.append(head + (0,) * a + (1,) + (0,) * b)
        family.append(members)
    return family


@dataclass
class LowerBoundFamily:
    n: int
    sets: list[list[Word]]
    distinct: bool
    clash: tuple[Word, Word] | None = None

    @property
    def total(self) -> int:
        return sum(len(s) for s in self.sets)


def rule218_lower_bound_family(n: int, budget: int = DEFAULT_BUDGET) -> LowerBoundFamily:
    """Check that all rows of the center-0 matrix indexed by the family differ."""
    sets = rule218_family(n)
    size = 2 ** (2 * n + 1)
    if size > budget:
        raise BudgetExceeded(f"rule 218 matrix for n={n}", size, budget)
    table = truth_table(RULE_218, n, budget).reshape(2**n, 2, 2**n)[:, 0, :]
    words = [w for s in sets for w in s]
    seen: dict[bytes, Word] = {}
    for w in words:
        idx = int("".join(map(str, w)), 2)
        key = table[idx].tobytes()
        if key in seen:
            return LowerBoundFamily(n, sets, False, (seen[key], w))
        seen[key] = w
    return LowerBoundFamily(n, sets, True)


# -- linear rules --------------------------------------------------------------------


def linear_protocol(rule: RuleTable, n: int, i: int | None = None) -> OneRoundProtocol:
    """Alice sends the linear part of f^n on her cells with Bob's set to 0.

    Bob adds the linear part on his own cells and the value of f^n on the
    all-zero window, which carries the affine offset.
    """
    cert = detect_linearity(rule)
    if not cert.is_linear:
        raise InvalidInput(f"{format_rule(rule)} is not XOR-linear or affine")
    if i is None:
        i = rule.radius * n
    split = SplitSpec(n, i)
    split.check(rule)
    length = rule.window(n)
    linear_part = make_rule(2, rule.radius, [v ^ cert.offset for v in rule.table])
    trail = iterate(rule, n, (0,) * length)

    def encode(x: Word) -> str:
        return str(iterate(linear_part, n, x + (0,) * (length - i)))

    def decode(y: Word, msg: str) -> int:
        return int(msg) ^ iterate(linear_part, n, (0,) * i + y) ^ trail

    return OneRoundProtocol(f"linear({format_rule(rule)})", ALICE_TO_BOB, 1, encode, decode, split)
