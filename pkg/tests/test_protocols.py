import itertools
import math

import pytest
from hypothesis import given, settings, strategies as st

from cacc.errors import InvalidInput
from cacc.matrix import SplitSpec, cc1_profile, verify_fooling_set
from cacc.protocols import (
    ALICE_TO_BOB,
    BOB_TO_ALICE,
    OneRoundProtocol,
    additive,
    bit_width,
    bits,
    linear_protocol,
    rule178_fooling_set,
    rule178_fooling_set_formula_size,
    rule178_fooling_subset,
    rule178_message,
    rule178_protocol,
    rule218_family,
    rule218_lower_bound_family,
    rule218_params,
    rule218_protocol,
    verify_one_round,
)
from cacc.rules import iterate, make_eca

R178, R218 = make_eca(178), make_eca(218)


def brute_counterexamples(p, rule, n, i, center=None):
    """Direct double loop over every (x, y), independent of the vectorised checker."""
    bad = []
    for x in itertools.product((0, 1), repeat=i):
        for y in itertools.product((0, 1), repeat=2 * n + 1 - i):
            w = x + y
            if center is not None and w[n] != center:
                continue
            if p.run(x, y) != iterate(rule, n, w):
                bad.append((x, y))
    return bad


def test_bits_helpers():
    assert bits(5, 4) == "0101" and bits(0, 0) == ""
    with pytest.raises(InvalidInput):
        bits(4, 2)
    assert [bit_width(c) for c in (1, 2, 3, 4, 5, 9)] == [0, 1, 2, 2, 3, 4]


def test_protocol_message_length_checked():
    p = OneRoundProtocol("bad", ALICE_TO_BOB, 2, lambda x: "1", lambda y, m: 0)
    with pytest.raises(InvalidInput):
        p.run((0,), (0,))
    with pytest.raises(InvalidInput):
        OneRoundProtocol("bad", "sideways", 1, lambda x: "1", lambda y, m: 0)


def test_rule178_message():
    assert rule178_message((1, 1, 0, 1)) == (1, 2)
    assert rule178_message((0, 0, 0)) == (0, 3)


@pytest.mark.parametrize("n", range(1, 9))
def test_rule178_protocol(n):
    p = rule178_protocol(n)
    rep = verify_one_round(p, R178, SplitSpec(n, n))
    assert rep.ok and rep.domain_size == 2 ** (2 * n + 1)
    assert p.cost <= math.ceil(math.log2(n + 2)) + 1
    assert rep.distinct_messages <= 2 ** p.cost


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_verifier_agrees_with_brute_force(n):
    assert brute_counterexamples(rule178_protocol(n), R178, n, n) == []
    # a protocol that ignores the message is wrong somewhere, in both harnesses
    lazy = OneRoundProtocol("lazy", BOB_TO_ALICE, 1, lambda y: "0", lambda x, m: iterate(R178, n, x + (0,) * (n + 1)))
    rep = verify_one_round(lazy, R178, SplitSpec(n, n))
    brute = brute_counterexamples(lazy, R178, n, n)
    assert [(c.x, c.y) for c in rep.counterexamples] == brute
    assert all(c.expected != c.got for c in rep.counterexamples)


def test_center_constraint_restricts_domain():
    rep = verify_one_round(rule178_protocol(3), R178, SplitSpec(3, 3), center_constraint=1)
    assert rep.domain_size == 2**6
    assert all(c.y[0] == 1 for c in rep.counterexamples)


@pytest.mark.parametrize("n", range(1, 13))
def test_rule178_fooling_subset_holds(n):
    fs = rule178_fooling_subset(n)
    split = SplitSpec(n, n)
    v = verify_fooling_set(R178, split, fs)
    assert v.holds, v.violation
    assert len(fs) == (n + 1) // 2


@pytest.mark.parametrize("n", range(2, 9))
def test_rule178_displayed_set_breaks(n):
    # each Alice word is paired with both values of c, so some cross pair stays on the diagonal value
    fs = rule178_fooling_set(n)
    assert not verify_fooling_set(R178, SplitSpec(n, n), fs).holds
    assert len(fs) == 2 * ((n - 1) // 2 + 1)
    assert rule178_fooling_set_formula_size(n) == 2 * (n // 2)


def test_rule178_fooling_set_n4_members():
    fs = rule178_fooling_set(4)
    assert ((0, 0, 0, 1), (0, 1, 1, 1, 1)) in fs.pairs
    assert len(fs) == 4


def test_additive():
    assert additive((1, 0, 1)) and additive((0, 0, 0))
    assert not additive((1, 1)) and not additive((1, 0, 0, 1))
    assert additive((1, 0, 0, 0, 1))


@settings(max_examples=200)
@given(st.integers(2, 8), st.data())
def test_rule218_params_invariants(n, data):
    x = tuple(data.draw(st.lists(st.integers(0, 1), min_size=n, max_size=n)))
    y = tuple(data.draw(st.lists(st.integers(0, 1), min_size=n, max_size=n)))
    p = rule218_params(x, y)
    assert 0 <= p.alpha <= n and 0 <= p.beta <= n
    assert additive(p.x_prime + (0,))
    assert additive((0,) + p.y_prime)
    assert len(p.x_prime) == p.alpha and len(p.y_prime) == p.beta
    if p.alpha < n:
        assert not additive(x[n - p.alpha - 1:] + (0,))
    assert (p.l == 0) == (1 not in x)
    assert (p.r == 0) == (1 not in y)


def test_rule218_params_rejects_unequal():
    with pytest.raises(InvalidInput):
        rule218_params((0, 1), (0,))
    with pytest.raises(InvalidInput):
        rule218_protocol(0)


@pytest.mark.parametrize("n", range(1, 8))
def test_rule218_protocol(n):
    p = rule218_protocol(n)
    rep = verify_one_round(p, R218, SplitSpec(n, n), center_constraint=0)
    assert rep.ok, rep.counterexamples[:3]
    assert p.cost == 2 * math.ceil(math.log2(n + 1)) + 1
    assert rep.domain_size == 2 ** (2 * n)


def test_rule218_protocol_matches_brute_force():
    for n in (2, 3, 4):
        assert brute_counterexamples(rule218_protocol(n), R218, n, n, center=0) == []


@pytest.mark.parametrize("n", range(3, 11))
def test_rule218_family_distinct(n):
    fam = rule218_lower_bound_family(n)
    assert fam.distinct, fam.clash
    words = [w for s in fam.sets for w in s]
    assert len(set(words)) == len(words) == fam.total
    assert all(len(w) == n for w in words)


def test_rule218_family_shape():
    assert rule218_family(5) == [[(1, 1, 0, 0, 0)], [(0, 0, 0, 0, 0), (0, 1, 0, 0, 0)]]
    with pytest.raises(InvalidInput):
        rule218_family(2)


LINEAR = [0, 60, 90, 102, 105, 150, 170, 204, 240, 15, 51, 255]


@pytest.mark.parametrize("code", LINEAR)
def test_linear_protocols(code):
    rule = make_eca(code)
    for n in range(1, 7):
        for i in (0, n, 2 * n + 1):
            p = linear_protocol(rule, n, i)
            assert p.cost == 1
            assert verify_one_round(p, rule, SplitSpec(n, i)).ok


def test_linear_protocol_rejects_nonlinear():
    with pytest.raises(InvalidInput):
        linear_protocol(make_eca(110), 3)


def test_fooling_bound_below_profile():
    for n in range(2, 9):
        fs = rule178_fooling_subset(n)
        assert cc1_profile(R178, n, primes=None).splits[n].d >= len(fs)
