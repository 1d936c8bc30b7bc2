import pytest
from hypothesis import given, settings, strategies as st

from cacc.errors import InvalidInput, Unsupported
from cacc.matrix import cc1_profile
from cacc.rescaling import (
    InjectionWitness,
    RescalingParams,
    check_simulation,
    commutes,
    compare_cc_sequences,
    find_subautomaton,
    pack,
    packed_splits,
    rescale,
    rescaled_window_oracle,
    unpack,
)
from cacc.rules import dependent_cells, make_eca, make_rule, step_word, symmetry

PARAMS = [RescalingParams(m, t, z) for m in (1, 2) for t in (1, 2) for z in (-1, 0, 1)]


def test_params():
    with pytest.raises(InvalidInput):
        RescalingParams(0, 1, 0)
    with pytest.raises(InvalidInput):
        RescalingParams(1, 0, 0)
    assert RescalingParams(2, 2, 1).radius(make_eca(90)) == 2
    assert RescalingParams(2, 1, 0).radius(make_eca(90)) == 1


@given(st.integers(1, 3), st.integers(2, 3), st.data())
def test_pack_round_trip(m, s, data):
    w = tuple(data.draw(st.lists(st.integers(0, s - 1), max_size=4 * m).filter(lambda v: len(v) % m == 0)))
    blocks = pack(w, m, s)
    assert len(blocks) == len(w) // m
    assert all(0 <= b < s**m for b in blocks)
    assert unpack(blocks, m, s) == w


def test_pack_examples_and_errors():
    assert pack("0110", 2, 2) == (1, 2)
    assert unpack((3, 0), 2, 2) == (1, 1, 0, 0)
    with pytest.raises(InvalidInput):
        pack("011", 2, 2)
    with pytest.raises(InvalidInput):
        unpack((4,), 2, 2)


@given(st.integers(0, 255))
def test_identity_rescaling(code):
    rule = make_eca(code)
    assert rescale(rule, RescalingParams()) == rule


def test_rule_170_two_steps_is_block_shift():
    packed = rescale(make_eca(170), RescalingParams(2, 2, 0))
    assert packed.states == 4 and packed.radius == 1
    assert dependent_cells(packed, 1) == {1}
    # the output block is the right neighbour block
    for left in range(4):
        for mid in range(4):
            for right in range(4):
                assert packed(left, mid, right) == right


@pytest.mark.parametrize("code", [90, 110, 178])
@pytest.mark.parametrize("p", PARAMS, ids=str)
def test_blocked_consistency(code, p):
    rule = make_eca(code)
    packed = rescale(rule, p)
    assert packed.radius == p.radius(rule)
    import random

    rng = random.Random(code * 100 + p.m * 10 + p.t)
    for _ in range(200):
        blocks = 2 * packed.radius + 1 + rng.randrange(4)
        w = tuple(rng.randrange(2) for _ in range(blocks * p.m))
        assert step_word(packed, pack(w, p.m, 2)) == rescaled_window_oracle(rule, p, w)


def test_oracle_rejects_short_words():
    with pytest.raises(InvalidInput):
        rescaled_window_oracle(make_eca(90), RescalingParams(2, 1, 0), (0, 1, 0, 1))


def test_rescale_limits():
    with pytest.raises(Unsupported):
        rescale(make_eca(90), RescalingParams(9, 1, 0))
    from cacc.errors import BudgetExceeded

    with pytest.raises(BudgetExceeded):
        rescale(make_eca(90), RescalingParams(4, 4, 0), budget=1000)


@pytest.mark.parametrize("code", [90, 178])
@pytest.mark.parametrize("z", [-1, 0, 1])
def test_shift_neutrality(code, z):
    rule = make_eca(code)
    shifted = rescale(rule, RescalingParams(1, 1, z))
    for n in range(1, 7 if z == 0 else 4):
        base = cc1_profile(rule, n, primes=None)
        moved = cc1_profile(shifted, n, primes=None)
        assert moved.worst_cc1 == base.worst_cc1
        assert moved.worst_d == base.worst_d


def test_find_subautomaton_examples():
    for code in (0, 90, 110, 178):
        r = make_eca(code)
        assert find_subautomaton(r, r).mapping == (0, 1)
    # rule 0 sends everything to 0 while 204 keeps the centre, so state 1 cannot embed
    assert find_subautomaton(make_eca(0), make_eca(204)) is None
    assert find_subautomaton(make_eca(178), make_eca(90)) is None
    # a rule embeds into its conjugate via the swap
    assert find_subautomaton(make_eca(110), symmetry(make_eca(110), "conjugate")).mapping == (1, 0)
    with pytest.raises(InvalidInput):
        find_subautomaton(make_eca(90), rescale(make_eca(90), RescalingParams(1, 2, 0)))
    big = make_rule(9, 0, list(range(9)))
    with pytest.raises(Unsupported):
        find_subautomaton(make_rule(2, 0, [0, 1]), big)


@settings(max_examples=60)
@given(st.integers(0, 255), st.integers(0, 255))
def test_witnesses_are_sound(a, b):
    ra, rb = make_eca(a), make_eca(b)
    w = find_subautomaton(ra, rb)
    if w is None:
        assert not commutes(ra, rb, (0, 1)) and not commutes(ra, rb, (1, 0))
    else:
        assert commutes(ra, rb, w.mapping)


def test_subautomaton_in_larger_alphabet():
    # rule 204 on two states embeds in the 3-state identity
    ident3 = make_rule(3, 1, [(k // 3) % 3 for k in range(27)])
    assert find_subautomaton(make_eca(204), ident3).mapping == (0, 1)
    assert InjectionWitness((0, 2)).to_dict() == {"map": {"0": 0, "1": 2}}
    with pytest.raises(InvalidInput):
        InjectionWitness((1, 1))


def test_check_simulation():
    r = make_eca(110)
    assert check_simulation(r, r, RescalingParams(), RescalingParams()).mapping == (0, 1)
    w = check_simulation(make_eca(170), make_eca(170), RescalingParams(1, 2, 0), RescalingParams(2, 4, 0))
    assert w is not None and commutes(
        rescale(make_eca(170), RescalingParams(1, 2, 0)),
        rescale(make_eca(170), RescalingParams(2, 4, 0)),
        w.mapping,
    )
    with pytest.raises(InvalidInput):
        check_simulation(r, r, RescalingParams(1, 1, 0), RescalingParams(1, 2, 0))


def test_compare_cc_sequences():
    phi = [1, 2, 3, 4]
    assert compare_cc_sequences(phi, phi, 1, 1, 1)
    assert compare_cc_sequences([0] * 4, phi, 1, 1, 1)
    assert not compare_cc_sequences([5, 5], [1, 1], 1, 2, 1)
    assert compare_cc_sequences([1, 2, 3, 4], [1, 2, 3, 4], 2, 1, 2)
    with pytest.raises(InvalidInput):
        compare_cc_sequences(phi, phi, 1, 1, 2, n_max=3)
    with pytest.raises(InvalidInput):
        compare_cc_sequences(phi, phi, 0, 1, 1)
    with pytest.raises(InvalidInput):
        compare_cc_sequences(phi, phi, 5, 1, 1)


def test_compare_rule178_with_its_packing():
    rule = make_eca(178)
    packed = rescale(rule, RescalingParams(2, 1, 0))
    phi1 = [cc1_profile(rule, n, primes=None).worst_cc1 for n in range(1, 7)]
    phi2 = [cc1_profile(packed, n, primes=None).worst_cc1 for n in range(1, 4)]
    # both directions hold on these samples with (alpha, beta, gamma) = (1, 2, 2)
    assert compare_cc_sequences(phi1, phi2, 1, 2, 2, n_max=1)
    assert compare_cc_sequences(phi2, phi1, 1, 2, 2)


@settings(max_examples=30)
@given(st.integers(0, 255), st.integers(1, 3), st.sampled_from([2, 3]))
def test_packed_counts_below_component_products(code, n, m):
    for rec in packed_splits(make_eca(code), n, m):
        assert rec.rows <= rec.row_product and rec.cols <= rec.col_product
        assert len(rec.component_splits) == m


def test_packing_can_exceed_squared_component_d():
    # rule 170 at n=1: the two output cells read cells 1 and 2, which a block split can separate
    recs = packed_splits(make_eca(170), 1, 2)
    assert max(r.d_packed for r in recs) == 2
    assert all(d == 1 for r in recs for d in r.d_components)
