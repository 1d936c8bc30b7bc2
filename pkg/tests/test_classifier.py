import csv
import io

import pytest
from hypothesis import given, strategies as st

from cacc.classifier import (
    BOUNDED_44,
    LABELS,
    PAPER_CLAIMS,
    central_d,
    classify_all,
    classify_growth,
    rank_vs_cc1_report,
    reports_to_csv,
    reports_to_text,
    series,
    sweep,
    trailing_plateau,
)
from cacc.config import Config
from cacc.matrix import cc1_profile
from cacc.protocols import rule178_fooling_subset
from cacc.rules import canonical_codes, make_eca


def test_synthetic_examples():
    assert classify_growth([4] * 8).label == "bounded"
    assert classify_growth([2 * n + 1 for n in range(1, 13)]).label == "linear"
    assert classify_growth([n * n for n in range(1, 13)]).label == "quadratic"
    assert classify_growth([n**3 for n in range(1, 13)]).label == "superquadratic"
    assert classify_growth([2**n for n in range(1, 13)]).label == "non-polynomial"
    few = classify_growth([1, 2, 3])
    assert few.label == "undetermined" and "at least 5" in few.reason


def test_running_max_plateau():
    assert trailing_plateau([1, 2, 3, 3, 3]) == 3
    # a period-2 oscillation counts as flat
    assert trailing_plateau([1, 3, 4, 3, 4, 3, 4]) == 5
    assert classify_growth([1, 3, 4, 3, 4, 3, 4]).label == "bounded"


def test_thresholds_are_configurable():
    seq = [2 * n + 1 for n in range(1, 13)]
    assert classify_growth(seq, config=Config(exponent_tolerance=0.01)).label != "linear"
    assert classify_growth([1, 2, 3, 3, 3], config=Config(plateau_length=2)).label == "bounded"


def test_bad_input():
    with pytest.raises(ValueError):
        classify_growth([0, 1, 2, 3, 4])
    with pytest.raises(ValueError):
        classify_growth([1, 2, 3, 4, 5], ns=[1, 2])
    with pytest.raises(ValueError):
        series([], kind="diagonal")


@given(st.lists(st.integers(1, 50), min_size=5, max_size=14), st.integers(1, 50))
def test_bounded_is_monotone_safe(d, extra):
    before = classify_growth(d)
    if before.label == "bounded" and extra <= max(d):
        assert classify_growth(d + [extra]).label == "bounded"


@given(st.lists(st.integers(1, 1000), min_size=5, max_size=14))
def test_label_always_known(d):
    g = classify_growth(d)
    assert g.label in LABELS
    if g.label == "bounded":
        assert g.plateau >= 4


def test_sweep_examples():
    s = sweep(make_eca(0), 10)
    assert len(s) == 10 and all(p.worst_cc1 == 0 for p in s)
    assert s.stop_reason == "reached n_max=10"
    s178 = sweep(make_eca(178), 10)
    d = [p.worst_d for p in s178]
    assert d == sorted(d) and d[-1] > d[4]
    for p in s178:
        assert p.worst_d >= len(rule178_fooling_subset(p.n))
    assert classify_growth(s178.profiles).label == "linear"
    assert len(sweep(make_eca(30), 10)) == 10


def test_sweep_stops_at_budget():
    s = sweep(make_eca(30), 10, budget=2**9)
    assert len(s) == 4 and s.stop_reason.startswith("stopped before n=5")


def test_central_series():
    p = cc1_profile(make_eca(7), 5, primes=None)
    assert central_d(p) == max(p.splits[5].d, p.splits[6].d)


def test_paper_claims():
    assert len(BOUNDED_44) == 44 == len(set(BOUNDED_44))
    assert PAPER_CLAIMS[218] == "quadratic" and PAPER_CLAIMS[178] == "linear"


def test_classify_all_small():
    reports = classify_all(6, Config(workers=1))
    assert len(reports) == 88
    assert [r.canonical for r in reports] == list(canonical_codes())
    assert sum(len(r.members) for r in reports) == 256
    assert all(r.orbit_consistent for r in reports)
    assert all(r.to_dict()["evidence"] == "empirical at n_max=6" for r in reports)
    by = {r.canonical: r for r in reports}
    for c in (0, 15, 51, 170, 204):
        assert by[c].growth.label == "bounded"
    assert by[164].paper_class == "quadratic"  # 218 is in the orbit of 164
    rows = list(csv.DictReader(io.StringIO(reports_to_csv(reports))))
    assert len(rows) == 88 * 6
    assert list(rows[0])[:8] == ["canonical", "members", "n", "d", "cc1", "rank_lb", "class", "paper_confirmed"]
    assert "labels are empirical at n_max=6" in reports_to_text(reports)


def test_classify_all_is_worker_independent():
    codes = [30, 110, 178]
    one = [r.to_dict() for r in classify_all(6, Config(workers=1), codes)]
    two = [r.to_dict() for r in classify_all(6, Config(workers=2), codes)]
    assert one == two and [r["canonical"] for r in one] == [30, 110, 178]


def test_rank_report():
    rep = rank_vs_cc1_report([0, 90, 30], 6, Config(workers=1))
    rows90 = [r for r in rep.rows if r.rule == 90]
    assert all(r.d == 2 and r.rank_lb == 2 and r.ratio == 1.0 for r in rows90)
    assert rep.degenerate == [0]
    assert 90 not in rep.flagged
    assert {r.rule for r in rep.rows} == {0, 90, 30}
