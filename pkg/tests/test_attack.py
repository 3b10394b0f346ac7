import math
from collections import Counter
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from binwise.attack import (
    UNUTILIZED,
    budget_from_rate,
    build_bin_model,
    build_hybrid_model,
    build_mangling_model,
    effective_budget_after_salting,
    long_password_substring_share,
    pattern_share,
    rule_multiplicity,
    signature_counts,
    simulate_attack,
    utilization_report,
)
from binwise.bins import capacity, classify, search_space_size
from binwise.corpus import Corpus
from binwise.partition import (
    density_order,
    expected_success,
    plan_density_order,
    probability_order,
    proportional_counts,
)
from binwise.synth import split, zipf_bin_corpus, zipf_password_corpus


def corpus(counts):
    return Corpus(Counter(counts))


# --- bin model ---------------------------------------------------------------

def test_bin_model_example():
    m = build_bin_model(corpus({"abc12": 3, "Abc12": 1}), l_max=8)
    assert {p.id: p.count for p in m} == {"LLLDD": 3, "ULLDD": 1}
    assert m["LLLDD"].capacity == 26**3 * 100
    assert m.total_capacity == search_space_size(8)[0]


def test_bin_model_empty_corpus():
    m = build_bin_model(Corpus(), l_max=4)
    assert len(m) == 0
    assert m.total_count == 0


def test_bin_model_long_passwords_excluded():
    m = build_bin_model(corpus({"short": 2, "muchtoolong": 5}), l_max=6)
    assert m.total_count == 2
    assert m.excluded_count == 5


def test_bin_model_rejects_bad_lmax():
    with pytest.raises(ValueError):
        build_bin_model(Corpus(), 0)


@settings(max_examples=100, deadline=None)
@given(st.dictionaries(st.text(alphabet="aZ9! ", min_size=1, max_size=10), st.integers(1, 50), max_size=30),
       st.integers(1, 10))
def test_ingestion_conservation(counts, l_max):
    c = corpus(counts)
    m = build_bin_model(c, l_max)
    assert m.total_count + m.excluded_count == c.total


# --- mangling ---------------------------------------------------------------------

def test_mangling_literal_suffix_rules():
    words = ["lion", "deer", "bear", "wolf"]
    m = build_mangling_model(words, [("W", 0.4), ("W1", 0.3), ("W!", 0.2), ("W12", 0.1)])
    assert [p.capacity for p in m] == [4, 4, 4, 4]
    assert [p.count for p in m] == [4, 3, 2, 1]
    assert [p.id for p in density_order(m)] == [p.id for p in probability_order(m)]


def test_mangling_single_rule():
    m = build_mangling_model(["a"], [("identity", 1)])
    assert len(m) == 1


def test_mangling_equal_weights_different_multiplicity():
    m = build_mangling_model(["lion", "deer"], [("append-digits(2)", 0.5), ("identity", 0.5)])
    assert m["append-digits(2)"].capacity == 200
    assert [p.id for p in density_order(m)] == ["identity", "append-digits(2)"]
    assert [p.id for p in probability_order(m)] == ["append-digits(2)", "identity"]


def test_rule_multiplicities():
    words = ["lion", "Deer", "sea"]
    assert rule_multiplicity("append-symbol", words) == 99
    assert rule_multiplicity("append-symbol(!)", words) == 3
    assert rule_multiplicity("capitalize-first", words) == 2
    # lion: 2*3*2 = 12 spellings, Deer: 2*2 = 4, sea: 3*2*3 = 18; originals excluded
    assert rule_multiplicity("leet-map", words) == 11 + 3 + 17
    with pytest.raises(ValueError):
        rule_multiplicity("rot13", words)


def test_mangling_errors():
    with pytest.raises(ValueError):
        build_mangling_model([], [("W", 1)])
    with pytest.raises(ValueError):
        build_mangling_model(["a"], [("W", -1)])


# --- hybrid -----------------------------------------------------------------------

def test_hybrid_unit_density_is_frequency():
    c = corpus({"123456": 290729, "12345": 79076, "password": 59462})
    h = build_hybrid_model(c, 1, l_max=12)
    pm = h.to_partition_model()
    top = density_order(pm)[0]
    assert top.id == "=123456"
    assert top.density == 290729
    assert "DDDDDD" not in h.bins
    assert h.bins["DDDDD"].count == 79076


def test_hybrid_k_zero_is_pure_bin_model():
    c = corpus({"abc": 3, "xyz1": 2})
    h = build_hybrid_model(c, 0, l_max=8)
    assert h.units == ()
    assert h.bins == build_bin_model(c, 8)


def test_hybrid_k_covers_everything():
    c = corpus({"abc": 3, "xyz1": 2, "Q": 1})
    h = build_hybrid_model(c, 10, l_max=8)
    assert [p for p, _ in h.units] == ["abc", "xyz1", "Q"]
    assert len(h.bins) == 0


def test_hybrid_ties_lexicographic():
    h = build_hybrid_model(corpus({"b": 2, "a": 2, "c": 1}), 2, l_max=4)
    assert h.units == (("a", 2), ("b", 2))


def test_hybrid_residual_capacity_excludes_units():
    h = build_hybrid_model(corpus({"ab": 5, "cd": 1}), 1, l_max=4)
    assert h.bins["LL"].capacity == 26**2 - 1
    assert h.bins["LL"].count == 1


# --- guess curves -----------------------------------------------------------------

def test_uniform_curve_equals_floor():
    # Two equal-length bins with counts proportional to capacity and no other bins.
    counts = {"ab": 26, "a1": 10}
    c = corpus(counts)
    space = capacity("LL") + capacity("LD")
    m = build_bin_model(c, 2, total_capacity=space)
    budgets = [0, 1, 100, 500, space]
    curve = simulate_attack(m, c, budgets=budgets, l_max=2)
    for point, budget in zip(curve, budgets):
        assert point.expected_cracked == Fraction(36 * budget, space)


def test_full_budget_cracks_everything():
    train, test = split(zipf_bin_corpus(1, 5000, n_bins=40, l_max=5), seed=2)
    m = build_bin_model(train, 5)
    curve = simulate_attack(m, test, budgets=[m.total_capacity], l_max=5)
    assert curve.points[-1].fraction == 1.0
    assert curve.points[-1].expected_cracked == test.total


def test_train_equals_test_full_budget_cracks_phi():
    c = zipf_bin_corpus(3, 2000, n_bins=20, l_max=4)
    m = build_bin_model(c, 4)
    curve = simulate_attack(m, c, budgets=[m.covered_capacity], l_max=4)
    assert curve.points[0].expected_cracked == c.total


def test_curve_matches_plan_when_train_is_test():
    c = zipf_bin_corpus(4, 3000, n_bins=30, l_max=6)
    m = build_bin_model(c, 6)
    budgets = [2**k for k in range(0, 34, 3)]
    curve = simulate_attack(m, c, budgets=budgets, l_max=6)
    for point, budget in zip(curve, budgets):
        assert point.expected_cracked == expected_success(m, plan_density_order(m, budget)).value


def test_unknown_bins_go_to_complement():
    train = corpus({"abc": 10})
    test = corpus({"abc": 1, "ABC": 3})
    m = build_bin_model(train, 3)
    curve = simulate_attack(m, test, budgets=[capacity("LLL"), m.total_capacity], l_max=3)
    assert curve.unknown_mass == 3
    assert curve.points[0].expected_cracked == 1
    assert curve.points[1].expected_cracked == 4


def test_curve_monotone_and_bounded():
    train, test = split(zipf_bin_corpus(5, 20_000, n_bins=100, l_max=8), seed=6)
    m = build_bin_model(train, 8)
    for ordering in ("density", "probability"):
        curve = simulate_attack(m, test, ordering, checkpoints=range(0, 60, 2), l_max=8)
        values = [p.expected_cracked for p in curve]
        assert values == sorted(values)
        assert all(0 <= p.fraction <= 1 for p in curve)


def test_density_dominates_probability_on_zipf():
    c = zipf_bin_corpus(7, 50_000, n_bins=150, l_max=8)
    m = build_bin_model(c, 8)
    checks = [float(x) for x in range(10, 56, 2)]
    dense = simulate_attack(m, c, "density", checks, l_max=8)
    popular = simulate_attack(m, c, "probability", checks, l_max=8)
    pairs = list(zip(dense, popular))
    assert all(d.expected_cracked >= p.expected_cracked for d, p in pairs)
    assert any(d.expected_cracked > p.expected_cracked for d, p in pairs)


def test_hybrid_dominates_pure_bins_on_same_corpus():
    c = zipf_password_corpus(11, 100_000, pool=5000, n_bins=120, l_max=10)
    checks = [float(x) for x in range(0, 50, 2)]
    pure = simulate_attack(build_bin_model(c, 10), c, "density", checks, l_max=10)
    for k in (1, 10, 100):
        hybrid = simulate_attack(build_hybrid_model(c, k, 10), c, "density", checks)
        assert all(h.expected_cracked >= p.expected_cracked for h, p in zip(hybrid, pure))
        assert hybrid.points[0].expected_cracked > pure.points[0].expected_cracked


def test_checkpoints_must_be_sorted():
    m = build_bin_model(corpus({"a": 1}), 2)
    with pytest.raises(ValueError):
        simulate_attack(m, corpus({"a": 1}), checkpoints=[10, 5], l_max=2)


def test_plain_model_needs_lmax():
    m = build_bin_model(corpus({"a": 1}), 2)
    with pytest.raises(ValueError):
        simulate_attack(m, corpus({"a": 1}), checkpoints=[1])


def test_curve_csv_header_and_rows():
    m = build_bin_model(corpus({"ab": 3}), 2)
    csv = simulate_attack(m, corpus({"ab": 3}), checkpoints=[0, 1], l_max=2).to_csv()
    lines = csv.splitlines()
    assert lines[0] == "log2_budget,expected_cracked,fraction"
    assert lines[1] == "0.00,0.004438,0.001479"


def test_signature_counts_skip_long():
    counts, too_long = signature_counts(corpus({"aa": 1, "aaaa": 2}), 3)
    assert counts == {"LL": 1}
    assert too_long == 2


def test_unutilized_id_is_not_a_signature():
    assert not set(UNUTILIZED) <= set("LUDS")


# --- budgets ----------------------------------------------------------------------

def test_salting_examples():
    assert effective_budget_after_salting(2**56, 2**20) == 2**36
    assert effective_budget_after_salting(12345, 1) == 12345
    assert effective_budget_after_salting(100, 3) == 33
    with pytest.raises(ValueError):
        effective_budget_after_salting(1, 0)


def test_budget_from_rate_examples():
    b = budget_from_rate(350e9, 2.5 * 86400)
    assert b == 350 * 10**9 * 216000
    assert abs(math.log2(b) - 56.07) < 0.01
    assert abs(math.log2(budget_from_rate(40000, 30 * 86400)) - 36.59) < 0.01
    assert budget_from_rate(0, 1000) == 0
    assert budget_from_rate(Fraction(1, 3), 10) == 3


# --- analytics --------------------------------------------------------------------

def test_long_password_share_examples():
    assert long_password_substring_share(corpus({"mypassword12": 1}), ["password"]) == 1
    assert long_password_substring_share(corpus({"qqqqqqqqqqqq": 1}), ["password"]) == 0


def test_long_password_share_constructed():
    popular = ["monkey", "dragon", "sunshine"]
    counts = {}
    for i in range(45):
        counts["zz" + "abcdefghij"[i % 10] * (i // 10 + 1) + popular[i % 3] + "x" * 6] = 1
    filler = "bcdfghjklmnpqrstvwxz"
    for i in range(55):
        counts[filler[i % 20] * 12 + filler[(i * 7) % 20] * (i // 20 + 1)] = 1
    counts["Dragonfly12345"] = 9  # has an uppercase letter
    counts["monkey"] = 9  # too short
    c = corpus(counts)
    assert len(c.counts) == 102
    assert long_password_substring_share(c, popular) == Fraction(45, 100)


def test_long_password_share_weighted_and_case_sensitive():
    c = corpus({"passwordpassword": 3, "aaaaaaaaaaaaaaaa": 1})
    assert long_password_substring_share(c, ["password"]) == Fraction(3, 4)
    assert long_password_substring_share(c, ["PASSWORD"]) == 0
    with pytest.raises(ValueError):
        long_password_substring_share(c, [])


def test_utilization_six_of_sixteen():
    words = ["ab", "cd", "a1", "1a", "12", "!!", "A!"]
    m = build_bin_model(corpus({w: 1 for w in words}), 2)
    rows = utilization_report(m, [1, 2])
    assert (rows[1].available, rows[1].utilized) == (16, 6)
    assert rows[1].cumulative_utilized == 6


def test_utilization_empty_and_length_ten():
    rows = utilization_report(build_bin_model(Corpus(), 10), [10, 2])
    assert [(r.length, r.available, r.utilized) for r in rows] == [(2, 16, 0), (10, 1048576, 0)]


def test_pattern_share():
    m = build_bin_model(corpus({"abc12": 3, "Abc12": 1}), 8)
    assert pattern_share(m, "L+D+") == Fraction(3, 4)
    assert pattern_share(m, "U1L+D+") == Fraction(1, 4)


def test_proportional_counts_helper():
    assert proportional_counts(12, [1, 2, 3]) == [2, 4, 6]
    with pytest.raises(ValueError):
        proportional_counts(5, [1, 2])


def test_classify_signatures_of_synthetic_corpus():
    c = zipf_bin_corpus(9, 1000, n_bins=10, l_max=6)
    assert len({classify(p) for p in c.counts}) <= 10
    assert c.total == 1000
