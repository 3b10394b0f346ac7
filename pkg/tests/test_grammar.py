from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from binwise.grammar import (
    GrammarError,
    MissingDictionaryError,
    PreTerminal,
    density,
    equivalence_check,
    load_instance,
    order_by_preterminal_density,
    order_by_preterminal_probability,
    parse_template,
    preterminal_density_order,
    preterminal_probability_order,
    toy_instance,
)
from binwise.partition import Partition, PartitionModel, plan_density_order


def test_toy_probability_order():
    pts, dicts = toy_instance()
    assert [pt.id for pt in preterminal_probability_order(pts, dicts)] == ["L6$1", "L5!", "$L412"]
    guesses = order_by_preterminal_probability(pts, dicts)
    assert guesses[:2] == ["monkey$1", "donkey$1"]
    assert guesses[-1] == "$deer12"
    assert len(guesses) == 8 + 4 + 2


def test_toy_density_order_reverses():
    pts, dicts = toy_instance()
    order = preterminal_density_order(pts, dicts)
    assert [pt.id for pt in order] == ["$L412", "L5!", "L6$1"]
    assert [density(pt, dicts) for pt in order] == [1, Fraction(3, 4), Fraction(5, 8)]
    guesses = order_by_preterminal_density(pts, dicts)
    assert guesses[0] == "$lion12"
    assert guesses[-1] == "parrot$1"


def test_toy_equivalence():
    assert equivalence_check(*toy_instance())


def test_single_preterminal_is_dictionary_expansion():
    pt = PreTerminal("", 4, "", 1)
    dicts = {4: ["lion", "deer"]}
    assert order_by_preterminal_probability([pt], dicts) == ["lion", "deer"]
    assert order_by_preterminal_density([pt], dicts) == ["lion", "deer"]


def test_equal_probability_tie_break_by_id():
    pts = [PreTerminal("", 1, "b", 2, "zz"), PreTerminal("", 1, "a", 2, "aa")]
    dicts = {1: ["x"]}
    assert order_by_preterminal_probability(pts, dicts) == ["xa", "xb"]


def test_equal_dictionary_sizes_orders_agree():
    pts = [PreTerminal("", 3, "1", 4, "a"), PreTerminal("", 3, "!", 9, "b"), PreTerminal("#", 3, "", 1, "c")]
    dicts = {3: ["cat", "dog", "owl"]}
    assert order_by_preterminal_density(pts, dicts) == order_by_preterminal_probability(pts, dicts)


def test_single_word_dictionaries():
    pts = [PreTerminal("", 1, "1", 3, "a"), PreTerminal("", 2, "2", 5, "b")]
    assert equivalence_check(pts, {1: ["x"], 2: ["yz"]})


def test_missing_dictionary():
    with pytest.raises(MissingDictionaryError):
        order_by_preterminal_density([PreTerminal("", 7, "", 1)], {4: ["lion"]})


def test_parse_template_forms():
    a = parse_template("${L4}12", 2)
    b = parse_template("$L4 12", 2)
    assert (a.prefix, a.slot, a.suffix) == ("$", 4, "12") == (b.prefix, b.slot, b.suffix)
    assert a.label == "$L412"
    assert parse_template("{L6}$1", 5).fill("monkey") == "monkey$1"


def test_parse_template_errors():
    with pytest.raises(GrammarError):
        parse_template("1234", 1)
    with pytest.raises(GrammarError):
        parse_template("{L2}{L3}", 1)
    with pytest.raises(GrammarError):
        PreTerminal("", 0, "", 1)


def test_load_instance():
    text = """{"preterminals": [{"template": "$L4 12", "count": 2}, {"template": "{L5}!", "count": 3}],
               "dictionaries": {"4": ["lion", "deer"], "5": ["tiger"]}}"""
    pts, dicts = load_instance(text)
    assert [pt.id for pt in pts] == ["${L4}12", "{L5}!"]
    assert order_by_preterminal_density(pts, dicts) == ["tiger!", "$lion12", "$deer12"]


def test_load_instance_rejects_wrong_word_length():
    with pytest.raises(GrammarError):
        load_instance('{"preterminals": [], "dictionaries": {"4": ["owl"]}}')


@st.composite
def instances(draw):
    n = draw(st.integers(1, 5))
    sizes = draw(st.lists(st.integers(1, 8), min_size=1, max_size=4))
    dicts = {m + 1: [f"{chr(97 + i)}{'w' * m}" for i in range(size)] for m, size in enumerate(sizes)}
    pts = []
    for i in range(n):
        slot = draw(st.sampled_from(sorted(dicts)))
        pts.append(PreTerminal(f"{i}", slot, "#", draw(st.integers(0, 12)), f"t{i}"))
    return pts, dicts


def terminal_probabilities(pts, dicts):
    total = sum(pt.count for pt in pts) or 1
    return {pt.fill(w): Fraction(pt.count, total * len(dicts[pt.slot])) for pt in pts for w in dicts[pt.slot]}


@settings(max_examples=300, deadline=None)
@given(instances())
def test_density_order_is_terminal_probability_order(instance):
    pts, dicts = instance
    prob = terminal_probabilities(pts, dicts)
    brute = sorted(prob.values(), reverse=True)
    assert [prob[g] for g in order_by_preterminal_density(pts, dicts)] == brute
    assert equivalence_check(pts, dicts)


@settings(max_examples=200, deadline=None)
@given(instances())
def test_orderings_emit_each_guess_once(instance):
    pts, dicts = instance
    expected = sum(len(dicts[pt.slot]) for pt in pts)
    for guesses in (order_by_preterminal_density(pts, dicts), order_by_preterminal_probability(pts, dicts)):
        assert len(guesses) == len(set(guesses)) == expected


@settings(max_examples=200, deadline=None)
@given(instances())
def test_consistent_with_partition_planner(instance):
    pts, dicts = instance
    model = PartitionModel.from_partitions(Partition(pt.id, len(dicts[pt.slot]), pt.count) for pt in pts)
    plan = plan_density_order(model, model.total_capacity)
    assert plan.order == [pt.id for pt in preterminal_density_order(pts, dicts)]
