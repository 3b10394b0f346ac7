"""Partition models built from corpora, and guess-curve simulation.

A bin model has one partition per observed signature. Its total capacity is
the whole space of passwords up to ``l_max`` characters, so every bin that
no training password used is part of an implicit zero-density remainder.
"""

from __future__ import annotations

import bisect
import math
import re
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

import ahocorasick

from .bins import (
    CLASS_SIZES,
    BinPattern,
    capacity,
    classify,
    is_signature,
    matches,
    parse_pattern,
    search_space_size,
)
from .corpus import Corpus
from .partition import (
    Partition,
    PartitionError,
    PartitionModel,
    density_order,
    probability_order,
)

UNUTILIZED = "<unutilized>"
ORDERINGS = ("density", "probability")


def signature_counts(corpus: Corpus, l_max: int) -> tuple[Counter, int]:
    """Per-signature multiplicities and the mass of passwords longer than ``l_max``."""
    counts: Counter = Counter()
    too_long = 0
    for password, n in corpus.records():
        if len(password) > l_max:
            too_long += n
            continue
        counts[classify(password)] += n
    return counts, too_long


def _bin_model(counts: Mapping[str, int], l_max: int, too_long: int = 0,
               total_capacity: int | None = None) -> PartitionModel:
    parts = [Partition(sig, capacity(sig), n) for sig, n in sorted(counts.items()) if n > 0]
    if total_capacity is None:
        total_capacity = search_space_size(l_max)[0]
    return PartitionModel(tuple(parts), total_capacity, too_long)


def build_bin_model(corpus: Corpus, l_max: int, total_capacity: int | None = None) -> PartitionModel:
    """One partition per observed signature of length <= ``l_max``.

    ``total_capacity`` defaults to the number of passwords of length 1..l_max;
    pass a smaller value when the attacker knows the space is restricted.
    """
    if l_max < 1:
        raise ValueError("l_max must be >= 1")
    counts, too_long = signature_counts(corpus, l_max)
    return _bin_model(counts, l_max, too_long, total_capacity)


# --- dictionary + mangling rules ---------------------------------------------

LEET = {"a": "@4", "e": "3", "i": "1!", "l": "1", "o": "0", "s": "$5", "t": "7"}

_APPEND_DIGITS = re.compile(r"append-digits\((\d+)\)$")
_APPEND_SYMBOL = re.compile(r"append-symbol(?:\((.)\))?$")


def rule_multiplicity(rule: str, dictionary: Sequence[str]) -> int:
    """Number of candidates a rule produces over ``dictionary``.

    Recognised rules: ``identity`` (or ``W``), ``W<suffix>`` appending a
    literal, ``append-digits(d)``, ``append-symbol`` (any one symbol) or
    ``append-symbol(c)``, ``capitalize-first`` and ``leet-map``.
    """
    n = len(dictionary)
    if rule in ("identity", "W"):
        return n
    if m := _APPEND_DIGITS.match(rule):
        return n * 10 ** int(m.group(1))
    if m := _APPEND_SYMBOL.match(rule):
        return n if m.group(1) else n * CLASS_SIZES["S"]
    if rule == "capitalize-first":
        return sum(1 for w in dictionary if w[:1].islower())
    if rule == "leet-map":
        return sum(math.prod(1 + len(LEET.get(c, "")) for c in w) - 1 for w in dictionary)
    if rule.startswith("W") and len(rule) > 1:
        return n
    raise ValueError(f"unknown mangling rule {rule!r}")


def _exact_counts(weights: Sequence) -> list[int]:
    fracs = [Fraction(repr(w)) if isinstance(w, float) else Fraction(w) for w in weights]
    if any(f < 0 for f in fracs):
        raise ValueError("rule weights must be >= 0")
    scale = math.lcm(*(f.denominator for f in fracs)) if fracs else 1
    ints = [int(f * scale) for f in fracs]
    g = math.gcd(*ints) or 1
    return [i // g for i in ints]


def build_mangling_model(dictionary: Sequence[str], rules: Sequence[tuple[str, object]]) -> PartitionModel:
    """One symbolic partition per rule; weights become exact integer counts."""
    if not dictionary:
        raise ValueError("empty dictionary")
    counts = _exact_counts([w for _, w in rules])
    parts = []
    for (rule, _), n in zip(rules, counts):
        cap = rule_multiplicity(rule, dictionary)
        if cap < 1:
            raise PartitionError(f"rule {rule!r} produces no candidates for this dictionary")
        parts.append(Partition(rule, cap, n))
    return PartitionModel.from_partitions(parts)


# --- hybrid: unit partitions for popular passwords + residual bins -----------

@dataclass(frozen=True)
class HybridModel:
    units: tuple[tuple[str, int], ...]
    bins: PartitionModel
    l_max: int

    @property
    def unit_passwords(self) -> frozenset:
        return frozenset(p for p, _ in self.units)

    def to_partition_model(self) -> PartitionModel:
        unit_parts = [Partition(unit_id(p), 1, n) for p, n in self.units]
        return PartitionModel(tuple(unit_parts) + self.bins.partitions,
                              self.bins.total_capacity, self.bins.excluded_count)


def unit_id(password: str) -> str:
    # Signatures never contain '=' so unit ids cannot collide with bin ids.
    return "=" + password


def top_passwords(corpus: Corpus, k: int, l_max: int | None = None) -> list[tuple[str, int]]:
    items = corpus.counts.items()
    if l_max is not None:
        items = [(p, n) for p, n in items if len(p) <= l_max]
    return sorted(items, key=lambda item: (-item[1], item[0]))[:k]


def build_hybrid_model(corpus: Corpus, k: int, l_max: int) -> HybridModel:
    """Top-``k`` passwords become capacity-1 partitions; the rest feed bins.

    A bin's capacity is reduced by the number of unit passwords it contains
    so partitions stay disjoint; a bin left with nothing is dropped.
    """
    if k < 0:
        raise ValueError("k must be >= 0")
    units = top_passwords(corpus, k, l_max)
    unit_set = {p for p, _ in units}
    taken: Counter = Counter(classify(p) for p in unit_set)
    counts, too_long = signature_counts(
        Corpus(Counter({p: n for p, n in corpus.counts.items() if p not in unit_set})), l_max
    )
    parts = []
    for sig, n in sorted(counts.items()):
        cap = capacity(sig) - taken[sig]
        if cap > 0 and n > 0:
            parts.append(Partition(sig, cap, n))
    bins = PartitionModel(tuple(parts), search_space_size(l_max)[0], too_long)
    return HybridModel(tuple(units), bins, l_max)


# --- guess curves -------------------------------------------------------------

@dataclass(frozen=True)
class CurvePoint:
    log2_budget: float
    budget: int
    expected_cracked: Fraction
    fraction: float


@dataclass(frozen=True)
class GuessCurve:
    points: tuple[CurvePoint, ...]
    test_total: int
    ordering: str
    excluded: int = 0
    unknown_mass: int = 0

    def __iter__(self):
        return iter(self.points)

    def __len__(self):
        return len(self.points)

    def to_csv(self) -> str:
        lines = ["log2_budget,expected_cracked,fraction"]
        for p in self.points:
            lines.append(f"{p.log2_budget:.2f},{format_decimal(p.expected_cracked)},{p.fraction:.6f}")
        return "\n".join(lines) + "\n"


def format_decimal(x: Fraction, places: int = 6) -> str:
    scaled = round(x * 10**places)
    sign = "-" if scaled < 0 else ""
    whole, frac = divmod(abs(scaled), 10**places)
    return f"{sign}{whole}.{frac:0{places}d}"


def budget_from_log2(x: float) -> int:
    if x < 0:
        raise ValueError("log2 budget must be >= 0")
    if float(x).is_integer():
        return 1 << int(x)
    return round(2.0**x)


def log2_int(n: int) -> float:
    return math.log2(n) if n > 0 else -math.inf


def simulate_attack(train: PartitionModel | HybridModel, test: Corpus, ordering: str = "density",
                    checkpoints: Iterable[float] = (), l_max: int | None = None,
                    budgets: Iterable[int] | None = None) -> GuessCurve:
    """Expected number of test passwords cracked at each budget.

    Partitions are ordered by the training model. A test password is credited
    to the training partition holding it; one whose bin the training model
    never saw falls into the zero-density remainder, explored last and
    credited pro rata. Checkpoints are log2 budgets; ``budgets`` takes exact
    integers instead.
    """
    if ordering not in ORDERINGS:
        raise ValueError(f"ordering must be one of {ORDERINGS}")
    if isinstance(train, HybridModel):
        model = train.to_partition_model()
        units = train.unit_passwords
        l_max = train.l_max if l_max is None else l_max
    else:
        model, units = train, frozenset()
    if l_max is None:
        raise ValueError("l_max is required for a plain bin model")

    if budgets is None:
        marks = [float(c) for c in checkpoints]
        amounts = [budget_from_log2(c) for c in marks]
    else:
        amounts = [int(b) for b in budgets]
        marks = [log2_int(b) for b in amounts]
    if any(b > a for a, b in zip(amounts[1:], amounts)):
        raise ValueError("checkpoint budgets must be sorted ascending")

    credit: Counter = Counter()
    excluded = 0
    for password, n in test.records():
        if len(password) > l_max:
            excluded += n
        elif password in units:
            credit[unit_id(password)] += n
        else:
            sig = classify(password)
            credit[sig if sig in model else UNUTILIZED] += n
    test_total = sum(credit.values())

    ordered = density_order(model) if ordering == "density" else probability_order(model)
    caps = [p.capacity for p in ordered]
    hits = [credit[p.id] for p in ordered]
    rest = model.uncovered_capacity
    if rest:
        caps.append(rest)
        hits.append(credit[UNUTILIZED])
    prefix_cap = [0]
    prefix_hit = [0]
    for c, h in zip(caps, hits):
        prefix_cap.append(prefix_cap[-1] + c)
        prefix_hit.append(prefix_hit[-1] + h)

    points = []
    for mark, budget in zip(marks, amounts):
        spend = min(budget, prefix_cap[-1])
        full = bisect.bisect_right(prefix_cap, spend) - 1
        cracked = Fraction(prefix_hit[full])
        if full < len(caps):
            cracked += Fraction((spend - prefix_cap[full]) * hits[full], caps[full])
        fraction = float(cracked / test_total) if test_total else 0.0
        points.append(CurvePoint(mark, budget, cracked, fraction))
    return GuessCurve(tuple(points), test_total, ordering, excluded, credit[UNUTILIZED])


# --- budget arithmetic --------------------------------------------------------

def effective_budget_after_salting(budget: int, users: int) -> int:
    """Per-user salts force every guess to be hashed once per user."""
    if users < 1:
        raise ValueError("user count must be >= 1")
    return budget // users


def _exact(x) -> Fraction:
    if isinstance(x, float):
        return Fraction(repr(x))
    return Fraction(x)


def budget_from_rate(rate, seconds) -> int:
    """Guesses produced at ``rate`` per second over ``seconds``, rounded down."""
    r, s = _exact(rate), _exact(seconds)
    if r < 0 or s < 0:
        raise ValueError("rate and duration must be >= 0")
    return math.floor(r * s)


# --- corpus analytics ---------------------------------------------------------

def _automaton(words: Iterable[str]) -> ahocorasick.Automaton:
    auto = ahocorasick.Automaton()
    for w in words:
        if w:
            auto.add_word(w, w)
    auto.make_automaton()
    return auto


def long_password_substring_share(corpus: Corpus, popular: Sequence[str], min_length: int = 12,
                                  lowercase_only: bool = True) -> Fraction:
    """Weighted share of long passwords containing any popular entry as a substring.

    With ``lowercase_only`` a password qualifies when it has lowercase letters
    and no uppercase ones; digits and symbols may appear.
    """
    if not popular:
        raise ValueError("popular list must not be empty")
    auto = _automaton(popular)
    qualifying = hit = 0
    for password, n in corpus.records():
        if len(password) < min_length:
            continue
        if lowercase_only and not password.islower():
            continue
        qualifying += n
        if next(auto.iter(password), None) is not None:
            hit += n
    return Fraction(hit, qualifying) if qualifying else Fraction(0)


@dataclass(frozen=True)
class UtilizationRow:
    length: int
    available: int
    utilized: int
    cumulative_utilized: int


def utilization_report(model: PartitionModel, lengths: Iterable[int]) -> list[UtilizationRow]:
    per_length: Counter = Counter(len(p.id) for p in model if p.count > 0 and is_signature(p.id))
    rows = []
    running = 0
    for length in sorted(set(lengths)):
        running += per_length[length]
        rows.append(UtilizationRow(length, 4**length, per_length[length], running))
    return rows


def pattern_share(model: PartitionModel, pattern: BinPattern | str) -> Fraction:
    """Share of the model's mass in bins matching ``pattern``."""
    pat = parse_pattern(pattern) if isinstance(pattern, str) else pattern
    total = model.total_count
    if not total:
        return Fraction(0)
    hit = sum(p.count for p in model if is_signature(p.id) and matches(pat, p.id))
    return Fraction(hit, total)
