"""Countermeasures: a minimum-length policy and user-to-bin assignment.

Assigners spread users over a universe of bins so that bin densities stay
close to uniform. Each assigner owns its random stream; seeding follows
:func:`stream`, so two assigners built from the same seed and name replay
identical choices.
"""

from __future__ import annotations

import bisect
import math
import random
import statistics
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .bins import ALPHABET_SIZE, capacity, enumerate_constrained_bins, parse_pattern, sample_bin

MAX_UNIVERSE = 10**6
STRATEGIES = ("round_robin", "density_ordered", "random", "two_choices")


def stream(seed: int | str, *names: object) -> random.Random:
    """Independent generator for ``seed`` and a stream name.

    String seeds go through SHA-512 inside :mod:`random`, so the result does
    not depend on ``PYTHONHASHSEED``.
    """
    return random.Random(":".join(str(x) for x in (seed, *names)))


# --- policy -------------------------------------------------------------------

@dataclass(frozen=True)
class PolicyParams:
    users: int
    budget: int
    tolerated: int | Fraction
    alphabet_size: int = ALPHABET_SIZE

    def __post_init__(self):
        if min(self.users, self.budget, self.alphabet_size) < 1 or self.tolerated < 1:
            raise ValueError("policy parameters must all be >= 1")
        if self.alphabet_size < 2:
            raise ValueError("alphabet size must be >= 2")
        if self.tolerated > self.users:
            raise ValueError("tolerated success cannot exceed the user count")


def min_length(params: PolicyParams) -> int:
    """Smallest l with alphabet**l * tolerated >= users * budget.

    The float estimate from logarithms is only a starting point; the answer
    is settled with exact integer comparisons.
    """
    target = Fraction(params.users * params.budget)
    tol = Fraction(params.tolerated)
    g = params.alphabet_size
    estimate = (math.log2(params.users) + math.log2(params.budget) - math.log2(tol)) / math.log2(g)
    length = max(0, math.ceil(estimate))
    while length > 0 and g ** (length - 1) * tol >= target:
        length -= 1
    while g**length * tol < target:
        length += 1
    return length


# --- assignment ---------------------------------------------------------------

@dataclass(frozen=True)
class StretchReport:
    users: int
    bins: int
    expected_density: Fraction
    max_density: Fraction
    stretch: float
    min_count: int
    max_count: int


class EmptyUniverseError(ValueError):
    pass


class Assigner:
    """Base class: an explicit universe of bins with per-bin user counts."""

    kind = ""

    def __init__(self, universe: Sequence[str], seed: int | str = 0, stream_name: object = 0,
                 capacities: Sequence[int] | None = None):
        if not universe:
            raise EmptyUniverseError("bin universe is empty")
        if len(universe) > MAX_UNIVERSE:
            raise ValueError(f"explicit universes are limited to {MAX_UNIVERSE} bins")
        self.bins = list(universe)
        # Explicit capacities let abstract partitions stand in for bins.
        self.capacities = list(capacities) if capacities is not None else [capacity(b) for b in self.bins]
        if len(self.capacities) != len(self.bins) or min(self.capacities) < 1:
            raise ValueError("need one capacity >= 1 per bin")
        self.counts = [0] * len(self.bins)
        self._equal_capacity = len(set(self.capacities)) == 1
        self.rng = stream(seed, self.kind, stream_name)

    @property
    def assigned(self) -> int:
        return sum(self.counts)

    def assign_next(self) -> str:
        i = self._pick()
        self.counts[i] += 1
        return self.bins[i]

    def assign(self, users: int) -> list[str]:
        return [self.assign_next() for _ in range(users)]

    def _pick(self) -> int:
        raise NotImplementedError

    def stretch(self) -> StretchReport:
        users = self.assigned
        if users < 1:
            raise ValueError("no users assigned yet")
        space = sum(self.capacities)
        expected = Fraction(users, space)
        if self._equal_capacity:
            top = max(range(len(self.bins)), key=self.counts.__getitem__)
        else:
            top = max(range(len(self.bins)), key=lambda i: Fraction(self.counts[i], self.capacities[i]))
        max_density = Fraction(self.counts[top], self.capacities[top])
        return StretchReport(users, len(self.bins), expected, max_density,
                             float(max_density / expected), min(self.counts), max(self.counts))


class RoundRobin(Assigner):
    kind = "round_robin"

    def __init__(self, universe, seed=0, stream_name=0, capacities=None):
        super().__init__(universe, seed, stream_name, capacities)
        self.cursor = 0

    def _pick(self) -> int:
        i = self.cursor
        self.cursor = (i + 1) % len(self.bins)
        return i

    def expected_density(self, i: int) -> Fraction:
        """Density bin ``i`` tends to under round robin: users / (n * capacity)."""
        return Fraction(self.assigned, len(self.bins) * self.capacities[i])


class DensityOrdered(Assigner):
    """Always assigns a least dense bin, uniformly at random among ties.

    Bins are bucketed by exact density; a sorted list of distinct densities
    gives the minimum in O(log n).
    """

    kind = "density_ordered"

    def __init__(self, universe, seed=0, stream_name=0, capacities=None):
        super().__init__(universe, seed, stream_name, capacities)
        self._buckets: dict[Fraction, list[int]] = {}
        self._where: list[int] = [0] * len(self.bins)
        self._levels: list[Fraction] = []
        for i in range(len(self.bins)):
            self._insert(i, Fraction(0))

    def _insert(self, i: int, density: Fraction) -> None:
        bucket = self._buckets.get(density)
        if bucket is None:
            bucket = self._buckets[density] = []
            bisect.insort(self._levels, density)
        self._where[i] = len(bucket)
        bucket.append(i)

    def _remove(self, i: int, density: Fraction) -> None:
        bucket = self._buckets[density]
        pos = self._where[i]
        last = bucket.pop()
        if last != i:
            bucket[pos] = last
            self._where[last] = pos
        if not bucket:
            del self._buckets[density]
            del self._levels[bisect.bisect_left(self._levels, density)]

    def min_density(self) -> Fraction:
        return self._levels[0]

    def _pick(self) -> int:
        low = self._levels[0]
        bucket = self._buckets[low]
        i = bucket[self.rng.randrange(len(bucket))]
        self._remove(i, low)
        self._insert(i, Fraction(self.counts[i] + 1, self.capacities[i]))
        return i


class _SizeProportional(Assigner):
    def __init__(self, universe, seed=0, stream_name=0, capacities=None):
        super().__init__(universe, seed, stream_name, capacities)
        self._cumulative = []
        total = 0
        for c in self.capacities:
            total += c
            self._cumulative.append(total)
        self._space = total

    def _draw(self) -> int:
        if self._equal_capacity:
            return self.rng.randrange(len(self.bins))
        return bisect.bisect_right(self._cumulative, self.rng.randrange(self._space))


class RandomAssigner(_SizeProportional):
    """Size-proportional random bin per user, counts tracked for reporting."""

    kind = "random"

    def _pick(self) -> int:
        return self._draw()


class TwoChoices(_SizeProportional):
    kind = "two_choices"

    def _pick(self) -> int:
        a = self._draw()
        b = self._draw()
        # Cross-multiplied density comparison; ties keep the first draw.
        if self.counts[b] * self.capacities[a] < self.counts[a] * self.capacities[b]:
            return b
        return a


class ImplicitRandom:
    """Random assignment over every bin of one length; keeps no per-bin state."""

    kind = "random"

    def __init__(self, length: int, seed: int | str = 0, stream_name: object = 0):
        if length < 1:
            raise ValueError("length must be >= 1")
        self.length = length
        self.assigned = 0
        self.rng = stream(seed, self.kind, stream_name)

    def assign_next(self) -> str:
        self.assigned += 1
        return sample_bin(self.length, self.rng)

    def assign(self, users: int) -> list[str]:
        return [self.assign_next() for _ in range(users)]

    def stretch(self) -> StretchReport:
        raise TypeError("implicit random assignment tracks no per-bin counts; "
                        "use RandomAssigner over an explicit universe")


_CLASSES = {
    "round_robin": RoundRobin,
    "density_ordered": DensityOrdered,
    "random": RandomAssigner,
    "two_choices": TwoChoices,
}


def make_assigner(strategy: str, universe: Sequence[str], seed: int | str = 0,
                  stream_name: object = 0, capacities: Sequence[int] | None = None) -> Assigner:
    try:
        cls = _CLASSES[strategy]
    except KeyError:
        raise ValueError(f"unknown strategy {strategy!r}; expected one of {STRATEGIES}") from None
    return cls(universe, seed, stream_name, capacities)


def assign_next(state: Assigner | ImplicitRandom) -> str:
    return state.assign_next()


def stretch(state: Assigner | ImplicitRandom) -> StretchReport:
    return state.stretch()


# --- universes and comparison -------------------------------------------------

def parse_universe(lines: Iterable[str]) -> list[str]:
    """Bins from newline signatures or ``length=L [pattern=P] [counts=L:6,...]`` lines."""
    out: list[str] = []
    for raw in lines:
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            out.append(line)
            continue
        fields = dict(part.split("=", 1) for part in line.split())
        length = int(fields["length"])
        pattern = parse_pattern(fields["pattern"]) if "pattern" in fields else None
        counts = None
        if "counts" in fields:
            counts = {}
            for item in fields["counts"].split(","):
                sym, n = item.split(":")
                counts[sym] = int(n)
        out.extend(enumerate_constrained_bins(length, pattern, counts, limit=MAX_UNIVERSE))
    if len(out) > MAX_UNIVERSE:
        raise ValueError(f"universe larger than {MAX_UNIVERSE} bins")
    return out


NOTES = {
    "round_robin": {"space": "O(n)", "time": "O(1)"},
    "density_ordered": {"space": "O(n)", "time": "O(log n)"},
    "random": {"space": "O(1)", "time": "O(1)"},
    "two_choices": {"space": "O(n)", "time": "O(1)"},
}


@dataclass(frozen=True)
class ComparisonRow:
    strategy: str
    users: int
    bins: int
    expected_density: Fraction
    max_count: float
    stretch: float
    reports: tuple[StretchReport, ...]

    @property
    def notes(self) -> dict:
        return NOTES[self.strategy]


def strategy_comparison(universe: Sequence[str], users: int, seeds: Sequence[int | str],
                        strategies: Sequence[str] = STRATEGIES) -> list[ComparisonRow]:
    """Run every strategy on the same universe and seeds; report medians over seeds."""
    rows = []
    for name in strategies:
        reports = []
        for seed in seeds:
            state = make_assigner(name, universe, seed)
            state.assign(users)
            reports.append(state.stretch())
        rows.append(ComparisonRow(
            name, users, len(universe), reports[0].expected_density,
            statistics.median(r.max_count for r in reports),
            statistics.median(r.stretch for r in reports),
            tuple(reports),
        ))
    return rows


def comparison_csv(rows: Sequence[ComparisonRow]) -> str:
    lines = ["strategy,users,bins,expected_density_num,expected_density_den,max_count,stretch"]
    for r in rows:
        lines.append(f"{r.strategy},{r.users},{r.bins},{r.expected_density.numerator},"
                     f"{r.expected_density.denominator},{r.max_count:g},{r.stretch:.6f}")
    return "\n".join(lines) + "\n"
