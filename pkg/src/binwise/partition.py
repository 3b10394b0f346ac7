"""Exact partition arithmetic: densities, effort plans and expected success.

Every quantity is an unbounded Python int or a :class:`fractions.Fraction`.
Capacities routinely exceed 95**16, so densities are compared by
cross-multiplication and never turned into floats on a decision path.
"""

from __future__ import annotations

import functools
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence


class PartitionError(ValueError):
    pass


class UnknownPartitionError(PartitionError, KeyError):
    pass


class InstanceTooLargeError(PartitionError):
    pass


@dataclass(frozen=True)
class Partition:
    id: str
    capacity: int
    count: int

    def __post_init__(self):
        if self.capacity < 1:
            raise PartitionError(f"partition {self.id!r}: capacity must be >= 1, got {self.capacity}")
        if self.count < 0:
            raise PartitionError(f"partition {self.id!r}: count must be >= 0, got {self.count}")

    @property
    def density(self) -> Fraction:
        return Fraction(self.count, self.capacity)

    def probability(self, total_count: int) -> Fraction:
        return Fraction(self.count, total_count)


@dataclass(frozen=True)
class PartitionModel:
    """A set of non-overlapping partitions.

    ``total_capacity`` may exceed the sum of partition capacities; the
    difference is the unutilized remainder of the search space (e.g. all the
    bins no training password fell into). ``excluded_count`` records
    passwords that were seen but could not be placed in the model.
    """

    partitions: tuple[Partition, ...]
    total_capacity: int
    excluded_count: int = 0
    _index: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        index = {}
        for p in self.partitions:
            if p.id in index:
                raise PartitionError(f"duplicate partition id {p.id!r}")
            index[p.id] = p
        object.__setattr__(self, "_index", index)
        covered = sum(p.capacity for p in self.partitions)
        if self.total_capacity < covered:
            raise PartitionError(
                f"total_capacity {self.total_capacity} smaller than partition capacities {covered}"
            )

    @classmethod
    def from_partitions(cls, partitions: Iterable[Partition], total_capacity: int | None = None,
                        excluded_count: int = 0) -> PartitionModel:
        parts = tuple(partitions)
        if total_capacity is None:
            total_capacity = sum(p.capacity for p in parts)
        return cls(parts, total_capacity, excluded_count)

    @classmethod
    def from_lists(cls, capacities: Sequence[int], counts: Sequence[int],
                   ids: Sequence[str] | None = None) -> PartitionModel:
        if len(capacities) != len(counts):
            raise PartitionError("capacities and counts differ in length")
        if ids is None:
            width = len(str(len(capacities)))
            ids = [f"p{i:0{width}d}" for i in range(len(capacities))]
        return cls.from_partitions(Partition(i, c, n) for i, c, n in zip(ids, capacities, counts))

    @property
    def total_count(self) -> int:
        return sum(p.count for p in self.partitions)

    @property
    def covered_capacity(self) -> int:
        return sum(p.capacity for p in self.partitions)

    @property
    def uncovered_capacity(self) -> int:
        return self.total_capacity - self.covered_capacity

    def __len__(self):
        return len(self.partitions)

    def __iter__(self):
        return iter(self.partitions)

    def __contains__(self, pid):
        return pid in self._index

    def __getitem__(self, pid: str) -> Partition:
        try:
            return self._index[pid]
        except KeyError:
            raise UnknownPartitionError(pid) from None

    def to_json(self) -> str:
        return json.dumps(model_to_dict(self), indent=2)

    @classmethod
    def from_json(cls, text: str) -> PartitionModel:
        return model_from_dict(json.loads(text))


def model_to_dict(model: PartitionModel) -> dict:
    out = {
        "partitions": [
            {"id": p.id, "capacity": str(p.capacity), "count": str(p.count)} for p in model.partitions
        ],
        "total_count": str(model.total_count),
        "total_capacity": str(model.total_capacity),
    }
    if model.excluded_count:
        out["excluded_count"] = str(model.excluded_count)
    return out


def model_from_dict(data: dict) -> PartitionModel:
    parts = [Partition(str(p["id"]), int(p["capacity"]), int(p["count"])) for p in data["partitions"]]
    model = PartitionModel(tuple(parts), int(data["total_capacity"]), int(data.get("excluded_count", 0)))
    if "total_count" in data and int(data["total_count"]) != model.total_count:
        raise PartitionError(
            f"total_count {data['total_count']} does not match partition sum {model.total_count}"
        )
    return model


def compare_density(a: Partition, b: Partition) -> int:
    """Return 1 if ``a`` is denser, -1 if ``b`` is denser, 0 if equal."""
    lhs = a.count * b.capacity
    rhs = b.count * a.capacity
    return (lhs > rhs) - (lhs < rhs)


def _density_first(a: Partition, b: Partition) -> int:
    c = compare_density(b, a)
    if c:
        return c
    if a.count != b.count:
        return -1 if a.count > b.count else 1
    return (a.id > b.id) - (a.id < b.id)


def _count_first(a: Partition, b: Partition) -> int:
    if a.count != b.count:
        return -1 if a.count > b.count else 1
    return (a.id > b.id) - (a.id < b.id)


def density_order(partitions: Iterable[Partition]) -> list[Partition]:
    """Sort densest first; ties go to the larger count, then the smaller id."""
    return sorted(partitions, key=functools.cmp_to_key(_density_first))


def probability_order(partitions: Iterable[Partition]) -> list[Partition]:
    return sorted(partitions, key=functools.cmp_to_key(_count_first))


@dataclass(frozen=True)
class AttackPlan:
    """Efforts per partition in exploration order.

    ``clamped`` is set when the requested budget exceeded the model's
    capacity and was cut down to it.
    """

    steps: tuple[tuple[str, int], ...]
    total_budget: int
    clamped: bool = False

    @property
    def order(self) -> list[str]:
        return [pid for pid, _ in self.steps]

    @property
    def efforts(self) -> dict[str, int]:
        return dict(self.steps)

    @property
    def spent(self) -> int:
        return sum(e for _, e in self.steps)

    def frontier(self, model: PartitionModel) -> tuple[str, Fraction] | None:
        """The partially explored partition and its explored fraction, if any."""
        for pid, effort in self.steps:
            cap = model[pid].capacity
            if 0 < effort < cap:
                return pid, Fraction(effort, cap)
        return None

    def fully_explored(self, model: PartitionModel) -> int:
        """Number of partitions explored completely."""
        return sum(1 for pid, effort in self.steps if effort == model[pid].capacity)


def _greedy(ordered: Sequence[Partition], budget: int) -> AttackPlan:
    if budget < 0:
        raise PartitionError(f"budget must be >= 0, got {budget}")
    covered = sum(p.capacity for p in ordered)
    clamped = budget > covered
    # The uncovered remainder of the space is not a partition of the model,
    # so a plan can only spend what the partitions hold.
    remaining = min(budget, covered)
    steps = []
    for p in ordered:
        effort = min(p.capacity, remaining)
        remaining -= effort
        steps.append((p.id, effort))
    return AttackPlan(tuple(steps), budget, clamped)


def plan_density_order(model: PartitionModel, budget: int) -> AttackPlan:
    return _greedy(density_order(model.partitions), budget)


def plan_probability_order(model: PartitionModel, budget: int) -> AttackPlan:
    return _greedy(probability_order(model.partitions), budget)


@dataclass(frozen=True, order=True)
class ExpectedSuccess:
    value: Fraction

    @property
    def approx(self) -> float:
        return float(self.value)

    @property
    def log2(self) -> float:
        if self.value <= 0:
            return -math.inf
        return math.log2(self.value.numerator) - math.log2(self.value.denominator)

    def __float__(self):
        return self.approx

    def __str__(self):
        return f"{self.value} (~2^{self.log2:.2f})"


def expected_success(model: PartitionModel, plan: AttackPlan | dict[str, int]) -> ExpectedSuccess:
    """Sum of effort times density over the plan's partitions."""
    steps = plan.steps if isinstance(plan, AttackPlan) else plan.items()
    total = Fraction(0)
    for pid, effort in steps:
        p = model[pid]
        if not 0 <= effort <= p.capacity:
            raise PartitionError(f"effort {effort} out of range for partition {pid!r}")
        if effort:
            total += Fraction(effort * p.count, p.capacity)
    return ExpectedSuccess(total)


def max_expected_success(model: PartitionModel, budget: int) -> ExpectedSuccess:
    """Closed form of the greedy optimum: whole dense partitions plus a fractional frontier."""
    ordered = density_order(model.partitions)
    budget = min(budget, model.covered_capacity)
    spent = 0
    cracked = 0
    for p in ordered:
        if spent + p.capacity > budget:
            return ExpectedSuccess(cracked + Fraction((budget - spent) * p.count, p.capacity))
        spent += p.capacity
        cracked += p.count
    return ExpectedSuccess(Fraction(cracked))


def uniform_expected_success(total_count: int, total_capacity: int, budget: int) -> ExpectedSuccess:
    if total_capacity < 1:
        raise PartitionError("total_capacity must be >= 1")
    return ExpectedSuccess(Fraction(total_count * budget, total_capacity))


ORACLE_MAX_PARTITIONS = 5
ORACLE_MAX_CAPACITY = 64


def _oracle_tables(model: PartitionModel) -> tuple[list[int], list[list[int]], int]:
    parts = model.partitions
    if len(parts) > ORACLE_MAX_PARTITIONS or model.covered_capacity > ORACLE_MAX_CAPACITY:
        raise InstanceTooLargeError(
            f"oracle limited to n <= {ORACLE_MAX_PARTITIONS} and capacity <= {ORACLE_MAX_CAPACITY}"
        )
    caps = [p.capacity for p in parts]
    scale = math.lcm(*caps) if caps else 1
    # best[b]: highest scaled value of any allocation over the partitions so
    # far that spends exactly b; None where b is unreachable.
    best: list[int | None] = [0]
    choices = []
    for p in parts:
        weight = p.count * (scale // p.capacity)
        nxt: list[int | None] = [None] * (len(best) + p.capacity)
        pick = [0] * len(nxt)
        for b, base in enumerate(best):
            if base is None:
                continue
            for a in range(p.capacity + 1):
                v = base + a * weight
                if nxt[b + a] is None or v > nxt[b + a]:
                    nxt[b + a], pick[b + a] = v, a
        best = nxt
        choices.append(pick)
    return best, choices, scale


def oracle_optimal_allocation(model: PartitionModel, budget: int) -> tuple[ExpectedSuccess, dict[str, int]]:
    """Best value over every integer allocation that spends exactly ``budget``.

    Only for tiny instances; used to check the greedy planner. A dynamic
    program over partitions and spent budget covers all allocations without
    listing them; values are scaled to a common denominator so it runs on
    integers.
    """
    best, choices, scale = _oracle_tables(model)
    budget = min(budget, model.covered_capacity)
    witness = {}
    left = budget
    for p, pick in zip(reversed(model.partitions), reversed(choices)):
        witness[p.id] = pick[left]
        left -= pick[left]
    return ExpectedSuccess(Fraction(best[budget], scale)), {p.id: witness[p.id] for p in model.partitions}


def oracle_best_by_budget(model: PartitionModel) -> list[ExpectedSuccess]:
    """Oracle optimum for every budget 0..covered capacity in one pass."""
    best, _, scale = _oracle_tables(model)
    return [ExpectedSuccess(Fraction(v, scale)) for v in best]


def prefix_densities(ordered: Sequence[Partition]) -> list[Fraction]:
    """Running density of the first j partitions, j = 1..n."""
    out = []
    count = cap = 0
    for p in ordered:
        count += p.count
        cap += p.capacity
        out.append(Fraction(count, cap))
    return out


def proportional_counts(total_count: int, capacities: Sequence[int]) -> list[int]:
    """Counts proportional to capacities, or ValueError if that needs fractions."""
    space = sum(capacities)
    out = []
    for c in capacities:
        q, r = divmod(total_count * c, space)
        if r:
            raise ValueError("counts cannot be exactly proportional to these capacities")
        out.append(q)
    return out
