"""Guess ordering for single-slot grammar templates.

A pre-terminal is a template such as ``{L6}$1``: literal characters around
one alpha slot filled from the dictionary of words of length 6. Emitting
whole templates by probability and emitting individual guesses by their
probability (template share times ``1/|W_m|``) give different block orders;
the latter always matches the template density order ``count/|W_m|``.
"""

from __future__ import annotations

import functools
import json
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Sequence

from .partition import Partition, _count_first, _density_first

_BRACED = re.compile(r"\{L(\d+)\}")
_BARE = re.compile(r"L(\d+) ?")


class GrammarError(ValueError):
    pass


class MissingDictionaryError(GrammarError, KeyError):
    pass


@dataclass(frozen=True)
class PreTerminal:
    prefix: str
    slot: int
    suffix: str
    count: int
    id: str = ""

    def __post_init__(self):
        if self.slot < 1:
            raise GrammarError("slot length must be >= 1")
        if self.count < 0:
            raise GrammarError("count must be >= 0")
        if not self.id:
            object.__setattr__(self, "id", self.template)

    @property
    def template(self) -> str:
        return f"{self.prefix}{{L{self.slot}}}{self.suffix}"

    @property
    def label(self) -> str:
        """Compact form with the slot written ``L<m>``, e.g. ``$L412``."""
        return f"{self.prefix}L{self.slot}{self.suffix}"

    def fill(self, word: str) -> str:
        return f"{self.prefix}{word}{self.suffix}"


def parse_template(text: str, count: int, id: str = "") -> PreTerminal:
    """Parse ``${L4}12`` or the bare form ``$L4 12``.

    In the bare form the first ``L<digits>`` is the slot and one following
    space, if present, only separates it from literal digits.
    """
    braced = list(_BRACED.finditer(text))
    if len(braced) > 1:
        raise GrammarError(f"template {text!r} has more than one alpha slot")
    m = braced[0] if braced else _BARE.search(text)
    if m is None:
        raise GrammarError(f"template {text!r} has no alpha slot")
    return PreTerminal(text[: m.start()], int(m.group(1)), text[m.end():], count, id)


Dictionaries = Mapping[int, Sequence[str]]


def _check(preterminals: Sequence[PreTerminal], dicts: Dictionaries) -> None:
    for pt in preterminals:
        words = dicts.get(pt.slot)
        if not words:
            raise MissingDictionaryError(f"no words of length {pt.slot} for {pt.id!r}")


def _as_partition(pt: PreTerminal, dicts: Dictionaries) -> Partition:
    return Partition(pt.id, len(dicts[pt.slot]), pt.count)


def density(pt: PreTerminal, dicts: Dictionaries) -> Fraction:
    return Fraction(pt.count, len(dicts[pt.slot]))


def _sorted(preterminals, dicts, cmp):
    _check(preterminals, dicts)
    keyed = {pt.id: pt for pt in preterminals}
    parts = sorted((_as_partition(pt, dicts) for pt in preterminals), key=functools.cmp_to_key(cmp))
    return [keyed[p.id] for p in parts]


def preterminal_probability_order(preterminals, dicts) -> list[PreTerminal]:
    return _sorted(preterminals, dicts, _count_first)


def preterminal_density_order(preterminals, dicts) -> list[PreTerminal]:
    return _sorted(preterminals, dicts, _density_first)


def expand(blocks: Sequence[PreTerminal], dicts: Dictionaries) -> list[tuple[str, str]]:
    """(pre-terminal id, guess) pairs, each block fully expanded in turn."""
    return [(pt.id, pt.fill(w)) for pt in blocks for w in dicts[pt.slot]]


def order_by_preterminal_probability(preterminals, dicts) -> list[str]:
    return [g for _, g in expand(preterminal_probability_order(preterminals, dicts), dicts)]


def order_by_preterminal_density(preterminals, dicts) -> list[str]:
    return [g for _, g in expand(preterminal_density_order(preterminals, dicts), dicts)]


def terminal_probability_blocks(preterminals, dicts) -> list[str] | None:
    """Block order from sorting every guess by its own probability.

    Equal-probability guesses from different templates are kept apart by the
    templates' tie-break, so blocks stay contiguous. Returns None if a block
    ends up split.
    """
    _check(preterminals, dicts)
    total = sum(pt.count for pt in preterminals) or 1
    rank = {pt.id: i for i, pt in enumerate(preterminal_probability_order(preterminals, dicts))}
    terminals = []
    for pt in preterminals:
        words = dicts[pt.slot]
        p = Fraction(pt.count, total) / len(words)
        for w in words:
            terminals.append((p, pt.id, pt.fill(w)))
    terminals.sort(key=lambda t: (-t[0], rank[t[1]]))
    blocks: list[str] = []
    for _, pid, _ in terminals:
        if not blocks or blocks[-1] != pid:
            if pid in blocks:
                return None
            blocks.append(pid)
    return blocks


def equivalence_check(preterminals, dicts) -> bool:
    blocks = terminal_probability_blocks(preterminals, dicts)
    return blocks == [pt.id for pt in preterminal_density_order(preterminals, dicts)]


def load_instance(text: str) -> tuple[list[PreTerminal], dict[int, list[str]]]:
    """Read ``{"preterminals": [{"template", "count", "id"?}], "dictionaries": {"4": [...]}}``."""
    data = json.loads(text)
    pts = [parse_template(p["template"], int(p["count"]), p.get("id", "")) for p in data["preterminals"]]
    ids = [pt.id for pt in pts]
    if len(set(ids)) != len(ids):
        raise GrammarError("pre-terminal ids must be unique")
    dicts = {int(k): list(v) for k, v in data["dictionaries"].items()}
    for m, words in dicts.items():
        bad = [w for w in words if len(w) != m]
        if bad:
            raise GrammarError(f"dictionary {m} holds words of another length: {bad[:3]}")
    return pts, dicts


TOY_DICTIONARIES = {
    6: ["monkey", "donkey", "jaguar", "rabbit", "turtle", "python", "falcon", "parrot"],
    5: ["tiger", "horse", "zebra", "sheep"],
    4: ["lion", "deer"],
}


def toy_instance() -> tuple[list[PreTerminal], dict[int, list[str]]]:
    pts = [
        PreTerminal("", 6, "$1", 5, "L6$1"),
        PreTerminal("", 5, "!", 3, "L5!"),
        PreTerminal("$", 4, "12", 2, "$L412"),
    ]
    return pts, {k: list(v) for k, v in TOY_DICTIONARIES.items()}
