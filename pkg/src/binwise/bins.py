"""Character-class bins over printable ASCII.

A bin signature is a string over ``L`` (lowercase), ``U`` (uppercase),
``D`` (digit) and ``S`` (the 33 remaining printable characters, space
included), one symbol per password position.
"""

from __future__ import annotations

import functools
import itertools
import random
import re
import string
from dataclasses import dataclass
from typing import Callable, Iterator, Mapping

CLASS_CHARS = {
    "L": string.ascii_lowercase,
    "U": string.ascii_uppercase,
    "D": string.digits,
    "S": "".join(chr(c) for c in range(32, 127) if not chr(c).isalnum()),
}
CLASS_SIZES = {k: len(v) for k, v in CLASS_CHARS.items()}
ALPHABET_SIZE = sum(CLASS_SIZES.values())
SYMBOLS = "LUDS"
# Lexicographic order of signatures follows the ASCII order of the symbols.
LEX_SYMBOLS = "".join(sorted(SYMBOLS))
SAMPLE_WEIGHTS = tuple(CLASS_SIZES[c] for c in SYMBOLS)

MAX_SUM_CHECK_LENGTH = 12
MAX_ENUMERATION = 10**6

_CLASSIFY_TABLE = str.maketrans({ch: cls for cls, chars in CLASS_CHARS.items() for ch in chars})
_INVALID = re.compile(r"[^ -~]")


class ClassificationError(ValueError):
    def __init__(self, password: str, index: int):
        self.password = password
        self.index = index
        if index < 0:
            super().__init__("empty password")
        else:
            super().__init__(f"non-printable or non-ASCII character {password[index]!r} at index {index}")


class PatternSyntaxError(ValueError):
    def __init__(self, text: str, pos: int, message: str):
        self.text = text
        self.pos = pos
        super().__init__(f"{message} at position {pos} in {text!r}")


class EnumerationTooLargeError(ValueError):
    pass


def classify(password: str) -> str:
    if not password:
        raise ClassificationError(password, -1)
    bad = _INVALID.search(password)
    if bad:
        raise ClassificationError(password, bad.start())
    return password.translate(_CLASSIFY_TABLE)


def is_signature(text: str) -> bool:
    return bool(text) and all(c in CLASS_SIZES for c in text)


def capacity(signature: str) -> int:
    if not is_signature(signature):
        raise ValueError(f"not a bin signature: {signature!r}")
    # Multiply by class run counts rather than per position.
    return (26 ** (signature.count("L") + signature.count("U"))
            * 10 ** signature.count("D") * 33 ** signature.count("S"))


def search_space_size(l_max: int) -> tuple[int, int]:
    """Exact number of passwords of length 1..l_max, and the 95**l_max approximation."""
    if l_max < 1:
        raise ValueError("l_max must be >= 1")
    exact = (ALPHABET_SIZE ** (l_max + 1) - ALPHABET_SIZE) // (ALPHABET_SIZE - 1)
    return exact, ALPHABET_SIZE**l_max


def all_signatures(length: int, symbols: str = LEX_SYMBOLS) -> Iterator[str]:
    """Every signature of ``length`` over ``symbols``, in the order given."""
    for combo in itertools.product(symbols, repeat=length):
        yield "".join(combo)


def capacity_sum_check(length: int) -> int:
    if length > MAX_SUM_CHECK_LENGTH:
        raise EnumerationTooLargeError(f"length {length} exceeds enumeration guard {MAX_SUM_CHECK_LENGTH}")
    return sum(capacity(s) for s in all_signatures(length))


# --- patterns ---------------------------------------------------------------

INF = None  # upper bound for unbounded quantifiers


@dataclass(frozen=True)
class Term:
    symbol: str
    lo: int
    hi: int | None

    def __str__(self):
        if (self.lo, self.hi) == (1, 1):
            return self.symbol
        if (self.lo, self.hi) == (1, None):
            return self.symbol + "+"
        if (self.lo, self.hi) == (0, None):
            return self.symbol + "*"
        if (self.lo, self.hi) == (0, 1):
            return self.symbol + "?"
        hi = "" if self.hi is None else self.hi
        return f"{self.symbol}{{{self.lo},{hi}}}"


@dataclass(frozen=True)
class BinPattern:
    terms: tuple[Term, ...]
    text: str = ""

    def __str__(self):
        return "".join(str(t) for t in self.terms)

    def matches(self, signature: str) -> bool:
        return matches(self, signature)

    def min_length(self) -> int:
        return sum(t.lo for t in self.terms)


_QUANT = re.compile(r"\{(\d+)(?:,(\d*))?\}")


def parse_pattern(text: str) -> BinPattern:
    """Parse ``U1L+D+``, ``L*S1L*``, ``L{1,8}``, ``D?`` and plain ``LLD``.

    A run of digits right after a symbol is the subscript form: ``L7`` means
    exactly seven ``L``.
    """
    terms = []
    i = 0
    n = len(text)
    while i < n:
        ch = text[i]
        if ch.isspace():
            i += 1
            continue
        if ch not in CLASS_SIZES:
            raise PatternSyntaxError(text, i, f"expected one of L,U,D,S, got {ch!r}")
        i += 1
        lo, hi = 1, 1
        if i < n:
            nxt = text[i]
            if nxt == "+":
                lo, hi = 1, INF
                i += 1
            elif nxt == "*":
                lo, hi = 0, INF
                i += 1
            elif nxt == "?":
                lo, hi = 0, 1
                i += 1
            elif nxt == "{":
                m = _QUANT.match(text, i)
                if not m:
                    raise PatternSyntaxError(text, i, "malformed {i,j} quantifier")
                lo = int(m.group(1))
                if m.group(2) is None:
                    hi = lo
                elif m.group(2) == "":
                    hi = INF
                else:
                    hi = int(m.group(2))
                if hi is not INF and hi < lo:
                    raise PatternSyntaxError(text, i, f"quantifier lower bound {lo} exceeds upper bound {hi}")
                i = m.end()
            elif nxt.isdigit():
                j = i
                while j < n and text[j].isdigit():
                    j += 1
                lo = hi = int(text[i:j])
                i = j
        terms.append(Term(ch, lo, hi))
    if not terms:
        raise PatternSyntaxError(text, 0, "empty pattern")
    return BinPattern(tuple(terms), text)


def _as_pattern(pattern: BinPattern | str) -> BinPattern:
    return parse_pattern(pattern) if isinstance(pattern, str) else pattern


def matches(pattern: BinPattern | str, signature: str) -> bool:
    """Whole-signature match by memoised backtracking over (term, position)."""
    terms = _as_pattern(pattern).terms
    n = len(signature)

    @functools.lru_cache(maxsize=None)
    def go(t: int, pos: int) -> bool:
        if t == len(terms):
            return pos == n
        term = terms[t]
        run = 0
        while pos + run < n and signature[pos + run] == term.symbol:
            run += 1
        hi = run if term.hi is None else min(run, term.hi)
        return any(go(t + 1, pos + k) for k in range(term.lo, hi + 1))

    return go(0, 0)


def _nfa_step(terms: tuple[Term, ...], states: frozenset, symbol: str) -> frozenset:
    # A state (t, k) means k symbols of term t consumed so far.
    out = set()
    for t, k in _closure(terms, states):
        if t < len(terms):
            term = terms[t]
            if term.symbol == symbol and (term.hi is None or k < term.hi):
                out.add((t, k + 1))
    return frozenset(out)


def _closure(terms, states):
    seen = set(states)
    stack = list(states)
    while stack:
        t, k = stack.pop()
        if t < len(terms) and k >= terms[t].lo:
            nxt = (t + 1, 0)
            if nxt not in seen:
                seen.add(nxt)
                stack.append(nxt)
    return seen


def _accepting(terms, states) -> bool:
    return any(t == len(terms) for t, _ in _closure(terms, states))


ClassCounts = Mapping[str, "int | tuple[int, int]"]


def _count_bounds(counts: ClassCounts | None) -> dict[str, tuple[int, int]]:
    bounds = {}
    for sym in SYMBOLS:
        spec = (counts or {}).get(sym)
        if spec is None:
            bounds[sym] = (0, 10**9)
        elif isinstance(spec, int):
            bounds[sym] = (spec, spec)
        else:
            bounds[sym] = (spec[0], spec[1])
    return bounds


def enumerate_constrained_bins(length: int, pattern: BinPattern | str | None = None,
                               counts: ClassCounts | None = None,
                               limit: int = MAX_ENUMERATION) -> list[str]:
    """All length-``length`` signatures matching ``pattern`` and per-class ``counts``.

    ``counts`` maps a class symbol to an exact count or an inclusive
    ``(lo, hi)`` range. Output is in lexicographic order. Raises
    :class:`EnumerationTooLargeError` once more than ``limit`` bins match.
    """
    terms = _as_pattern(pattern).terms if pattern is not None else None
    bounds = _count_bounds(counts)
    if sum(lo for lo, _ in bounds.values()) > length:
        return []
    out: list[str] = []
    used = dict.fromkeys(SYMBOLS, 0)
    prefix: list[str] = []
    start = frozenset({(0, 0)})

    def feasible(remaining: int) -> bool:
        need = sum(max(0, bounds[s][0] - used[s]) for s in SYMBOLS)
        room = sum(max(0, bounds[s][1] - used[s]) for s in SYMBOLS)
        return need <= remaining <= room

    def walk(states):
        remaining = length - len(prefix)
        if remaining == 0:
            if terms is None or _accepting(terms, states):
                out.append("".join(prefix))
                if len(out) > limit:
                    raise EnumerationTooLargeError(f"more than {limit} bins match")
            return
        for sym in LEX_SYMBOLS:
            if used[sym] >= bounds[sym][1]:
                continue
            nxt = None
            if terms is not None:
                nxt = _nfa_step(terms, states, sym)
                if not nxt:
                    continue
            used[sym] += 1
            prefix.append(sym)
            if feasible(remaining - 1):
                walk(nxt)
            prefix.pop()
            used[sym] -= 1

    walk(start)
    return out


def sample_bin(length: int, rng: random.Random) -> str:
    """Draw a signature with probability capacity / 95**length."""
    if length < 1:
        raise ValueError("length must be >= 1")
    return "".join(rng.choices(SYMBOLS, weights=SAMPLE_WEIGHTS, k=length))


def random_password(signature: str, rng: random.Random) -> str:
    """A uniformly random password inside the bin."""
    return "".join(rng.choice(CLASS_CHARS[c]) for c in signature)


def pattern_filter(pattern: BinPattern | str) -> Callable[[str], bool]:
    pat = _as_pattern(pattern)
    return functools.lru_cache(maxsize=None)(lambda sig: matches(pat, sig))
