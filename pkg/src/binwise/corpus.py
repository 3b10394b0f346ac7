"""Password corpus ingestion.

Two input formats are read:

* ``raw``: one password per line; repeated lines add multiplicity.
* ``freq``: ``count<TAB>password`` per line.

Lines are decoded as latin-1 so that every byte survives to classification,
which then rejects anything outside printable ASCII.
"""

from __future__ import annotations

import io
import itertools
import logging
import os
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import IO, Iterable, Iterator

from .bins import ClassificationError, classify

log = logging.getLogger(__name__)

FORMATS = ("raw", "freq")
CHUNK_LINES = 200_000


@dataclass
class Corpus:
    counts: Counter = field(default_factory=Counter)
    skipped: Counter = field(default_factory=Counter)

    @property
    def total(self) -> int:
        return sum(self.counts.values())

    @property
    def distinct(self) -> int:
        return len(self.counts)

    @property
    def skipped_lines(self) -> int:
        return sum(self.skipped.values())

    def merge(self, other: Corpus) -> Corpus:
        self.counts.update(other.counts)
        self.skipped.update(other.skipped)
        return self

    def records(self) -> Iterator[tuple[str, int]]:
        return iter(self.counts.items())

    @classmethod
    def from_counts(cls, counts: dict[str, int] | Iterable[tuple[str, int]]) -> Corpus:
        corpus = cls()
        items = counts.items() if isinstance(counts, dict) else counts
        for password, n in items:
            _add(corpus, password, n)
        return corpus

    @classmethod
    def from_passwords(cls, passwords: Iterable[str]) -> Corpus:
        return cls.from_counts((p, 1) for p in passwords)


def _add(corpus: Corpus, password: str, n: int) -> None:
    if n < 1:
        corpus.skipped["nonpositive-count"] += 1
        return
    try:
        classify(password)
    except ClassificationError as exc:
        corpus.skipped["empty" if exc.index < 0 else "invalid-char"] += 1
        return
    corpus.counts[password] += n


def _parse_lines(lines: Iterable[str], fmt: str) -> Corpus:
    corpus = Corpus()
    for line in lines:
        line = line.rstrip("\r\n") if fmt == "freq" else line.rstrip("\n").removesuffix("\r")
        if fmt == "raw":
            _add(corpus, line, 1)
            continue
        count, sep, password = line.partition("\t")
        count = count.strip()
        if not sep or not count.isdigit():
            corpus.skipped["malformed"] += 1
            continue
        _add(corpus, password, int(count))
    return corpus


def _chunks(handle: IO[str], size: int) -> Iterator[list[str]]:
    while True:
        chunk = list(itertools.islice(handle, size))
        if not chunk:
            return
        yield chunk


def default_workers() -> int:
    try:
        return max(1, int(os.environ.get("BINWISE_THREADS", "1")))
    except ValueError:
        return 1


def ingest(source: str | os.PathLike | IO[str] | Iterable[str], fmt: str = "raw",
           workers: int | None = None) -> Corpus:
    """Read a corpus from a path, an open text handle or an iterable of lines.

    With ``workers > 1`` the lines are parsed in chunks on a process pool;
    per-chunk counters merge associatively so the result is identical.
    """
    if fmt not in FORMATS:
        raise ValueError(f"unknown corpus format {fmt!r}; expected one of {FORMATS}")
    workers = default_workers() if workers is None else max(1, workers)
    if isinstance(source, (str, os.PathLike)):
        with open(Path(source), encoding="latin-1", newline="") as handle:
            return _ingest_handle(handle, fmt, workers)
    if isinstance(source, io.IOBase):
        return _ingest_handle(source, fmt, workers)
    return _parse_lines(source, fmt)


def _ingest_handle(handle: IO[str], fmt: str, workers: int) -> Corpus:
    if workers == 1:
        corpus = _parse_lines(handle, fmt)
    else:
        corpus = Corpus()
        with ProcessPoolExecutor(max_workers=workers) as pool:
            for part in pool.map(_parse_lines, _chunks(handle, CHUNK_LINES), itertools.repeat(fmt)):
                corpus.merge(part)
    if corpus.skipped:
        log.info("skipped %d lines: %s", corpus.skipped_lines, dict(corpus.skipped))
    return corpus


def read_word_list(path: str | os.PathLike) -> list[str]:
    """Newline list, order preserved, blank lines dropped."""
    with open(path, encoding="latin-1") as handle:
        return [line.rstrip("\r\n") for line in handle if line.strip("\r\n")]
