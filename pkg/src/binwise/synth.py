"""Seeded synthetic corpora with Zipf-distributed popularity.

No breached data ships with the package, so these stand in for it. Bins
are drawn with a bias toward lowercase and digits and toward lengths 6-8,
then ranked at random so that popular bins are not necessarily small ones.
"""

from __future__ import annotations

from collections import Counter

import numpy as np

from .bins import CLASS_CHARS, SYMBOLS
from .corpus import Corpus

# Human-ish class mix and length profile; only the shape matters.
CLASS_BIAS = np.array([0.55, 0.08, 0.30, 0.07])
LENGTH_WEIGHTS = {1: 1, 2: 1, 3: 2, 4: 4, 5: 6, 6: 14, 7: 14, 8: 18, 9: 10, 10: 8, 11: 4, 12: 3}

_CODES = {sym: np.frombuffer(CLASS_CHARS[sym].encode("ascii"), dtype=np.uint8) for sym in SYMBOLS}


def zipf_weights(n: int, exponent: float = 1.0) -> np.ndarray:
    w = 1.0 / np.arange(1, n + 1) ** exponent
    return w / w.sum()


def random_signatures(rng: np.random.Generator, n: int, l_max: int) -> list[str]:
    """``n`` distinct signatures of length at most ``l_max``."""
    lengths = np.array([l for l in LENGTH_WEIGHTS if l <= l_max] or [l_max])
    lw = np.array([LENGTH_WEIGHTS.get(int(l), 1) for l in lengths], dtype=float)
    lw /= lw.sum()
    seen: dict[str, None] = {}
    tries = 0
    while len(seen) < n:
        tries += 1
        if tries > 50 * n + 1000:
            raise ValueError(f"cannot draw {n} distinct signatures up to length {l_max}")
        length = int(rng.choice(lengths, p=lw))
        sig = "".join(SYMBOLS[i] for i in rng.choice(4, size=length, p=CLASS_BIAS))
        seen.setdefault(sig, None)
    return list(seen)


def passwords_in_bin(rng: np.random.Generator, signature: str, n: int) -> list[str]:
    """``n`` uniform random passwords from one bin (duplicates possible)."""
    cols = [_CODES[c][rng.integers(0, len(_CODES[c]), size=n)] for c in signature]
    block = np.ascontiguousarray(np.stack(cols, axis=1))
    return [row.decode("ascii") for row in block.view(f"S{len(signature)}").ravel()]


def zipf_bin_corpus(seed: int, total: int, n_bins: int = 200, l_max: int = 8,
                    exponent: float = 1.0) -> Corpus:
    """``total`` passwords whose bins follow a Zipf law over ``n_bins`` bins."""
    rng = np.random.default_rng(seed)
    sigs = random_signatures(rng, n_bins, l_max)
    rng.shuffle(sigs)
    per_bin = rng.multinomial(total, zipf_weights(n_bins, exponent))
    counts: Counter = Counter()
    for sig, n in zip(sigs, per_bin):
        if n:
            counts.update(passwords_in_bin(rng, sig, int(n)))
    return Corpus(counts)


def zipf_password_corpus(seed: int, total: int, pool: int = 20_000, n_bins: int = 300,
                         l_max: int = 10, exponent: float = 1.0) -> Corpus:
    """``total`` draws from a pool of distinct passwords with Zipf popularity."""
    rng = np.random.default_rng(seed)
    sigs = random_signatures(rng, n_bins, l_max)
    which = rng.multinomial(pool, zipf_weights(n_bins, 0.8))
    distinct: dict[str, None] = {}
    for sig, n in zip(sigs, which):
        if n:
            distinct.update(dict.fromkeys(passwords_in_bin(rng, sig, int(n))))
    words = list(distinct)
    rng.shuffle(words)
    draws = rng.multinomial(total, zipf_weights(len(words), exponent))
    return Corpus(Counter({w: int(n) for w, n in zip(words, draws) if n}))


def split(corpus: Corpus, seed: int, test_share: float = 0.5) -> tuple[Corpus, Corpus]:
    """Randomly split every password's multiplicity between two corpora."""
    rng = np.random.default_rng(seed)
    a: Counter = Counter()
    b: Counter = Counter()
    for password, n in corpus.records():
        k = int(rng.binomial(n, test_share))
        if n - k:
            a[password] = n - k
        if k:
            b[password] = k
    return Corpus(a), Corpus(b)
