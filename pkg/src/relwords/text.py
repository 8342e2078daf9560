"""Tokenization and distinctive-bigram detection.

Texts are lowercased and split on every non-alphanumeric character. Word
pairs that co-occur adjacently far more often than chance are merged into
single ``first_second`` tokens so they act as one feature downstream.
"""

from __future__ import annotations

import re
from collections import Counter
from dataclasses import dataclass

import numpy as np

JOINER = "_"

# Letters and digits only; underscore is a separator in raw text but is the
# joiner of merged bigrams, so re-tokenization of merged output keeps it.
_TOKEN = re.compile(r"[^\W_]+")
_TOKEN_WITH_JOINER = re.compile(r"\w+")


@dataclass(frozen=True)
class TokenStream:
    """The ordered tokens of one document."""

    doc_id: str
    tokens: tuple[str, ...]

    def __len__(self) -> int:
        return len(self.tokens)


@dataclass(frozen=True)
class BigramCandidate:
    first: str
    second: str
    joint_count: int
    score: float


def normalize_tokenize(text: str, doc_id: str = "", *, keep_joiner: bool = False) -> TokenStream:
    """Lowercase and split a text into alphanumeric tokens.

    Every character that is not a letter or digit separates tokens; empty
    tokens are dropped and order is preserved. With ``keep_joiner`` the
    bigram joiner counts as alphanumeric, which makes tokenization idempotent
    on merged output.
    """
    pattern = _TOKEN_WITH_JOINER if keep_joiner else _TOKEN
    return TokenStream(doc_id, tuple(pattern.findall(text.lower())))


def token_spans(text: str) -> list[tuple[int, int, str]]:
    """Raw tokens of a text with their (start, end) positions in it.

    Tokens are lowercased; positions refer to the original string, which lets
    renderers wrap tokens in place without touching other characters.
    """
    return [(m.start(), m.end(), m.group().lower()) for m in _TOKEN.finditer(text)]


def _corpus_counts(streams: list[TokenStream]) -> tuple[Counter, Counter, int]:
    """Corpus-wide unigram counts, adjacent ordered-pair counts, total tokens."""
    unigrams: Counter = Counter()
    pairs: Counter = Counter()
    total = 0
    for stream in streams:
        tokens = stream.tokens
        unigrams.update(tokens)
        pairs.update(zip(tokens, tokens[1:]))
        total += len(tokens)
    return unigrams, pairs, total


def score_bigrams(streams: list[TokenStream], discount: int = 5) -> list[BigramCandidate]:
    """Score every adjacent word pair in the corpus.

    score(a, b) = (count(a b) - discount) * W / (count(a) * count(b)) with W
    the corpus token count; pairs adjacent at most ``discount`` times are
    omitted. The discount suppresses one-off co-occurrences of rare words.
    """
    if not streams:
        raise ValueError("empty corpus")
    unigrams, pairs, total = _corpus_counts(streams)
    candidates = []
    for (first, second), joint in sorted(pairs.items()):
        if joint <= discount:
            continue
        score = (joint - discount) * total / (unigrams[first] * unigrams[second])
        candidates.append(BigramCandidate(first, second, joint, score))
    return candidates


def select_bigrams(
    candidates: list[BigramCandidate],
    streams: list[TokenStream],
    *,
    n_random: int | None = None,
    seed: int = 0,
) -> set[tuple[str, str]]:
    """Keep the candidates scoring far above randomly chosen adjacent pairs.

    The baseline is the undiscounted score of ``n_random`` pairs sampled
    uniformly (with replacement, seeded) from all pairs adjacent anywhere in
    the corpus; the cut is mean + 2 std of those baseline scores. Defaults to
    ``n_random = 10 * len(candidates)``.
    """
    if not candidates:
        return set()
    unigrams, pairs, total = _corpus_counts(streams)
    if len(unigrams) < 2 or not pairs:
        return set()
    universe = sorted(pairs)
    if n_random is None:
        n_random = 10 * len(candidates)
    rng = np.random.default_rng(seed)
    picks = rng.integers(0, len(universe), size=n_random)
    baseline = np.empty(n_random, dtype=float)
    for row, pick in enumerate(picks):
        first, second = universe[pick]
        baseline[row] = pairs[(first, second)] * total / (unigrams[first] * unigrams[second])
    threshold = baseline.mean() + 2.0 * baseline.std()
    return {(c.first, c.second) for c in candidates if c.score > threshold}


def apply_bigrams(stream: TokenStream, selected: set[tuple[str, str]]) -> TokenStream:
    """Merge selected adjacent pairs into single joined tokens.

    Greedy left-to-right scan; a token consumed by a merge cannot start
    another merge.
    """
    if not selected:
        return stream
    tokens = stream.tokens
    merged: list[str] = []
    i = 0
    while i < len(tokens):
        if i + 1 < len(tokens) and (tokens[i], tokens[i + 1]) in selected:
            merged.append(tokens[i] + JOINER + tokens[i + 1])
            i += 2
        else:
            merged.append(tokens[i])
            i += 1
    return TokenStream(stream.doc_id, tuple(merged))


def write_bigrams_csv(
    candidates: list[BigramCandidate],
    selected: set[tuple[str, str]],
    path,
) -> None:
    """Debug dump of the selected bigrams as ``first,second,score`` CSV."""
    rows = sorted(
        (c for c in candidates if (c.first, c.second) in selected),
        key=lambda c: (-c.score, c.first, c.second),
    )
    with open(path, "w", encoding="utf-8", newline="\n") as handle:
        handle.write("first,second,score\n")
        for cand in rows:
            handle.write(f"{cand.first},{cand.second},{cand.score:.12g}\n")
