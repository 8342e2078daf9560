"""Static report artifacts: word clouds, contrast clouds, per-document
highlighting, and term-frequency-over-time tables.

Everything here is deterministic: identical inputs produce byte-identical
SVG/HTML/CSV files. Word-cloud geometry uses a fixed-metric approximation
(character advance = 0.6 * font size) instead of real font metrics, which
keeps the layout dependency-free and verifiable.
"""

from __future__ import annotations

import html
import warnings
from dataclasses import dataclass, replace
from datetime import date, timedelta
from math import ceil, cos, hypot, sin
from pathlib import Path
from typing import Sequence
from xml.sax.saxutils import escape as xml_escape

import numpy as np

from .corpus import Corpus, Document
from .relevance import ClusterKey, RelevanceTable
from .text import JOINER, TokenStream, token_spans

MIN_FONT_PT = 10.0
MAX_FONT_PT = 48.0
CHAR_ADVANCE = 0.6  # box width per character, in units of font size

GROUP_A_COLOR = "green"
GROUP_B_COLOR = "red"

_PALETTE = (
    "#1f77b4",
    "#ff7f0e",
    "#2ca02c",
    "#d62728",
    "#9467bd",
    "#8c564b",
    "#e377c2",
    "#7f7f7f",
    "#bcbd22",
    "#17becf",
)

_SPIRAL_STEP = 0.1  # radians between candidate positions
_SPIRAL_GROWTH = 1.0  # radius gained per radian


@dataclass(frozen=True)
class CloudEntry:
    term: str
    weight: float
    font_size: float
    x: float  # box center
    y: float
    color: str

    @property
    def box(self) -> tuple[float, float, float, float]:
        """Axis-aligned bounding box (x0, y0, x1, y1)."""
        half_w = CHAR_ADVANCE * self.font_size * len(self.term) / 2.0
        half_h = self.font_size / 2.0
        return (self.x - half_w, self.y - half_h, self.x + half_w, self.y + half_h)


@dataclass(frozen=True)
class WordCloudSpec:
    entries: tuple[CloudEntry, ...]
    width: int
    height: int


def _boxes_overlap(a: tuple[float, float, float, float], b: tuple[float, float, float, float]) -> bool:
    return not (a[2] <= b[0] or b[2] <= a[0] or a[3] <= b[1] or b[3] <= a[1])


def layout_wordcloud(
    ranked: Sequence[tuple[str, float]],
    *,
    top_k: int = 50,
    width: int = 800,
    height: int = 600,
    color: str | None = None,
) -> WordCloudSpec:
    """Place the top-k ranked words on an Archimedean spiral.

    Font size is affine in the word's score (MIN_FONT_PT..MAX_FONT_PT, or
    MAX_FONT_PT for all when scores are equal). Words are placed largest
    first; each takes the first spiral position from the canvas center where
    its bounding box fits inside the canvas without touching a placed box.
    Words that fit nowhere are skipped with a warning. No randomness.
    """
    if not ranked:
        raise ValueError("nothing to lay out: empty ranking")
    chosen = [(term, weight) for term, weight in list(ranked)[:top_k] if weight > 0.0]
    if not chosen:
        raise ValueError("nothing to lay out: all scores are zero")
    chosen.sort(key=lambda entry: -entry[1])  # stable: ties keep ranking order
    weights = [w for _, w in chosen]
    w_min, w_max = min(weights), max(weights)
    span = w_max - w_min

    center_x, center_y = width / 2.0, height / 2.0
    max_radius = hypot(width, height) / 2.0
    max_steps = ceil(max_radius / (_SPIRAL_GROWTH * _SPIRAL_STEP)) + 1

    entries: list[CloudEntry] = []
    boxes: list[tuple[float, float, float, float]] = []
    for rank, (term, weight) in enumerate(chosen):
        if span > 0.0:
            size = MIN_FONT_PT + (MAX_FONT_PT - MIN_FONT_PT) * (weight - w_min) / span
        else:
            size = MAX_FONT_PT
        box_w = CHAR_ADVANCE * size * len(term)
        box_h = size
        if box_w > width or box_h > height:
            warnings.warn(f"word {term!r} does not fit the canvas; skipped")
            continue
        placed = None
        for step in range(max_steps):
            theta = step * _SPIRAL_STEP
            radius = _SPIRAL_GROWTH * theta
            x = center_x + radius * cos(theta)
            y = center_y + radius * sin(theta)
            candidate = (x - box_w / 2.0, y - box_h / 2.0, x + box_w / 2.0, y + box_h / 2.0)
            if candidate[0] < 0 or candidate[1] < 0 or candidate[2] > width or candidate[3] > height:
                continue
            if any(_boxes_overlap(candidate, other) for other in boxes):
                continue
            placed = (x, y)
            boxes.append(candidate)
            break
        if placed is None:
            warnings.warn(f"no free position for word {term!r}; skipped")
            continue
        entries.append(
            CloudEntry(
                term=term,
                weight=weight,
                font_size=size,
                x=placed[0],
                y=placed[1],
                color=color if color is not None else _PALETTE[rank % len(_PALETTE)],
            )
        )
    return WordCloudSpec(entries=tuple(entries), width=width, height=height)


def svg_markup(spec: WordCloudSpec, extra: Sequence[str] = ()) -> str:
    """Standalone SVG for a word-cloud spec; stable byte-for-byte."""
    lines = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{spec.width}" '
        f'height="{spec.height}" viewBox="0 0 {spec.width} {spec.height}">',
        f'<rect width="{spec.width}" height="{spec.height}" fill="white"/>',
    ]
    lines.extend(extra)
    for entry in spec.entries:
        lines.append(
            f'<text x="{entry.x:.2f}" y="{entry.y:.2f}" font-size="{entry.font_size:.2f}" '
            f'font-family="sans-serif" text-anchor="middle" dominant-baseline="central" '
            f'fill="{entry.color}">{xml_escape(entry.term)}</text>'
        )
    lines.append("</svg>")
    return "\n".join(lines) + "\n"


def render_svg(spec: WordCloudSpec, path) -> None:
    Path(path).write_bytes(svg_markup(spec).encode("utf-8"))


def render_contrast_cloud(
    ranked_a: Sequence[tuple[str, float]],
    ranked_b: Sequence[tuple[str, float]],
    path,
    *,
    top_k: int = 50,
    width: int = 800,
    height: int = 600,
) -> WordCloudSpec:
    """Two-group cloud: group A green in the upper half, group B red in the
    lower half, each half sized independently."""
    half = height // 2
    spec_a = layout_wordcloud(ranked_a, top_k=top_k, width=width, height=half, color=GROUP_A_COLOR)
    spec_b = layout_wordcloud(ranked_b, top_k=top_k, width=width, height=half, color=GROUP_B_COLOR)
    entries = spec_a.entries + tuple(replace(e, y=e.y + half) for e in spec_b.entries)
    spec = WordCloudSpec(entries=entries, width=width, height=height)
    divider = f'<line x1="0" y1="{half}" x2="{width}" y2="{half}" stroke="#cccccc" stroke-width="1"/>'
    Path(path).write_bytes(svg_markup(spec, extra=[divider]).encode("utf-8"))
    return spec


def _align_raw_tokens(text: str, stream: TokenStream) -> list[tuple[int, int, str]]:
    """Match the document's raw token positions to the (possibly merged)
    stream terms.

    Returns (start, end, stream term) per raw token; a merged ``a_b`` term
    covers two consecutive raw tokens, each mapped to the merged term.
    """
    raw = token_spans(text)
    aligned: list[tuple[int, int, str]] = []
    j = 0
    for term in stream.tokens:
        if JOINER in term:
            first, _, second = term.partition(JOINER)
            if j + 1 >= len(raw) or raw[j][2] != first or raw[j + 1][2] != second:
                raise ValueError(f"token stream does not match document text at token {j}")
            aligned.append((raw[j][0], raw[j][1], term))
            aligned.append((raw[j + 1][0], raw[j + 1][1], term))
            j += 2
        else:
            if j >= len(raw) or raw[j][2] != term:
                raise ValueError(f"token stream does not match document text at token {j}")
            aligned.append((raw[j][0], raw[j][1], term))
            j += 1
    if j != len(raw):
        raise ValueError("token stream does not match document text: leftover tokens")
    return aligned


def highlight_html(
    doc: Document,
    stream: TokenStream,
    table: RelevanceTable,
    cluster: ClusterKey,
    path,
    *,
    label: ClusterKey | None = None,
) -> None:
    """Write the document as HTML with its cluster's relevant words marked.

    Each token whose term scores above zero is wrapped in a span whose
    background opacity is the score; all other characters pass through
    untouched, so stripping the spans (and unescaping) restores the original
    text exactly.
    """
    if label is not None and label != cluster:
        raise ValueError(f"document {doc.id!r} belongs to cluster {label!r}, not {cluster!r}")
    c = table.cluster_position(cluster)
    scores = {
        term: float(table.r[c, i]) for i, term in enumerate(table.terms) if table.r[c, i] > 0.0
    }
    aligned = _align_raw_tokens(doc.text, stream)
    pieces: list[str] = []
    cursor = 0
    for start, end, term in aligned:
        pieces.append(html.escape(doc.text[cursor:start]))
        token_markup = html.escape(doc.text[start:end])
        score = scores.get(term)
        if score is not None:
            pieces.append(
                f'<span style="background-color: rgba(255, 200, 0, {score:.4f})">'
                f"{token_markup}</span>"
            )
        else:
            pieces.append(token_markup)
        cursor = end
    pieces.append(html.escape(doc.text[cursor:]))
    body = "".join(pieces)
    markup = (
        "<!DOCTYPE html>\n"
        '<html lang="en">\n<head>\n<meta charset="utf-8"/>\n'
        f"<title>{html.escape(doc.id)}</title>\n</head>\n<body>\n"
        f"<p>document <b>{html.escape(doc.id)}</b>, cluster {html.escape(str(cluster))}</p>\n"
        f'<div class="doc" style="white-space: pre-wrap; font-family: sans-serif;">'
        f"{body}</div>\n</body>\n</html>\n"
    )
    Path(path).write_bytes(markup.encode("utf-8"))


@dataclass(frozen=True)
class TrendTable:
    """Per (term, time bucket): document count and rate within the bucket."""

    terms: tuple[str, ...]
    bucket: str
    starts: tuple[date, ...]
    totals: np.ndarray
    counts: np.ndarray
    rates: np.ndarray


def _bucket_start(when: date, bucket: str) -> date:
    if bucket == "day":
        return when
    if bucket == "week":
        return when - timedelta(days=when.weekday())
    raise ValueError(f"unknown bucket size: {bucket!r} (expected 'day' or 'week')")


def term_trends(
    corpus: Corpus,
    streams: Sequence[TokenStream],
    terms: Sequence[str],
    bucket: str = "day",
) -> TrendTable:
    """Document-occurrence counts of selected terms per day or week.

    Buckets cover the corpus time span contiguously, including empty ones;
    the rate is the fraction of that bucket's documents containing the term
    (0 for empty buckets).
    """
    missing = [doc.id for doc in corpus.docs if doc.timestamp is None]
    if missing:
        raise ValueError(f"documents without timestamps: {', '.join(missing)}")
    step = timedelta(days=1 if bucket == "day" else 7)
    doc_buckets = [_bucket_start(doc.timestamp.date(), bucket) for doc in corpus.docs]
    first, last = min(doc_buckets), max(doc_buckets)
    starts: list[date] = []
    cursor = first
    while cursor <= last:
        starts.append(cursor)
        cursor += step
    position = {start: b for b, start in enumerate(starts)}

    totals = np.zeros(len(starts), dtype=np.int64)
    counts = np.zeros((len(terms), len(starts)), dtype=np.int64)
    term_rows = {term: i for i, term in enumerate(terms)}
    for doc_bucket, stream in zip(doc_buckets, streams):
        b = position[doc_bucket]
        totals[b] += 1
        for term in set(stream.tokens) & term_rows.keys():
            counts[term_rows[term], b] += 1
    safe_totals = np.where(totals == 0, 1, totals)
    rates = counts / safe_totals
    return TrendTable(
        terms=tuple(terms),
        bucket=bucket,
        starts=tuple(starts),
        totals=totals,
        counts=counts,
        rates=rates,
    )


def write_trends_csv(table: TrendTable, path) -> None:
    """Dump as ``term,bucket_start,count,rate`` CSV."""
    with open(path, "w", encoding="utf-8", newline="\n") as handle:
        handle.write("term,bucket_start,count,rate\n")
        for i, term in enumerate(table.terms):
            for b, start in enumerate(table.starts):
                handle.write(
                    f"{term},{start.isoformat()},{int(table.counts[i, b])},"
                    f"{table.rates[i, b]:.12g}\n"
                )
