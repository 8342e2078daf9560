"""Load, normalize, persist, and partition document collections.

The canonical on-disk corpus format is JSON-lines with one object per line,
``{"id": ..., "text": ..., "date": ..., "group": ...}`` (date and group
optional). Document order in a corpus is stable and is the index order used
by every downstream stage.
"""

from __future__ import annotations

import hashlib
import json
import os
import re
import tempfile
import time
import warnings
from dataclasses import dataclass, replace
from datetime import datetime, timezone
from pathlib import Path

import requests

API_KEY_ENV_VAR = "RELWORDS_API_KEY"

_TZ_NO_COLON = re.compile(r"([+-]\d{2})(\d{2})$")


def parse_timestamp(value: str) -> datetime:
    """Parse an ISO-8601 date or datetime string.

    Timezone-aware values are converted to UTC and returned naive so that
    timestamps from mixed sources stay mutually comparable.
    """
    raw = value.strip()
    if raw.endswith(("Z", "z")):
        raw = raw[:-1] + "+00:00"
    raw = _TZ_NO_COLON.sub(r"\1:\2", raw)
    ts = datetime.fromisoformat(raw)
    if ts.tzinfo is not None:
        ts = ts.astimezone(timezone.utc).replace(tzinfo=None)
    return ts


@dataclass(frozen=True)
class Document:
    """One raw text with a unique id and optional timestamp / group label."""

    id: str
    text: str
    timestamp: datetime | None = None
    group: str | None = None

    def __post_init__(self) -> None:
        if not self.id:
            raise ValueError("document id must be non-empty")
        if not self.text.strip():
            raise ValueError(f"document {self.id!r}: empty text")


@dataclass(frozen=True)
class Corpus:
    """An ordered, immutable collection of documents.

    The element order is canonical: row k of every downstream matrix refers
    to ``docs[k]``.
    """

    docs: tuple[Document, ...]
    provenance: str = ""

    def __post_init__(self) -> None:
        if not isinstance(self.docs, tuple):
            object.__setattr__(self, "docs", tuple(self.docs))
        if not self.docs:
            raise ValueError("empty corpus")
        seen: set[str] = set()
        for doc in self.docs:
            if doc.id in seen:
                raise ValueError(f"duplicate document id: {doc.id!r}")
            seen.add(doc.id)

    def __len__(self) -> int:
        return len(self.docs)

    def __iter__(self):
        return iter(self.docs)

    def ids(self) -> tuple[str, ...]:
        return tuple(doc.id for doc in self.docs)


def load_jsonl(
    path: str | Path,
    *,
    id_field: str = "id",
    text_field: str = "text",
    date_field: str = "date",
    group_field: str = "group",
) -> Corpus:
    """Read a JSON-lines corpus, preserving line order.

    Raises ValueError naming the offending line for malformed JSON, missing
    or empty id/text fields, and unparseable dates; duplicate ids are
    rejected with the id in the message.
    """
    path = Path(path)
    docs: list[Document] = []
    with path.open("r", encoding="utf-8") as handle:
        for lineno, line in enumerate(handle, start=1):
            if not line.strip():
                continue
            try:
                record = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ValueError(f"{path}: line {lineno}: malformed JSON: {exc}") from exc
            if not isinstance(record, dict):
                raise ValueError(f"{path}: line {lineno}: expected a JSON object")
            for name in (id_field, text_field):
                if name not in record:
                    raise ValueError(f"{path}: line {lineno}: missing {name!r} field")
            doc_id = str(record[id_field])
            text = record[text_field]
            if not isinstance(text, str) or not text.strip():
                raise ValueError(f"{path}: line {lineno}: empty {text_field!r} field")
            timestamp = None
            if record.get(date_field) is not None:
                try:
                    timestamp = parse_timestamp(str(record[date_field]))
                except ValueError as exc:
                    raise ValueError(
                        f"{path}: line {lineno}: bad {date_field!r} value: {exc}"
                    ) from exc
            group = record.get(group_field)
            docs.append(
                Document(
                    id=doc_id,
                    text=text,
                    timestamp=timestamp,
                    group=None if group is None else str(group),
                )
            )
    return Corpus(tuple(docs), provenance=f"jsonl:{path}")


def save_jsonl(corpus: Corpus, path: str | Path) -> None:
    """Write a corpus in the canonical JSON-lines format (UTF-8)."""
    path = Path(path)
    with path.open("w", encoding="utf-8", newline="\n") as handle:
        for doc in corpus.docs:
            record: dict[str, object] = {"id": doc.id, "text": doc.text}
            if doc.timestamp is not None:
                record["date"] = doc.timestamp.isoformat()
            if doc.group is not None:
                record["group"] = doc.group
            handle.write(json.dumps(record, ensure_ascii=False) + "\n")


def load_dir(path: str | Path) -> Corpus:
    """Build a corpus from the plain-text files under a directory.

    One document per file (recursively), id = relative file path, files
    ordered lexicographically by that path.
    """
    root = Path(path)
    if not root.is_dir():
        raise FileNotFoundError(f"not a directory: {root}")
    files = sorted(
        (p for p in root.rglob("*") if p.is_file()),
        key=lambda p: p.relative_to(root).as_posix(),
    )
    docs = []
    for file_path in files:
        rel = file_path.relative_to(root).as_posix()
        try:
            text = file_path.read_text(encoding="utf-8")
        except (OSError, UnicodeDecodeError) as exc:
            raise ValueError(f"unreadable file: {file_path}: {exc}") from exc
        if not text.strip():
            raise ValueError(f"{file_path}: empty document text")
        docs.append(Document(id=rel, text=text))
    return Corpus(tuple(docs), provenance=f"dir:{root}")


def month_range(spec: str) -> list[tuple[int, int]]:
    """Parse a month list like ``2017-01``, ``2016-12..2017-02``, or a
    comma-separated mix of both, into (year, month) pairs."""
    months: list[tuple[int, int]] = []
    for part in spec.split(","):
        part = part.strip()
        if ".." in part:
            lo, hi = part.split("..", 1)
            year, month = _parse_month(lo)
            end = _parse_month(hi)
            while (year, month) <= end:
                months.append((year, month))
                year, month = (year + 1, 1) if month == 12 else (year, month + 1)
        elif part:
            months.append(_parse_month(part))
    if not months:
        raise ValueError(f"no months in range spec: {spec!r}")
    return months


def _parse_month(text: str) -> tuple[int, int]:
    match = re.fullmatch(r"(\d{4})-(\d{1,2})", text.strip())
    if not match or not 1 <= int(match.group(2)) <= 12:
        raise ValueError(f"bad month (expected YYYY-MM): {text!r}")
    return int(match.group(1)), int(match.group(2))


def fetch_archive(
    endpoint: str,
    months: list[tuple[int, int]],
    *,
    api_key: str | None = None,
    cache_dir: str | Path = "archive_cache",
    timeout: float = 30.0,
    max_retries: int = 3,
    backoff: float = 0.5,
) -> Corpus:
    """Fetch article snippets from a monthly archive HTTP API.

    ``endpoint`` is a URL template with ``{year}``, ``{month}``, and ``{key}``
    placeholders. Raw responses are cached on disk keyed by (endpoint, month)
    so reruns need no network. Expected response shape::

        {"response": {"docs": [{"_id": ..., "snippet": ..., "pub_date": ...}, ...]}}
    """
    key = api_key if api_key is not None else os.environ.get(API_KEY_ENV_VAR, "")
    cache_root = Path(cache_dir)
    cache_root.mkdir(parents=True, exist_ok=True)
    docs: list[Document] = []
    dropped = 0
    for year, month in months:
        payload = _fetch_month(endpoint, year, month, key, cache_root, timeout, max_retries, backoff)
        for item in _archive_docs(payload):
            for name in ("_id", "snippet", "pub_date"):
                if name not in item:
                    raise ValueError(f"archive response missing field {name!r}")
            snippet = item["snippet"]
            if not isinstance(snippet, str) or not snippet.strip():
                dropped += 1
                continue
            docs.append(
                Document(
                    id=str(item["_id"]),
                    text=snippet,
                    timestamp=parse_timestamp(str(item["pub_date"])),
                )
            )
    if dropped:
        warnings.warn(f"dropped {dropped} archive items with empty snippets")
    docs.sort(key=lambda d: (d.timestamp, d.id))
    months_label = ",".join(f"{y:04d}-{m:02d}" for y, m in months)
    return Corpus(tuple(docs), provenance=f"archive:{endpoint} months={months_label}")


def _archive_docs(payload: dict) -> list[dict]:
    response = payload.get("response")
    if not isinstance(response, dict):
        raise ValueError("archive response missing field 'response'")
    items = response.get("docs")
    if not isinstance(items, list):
        raise ValueError("archive response missing field 'response.docs'")
    return items


def _cache_path(cache_root: Path, endpoint: str, year: int, month: int) -> Path:
    digest = hashlib.sha256(endpoint.encode("utf-8")).hexdigest()[:12]
    return cache_root / f"{digest}-{year:04d}-{month:02d}.json"


def _fetch_month(
    endpoint: str,
    year: int,
    month: int,
    key: str,
    cache_root: Path,
    timeout: float,
    max_retries: int,
    backoff: float,
) -> dict:
    cached = _cache_path(cache_root, endpoint, year, month)
    if cached.exists():
        return json.loads(cached.read_text(encoding="utf-8"))
    url = endpoint.format(year=year, month=month, key=key)
    last_error: Exception | None = None
    for attempt in range(max_retries):
        try:
            resp = requests.get(url, timeout=timeout)
        except requests.RequestException as exc:
            last_error = exc
        else:
            if resp.status_code in (401, 403):
                raise RuntimeError(f"archive authentication failed ({resp.status_code}): {resp.text}")
            if resp.status_code == 200:
                payload = resp.json()
                _archive_docs(payload)  # validate before caching
                _atomic_write(cached, json.dumps(payload, ensure_ascii=False))
                return payload
            last_error = RuntimeError(f"HTTP {resp.status_code} from {url}")
        if attempt < max_retries - 1:
            time.sleep(backoff * (2**attempt))
    raise RuntimeError(f"archive fetch failed for {year:04d}-{month:02d}: {last_error}")


def _atomic_write(path: Path, content: str) -> None:
    fd, tmp_name = tempfile.mkstemp(dir=path.parent, suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as handle:
            handle.write(content)
        os.replace(tmp_name, path)
    except BaseException:
        if os.path.exists(tmp_name):
            os.unlink(tmp_name)
        raise


def split_by_period(corpus: Corpus, boundary: datetime) -> Corpus:
    """Label every document "before" or "after" a boundary timestamp.

    Documents with timestamp >= boundary go to "after" (half-open interval
    convention), the rest to "before". The result is a two-group
    pseudo-assignment for contrast scoring.
    """
    missing = [doc.id for doc in corpus.docs if doc.timestamp is None]
    if missing:
        raise ValueError(f"documents without timestamps: {', '.join(missing)}")
    labeled = tuple(
        replace(doc, group="after" if doc.timestamp >= boundary else "before")
        for doc in corpus.docs
    )
    return Corpus(labeled, provenance=corpus.provenance)
