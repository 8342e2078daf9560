import datetime
import json

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import relwords.corpus as corpus_mod
from relwords.corpus import (
    Corpus,
    Document,
    fetch_archive,
    load_dir,
    load_jsonl,
    month_range,
    parse_timestamp,
    save_jsonl,
    split_by_period,
)


def write_jsonl(path, records):
    path.write_text("\n".join(json.dumps(r) for r in records) + "\n", encoding="utf-8")


class TestLoadJsonl:
    def test_preserves_line_order(self, tmp_path):
        path = tmp_path / "corpus.jsonl"
        write_jsonl(path, [{"id": i, "text": f"doc {i}"} for i in ("a", "b", "c")])
        corpus = load_jsonl(path)
        assert corpus.ids() == ("a", "b", "c")
        assert corpus.docs[1].text == "doc b"

    def test_empty_file_rejected(self, tmp_path):
        path = tmp_path / "corpus.jsonl"
        path.write_text("", encoding="utf-8")
        with pytest.raises(ValueError, match="empty corpus"):
            load_jsonl(path)

    def test_missing_text_field_cites_line(self, tmp_path):
        path = tmp_path / "corpus.jsonl"
        write_jsonl(path, [{"id": "a", "text": "ok"}, {"id": "b"}, {"id": "c", "text": "ok"}])
        with pytest.raises(ValueError, match="line 2"):
            load_jsonl(path)

    def test_malformed_line_cites_line(self, tmp_path):
        path = tmp_path / "corpus.jsonl"
        path.write_text('{"id": "a", "text": "ok"}\nnot json\n', encoding="utf-8")
        with pytest.raises(ValueError, match="line 2.*malformed"):
            load_jsonl(path)

    def test_duplicate_id_named(self, tmp_path):
        path = tmp_path / "corpus.jsonl"
        write_jsonl(path, [{"id": "dup", "text": "x"}, {"id": "dup", "text": "y"}])
        with pytest.raises(ValueError, match="dup"):
            load_jsonl(path)

    def test_empty_text_rejected(self, tmp_path):
        path = tmp_path / "corpus.jsonl"
        write_jsonl(path, [{"id": "a", "text": "   "}])
        with pytest.raises(ValueError, match="line 1"):
            load_jsonl(path)

    def test_configurable_field_names(self, tmp_path):
        path = tmp_path / "corpus.jsonl"
        write_jsonl(path, [{"key": "a", "body": "hello", "when": "2017-01-05"}])
        corpus = load_jsonl(path, id_field="key", text_field="body", date_field="when")
        assert corpus.docs[0].id == "a"
        assert corpus.docs[0].timestamp == datetime.datetime(2017, 1, 5)


class TestRoundTrip:
    def test_full_record_round_trip(self, tmp_path):
        docs = (
            Document(id="a", text="first text", timestamp=parse_timestamp("2017-01-10T08:30:00")),
            Document(id="b", text="second\nwith newline", group="before"),
            Document(id="c", text="third: ünïcode"),
        )
        path = tmp_path / "corpus.jsonl"
        save_jsonl(Corpus(docs), path)
        loaded = load_jsonl(path)
        assert loaded.docs == docs

    @settings(max_examples=30, deadline=None)
    @given(
        texts=st.lists(
            st.text(
                alphabet=st.characters(blacklist_categories=("Cs",)), min_size=1, max_size=80
            ).filter(lambda s: s.strip()),
            min_size=1,
            max_size=8,
        )
    )
    def test_any_texts_survive_round_trip(self, tmp_path_factory, texts):
        docs = tuple(Document(id=f"d{i}", text=t) for i, t in enumerate(texts))
        path = tmp_path_factory.mktemp("rt") / "corpus.jsonl"
        save_jsonl(Corpus(docs), path)
        loaded = load_jsonl(path)
        assert loaded.ids() == tuple(f"d{i}" for i in range(len(texts)))
        assert [d.text for d in loaded.docs] == texts


class TestLoadDir:
    def test_lexicographic_order(self, tmp_path):
        (tmp_path / "b.txt").write_text("beta", encoding="utf-8")
        (tmp_path / "a.txt").write_text("alpha", encoding="utf-8")
        corpus = load_dir(tmp_path)
        assert corpus.ids() == ("a.txt", "b.txt")

    def test_empty_dir_rejected(self, tmp_path):
        with pytest.raises(ValueError, match="empty corpus"):
            load_dir(tmp_path)

    def test_nested_files_get_relative_path_ids(self, tmp_path):
        (tmp_path / "sub").mkdir()
        (tmp_path / "sub" / "inner.txt").write_text("inner", encoding="utf-8")
        (tmp_path / "outer.txt").write_text("outer", encoding="utf-8")
        corpus = load_dir(tmp_path)
        assert corpus.ids() == ("outer.txt", "sub/inner.txt")

    def test_unreadable_file_named(self, tmp_path):
        bad = tmp_path / "bad.txt"
        bad.write_bytes(b"\xff\xfe\xff")
        with pytest.raises(ValueError, match="bad.txt"):
            load_dir(tmp_path)


class TestSplitByPeriod:
    def test_boundary_splits_before_and_after(self):
        corpus = Corpus(
            (
                Document(id="early", text="x", timestamp=parse_timestamp("2017-01-10")),
                Document(id="late", text="y", timestamp=parse_timestamp("2017-01-18")),
            )
        )
        split = split_by_period(corpus, parse_timestamp("2017-01-16"))
        assert split.docs[0].group == "before"
        assert split.docs[1].group == "after"

    def test_timestamp_equal_to_boundary_goes_after(self):
        corpus = Corpus(
            (Document(id="edge", text="x", timestamp=parse_timestamp("2017-01-16")),)
        )
        split = split_by_period(corpus, parse_timestamp("2017-01-16"))
        assert split.docs[0].group == "after"

    def test_missing_timestamps_listed(self):
        corpus = Corpus(
            (
                Document(id="ok", text="x", timestamp=parse_timestamp("2017-01-10")),
                Document(id="nodate1", text="y"),
                Document(id="nodate2", text="z"),
            )
        )
        with pytest.raises(ValueError, match="nodate1, nodate2"):
            split_by_period(corpus, parse_timestamp("2017-01-16"))

    def test_partition_covers_every_document(self):
        docs = tuple(
            Document(id=f"d{i}", text="x", timestamp=parse_timestamp(f"2017-01-{i + 1:02d}"))
            for i in range(20)
        )
        split = split_by_period(Corpus(docs), parse_timestamp("2017-01-08"))
        groups = [d.group for d in split.docs]
        assert all(g in ("before", "after") for g in groups)
        assert groups.count("before") + groups.count("after") == len(docs)


class FakeResponse:
    def __init__(self, status_code=200, payload=None, text=""):
        self.status_code = status_code
        self._payload = payload or {}
        self.text = text

    def json(self):
        return self._payload


def archive_payload(items):
    return {"response": {"docs": items}}


def archive_item(doc_id, text, when):
    return {"_id": doc_id, "snippet": text, "pub_date": when}


class TestFetchArchive:
    ENDPOINT = "https://archive.example/{year}/{month}.json?api-key={key}"

    def test_cache_hit_makes_no_network_call(self, tmp_path, monkeypatch):
        payload = archive_payload([archive_item("a1", "cached text", "2017-01-03T00:00:00+0000")])
        cache = corpus_mod._cache_path(tmp_path, self.ENDPOINT, 2017, 1)
        cache.write_text(json.dumps(payload), encoding="utf-8")

        def no_network(*args, **kwargs):
            raise AssertionError("network call on cache hit")

        monkeypatch.setattr(corpus_mod.requests, "get", no_network)
        corpus = fetch_archive(self.ENDPOINT, [(2017, 1)], api_key="k", cache_dir=tmp_path)
        assert corpus.ids() == ("a1",)
        assert corpus.docs[0].text == "cached text"

    def test_two_month_range_sorted_by_timestamp(self, tmp_path, monkeypatch):
        by_month = {
            (2016, 12): archive_payload([archive_item("dec", "december", "2016-12-20T10:00:00+0000")]),
            (2017, 1): archive_payload([archive_item("jan", "january", "2017-01-05T10:00:00+0000")]),
        }

        def fake_get(url, timeout):
            for (year, month), payload in by_month.items():
                if f"/{year}/{month}.json" in url:
                    return FakeResponse(payload=payload)
            raise AssertionError(url)

        monkeypatch.setattr(corpus_mod.requests, "get", fake_get)
        corpus = fetch_archive(
            self.ENDPOINT, [(2017, 1), (2016, 12)], api_key="k", cache_dir=tmp_path
        )
        assert corpus.ids() == ("dec", "jan")
        # second run is served from cache
        monkeypatch.setattr(corpus_mod.requests, "get", lambda *a, **k: pytest.fail("network"))
        again = fetch_archive(self.ENDPOINT, [(2017, 1), (2016, 12)], api_key="k", cache_dir=tmp_path)
        assert again.ids() == corpus.ids()

    def test_invalid_credential_surfaced(self, tmp_path, monkeypatch):
        monkeypatch.setattr(
            corpus_mod.requests,
            "get",
            lambda url, timeout: FakeResponse(status_code=401, text="invalid api key"),
        )
        with pytest.raises(RuntimeError, match="invalid api key"):
            fetch_archive(self.ENDPOINT, [(2017, 1)], api_key="bad", cache_dir=tmp_path)

    def test_retries_with_backoff_then_succeeds(self, tmp_path, monkeypatch):
        calls = {"n": 0}
        payload = archive_payload([archive_item("a1", "late success", "2017-01-03T00:00:00+0000")])

        def flaky_get(url, timeout):
            calls["n"] += 1
            if calls["n"] < 3:
                return FakeResponse(status_code=503)
            return FakeResponse(payload=payload)

        delays = []
        monkeypatch.setattr(corpus_mod.requests, "get", flaky_get)
        monkeypatch.setattr(corpus_mod.time, "sleep", delays.append)
        corpus = fetch_archive(self.ENDPOINT, [(2017, 1)], api_key="k", cache_dir=tmp_path)
        assert corpus.docs[0].text == "late success"
        assert calls["n"] == 3
        assert delays == [0.5, 1.0]  # exponential backoff

    def test_gives_up_after_bounded_retries(self, tmp_path, monkeypatch):
        monkeypatch.setattr(
            corpus_mod.requests, "get", lambda url, timeout: FakeResponse(status_code=500)
        )
        monkeypatch.setattr(corpus_mod.time, "sleep", lambda s: None)
        with pytest.raises(RuntimeError, match="HTTP 500"):
            fetch_archive(self.ENDPOINT, [(2017, 1)], api_key="k", cache_dir=tmp_path)

    def test_schema_mismatch_names_missing_field(self, tmp_path, monkeypatch):
        monkeypatch.setattr(
            corpus_mod.requests,
            "get",
            lambda url, timeout: FakeResponse(payload={"response": {"notdocs": []}}),
        )
        with pytest.raises(ValueError, match="response.docs"):
            fetch_archive(self.ENDPOINT, [(2017, 1)], api_key="k", cache_dir=tmp_path)

    def test_item_missing_field_named(self, tmp_path, monkeypatch):
        payload = archive_payload([{"_id": "a1", "snippet": "text"}])
        monkeypatch.setattr(
            corpus_mod.requests, "get", lambda url, timeout: FakeResponse(payload=payload)
        )
        with pytest.raises(ValueError, match="pub_date"):
            fetch_archive(self.ENDPOINT, [(2017, 1)], api_key="k", cache_dir=tmp_path)

    def test_credential_from_environment(self, tmp_path, monkeypatch):
        seen_urls = []
        payload = archive_payload([archive_item("a1", "txt", "2017-01-03T00:00:00+0000")])

        def capture_get(url, timeout):
            seen_urls.append(url)
            return FakeResponse(payload=payload)

        monkeypatch.setattr(corpus_mod.requests, "get", capture_get)
        monkeypatch.setenv("RELWORDS_API_KEY", "env-secret")
        fetch_archive(self.ENDPOINT, [(2017, 1)], cache_dir=tmp_path)
        assert seen_urls == ["https://archive.example/2017/1.json?api-key=env-secret"]

    def test_empty_snippets_dropped_with_warning(self, tmp_path, monkeypatch):
        payload = archive_payload(
            [
                archive_item("a1", "kept", "2017-01-03T00:00:00+0000"),
                archive_item("a2", "   ", "2017-01-04T00:00:00+0000"),
            ]
        )
        monkeypatch.setattr(
            corpus_mod.requests, "get", lambda url, timeout: FakeResponse(payload=payload)
        )
        with pytest.warns(UserWarning, match="empty snippets"):
            corpus = fetch_archive(self.ENDPOINT, [(2017, 1)], api_key="k", cache_dir=tmp_path)
        assert corpus.ids() == ("a1",)


class TestParseHelpers:
    def test_parse_timestamp_variants(self):
        assert parse_timestamp("2017-01-20") == datetime.datetime(2017, 1, 20)
        assert parse_timestamp("2017-01-20T14:30:00Z") == datetime.datetime(2017, 1, 20, 14, 30)
        assert parse_timestamp("2017-01-20T14:30:00+0000") == datetime.datetime(2017, 1, 20, 14, 30)
        assert parse_timestamp("2017-01-20T15:30:00+01:00") == datetime.datetime(2017, 1, 20, 14, 30)

    def test_month_range(self):
        assert month_range("2017-01") == [(2017, 1)]
        assert month_range("2016-11..2017-01") == [(2016, 11), (2016, 12), (2017, 1)]
        assert month_range("2016-12,2017-02") == [(2016, 12), (2017, 2)]
        with pytest.raises(ValueError):
            month_range("2017-13")

    def test_corpus_rejects_duplicate_ids(self):
        with pytest.raises(ValueError, match="dup"):
            Corpus((Document(id="dup", text="a"), Document(id="dup", text="b")))
