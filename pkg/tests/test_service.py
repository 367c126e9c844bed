"""Adjudication session semantics and the /api/v1 HTTP surface."""

from __future__ import annotations

import json

import pytest
from fastapi.testclient import TestClient

from conllkit.diffing import Decision, apply_decisions, diff_pair, export_disagreements, read_disagreement_file, records_from_dicts
from conllkit.errors import BadPage, UnknownDiffId
from conllkit.model import Label, with_token_label
from conllkit.service import AdjudicationSession, create_app

from conftest import corpus, one_sentence_corpus, sent


def make_items(n: int, label_a: str = "B-LOC", label_b: str = "B-ORG") -> list[dict]:
    return [
        {
            "diff_id": f"{i:016x}",
            "doc_index": i // 10,
            "sentence_index": 0,
            "token_index": i % 10,
            "surface": f"tok{i}",
            "labels": {"va": label_a, "vb": label_b},
            "context": [
                {"surface": f"tok{i}", "labels": {"va": label_a, "vb": label_b}}
            ],
            "context_offset": 0,
        }
        for i in range(n)
    ]


@pytest.fixture
def log_path(tmp_path):
    return tmp_path / "decisions.ndjson"


class TestSession:
    def test_empty_session(self, log_path):
        session = AdjudicationSession([], log_path)
        page = session.list_disagreements()
        assert page == {"total": 0, "page": 0, "page_size": 50, "items": []}
        assert session.progress().to_dict() == {"total": 0, "decided": 0, "remaining": 0}

    def test_pagination_boundaries(self, log_path):
        session = AdjudicationSession(make_items(276), log_path)
        assert session.list_disagreements(page=0, page_size=100)["total"] == 276
        assert len(session.list_disagreements(page=0, page_size=100)["items"]) == 100
        assert len(session.list_disagreements(page=1, page_size=100)["items"]) == 100
        assert len(session.list_disagreements(page=2, page_size=100)["items"]) == 76
        assert len(session.list_disagreements(page=3, page_size=100)["items"]) == 0

    def test_bad_page(self, log_path):
        session = AdjudicationSession(make_items(3), log_path)
        with pytest.raises(BadPage):
            session.list_disagreements(page=-1)
        with pytest.raises(BadPage):
            session.list_disagreements(page_size=501)
        with pytest.raises(BadPage):
            session.list_disagreements(page_size=0)

    def test_undecided_filter_after_ten_decisions(self, log_path):
        session = AdjudicationSession(make_items(276), log_path)
        for item in session.list_disagreements(page_size=10)["items"]:
            session.record_decision(item["diff_id"], "B-ORG", "adj")
        assert session.list_disagreements(undecided_only=True)["total"] == 266
        assert session.progress().remaining == 266

    def test_decide_and_supersede(self, log_path):
        session = AdjudicationSession(make_items(4), log_path)
        progress = session.record_decision("0000000000000000", "B-ORG", "adj")
        assert progress.remaining == 3
        progress = session.record_decision("0000000000000000", "B-LOC", "adj", note="rev")
        assert progress.remaining == 3
        assert len(session.log) == 2
        assert len(session.export_lines()) == 1
        assert json.loads(session.export_lines()[0])["chosen_label"] == "B-LOC"

    def test_unknown_and_malformed(self, log_path):
        from conllkit.errors import MalformedLabel

        session = AdjudicationSession(make_items(2), log_path)
        with pytest.raises(UnknownDiffId):
            session.record_decision("ffffffffffffffff", "O", "adj")
        with pytest.raises(MalformedLabel):
            session.record_decision("0000000000000000", "Q-FOO", "adj")

    def test_neither_custom_label_accepted(self, log_path):
        session = AdjudicationSession(make_items(2), log_path)
        session.record_decision("0000000000000000", "B-MISC", "adj")
        stats = session.stats()
        assert stats["neither"]["count"] == 1
        assert stats["per_version"]["va"]["wins"] == 0

    def test_chosen_label_canonicalized(self, log_path):
        # entity-type case normalizes; the B/I prefix itself must be uppercase
        session = AdjudicationSession(make_items(2), log_path)
        session.record_decision("0000000000000000", "B-loc", "adj")
        assert json.loads(session.export_lines()[0])["chosen_label"] == "B-LOC"
        assert session.stats()["per_version"]["va"]["wins"] == 1

    def test_durability_replay(self, log_path):
        session = AdjudicationSession(make_items(5), log_path)
        session.record_decision("0000000000000001", "B-ORG", "adj")
        session.record_decision("0000000000000002", "B-LOC", "adj")
        # a new session over the same log sees every acknowledged decision
        replayed = AdjudicationSession(make_items(5), log_path)
        assert replayed.progress().decided == 2
        assert replayed.export_lines() == session.export_lines()

    def test_progress_equals_log_recomputation(self, log_path):
        session = AdjudicationSession(make_items(20), log_path)
        ids = [f"{i:016x}" for i in (0, 3, 3, 7, 0)]
        for i in ids:
            session.record_decision(i, "B-ORG", "adj")
        assert session.progress().decided == len(set(ids))
        assert len(session.log) == len(ids)

    def test_win_rate_stats(self, log_path):
        session = AdjudicationSession(make_items(276), log_path)
        items = session.list_disagreements(page_size=276)["items"]
        for i, item in enumerate(items):
            if i < 190:
                choice = item["labels"]["va"]
            elif i < 266:
                choice = item["labels"]["vb"]
            else:
                choice = "B-MISC"
            session.record_decision(item["diff_id"], choice, "adj")
        stats = session.stats()
        assert stats["per_version"]["va"] == {"wins": 190, "percent": 68.84}
        assert stats["per_version"]["vb"] == {"wins": 76, "percent": 27.54}
        assert stats["neither"] == {"count": 10, "percent": 3.62}

    def test_no_decisions_all_zero(self, log_path):
        session = AdjudicationSession(make_items(3), log_path)
        stats = session.stats()
        assert stats["per_version"]["va"] == {"wins": 0, "percent": 0.0}
        assert stats["neither"] == {"count": 0, "percent": 0.0}


class TestHttpApi:
    @pytest.fixture
    def client(self, log_path):
        session = AdjudicationSession(make_items(20), log_path)
        return TestClient(create_app(session))

    def test_list_page(self, client):
        r = client.get("/api/v1/disagreements?page=0&page_size=5")
        assert r.status_code == 200
        body = r.json()
        assert body["total"] == 20
        assert len(body["items"]) == 5
        assert body["items"][0]["decision"] is None

    def test_deterministic_order(self, client):
        a = client.get("/api/v1/disagreements?page_size=20").json()["items"]
        b = client.get("/api/v1/disagreements?page_size=20").json()["items"]
        assert a == b
        keys = [(i["doc_index"], i["sentence_index"], i["token_index"]) for i in a]
        assert keys == sorted(keys)

    def test_get_single(self, client):
        r = client.get("/api/v1/disagreements/0000000000000003")
        assert r.status_code == 200
        assert r.json()["surface"] == "tok3"
        assert "context" in r.json()
        assert client.get("/api/v1/disagreements/no_such_id").status_code == 404

    def test_decision_flow(self, client):
        r = client.post(
            "/api/v1/decisions",
            json={"diff_id": "0000000000000000", "chosen_label": "B-ORG", "chooser": "a"},
        )
        assert r.status_code == 200
        assert r.json()["progress"] == {"total": 20, "decided": 1, "remaining": 19}
        item = client.get("/api/v1/disagreements/0000000000000000").json()
        assert item["decision"]["chosen_label"] == "B-ORG"

    def test_error_codes(self, client):
        assert client.post(
            "/api/v1/decisions", json={"diff_id": "ffffffffffffffff", "chosen_label": "O"}
        ).status_code == 404
        assert client.post(
            "/api/v1/decisions", json={"diff_id": "0000000000000000", "chosen_label": "??"}
        ).status_code == 400
        assert client.get("/api/v1/disagreements?page_size=501").status_code == 400
        assert client.get("/api/v1/disagreements?page=-1").status_code == 400

    def test_progress_includes_stats(self, client):
        client.post("/api/v1/decisions",
                    json={"diff_id": "0000000000000000", "chosen_label": "B-LOC"})
        body = client.get("/api/v1/progress").json()
        assert body["decided"] == 1
        assert body["per_version_stats"]["per_version"]["va"]["wins"] == 1

    def test_export_content_type_and_body(self, client):
        client.post("/api/v1/decisions",
                    json={"diff_id": "0000000000000001", "chosen_label": "B-ORG"})
        r = client.get("/api/v1/export")
        assert r.headers["content-type"].startswith("application/x-ndjson")
        (line,) = r.text.strip().splitlines()
        assert json.loads(line)["diff_id"] == "0000000000000001"


class TestEndToEnd:
    def test_export_round_trips_into_apply_decisions(self, tmp_path):
        base = corpus(
            [
                sent(("Tasmania", "B-LOC"), ("beat", "O"), ("Victoria", "B-LOC")),
                sent(("ARAB", "B-ORG"), ("CONTRACTORS", "I-ORG"), ("won", "O")),
            ]
        )
        other = with_token_label(base, 0, 0, 0, Label.parse("B-ORG"))
        other = with_token_label(other, 0, 1, 2, Label.parse("B-MISC"))
        _, records = diff_pair(base, other, names=("gold", "fixed"))
        exported = export_disagreements(records, [base, other], names=["gold", "fixed"])

        items = read_disagreement_file(exported)
        log = tmp_path / "log.ndjson"
        session = AdjudicationSession(items, log)
        client = TestClient(create_app(session))
        for item in client.get("/api/v1/disagreements?page_size=50").json()["items"]:
            client.post(
                "/api/v1/decisions",
                json={"diff_id": item["diff_id"],
                      "chosen_label": item["labels"]["fixed"], "chooser": "adj"},
            )
        decision_lines = client.get("/api/v1/export").text
        decisions = [Decision.from_json(l) for l in decision_lines.splitlines() if l.strip()]
        loaded_records = records_from_dicts(items)
        result = apply_decisions(base, decisions, loaded_records)
        assert result == other
