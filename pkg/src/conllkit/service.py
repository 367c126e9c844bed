"""HTTP adjudication service: serve the disagreement queue, persist decisions.

The session holds the disagreement set exported by ``conllkit
export-disagreements`` plus an append-only decision log. Every decision is
flushed and fsynced to the log before the request is acknowledged, so a crash
after acknowledgment never loses it; restarting with the same log replays it.
Re-deciding a diff_id appends (never rewrites); exports take the latest
decision per id.

Reads may run concurrently; decision writes are serialized through a lock.
"""

from __future__ import annotations

import fnmatch
import os
import threading
from dataclasses import dataclass
from datetime import datetime, timezone
from fractions import Fraction
from pathlib import Path

from pydantic import BaseModel

from .diffing import Decision
from .errors import BadPage, MalformedLabel, UnknownDiffId
from .model import DocFormat, DocMetadata, Domain, Label
from .reporting import pct_float

MAX_PAGE_SIZE = 500


class DecisionBody(BaseModel):
    diff_id: str
    chosen_label: str
    chooser: str = ""
    note: str | None = None


@dataclass
class Progress:
    total: int
    decided: int

    @property
    def remaining(self) -> int:
        return self.total - self.decided

    def to_dict(self) -> dict:
        return {"total": self.total, "decided": self.decided, "remaining": self.remaining}


class AdjudicationSession:
    """Disagreement queue + durable decision log, independent of any server."""

    def __init__(
        self,
        disagreements: list[dict],
        log_path: str | Path,
        metadata: dict[int, DocMetadata] | None = None,
    ):
        order = sorted(
            disagreements,
            key=lambda d: (d["doc_index"], d["sentence_index"], d["token_index"]),
        )
        self._items = order
        self._by_id = {d["diff_id"]: d for d in order}
        if len(self._by_id) != len(order):
            raise ValueError("duplicate diff_id in disagreement set")
        self._metadata = metadata or {}
        self._log_path = Path(log_path)
        self._log: list[Decision] = []
        self._latest: dict[str, Decision] = {}
        self._write_lock = threading.Lock()
        if self._log_path.exists():
            with open(self._log_path, encoding="utf-8") as fh:
                for line in fh:
                    if line.strip():
                        self._replay(Decision.from_json(line))

    def _replay(self, decision: Decision) -> None:
        if decision.diff_id not in self._by_id:
            raise UnknownDiffId(decision.diff_id)
        self._log.append(decision)
        self._latest[decision.diff_id] = decision

    @property
    def version_names(self) -> list[str]:
        if not self._items:
            return []
        return list(self._items[0]["labels"].keys())

    def progress(self) -> Progress:
        return Progress(total=len(self._items), decided=len(self._latest))

    def item(self, diff_id: str) -> dict:
        if diff_id not in self._by_id:
            raise UnknownDiffId(diff_id)
        return self._with_decision(self._by_id[diff_id])

    def _with_decision(self, item: dict) -> dict:
        out = dict(item)
        decision = self._latest.get(item["diff_id"])
        out["decision"] = (
            None
            if decision is None
            else {
                "chosen_label": decision.chosen_label,
                "chooser": decision.chooser,
                "timestamp": decision.timestamp,
                "note": decision.note,
            }
        )
        return out

    def list_disagreements(
        self,
        *,
        undecided_only: bool = False,
        domain: Domain | None = None,
        doc_format: DocFormat | None = None,
        version_pattern: str | None = None,
        page: int = 0,
        page_size: int = 50,
    ) -> dict:
        """One deterministic page of the (filtered) queue."""
        if page < 0 or page_size < 1 or page_size > MAX_PAGE_SIZE:
            raise BadPage(
                f"page must be >= 0 and 1 <= page_size <= {MAX_PAGE_SIZE}; "
                f"got page={page}, page_size={page_size}"
            )
        items = self._items
        if undecided_only:
            items = [d for d in items if d["diff_id"] not in self._latest]
        if domain is not None or doc_format is not None:
            items = [d for d in items if self._meta_match(d, domain, doc_format)]
        if version_pattern is not None:
            items = [d for d in items if self._pattern_match(d, version_pattern)]
        start = page * page_size
        chunk = items[start:start + page_size]
        return {
            "total": len(items),
            "page": page,
            "page_size": page_size,
            "items": [self._with_decision(d) for d in chunk],
        }

    def _meta_match(self, item: dict, domain, doc_format) -> bool:
        meta = self._metadata.get(item["doc_index"], DocMetadata())
        if domain is not None and meta.domain is not domain:
            return False
        if doc_format is not None and meta.doc_format is not doc_format:
            return False
        return True

    @staticmethod
    def _pattern_match(item: dict, pattern: str) -> bool:
        labels = item["labels"]
        for name, label in labels.items():
            if fnmatch.fnmatch(name, pattern):
                if any(other != label for other in labels.values()):
                    return True
        return False

    def record_decision(
        self, diff_id: str, chosen_label: str, chooser: str, note: str | None = None
    ) -> Progress:
        """Append a decision durably, then report progress.

        The decision line hits disk (flush + fsync) before this returns;
        superseding decisions are appended, never rewritten.
        """
        if diff_id not in self._by_id:
            raise UnknownDiffId(diff_id)
        # parse validates and canonicalizes (type case), so stats and exports
        # compare like with like
        canonical = str(Label.parse(chosen_label))
        decision = Decision(
            diff_id=diff_id,
            chosen_label=canonical,
            chooser=chooser,
            timestamp=datetime.now(timezone.utc).isoformat(),
            note=note,
        )
        with self._write_lock:
            with open(self._log_path, "a", encoding="utf-8") as fh:
                fh.write(decision.to_json() + "\n")
                fh.flush()
                os.fsync(fh.fileno())
            self._log.append(decision)
            self._latest[diff_id] = decision
        return self.progress()

    def stats(self) -> dict:
        """Per-version win rates over decided records, plus the neither bucket."""
        decided = list(self._latest.values())
        names = self.version_names
        wins = {name: 0 for name in names}
        neither = 0
        for decision in decided:
            labels = self._by_id[decision.diff_id]["labels"]
            matched = False
            for name in names:
                if labels.get(name) == decision.chosen_label:
                    wins[name] += 1
                    matched = True
            if not matched:
                neither += 1
        n = len(decided)

        def rate(count: int) -> float:
            return pct_float(Fraction(count, n)) if n else 0.0

        return {
            "decided": n,
            "per_version": {
                name: {"wins": wins[name], "percent": rate(wins[name])} for name in names
            },
            "neither": {"count": neither, "percent": rate(neither)},
        }

    def export_lines(self) -> list[str]:
        """Latest decision per diff_id, in queue order; byte-stable per log."""
        lines = []
        for item in self._items:
            decision = self._latest.get(item["diff_id"])
            if decision is not None:
                lines.append(decision.to_json())
        return lines

    @property
    def log(self) -> list[Decision]:
        return list(self._log)


def create_app(session: AdjudicationSession, static_dir: str | Path | None = None):
    """Build the FastAPI app exposing the /api/v1 adjudication endpoints."""
    from fastapi import FastAPI, HTTPException
    from fastapi.responses import PlainTextResponse

    app = FastAPI(title="conllkit adjudication", docs_url=None, redoc_url=None)

    @app.get("/api/v1/disagreements")
    def list_disagreements(
        undecided: bool = False,
        domain: str | None = None,
        doc_format: str | None = None,
        version_pattern: str | None = None,
        page: int = 0,
        page_size: int = 50,
    ):
        try:
            return session.list_disagreements(
                undecided_only=undecided,
                domain=Domain.parse(domain) if domain else None,
                doc_format=DocFormat.parse(doc_format) if doc_format else None,
                version_pattern=version_pattern,
                page=page,
                page_size=page_size,
            )
        except BadPage as exc:
            raise HTTPException(status_code=400, detail=str(exc))
        except ValueError as exc:
            raise HTTPException(status_code=400, detail=str(exc))

    @app.get("/api/v1/disagreements/{diff_id}")
    def get_disagreement(diff_id: str):
        try:
            return session.item(diff_id)
        except UnknownDiffId as exc:
            raise HTTPException(status_code=404, detail=str(exc))

    @app.post("/api/v1/decisions")
    def post_decision(body: DecisionBody):
        try:
            progress = session.record_decision(
                body.diff_id, body.chosen_label, body.chooser, body.note
            )
        except UnknownDiffId as exc:
            raise HTTPException(status_code=404, detail=str(exc))
        except MalformedLabel as exc:
            raise HTTPException(status_code=400, detail=str(exc))
        return {"progress": progress.to_dict()}

    @app.get("/api/v1/progress")
    def get_progress():
        progress = session.progress()
        out = progress.to_dict()
        out["per_version_stats"] = session.stats()
        return out

    @app.get("/api/v1/export")
    def export():
        body = "".join(line + "\n" for line in session.export_lines())
        return PlainTextResponse(body, media_type="application/x-ndjson")

    if static_dir is not None:
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=str(static_dir), html=True), name="ui")

    return app


def serve(
    disagreements_path: str | Path,
    log_path: str | Path,
    *,
    port: int = 8700,
    host: str = "127.0.0.1",
    static_dir: str | Path | None = None,
    metadata: dict[int, DocMetadata] | None = None,
) -> None:
    import uvicorn

    from .diffing import read_disagreement_file

    with open(disagreements_path, encoding="utf-8") as fh:
        items = read_disagreement_file(fh)
    session = AdjudicationSession(items, log_path, metadata=metadata)
    app = create_app(session, static_dir=static_dir)
    uvicorn.run(app, host=host, port=port, log_level="warning")
