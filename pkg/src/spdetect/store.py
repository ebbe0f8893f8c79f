"""Durable project state: one JSON document per project plus a journal.

Desk-scale corpora need no database. Every acknowledged mutation is written
through: status changes append a journal line first (fsynced), then the state
document is replaced atomically, so a restarted service reproduces exactly
what it acknowledged.
"""

from __future__ import annotations

import json
import os
import threading
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Optional

from . import corpus, ranking, searchlink, simengine, socialgraph

STATE_NAME = "state.json"
JOURNAL_NAME = "journal.ndjson"


class RevisionConflict(RuntimeError):
    """A status write carried a stale revision; the caller must refetch."""


@dataclass
class ProjectState:
    """Everything the workflow knows about one project."""

    project: corpus.Project
    similarity: list[simengine.SimilarityRecord] = field(default_factory=list)
    sim_params: dict[str, tuple[int, int]] = field(default_factory=dict)
    directory: list[socialgraph.DirectoryEntry] = field(default_factory=list)
    matches: list[socialgraph.IdentityMatch] = field(default_factory=list)
    confirmed_identities: set[tuple[str, str, str]] = field(default_factory=set)
    rejected_identities: set[tuple[str, str, str]] = field(default_factory=set)
    raw_actions: list[dict] = field(default_factory=list)
    actions: list[socialgraph.SocialAction] = field(default_factory=list)
    skipped_actions: list[tuple[int, str]] = field(default_factory=list)
    evidence: dict[str, list[searchlink.SearchEvidence]] = field(default_factory=dict)
    ledger: ranking.StatusLedger = field(default_factory=ranking.StatusLedger)

    # -- social derivation ------------------------------------------------

    def resolved_matches(self) -> list[socialgraph.IdentityMatch]:
        """Unambiguous matches plus investigator-confirmed ones, minus rejected."""
        out = []
        for m in self.matches:
            key = (m.person, m.network, m.candidate_handle)
            if key in self.rejected_identities:
                continue
            if m.ambiguous and key not in self.confirmed_identities:
                continue
            out.append(m)
        return out

    def rederive_actions(self) -> None:
        text = "\n".join(json.dumps(a) for a in self.raw_actions)
        report = socialgraph.parse_actions(text, self.resolved_matches())
        self.actions = report.actions
        self.skipped_actions = report.skipped

    # -- views -------------------------------------------------------------

    def ranked_table(self, assignment_id: str) -> list[ranking.PairAssessment]:
        return ranking.build_ranked_table(
            self.project,
            assignment_id,
            self.similarity,
            self.actions,
            self.evidence.get(assignment_id, []),
            statuses=self.ledger.records,
        )

    def all_assessments(self) -> list[ranking.PairAssessment]:
        out = []
        for aid in self.project.assignments:
            out.extend(self.ranked_table(aid))
        return out

    def assessment(self, pid: str) -> Optional[ranking.PairAssessment]:
        aid, _, _ = ranking.split_pair_id(pid)
        for a in self.ranked_table(aid):
            if a.pair_id == pid:
                return a
        return None


# -- serialization ----------------------------------------------------------


def state_to_dict(state: ProjectState) -> dict:
    return {
        "project": corpus.project_to_dict(state.project),
        "similarity": [
            {
                "doc_i": r.doc_i,
                "doc_j": r.doc_j,
                "s": r.s,
                "matched_spans": [list(map(list, span)) for span in r.matched_spans],
            }
            for r in state.similarity
        ],
        "sim_params": {aid: list(kw) for aid, kw in state.sim_params.items()},
        "directory": [
            {"network": d.network, "handle": d.handle, "display_name": d.display_name}
            for d in state.directory
        ],
        "matches": [
            {
                "person": m.person,
                "network": m.network,
                "candidate_handle": m.candidate_handle,
                "display_name": m.display_name,
                "distance": m.distance,
                "ambiguous": m.ambiguous,
            }
            for m in state.matches
        ],
        "confirmed_identities": sorted(map(list, state.confirmed_identities)),
        "rejected_identities": sorted(map(list, state.rejected_identities)),
        "raw_actions": state.raw_actions,
        "skipped_actions": [list(s) for s in state.skipped_actions],
        "evidence": {
            aid: [
                {
                    "p_i": e.p_i,
                    "p_j": e.p_j,
                    "keywords": sorted(e.keywords),
                    "hits": e.hits,
                    "se_norm": e.se_norm,
                }
                for e in items
            ]
            for aid, items in state.evidence.items()
        },
        "statuses": {
            pid: {"status": r.status, "decided_at": r.decided_at, "revision": r.revision}
            for pid, r in state.ledger.records.items()
        },
        "journal": [
            {
                "at": j.at,
                "pair_id": j.pair_id,
                "actor": j.actor,
                "prior_status": j.prior_status,
                "new_status": j.new_status,
            }
            for j in state.ledger.journal
        ],
    }


def state_from_dict(data: dict) -> ProjectState:
    project = corpus.project_from_dict(data["project"])
    state = ProjectState(project=project)
    state.similarity = [
        simengine.SimilarityRecord(
            doc_i=r["doc_i"],
            doc_j=r["doc_j"],
            s=r["s"],
            matched_spans=tuple(
                (tuple(span[0]), tuple(span[1])) for span in r.get("matched_spans", [])
            ),
        )
        for r in data.get("similarity", [])
    ]
    state.sim_params = {aid: (kw[0], kw[1]) for aid, kw in data.get("sim_params", {}).items()}
    state.directory = [
        socialgraph.DirectoryEntry(d["network"], d["handle"], d["display_name"])
        for d in data.get("directory", [])
    ]
    state.matches = [
        socialgraph.IdentityMatch(
            person=m["person"],
            network=m["network"],
            candidate_handle=m["candidate_handle"],
            display_name=m.get("display_name", ""),
            distance=m["distance"],
            ambiguous=m["ambiguous"],
        )
        for m in data.get("matches", [])
    ]
    state.confirmed_identities = {tuple(t) for t in data.get("confirmed_identities", [])}
    state.rejected_identities = {tuple(t) for t in data.get("rejected_identities", [])}
    state.raw_actions = list(data.get("raw_actions", []))
    state.rederive_actions()
    state.evidence = {
        aid: [
            searchlink.SearchEvidence(
                p_i=e["p_i"],
                p_j=e["p_j"],
                assignment=aid,
                keywords=frozenset(e["keywords"]),
                hits=e["hits"],
                se_norm=e["se_norm"],
            )
            for e in items
        ]
        for aid, items in data.get("evidence", {}).items()
    }
    state.ledger = ranking.StatusLedger(
        records={
            pid: ranking.StatusRecord(
                status=r["status"], decided_at=r.get("decided_at"), revision=r["revision"]
            )
            for pid, r in data.get("statuses", {}).items()
        },
        journal=[
            ranking.JournalEntry(
                at=j["at"],
                pair_id=j["pair_id"],
                actor=j["actor"],
                prior_status=j["prior_status"],
                new_status=j["new_status"],
            )
            for j in data.get("journal", [])
        ],
    )
    return state


# -- single project directory -------------------------------------------------


class ProjectStore:
    """Single-writer persistence for one project directory."""

    def __init__(self, root: Path | str):
        self.root = Path(root)
        self._lock = threading.RLock()

    @property
    def state_path(self) -> Path:
        return self.root / STATE_NAME

    @property
    def journal_path(self) -> Path:
        return self.root / JOURNAL_NAME

    def exists(self) -> bool:
        return self.state_path.is_file()

    def load(self) -> ProjectState:
        try:
            data = json.loads(self.state_path.read_text(encoding="utf-8"))
        except OSError as exc:
            raise FileNotFoundError(f"no project state at {self.state_path}: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise ValueError(f"corrupt project state at {self.state_path}: {exc}") from exc
        return state_from_dict(data)

    def save(self, state: ProjectState) -> None:
        with self._lock:
            self.root.mkdir(parents=True, exist_ok=True)
            tmp = self.state_path.with_suffix(".json.tmp")
            payload = json.dumps(state_to_dict(state), indent=1)
            with open(tmp, "w", encoding="utf-8") as fh:
                fh.write(payload)
                fh.flush()
                os.fsync(fh.fileno())
            os.replace(tmp, self.state_path)

    def append_journal(self, entries: Iterable[ranking.JournalEntry]) -> None:
        with self._lock:
            self.root.mkdir(parents=True, exist_ok=True)
            with open(self.journal_path, "a", encoding="utf-8") as fh:
                for j in entries:
                    fh.write(
                        json.dumps(
                            {
                                "at": j.at,
                                "pair_id": j.pair_id,
                                "actor": j.actor,
                                "prior_status": j.prior_status,
                                "new_status": j.new_status,
                            }
                        )
                        + "\n"
                    )
                fh.flush()
                os.fsync(fh.fileno())

    def set_status(
        self,
        state: ProjectState,
        pid: str,
        status: str,
        actor: str,
        expected_revision: Optional[int] = None,
    ) -> ranking.StatusRecord:
        """Validated, journaled, durable status change (the single writer)."""
        with self._lock:
            if state.assessment(pid) is None:
                raise KeyError(f"unknown pair id: {pid}")
            current = state.ledger.get(pid)
            if expected_revision is not None and expected_revision != current.revision:
                raise RevisionConflict(
                    f"revision {expected_revision} is stale; current is {current.revision}"
                )
            record = state.ledger.set_status(pid, status, actor)
            self.append_journal(state.ledger.journal[-1:])
            self.save(state)
            return record


# -- a root directory of projects ----------------------------------------------


class StoreRoot:
    """Many project stores under one root, keyed by directory name."""

    def __init__(self, root: Path | str):
        self.root = Path(root)
        if not self.root.is_dir():
            raise FileNotFoundError(f"store root does not exist: {self.root}")
        self._stores: dict[str, ProjectStore] = {}
        self._states: dict[str, ProjectState] = {}
        self._lock = threading.Lock()

    def list_ids(self) -> list[str]:
        on_disk = sorted(
            p.name for p in self.root.iterdir() if p.is_dir() and (p / STATE_NAME).is_file()
        )
        with self._lock:
            return sorted(set(on_disk) | set(self._states))

    def store(self, project_id: str) -> ProjectStore:
        with self._lock:
            if project_id not in self._stores:
                self._stores[project_id] = ProjectStore(self.root / project_id)
            return self._stores[project_id]

    def get(self, project_id: str) -> ProjectState:
        with self._lock:
            if project_id in self._states:
                return self._states[project_id]
        store = self.store(project_id)
        if not store.exists():
            raise KeyError(f"unknown project id: {project_id}")
        state = store.load()
        with self._lock:
            self._states[project_id] = state
        return state

    def put(self, project_id: str, state: ProjectState) -> None:
        self.store(project_id).save(state)
        with self._lock:
            self._states[project_id] = state

    def drop_cache(self) -> None:
        with self._lock:
            self._states.clear()
