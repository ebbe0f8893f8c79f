"""Fused pairwise ranking and the investigator confirm/reject workflow.

Every unordered author pair with any evidence gets one assessment per
assignment: cs is the stronger of the two directed similarities, sn the
saturating social score, se the normalized search score, and the total is
their weighted average under the assignment's weights. Status changes are
journaled append-only so the final review stage has an audit trail.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from datetime import datetime, timezone
from typing import Iterable, Mapping, Optional, Sequence

from .corpus import Project, Weights, document_id
from .searchlink import SearchEvidence
from .simengine import SimilarityRecord
from .socialgraph import SocialAction, actions_by_pair, sn_score

NOT_CHECKED = "not_checked"
REJECTED = "rejected"
CONFIRMED = "confirmed"
STATUSES = (NOT_CHECKED, REJECTED, CONFIRMED)

# Cluster interval colors by review status.
STATUS_COLORS = {CONFIRMED: "red", NOT_CHECKED: "orange", REJECTED: "green"}

FACTORS = ("cs", "sn", "se", "total")


def pair_id(assignment_id: str, p_i: str, p_j: str) -> str:
    a, b = sorted((p_i, p_j))
    return f"{assignment_id}:{a}:{b}"


def split_pair_id(pid: str) -> tuple[str, str, str]:
    parts = pid.split(":")
    if len(parts) != 3:
        raise ValueError(f"malformed pair id: {pid!r}")
    return parts[0], parts[1], parts[2]


@dataclass(frozen=True)
class PairAssessment:
    p_i: str
    p_j: str
    assignment: str
    cs: float
    sn: float
    se: float
    se_hits: int
    total: float
    status: str = NOT_CHECKED
    decided_at: Optional[str] = None

    @property
    def pair_id(self) -> str:
        return pair_id(self.assignment, self.p_i, self.p_j)

    def factor(self, name: str) -> float:
        if name not in FACTORS:
            raise ValueError(f"unknown factor: {name!r}")
        return getattr(self, name)


@dataclass(frozen=True)
class FactorClusterStats:
    factor: str
    min: float
    max: float
    mean_confirmed: Optional[float] = None
    mean_not_checked: Optional[float] = None
    mean_rejected: Optional[float] = None


def total_score(cs: float, sn: float, se: float, weights: Weights) -> float:
    """Weighted average of the three factors under per-assignment weights."""
    for name, v in (("cs", cs), ("sn", sn), ("se", se)):
        if not 0.0 <= v <= 1.0:
            raise ValueError(f"{name} must be in [0, 1], got {v}")
    return weights.w_cs * cs + weights.w_sn * sn + weights.w_se * se


@dataclass(frozen=True)
class JournalEntry:
    at: str
    pair_id: str
    actor: str
    prior_status: str
    new_status: str


@dataclass(frozen=True)
class StatusRecord:
    status: str = NOT_CHECKED
    decided_at: Optional[str] = None
    revision: int = 0


@dataclass
class StatusLedger:
    """Investigator decisions keyed by pair id, with an append-only journal."""

    records: dict[str, StatusRecord] = field(default_factory=dict)
    journal: list[JournalEntry] = field(default_factory=list)

    def get(self, pid: str) -> StatusRecord:
        return self.records.get(pid, StatusRecord())

    def set_status(
        self,
        pid: str,
        status: str,
        actor: str,
        known: Optional[Iterable[str]] = None,
        now: Optional[str] = None,
    ) -> StatusRecord:
        """Apply a decision; one journal entry per call, idempotent or not."""
        if status not in STATUSES:
            raise ValueError(f"unknown status: {status!r}")
        if known is not None and pid not in set(known):
            raise KeyError(f"unknown pair id: {pid}")
        prior = self.get(pid)
        ts = now if now is not None else datetime.now(timezone.utc).isoformat()
        decided = ts if status in (CONFIRMED, REJECTED) else None
        record = StatusRecord(status=status, decided_at=decided, revision=prior.revision + 1)
        self.records[pid] = record
        self.journal.append(
            JournalEntry(
                at=ts, pair_id=pid, actor=actor, prior_status=prior.status, new_status=status
            )
        )
        return record


def build_ranked_table(
    project: Project,
    assignment_id: str,
    similarity: Iterable[SimilarityRecord],
    actions: Iterable[SocialAction] = (),
    evidence: Iterable[SearchEvidence] = (),
    statuses: Optional[Mapping[str, StatusRecord]] = None,
) -> list[PairAssessment]:
    """One assessment per unordered submitter pair with any evidence.

    Sorted by total descending; ties broken by cs descending, then pair id.
    Pairs with cs = sn = se = 0 are suppressed to keep the review queue short.
    """
    assignment = project.assignments.get(assignment_id)
    if assignment is None:
        raise KeyError(f"unknown assignment id: {assignment_id}")
    statuses = statuses or {}

    docs = {d.id: d for d in project.documents_for_assignment(assignment_id)}
    directed = {
        (r.doc_i, r.doc_j): r.s
        for r in similarity
        if r.doc_i in docs and r.doc_j in docs
    }
    grouped_actions = actions_by_pair(actions)
    evidence_by_pair = {
        tuple(sorted((e.p_i, e.p_j))): e for e in evidence if e.assignment == assignment_id
    }

    submitters = sorted({d.author for d in docs.values()})
    table = []
    for i, pi in enumerate(submitters):
        for pj in submitters[i + 1 :]:
            di = document_id(assignment_id, pi)
            dj = document_id(assignment_id, pj)
            cs = max(directed.get((di, dj), 0.0), directed.get((dj, di), 0.0))
            sn = sn_score(grouped_actions.get((pi, pj), ()))
            ev = evidence_by_pair.get((pi, pj))
            se = ev.se_norm if ev else 0.0
            hits = ev.hits if ev else 0
            if cs == 0.0 and sn == 0.0 and se == 0.0:
                continue
            pid = pair_id(assignment_id, pi, pj)
            rec = statuses.get(pid, StatusRecord())
            table.append(
                PairAssessment(
                    p_i=pi,
                    p_j=pj,
                    assignment=assignment_id,
                    cs=cs,
                    sn=sn,
                    se=se,
                    se_hits=hits,
                    total=total_score(cs, sn, se, assignment.weights),
                    status=rec.status,
                    decided_at=rec.decided_at,
                )
            )
    table.sort(key=lambda a: (-a.total, -a.cs, a.pair_id))
    return table


def confirmed_set(project: Project, assignment_id: str, ledger: StatusLedger) -> set[tuple[str, str]]:
    """Document pairs of all confirmed assessments for an assignment."""
    if assignment_id not in project.assignments:
        raise KeyError(f"unknown assignment id: {assignment_id}")
    pairs = set()
    for pid, rec in ledger.records.items():
        if rec.status != CONFIRMED:
            continue
        aid, pi, pj = split_pair_id(pid)
        if aid != assignment_id:
            continue
        pairs.add((document_id(aid, pi), document_id(aid, pj)))
    return pairs


def cluster_stats(assessments: Sequence[PairAssessment], factor: str) -> FactorClusterStats:
    """Interval bounds plus per-status cluster means for one factor."""
    if factor not in FACTORS:
        raise ValueError(f"unknown factor: {factor!r}")
    if not assessments:
        raise ValueError("cluster_stats needs at least one assessment")
    values = [a.factor(factor) for a in assessments]
    means = {}
    for status in STATUSES:
        cluster = [a.factor(factor) for a in assessments if a.status == status]
        means[status] = sum(cluster) / len(cluster) if cluster else None
    return FactorClusterStats(
        factor=factor,
        min=min(values),
        max=max(values),
        mean_confirmed=means[CONFIRMED],
        mean_not_checked=means[NOT_CHECKED],
        mean_rejected=means[REJECTED],
    )


def ranked_table_csv(assessments: Sequence[PairAssessment]) -> str:
    lines = ["p_i,p_j,assignment,cs,sn,se,total,status"]
    for a in assessments:
        lines.append(
            f"{a.p_i},{a.p_j},{a.assignment},{a.cs:.6f},{a.sn:.6f},{a.se:.6f},"
            f"{a.total:.6f},{a.status}"
        )
    return "\n".join(lines) + "\n"


def with_status(assessment: PairAssessment, record: StatusRecord) -> PairAssessment:
    return replace(assessment, status=record.status, decided_at=record.decided_at)
