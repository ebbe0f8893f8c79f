"""HTTP API for the investigator workflow.

Every endpoint is a thin wrapper over the corpus/simengine/socialgraph/
searchlink/ranking/glmstats operations; scores are always recomputed from
stored factors, never served stale. Mutations are serialized per project and
journaled before they are acknowledged.
"""

from __future__ import annotations

import os
from pathlib import Path
from typing import Optional

from fastapi import FastAPI, HTTPException, Query
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel, Field

from . import corpus, glmstats, ranking, searchlink, simengine, socialgraph
from .store import ProjectState, RevisionConflict, StoreRoot

ENV_UI_DIR = "SPDETECT_UI_DIR"


class DocumentUpload(BaseModel):
    assignment: str
    person: str
    content: str


class ProjectUpload(BaseModel):
    manifest: dict
    documents: list[DocumentUpload] = Field(default_factory=list)


class SimilarityRequest(BaseModel):
    assignment: Optional[str] = None
    k: Optional[int] = None
    w: Optional[int] = None
    report_csv: Optional[str] = None


class SocialUpload(BaseModel):
    directory: list[dict] = Field(default_factory=list)
    actions: Optional[list[dict]] = None
    actions_jsonl: Optional[str] = None


class IdentityRef(BaseModel):
    person: str
    network: str
    handle: str


class IdentityDecision(BaseModel):
    confirm: list[IdentityRef] = Field(default_factory=list)
    reject: list[IdentityRef] = Field(default_factory=list)


class SearchRequest(BaseModel):
    assignment: Optional[str] = None
    fixture: Optional[dict[str, int]] = None


class StatusPut(BaseModel):
    # revision omitted -> last writer wins (still serialized and journaled);
    # revision given -> stale writes are rejected with 409
    status: str
    revision: Optional[int] = None
    actor: str = "api"


class WeightsPut(BaseModel):
    w_cs: float
    w_sn: float
    w_se: float


class EvalRequest(BaseModel):
    assignment: Optional[str] = None


def create_app(
    store_root: Path | str,
    search_provider: Optional[searchlink.SearchProvider] = None,
    ui_dir: Optional[Path | str] = None,
) -> FastAPI:
    root = StoreRoot(store_root)
    app = FastAPI(title="spdetect", version="0.1.0")
    app.state.store_root = root
    app.state.search_provider = search_provider

    def get_state(project_id: str) -> ProjectState:
        try:
            return root.get(project_id)
        except KeyError as exc:
            raise HTTPException(status_code=404, detail=str(exc)) from exc

    def fail(exc: Exception) -> HTTPException:
        if isinstance(exc, RevisionConflict):
            return HTTPException(status_code=409, detail=str(exc))
        if isinstance(exc, searchlink.ProviderUnavailable):
            return HTTPException(status_code=503, detail=str(exc))
        if isinstance(exc, KeyError):
            return HTTPException(status_code=404, detail=str(exc.args[0] if exc.args else exc))
        return HTTPException(status_code=400, detail=str(exc))

    # -- projects -------------------------------------------------------

    @app.get("/api/projects")
    def list_projects() -> list[dict]:
        out = []
        for pid in root.list_ids():
            state = root.get(pid)
            out.append(
                {
                    "id": pid,
                    "people": len(state.project.people),
                    "assignments": sorted(state.project.assignments),
                    "documents": len(state.project.documents),
                }
            )
        return out

    @app.post("/api/projects", status_code=201)
    def create_project(body: ProjectUpload) -> dict:
        try:
            project = corpus.parse_manifest(body.manifest)
            for d in body.documents:
                if d.person not in project.people:
                    raise ValueError(f"document for unknown person id: {d.person}")
                if d.assignment not in project.assignments:
                    raise ValueError(f"document for unknown assignment id: {d.assignment}")
                doc = corpus.Document.build(
                    author=d.person, assignment=d.assignment, content=d.content.encode("utf-8")
                )
                project.documents[doc.id] = doc
        except (corpus.ManifestError, ValueError) as exc:
            raise HTTPException(status_code=400, detail=str(exc)) from exc
        if root.store(project.id).exists():
            raise HTTPException(status_code=409, detail=f"project {project.id!r} already exists")
        root.put(project.id, ProjectState(project=project))
        return {"id": project.id, "documents": len(project.documents)}

    # -- pipeline stages --------------------------------------------------

    @app.post("/api/projects/{project_id}/similarity")
    def run_similarity(project_id: str, body: SimilarityRequest) -> dict:
        state = get_state(project_id)
        try:
            if body.report_csv is not None:
                records = simengine.parse_similarity_csv(body.report_csv, state.project)
                state.similarity = records
                state.sim_params = {}
            else:
                aids = [body.assignment] if body.assignment else sorted(state.project.assignments)
                kept = [
                    r
                    for r in state.similarity
                    if state.project.documents[r.doc_i].assignment not in aids
                ]
                for aid in aids:
                    profile = state.project.assignments[aid].language_profile
                    dk, dw = simengine.DEFAULT_PARAMS.get(profile, (5, 4))
                    k = body.k or dk
                    w = body.w or dw
                    kept.extend(simengine.all_pairs_similarity(state.project, aid, k=k, w=w))
                    state.sim_params[aid] = (k, w)
                state.similarity = kept
        except (simengine.ReportImportError, ValueError, KeyError) as exc:
            raise fail(exc)
        root.put(project_id, state)
        return {"records": len(state.similarity)}

    @app.post("/api/projects/{project_id}/social")
    def upload_social(project_id: str, body: SocialUpload) -> dict:
        state = get_state(project_id)
        try:
            if body.directory:
                state.directory = socialgraph.parse_directory(body.directory)
                matches = []
                for person in state.project.people.values():
                    matches.extend(socialgraph.resolve_identities(person, state.directory))
                state.matches = socialgraph.flag_cross_person_conflicts(matches)
            if body.actions is not None:
                state.raw_actions = list(body.actions)
            elif body.actions_jsonl is not None:
                import json as _json

                state.raw_actions = [
                    _json.loads(line)
                    for line in body.actions_jsonl.splitlines()
                    if line.strip()
                ]
            state.rederive_actions()
        except (socialgraph.ActionImportError, ValueError) as exc:
            raise fail(exc)
        root.put(project_id, state)
        return {
            "matches": len(state.matches),
            "ambiguous": sum(1 for m in state.matches if m.ambiguous),
            "actions": len(state.actions),
            "skipped": [list(s) for s in state.skipped_actions],
        }

    @app.get("/api/projects/{project_id}/identities")
    def list_identities(project_id: str) -> list[dict]:
        state = get_state(project_id)
        out = []
        for m in state.matches:
            key = (m.person, m.network, m.candidate_handle)
            out.append(
                {
                    "person": m.person,
                    "network": m.network,
                    "handle": m.candidate_handle,
                    "display_name": m.display_name,
                    "distance": m.distance,
                    "ambiguous": m.ambiguous,
                    "confirmed": key in state.confirmed_identities,
                    "rejected": key in state.rejected_identities,
                }
            )
        return out

    @app.post("/api/projects/{project_id}/identities")
    def decide_identities(project_id: str, body: IdentityDecision) -> dict:
        state = get_state(project_id)
        known = {(m.person, m.network, m.candidate_handle) for m in state.matches}
        try:
            for ref in body.confirm + body.reject:
                key = (ref.person, ref.network, ref.handle)
                if key not in known:
                    raise KeyError(f"no such identity match: {key}")
            for ref in body.confirm:
                key = (ref.person, ref.network, ref.handle)
                state.confirmed_identities.add(key)
                state.rejected_identities.discard(key)
            for ref in body.reject:
                key = (ref.person, ref.network, ref.handle)
                state.rejected_identities.add(key)
                state.confirmed_identities.discard(key)
            state.rederive_actions()
        except (KeyError, ValueError) as exc:
            raise fail(exc)
        root.put(project_id, state)
        return {"actions": len(state.actions), "skipped": [list(s) for s in state.skipped_actions]}

    @app.post("/api/projects/{project_id}/search")
    def run_search(project_id: str, body: SearchRequest) -> dict:
        state = get_state(project_id)
        if body.fixture is not None:
            provider: searchlink.SearchProvider = searchlink.FixtureSearchProvider(
                {str(k): int(v) for k, v in body.fixture.items()}
            )
        elif app.state.search_provider is not None:
            provider = app.state.search_provider
        else:
            raise HTTPException(
                status_code=503, detail="no search provider configured; upload a fixture"
            )
        aids = [body.assignment] if body.assignment else sorted(state.project.assignments)
        try:
            for aid in aids:
                state.evidence[aid] = searchlink.collect_evidence(state.project, aid, provider)
        except (searchlink.ProviderUnavailable, ValueError, KeyError) as exc:
            raise fail(exc)
        root.put(project_id, state)
        return {"pairs": sum(len(v) for v in state.evidence.values())}

    # -- review -----------------------------------------------------------

    def assessment_dict(state: ProjectState, a: ranking.PairAssessment) -> dict:
        people = state.project.people
        return {
            "pair_id": a.pair_id,
            "p_i": a.p_i,
            "p_j": a.p_j,
            "p_i_name": people[a.p_i].full_name,
            "p_j_name": people[a.p_j].full_name,
            "assignment": a.assignment,
            "cs": a.cs,
            "sn": a.sn,
            "se": a.se,
            "se_hits": a.se_hits,
            "total": a.total,
            "status": a.status,
            "decided_at": a.decided_at,
            "revision": state.ledger.get(a.pair_id).revision,
        }

    @app.get("/api/projects/{project_id}/assignments/{assignment_id}/pairs")
    def list_pairs(
        project_id: str,
        assignment_id: str,
        sort: str = Query("total", pattern="^(total|cs|sn|se)$"),
    ) -> dict:
        state = get_state(project_id)
        try:
            table = state.ranked_table(assignment_id)
        except (KeyError, ValueError) as exc:
            raise fail(exc)
        if sort != "total":
            table = sorted(table, key=lambda a: (-a.factor(sort), -a.cs, a.pair_id))
        return {
            "assignment": assignment_id,
            "sort": sort,
            "pairs": [assessment_dict(state, a) for a in table],
        }

    def _excerpt(state: ProjectState, doc_id: str, span: tuple[int, int]) -> str:
        content = state.project.documents[doc_id].content
        return content[span[0] : span[1]].decode("utf-8", errors="replace")

    @app.get("/api/projects/{project_id}/pairs/{pair_id}")
    def pair_detail(project_id: str, pair_id: str) -> dict:
        state = get_state(project_id)
        try:
            aid, pi, pj = ranking.split_pair_id(pair_id)
        except ValueError as exc:
            raise fail(exc)
        assessment = state.assessment(pair_id)
        if assessment is None:
            raise HTTPException(status_code=404, detail=f"unknown pair id: {pair_id}")
        di = corpus.document_id(aid, pi)
        dj = corpus.document_id(aid, pj)
        directed = []
        for r in state.similarity:
            if {r.doc_i, r.doc_j} == {di, dj}:
                directed.append(
                    {
                        "doc_i": r.doc_i,
                        "doc_j": r.doc_j,
                        "s": r.s,
                        "matched_spans": [
                            {
                                "span_i": list(span_i),
                                "span_j": list(span_j),
                                "excerpt_i": _excerpt(state, r.doc_i, span_i),
                                "excerpt_j": _excerpt(state, r.doc_j, span_j),
                            }
                            for span_i, span_j in r.matched_spans[:40]
                        ],
                    }
                )
        pair_actions = [
            {
                "network": a.network,
                "activity": a.activity,
                "support_kind": a.support_kind,
                "source": a.source,
                "target": a.target,
                "weight": a.effective_weight,
            }
            for a in state.actions
            if a.pair == tuple(sorted((pi, pj)))
        ]
        evidence = None
        for e in state.evidence.get(aid, []):
            if tuple(sorted((e.p_i, e.p_j))) == tuple(sorted((pi, pj))):
                evidence = {
                    "keywords": sorted(e.keywords),
                    "hits": e.hits,
                    "se_norm": e.se_norm,
                }
        return {
            **assessment_dict(state, assessment),
            "directed": sorted(directed, key=lambda d: (d["doc_i"], d["doc_j"])),
            "actions": pair_actions,
            "search": evidence,
        }

    @app.put("/api/projects/{project_id}/pairs/{pair_id}/status")
    def put_status(project_id: str, pair_id: str, body: StatusPut) -> dict:
        state = get_state(project_id)
        store = root.store(project_id)
        try:
            record = store.set_status(
                state, pair_id, body.status, actor=body.actor, expected_revision=body.revision
            )
        except (RevisionConflict, KeyError, ValueError) as exc:
            raise fail(exc)
        return {
            "pair_id": pair_id,
            "status": record.status,
            "decided_at": record.decided_at,
            "revision": record.revision,
        }

    @app.get("/api/projects/{project_id}/assignments/{assignment_id}/clusters")
    def clusters(
        project_id: str,
        assignment_id: str,
        factor: str = Query("total", pattern="^(total|cs|sn|se)$"),
    ) -> dict:
        state = get_state(project_id)
        try:
            stats = ranking.cluster_stats(state.ranked_table(assignment_id), factor)
        except (KeyError, ValueError) as exc:
            raise fail(exc)
        return {
            "factor": stats.factor,
            "min": stats.min,
            "max": stats.max,
            "means": {
                "confirmed": stats.mean_confirmed,
                "not_checked": stats.mean_not_checked,
                "rejected": stats.mean_rejected,
            },
            "colors": ranking.STATUS_COLORS,
        }

    # -- exploration --------------------------------------------------------

    @app.get("/api/projects/{project_id}/graph")
    def graph(project_id: str) -> dict:
        state = get_state(project_id)
        nodes = [
            {"id": p.id, "full_name": p.full_name} for p in state.project.people.values()
        ]
        edges = [assessment_dict(state, a) for a in state.all_assessments()]
        return {"nodes": nodes, "edges": edges}

    @app.get("/api/projects/{project_id}/matrix")
    def matrix(project_id: str) -> dict:
        state = get_state(project_id)
        order = list(state.project.people)
        index = {pid: i for i, pid in enumerate(order)}
        cells = []
        for a in state.all_assessments():
            cells.append(
                {
                    **assessment_dict(state, a),
                    "row": index[a.p_i],
                    "col": index[a.p_j],
                }
            )
        return {"people": order, "assignments": sorted(state.project.assignments), "cells": cells}

    # -- configuration and evaluation ---------------------------------------

    @app.put("/api/projects/{project_id}/assignments/{assignment_id}/weights")
    def put_weights(project_id: str, assignment_id: str, body: WeightsPut) -> dict:
        state = get_state(project_id)
        assignment = state.project.assignments.get(assignment_id)
        if assignment is None:
            raise HTTPException(status_code=404, detail=f"unknown assignment id: {assignment_id}")
        try:
            weights = corpus.Weights(body.w_cs, body.w_sn, body.w_se)
        except ValueError as exc:
            raise fail(exc)
        state.project.assignments[assignment_id] = corpus.Assignment(
            id=assignment.id,
            title=assignment.title,
            keywords=assignment.keywords,
            weights=weights,
            language_profile=assignment.language_profile,
        )
        root.put(project_id, state)
        return {"assignment": assignment_id, "weights": body.model_dump()}

    @app.post("/api/projects/{project_id}/eval")
    def evaluate(project_id: str, body: EvalRequest) -> dict:
        state = get_state(project_id)
        try:
            if body.assignment:
                assessments = state.ranked_table(body.assignment)
            else:
                assessments = state.all_assessments()
            rows = glmstats.build_features(assessments, state.actions)
            comparison = glmstats.compare_models(rows)
        except (KeyError, ValueError) as exc:
            raise fail(exc)
        return glmstats.comparison_report(comparison)

    ui = Path(ui_dir) if ui_dir else Path(os.environ.get(ENV_UI_DIR, "frontend/dist"))
    if ui.is_dir():
        app.mount("/", StaticFiles(directory=ui, html=True), name="ui")
    return app


def serve(store_root: Path | str, host: str = "127.0.0.1", port: int = 8000, **kwargs) -> None:
    """Run the API; uvicorn drains in-flight requests on shutdown."""
    import uvicorn

    provider = None
    if os.environ.get(searchlink.ENV_ENDPOINT):
        provider = searchlink.HttpSearchProvider.from_env()
    app = create_app(store_root, search_provider=provider, **kwargs)
    uvicorn.run(app, host=host, port=port)
