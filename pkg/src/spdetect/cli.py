"""Batch driver: every pipeline stage as a subcommand over a project directory.

A project directory holds `project.json`, a `submissions/` tree, and the
derived `state.json` + `journal.ndjson`. All output is deterministic given
the same inputs and the fixture search provider, so full runs can be diffed.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import corpus, glmstats, ranking, searchlink, simengine, socialgraph, synthcohort
from .store import ProjectState, ProjectStore


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except BrokenPipeError:
        return 1
    except Exception as exc:  # one-line machine-parsable failure
        print(f"error: {exc}", file=sys.stderr)
        return 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="spdetect",
        description="Rank potential plagiarism pairs from content, social and search evidence.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_project(p):
        p.add_argument("--project", required=True, type=Path, help="project directory")

    p = sub.add_parser("ingest", help="load manifest and submission tree into state.json")
    add_project(p)
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("similarity", help="run the fingerprint engine or import a report")
    add_project(p)
    p.add_argument("--assignment", help="restrict to one assignment")
    p.add_argument("--k", type=int, help="gram length")
    p.add_argument("--w", type=int, help="winnowing window size")
    p.add_argument("--import", dest="import_csv", type=Path, help="CSV report (doc_i,doc_j,s_ij)")
    p.set_defaults(func=cmd_similarity)

    p = sub.add_parser("social", help="resolve identities and import actions")
    add_project(p)
    p.add_argument("--directory", type=Path, help="account directory JSON file")
    p.add_argument("--actions", type=Path, help="JSON-lines action file")
    p.add_argument(
        "--confirm",
        action="append",
        default=[],
        metavar="PERSON:NETWORK:HANDLE",
        help="confirm an ambiguous identity match (repeatable)",
    )
    p.add_argument(
        "--reject",
        action="append",
        default=[],
        metavar="PERSON:NETWORK:HANDLE",
        help="reject an identity match (repeatable)",
    )
    p.set_defaults(func=cmd_social)

    p = sub.add_parser("search", help="collect search evidence for every pair")
    add_project(p)
    p.add_argument("--assignment", help="restrict to one assignment")
    p.add_argument("--fixture", type=Path, help="fixture JSON mapping query -> hits")
    p.set_defaults(func=cmd_search)

    p = sub.add_parser("rank", help="print the ranked pairwise table as CSV")
    add_project(p)
    p.add_argument("--assignment", required=True)
    p.add_argument("--sort", choices=["total", "cs", "sn", "se"], default="total")
    p.add_argument("--weights", help="override assignment weights as cs,sn,se")
    p.set_defaults(func=cmd_rank)

    p = sub.add_parser("status", help="confirm or reject a ranked pair")
    add_project(p)
    p.add_argument("pair_id", help="assignment:person_i:person_j")
    p.add_argument("new_status", choices=list(ranking.STATUSES))
    p.add_argument("--actor", default="cli")
    p.set_defaults(func=cmd_status)

    p = sub.add_parser("eval", help="compare the evaluation models on decided pairs")
    add_project(p)
    p.add_argument("--assignment", help="restrict to one assignment")
    p.add_argument(
        "--selftest",
        action="store_true",
        help="run the seeded synthetic-cohort self-check instead of project data",
    )
    p.add_argument("--seed", type=int, default=synthcohort.DEFAULT_SEED)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("export", help="write similarity, pairs or feature CSV to stdout")
    add_project(p)
    p.add_argument("--kind", choices=["similarity", "pairs", "features"], default="pairs")
    p.add_argument("--assignment", help="required for --kind pairs")
    p.set_defaults(func=cmd_export)

    p = sub.add_parser("serve", help="run the HTTP API")
    p.add_argument("--store", required=True, type=Path, help="root directory of projects")
    p.add_argument("--addr", default="127.0.0.1:8000")
    p.set_defaults(func=cmd_serve)

    return parser


def _open(args) -> tuple[ProjectStore, ProjectState]:
    store = ProjectStore(args.project)
    if not store.exists():
        raise FileNotFoundError(f"no state.json under {args.project}; run `spdetect ingest` first")
    return store, store.load()


def cmd_ingest(args) -> int:
    project = corpus.load_project(args.project)
    store = ProjectStore(args.project)
    if store.exists():
        # re-ingest keeps decisions but replaces the corpus
        state = store.load()
        state.project = project
    else:
        state = ProjectState(project=project)
    store.save(state)
    print(
        f"ingested project {project.id}: {len(project.people)} people, "
        f"{len(project.assignments)} assignments, {len(project.documents)} documents"
    )
    return 0


def cmd_similarity(args) -> int:
    store, state = _open(args)
    if args.import_csv:
        state.similarity = simengine.import_similarity_report(args.import_csv, state.project)
        state.sim_params = {}
    else:
        aids = [args.assignment] if args.assignment else sorted(state.project.assignments)
        kept = [
            r for r in state.similarity
            if state.project.documents[r.doc_i].assignment not in aids
        ]
        for aid in aids:
            if aid not in state.project.assignments:
                raise KeyError(f"unknown assignment id: {aid}")
            profile = state.project.assignments[aid].language_profile
            dk, dw = simengine.DEFAULT_PARAMS.get(profile, (5, 4))
            k = args.k or dk
            w = args.w or dw
            kept.extend(simengine.all_pairs_similarity(state.project, aid, k=k, w=w))
            state.sim_params[aid] = (k, w)
        state.similarity = kept
    store.save(state)
    print(f"similarity records: {len(state.similarity)}")
    return 0


def cmd_social(args) -> int:
    store, state = _open(args)
    if args.directory:
        state.directory = socialgraph.load_directory(args.directory)
        matches = []
        for person in state.project.people.values():
            matches.extend(socialgraph.resolve_identities(person, state.directory))
        state.matches = socialgraph.flag_cross_person_conflicts(matches)
    if args.actions:
        text = Path(args.actions).read_text(encoding="utf-8")
        state.raw_actions = [json.loads(line) for line in text.splitlines() if line.strip()]
    known = {(m.person, m.network, m.candidate_handle) for m in state.matches}
    for flag, bucket in ((args.confirm, state.confirmed_identities),
                         (args.reject, state.rejected_identities)):
        for ref in flag:
            parts = tuple(ref.split(":"))
            if len(parts) != 3:
                raise ValueError(f"expected PERSON:NETWORK:HANDLE, got {ref!r}")
            if parts not in known:
                raise KeyError(f"no such identity match: {ref}")
            bucket.add(parts)
    state.confirmed_identities -= state.rejected_identities
    state.rederive_actions()
    store.save(state)
    ambiguous = [m for m in state.matches if m.ambiguous]
    print(
        f"matches: {len(state.matches)} ({len(ambiguous)} ambiguous), "
        f"actions: {len(state.actions)}, skipped: {len(state.skipped_actions)}"
    )
    for lineno, reason in state.skipped_actions:
        print(f"skipped line {lineno}: {reason}")
    for m in ambiguous:
        print(f"ambiguous: {m.person} ~ {m.display_name!r} ({m.network}:{m.candidate_handle})")
    return 0


def cmd_search(args) -> int:
    store, state = _open(args)
    if args.fixture:
        provider = searchlink.FixtureSearchProvider.from_file(args.fixture)
    else:
        provider = searchlink.HttpSearchProvider.from_env()
    aids = [args.assignment] if args.assignment else sorted(state.project.assignments)
    for aid in aids:
        state.evidence[aid] = searchlink.collect_evidence(state.project, aid, provider)
    store.save(state)
    print(f"search evidence pairs: {sum(len(v) for v in state.evidence.values())}")
    return 0


def cmd_rank(args) -> int:
    store, state = _open(args)
    if args.weights:
        parts = args.weights.split(",")
        if len(parts) != 3:
            raise ValueError("--weights expects three comma-separated numbers: cs,sn,se")
        w = corpus.Weights(float(parts[0]), float(parts[1]), float(parts[2]))
        a = state.project.assignments.get(args.assignment)
        if a is None:
            raise KeyError(f"unknown assignment id: {args.assignment}")
        state.project.assignments[args.assignment] = corpus.Assignment(
            id=a.id, title=a.title, keywords=a.keywords, weights=w,
            language_profile=a.language_profile,
        )
        store.save(state)
    table = state.ranked_table(args.assignment)
    if args.sort != "total":
        table = sorted(table, key=lambda a: (-a.factor(args.sort), -a.cs, a.pair_id))
    sys.stdout.write(ranking.ranked_table_csv(table))
    return 0


def cmd_status(args) -> int:
    store, state = _open(args)
    record = store.set_status(state, args.pair_id, args.new_status, actor=args.actor)
    print(f"{args.pair_id} -> {record.status} (revision {record.revision})")
    return 0


def cmd_eval(args) -> int:
    if args.selftest:
        return _eval_selftest(args.seed)
    store, state = _open(args)
    if args.assignment:
        assessments = state.ranked_table(args.assignment)
    else:
        assessments = state.all_assessments()
    rows = glmstats.build_features(assessments, state.actions)
    comparison = glmstats.compare_models(rows)
    print(json.dumps(glmstats.comparison_report(comparison), indent=2, sort_keys=True))
    return 0


def _eval_selftest(seed: int) -> int:
    linked = synthcohort.run_cohort_comparison(
        seed, synthcohort.CohortConfig(linked=True)
    )
    null = synthcohort.run_cohort_comparison(
        seed, synthcohort.CohortConfig(linked=False)
    )
    print(f"selftest seed {seed}")
    print(
        "linked cohort: "
        f"RD_woSocio={linked.nested.residual_deviance:.3f} "
        f"RD_wSocio={linked.full.residual_deviance:.3f} "
        f"LRT p={linked.lrt.p_value:.3e}"
    )
    print(
        "null cohort:   "
        f"RD_woSocio={null.nested.residual_deviance:.3f} "
        f"RD_wSocio={null.full.residual_deviance:.3f} "
        f"LRT p={null.lrt.p_value:.3e}"
    )
    ok = linked.full.residual_deviance < linked.nested.residual_deviance
    print("social evidence reduces residual deviance:", "yes" if ok else "NO")
    return 0 if ok else 1


def cmd_export(args) -> int:
    store, state = _open(args)
    if args.kind == "similarity":
        sys.stdout.write(simengine.similarity_csv(state.similarity))
    elif args.kind == "pairs":
        if not args.assignment:
            raise ValueError("--kind pairs requires --assignment")
        sys.stdout.write(ranking.ranked_table_csv(state.ranked_table(args.assignment)))
    else:
        rows = glmstats.build_features(state.all_assessments(), state.actions)
        sys.stdout.write(glmstats.features_csv(rows))
    return 0


def cmd_serve(args) -> int:
    from .service import serve

    host, _, port = args.addr.partition(":")
    serve(args.store, host=host or "127.0.0.1", port=int(port or 8000))
    return 0


if __name__ == "__main__":
    sys.exit(main())
