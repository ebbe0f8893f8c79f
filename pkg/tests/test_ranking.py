import random

import pytest

from spdetect import corpus, ranking, searchlink, simengine
from spdetect import socialgraph as sg
from spdetect.corpus import Weights


def test_total_score_examples():
    assert ranking.total_score(0.8, 1.0, 0.5, Weights(0.5, 0.3, 0.2)) == pytest.approx(0.80)
    assert ranking.total_score(0.42, 0.9, 0.1, Weights(1.0, 0.0, 0.0)) == pytest.approx(0.42)
    third = 1 / 3
    assert ranking.total_score(0.3, 0.6, 0.9, Weights(third, third, third)) == pytest.approx(0.6)


def test_total_score_range_check():
    with pytest.raises(ValueError, match="cs"):
        ranking.total_score(1.2, 0.0, 0.0, Weights(1.0, 0.0, 0.0))
    with pytest.raises(ValueError, match="sn"):
        ranking.total_score(0.5, -0.1, 0.0, Weights(1.0, 0.0, 0.0))


# -- ranked table ------------------------------------------------------------


def small_project(weights=Weights(0.5, 0.3, 0.2)):
    manifest = {
        "id": "t",
        "assignments": [
            {
                "id": "hw",
                "title": "hw",
                "weights": {"w_cs": weights.w_cs, "w_sn": weights.w_sn, "w_se": weights.w_se},
                "language_profile": "plain-text",
            }
        ],
        "people": [{"id": p, "full_name": p.upper()} for p in ("a", "b", "c", "d")],
    }
    project = corpus.parse_manifest(manifest)
    for person, text in (
        ("a", "one two three four five"),
        ("b", "one two three four five"),
        ("c", "one two different words here"),
        ("d", "totally unrelated essay text"),
    ):
        doc = corpus.Document.build(author=person, assignment="hw", content=text.encode())
        project.documents[doc.id] = doc
    return project


def follow(p, q, network="FB"):
    return sg.SocialAction(network=network, activity=sg.MUTUAL_FOLLOW, source=p, target=q)


def test_table_sorted_by_total_descending():
    project = small_project()
    records = simengine.all_pairs_similarity(project, "hw")
    table = ranking.build_ranked_table(project, "hw", records, [follow("a", "b")])
    totals = [a.total for a in table]
    assert totals == sorted(totals, reverse=True)
    assert table[0].p_i == "a" and table[0].p_j == "b"


def test_zero_evidence_pairs_suppressed():
    project = small_project()
    table = ranking.build_ranked_table(project, "hw", [], [])
    assert table == []
    table = ranking.build_ranked_table(project, "hw", [], [follow("a", "d")])
    assert [(a.p_i, a.p_j) for a in table] == [("a", "d")]


def test_tie_broken_by_cs_then_pair_id():
    project = small_project(Weights(0.5, 0.5, 0.0))
    # same total 0.5: one pair via cs=1, another via sn=1
    rec = simengine.SimilarityRecord(doc_i="hw/a", doc_j="hw/b", s=1.0)
    rec2 = simengine.SimilarityRecord(doc_i="hw/b", doc_j="hw/a", s=1.0)
    table = ranking.build_ranked_table(project, "hw", [rec, rec2], [follow("c", "d")])
    assert [a.total for a in table] == [0.5, 0.5]
    assert (table[0].p_i, table[0].p_j) == ("a", "b")  # higher cs wins the tie


def test_cs_is_max_of_directions():
    project = small_project(Weights(1.0, 0.0, 0.0))
    records = [
        simengine.SimilarityRecord(doc_i="hw/a", doc_j="hw/b", s=0.4),
        simengine.SimilarityRecord(doc_i="hw/b", doc_j="hw/a", s=0.9),
    ]
    table = ranking.build_ranked_table(project, "hw", records)
    assert table[0].cs == 0.9


def test_total_matches_recomputation_tightly():
    project = small_project()
    records = simengine.all_pairs_similarity(project, "hw")
    evidence = searchlink.collect_evidence(
        project, "hw", searchlink.FixtureSearchProvider({})
    )
    table = ranking.build_ranked_table(project, "hw", records, [follow("a", "c")], evidence)
    w = project.assignments["hw"].weights
    for a in table:
        assert abs(a.total - (w.w_cs * a.cs + w.w_sn * a.sn + w.w_se * a.se)) <= 1e-12


def test_missing_submission_pair_not_listed():
    project = small_project()
    del project.documents["hw/d"]
    table = ranking.build_ranked_table(project, "hw", [], [follow("a", "d")])
    assert table == []


# -- ordering properties --------------------------------------------------------


def rank_order(rows, weights):
    scored = sorted(
        rows,
        key=lambda r: (-ranking.total_score(r[1], r[2], r[3], weights), -r[1], r[0]),
    )
    return [r[0] for r in scored]


def test_scale_invariance_of_order():
    rng = random.Random(42)
    weights = Weights(0.5, 0.3, 0.2)
    for _ in range(100):
        rows = [
            (f"p{i}", rng.random(), rng.random(), rng.random()) for i in range(12)
        ]
        c = rng.uniform(0.05, 1.0)
        scaled = [(n, cs * c, sn * c, se * c) for n, cs, sn, se in rows]
        assert rank_order(rows, weights) == rank_order(scaled, weights)


def test_pure_cs_weights_degrade_to_cs_order():
    rng = random.Random(7)
    weights = Weights(1.0, 0.0, 0.0)
    for _ in range(50):
        rows = [(f"p{i}", rng.random(), 0.0, 0.0) for i in range(10)]
        by_total = rank_order(rows, weights)
        by_cs = [r[0] for r in sorted(rows, key=lambda r: (-r[1], r[0]))]
        assert by_total == by_cs


# -- statuses ----------------------------------------------------------------


def test_status_transitions_and_journal():
    ledger = ranking.StatusLedger()
    rec = ledger.set_status("hw:a:b", ranking.CONFIRMED, actor="tess")
    assert rec.status == ranking.CONFIRMED
    assert rec.decided_at is not None
    assert rec.revision == 1
    rec = ledger.set_status("hw:a:b", ranking.NOT_CHECKED, actor="tess")
    assert rec.decided_at is None
    assert rec.revision == 2
    assert [j.new_status for j in ledger.journal] == [ranking.CONFIRMED, ranking.NOT_CHECKED]
    assert ledger.journal[1].prior_status == ranking.CONFIRMED


def test_status_idempotent_set_journals_once_per_call():
    ledger = ranking.StatusLedger()
    ledger.set_status("hw:a:b", ranking.REJECTED, actor="x")
    ledger.set_status("hw:a:b", ranking.REJECTED, actor="x")
    assert len(ledger.journal) == 2  # one entry per call, no more


def test_unknown_pair_and_status_rejected():
    ledger = ranking.StatusLedger()
    with pytest.raises(KeyError, match="unknown pair"):
        ledger.set_status("hw:a:b", ranking.CONFIRMED, actor="x", known=["hw:a:c"])
    with pytest.raises(ValueError, match="unknown status"):
        ledger.set_status("hw:a:b", "maybe", actor="x")


def test_confirmed_set_lifecycle():
    project = small_project()
    ledger = ranking.StatusLedger()
    assert ranking.confirmed_set(project, "hw", ledger) == set()
    ledger.set_status("hw:a:b", ranking.CONFIRMED, actor="x")
    ledger.set_status("hw:a:c", ranking.CONFIRMED, actor="x")
    assert ranking.confirmed_set(project, "hw", ledger) == {
        ("hw/a", "hw/b"),
        ("hw/a", "hw/c"),
    }
    ledger.set_status("hw:a:c", ranking.REJECTED, actor="x")
    assert ranking.confirmed_set(project, "hw", ledger) == {("hw/a", "hw/b")}


# -- cluster stats ------------------------------------------------------------


def assessment(pid, value, status):
    return ranking.PairAssessment(
        p_i=pid[0], p_j=pid[1], assignment="hw", cs=value, sn=0.0, se=0.0,
        se_hits=0, total=value, status=status,
    )


def test_cluster_stats_not_checked_only():
    stats = ranking.cluster_stats(
        [assessment("ab", 0.2, ranking.NOT_CHECKED), assessment("cd", 0.8, ranking.NOT_CHECKED)],
        "cs",
    )
    assert (stats.min, stats.max) == (0.2, 0.8)
    assert stats.mean_not_checked == pytest.approx(0.5)
    assert stats.mean_confirmed is None and stats.mean_rejected is None


def test_cluster_stats_per_status_means():
    stats = ranking.cluster_stats(
        [assessment("ab", 0.9, ranking.CONFIRMED), assessment("cd", 0.1, ranking.REJECTED)],
        "cs",
    )
    assert stats.mean_confirmed == pytest.approx(0.9)
    assert stats.mean_rejected == pytest.approx(0.1)


def test_cluster_stats_single_assessment():
    stats = ranking.cluster_stats([assessment("ab", 0.4, ranking.NOT_CHECKED)], "total")
    assert stats.min == stats.max == 0.4


def test_cluster_stats_errors():
    with pytest.raises(ValueError, match="at least one"):
        ranking.cluster_stats([], "cs")
    with pytest.raises(ValueError, match="factor"):
        ranking.cluster_stats([assessment("ab", 0.4, ranking.NOT_CHECKED)], "vibes")


def test_status_colors_fixed():
    assert ranking.STATUS_COLORS == {
        "confirmed": "red",
        "not_checked": "orange",
        "rejected": "green",
    }


def test_ranked_table_csv_shape():
    project = small_project()
    records = simengine.all_pairs_similarity(project, "hw")
    table = ranking.build_ranked_table(project, "hw", records)
    text = ranking.ranked_table_csv(table)
    lines = text.strip().splitlines()
    assert lines[0] == "p_i,p_j,assignment,cs,sn,se,total,status"
    assert len(lines) == len(table) + 1
