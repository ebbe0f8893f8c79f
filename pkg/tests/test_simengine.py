import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from spdetect import corpus, simengine
from oracles import brute_force_winnow, kgram_set


# -- tokenizer ---------------------------------------------------------------


def test_identifier_and_comment_normalization():
    a = simengine.tokenize(b"int a = 1; // x", "generic-code")
    b = simengine.tokenize(b"int speed = 2;", "generic-code")
    assert a.tokens == b.tokens == ("int", "IDENT", "=", "NUM", ";")


def test_plain_text_words():
    stream = simengine.tokenize(b"The CAT sat.", "plain-text")
    assert stream.tokens == ("the", "cat", "sat")


def test_empty_content():
    assert len(simengine.tokenize(b"", "generic-code")) == 0
    assert len(simengine.tokenize(b"", "plain-text")) == 0


def test_block_and_hash_comments_stripped():
    src = b"x = 1 /* dead\ncode */ # tail\ny = 2"
    stream = simengine.tokenize(src, "generic-code")
    assert stream.tokens == ("IDENT", "=", "NUM", "IDENT", "=", "NUM")


def test_string_literals_collapse():
    a = simengine.tokenize(b'print("hello")', "generic-code")
    b = simengine.tokenize(b"print('bye')", "generic-code")
    assert a.tokens == b.tokens == ("print", "(", "STR", ")")


def test_invalid_utf8_text_profile_errors():
    with pytest.raises(ValueError, match="UTF-8"):
        simengine.tokenize(b"\xff\xfe", "plain-text")


def test_unknown_profile_errors():
    with pytest.raises(ValueError, match="profile"):
        simengine.tokenize(b"x", "klingon")


def test_origin_spans_are_monotone_and_cover_tokens():
    src = "Pêche très  mûre".encode()
    stream = simengine.tokenize(src, "plain-text")
    last_end = 0
    for start, end in stream.origin_spans:
        assert start >= last_end
        assert end > start
        last_end = end


# -- winnowing ---------------------------------------------------------------


def test_winnow_descending_example():
    assert simengine.winnow([5, 4, 3, 2, 1], 2) == {(4, 1), (3, 2), (2, 3), (1, 4)}


def test_winnow_constant_rightmost_tie():
    assert simengine.winnow([7, 7, 7], 2) == {(7, 1), (7, 2)}


def test_stream_shorter_than_k_is_empty():
    fp = simengine.fingerprint(("a", "b"), k=3, w=4)
    assert fp.prints == frozenset()


def test_bad_params_rejected():
    with pytest.raises(ValueError):
        simengine.fingerprint(("a",), k=0, w=1)
    with pytest.raises(ValueError):
        simengine.fingerprint(("a",), k=1, w=0)


@given(
    st.lists(st.integers(min_value=0, max_value=50), max_size=200),
    st.integers(min_value=1, max_value=8),
)
@settings(max_examples=200)
def test_winnow_matches_brute_force(hashes, w):
    assert simengine.winnow(hashes, w) == brute_force_winnow(hashes, w)


@given(
    st.lists(st.sampled_from("abcdef"), max_size=200),
    st.integers(min_value=1, max_value=5),
    st.integers(min_value=1, max_value=5),
)
@settings(max_examples=200)
def test_fingerprint_equals_oracle_on_token_streams(tokens, k, w):
    fp = simengine.fingerprint(tuple(tokens), k, w)
    assert fp.prints == frozenset(brute_force_winnow(simengine.kgram_hashes(tokens, k), w))


@given(st.data())
@settings(max_examples=150, deadline=None)
def test_winnowing_guarantee_planted_substring(data):
    k = data.draw(st.integers(min_value=2, max_value=5))
    w = data.draw(st.integers(min_value=2, max_value=6))
    alphabet = st.sampled_from("abcdefgh")
    common = data.draw(st.lists(alphabet, min_size=w + k - 1, max_size=w + k + 10))
    left = data.draw(st.lists(alphabet, max_size=30))
    right = data.draw(st.lists(alphabet, max_size=30))
    s1 = left + common + data.draw(st.lists(alphabet, max_size=30))
    s2 = right + common + data.draw(st.lists(alphabet, max_size=30))
    fp1 = simengine.fingerprint(tuple(s1), k, w)
    fp2 = simengine.fingerprint(tuple(s2), k, w)
    assert fp1.hashes() & fp2.hashes(), "planted common substring must be detected"


# -- pairwise similarity ------------------------------------------------------


def fp(tokens, k=2, w=2):
    return simengine.fingerprint(tuple(tokens), k, w)


def test_identical_documents_score_one():
    a = fp("abcdef")
    rec = simengine.pairwise_similarity(a, fp("abcdef"), "d1", "d2")
    assert rec is not None and rec.s == 1.0


def test_disjoint_documents_yield_no_record():
    assert simengine.pairwise_similarity(fp("aaaa"), fp("bbbb"), "d1", "d2") is None


def test_containment_is_directional():
    # d_j is d_i plus an unshared suffix: oracle is set containment on the
    # explicit fingerprint sets
    small = fp("abcdefgh")
    big = fp("abcdefgh" + "zyxwvuts")
    assert small.hashes() <= big.hashes()
    s_ij = simengine.pairwise_similarity(small, big, "d1", "d2")
    s_ji = simengine.pairwise_similarity(big, small, "d2", "d1")
    assert s_ij.s == 1.0
    assert s_ji.s == len(small.hashes() & big.hashes()) / len(big.hashes()) < 1.0


def test_parameter_mismatch_errors():
    with pytest.raises(ValueError, match="mismatch"):
        simengine.pairwise_similarity(fp("abcd", k=2, w=2), fp("abcd", k=3, w=2), "a", "b")


def test_self_similarity_never_exceeds_one():
    rng = random.Random(7)
    for _ in range(50):
        tokens = "".join(rng.choice("abcd") for _ in range(rng.randint(3, 40)))
        f = fp(tokens)
        if not f.prints:
            continue
        rec = simengine.pairwise_similarity(f, f, "x", "y")
        assert rec.s == 1.0


def test_matched_spans_map_back_to_source():
    src_a = b"the quick brown fox jumps over the lazy dog"
    src_b = b"prefix words the quick brown fox jumps over the lazy dog suffix"
    sa = simengine.tokenize(src_a, "plain-text")
    sb = simengine.tokenize(src_b, "plain-text")
    rec = simengine.pairwise_similarity(
        simengine.fingerprint(sa, 3, 2),
        simengine.fingerprint(sb, 3, 2),
        "a",
        "b",
        spans_i=sa.origin_spans,
        spans_j=sb.origin_spans,
    )
    assert rec.s == 1.0
    for (si, ei), (sj, ej) in rec.matched_spans:
        assert src_a[si:ei] == src_b[sj:ej]


# -- corpus-level runs ---------------------------------------------------------


def project_with(docs):
    manifest = {
        "id": "t",
        "assignments": [
            {"id": "hw", "title": "hw", "weights": {"w_cs": 1.0, "w_sn": 0.0, "w_se": 0.0},
             "language_profile": "plain-text"}
        ],
        "people": [{"id": p, "full_name": p.upper()} for p, _ in docs],
    }
    project = corpus.parse_manifest(manifest)
    for person, text in docs:
        doc = corpus.Document.build(author=person, assignment="hw", content=text.encode())
        project.documents[doc.id] = doc
    return project


def test_all_pairs_three_identical_authors():
    text = "one two three four five six seven eight"
    project = project_with([("p1", text), ("p2", text), ("p3", text)])
    records = simengine.all_pairs_similarity(project, "hw")
    assert len(records) == 6
    assert all(r.s == 1.0 for r in records)


def test_same_author_pairs_excluded():
    project = project_with([("p1", "alpha beta gamma delta")])
    other = corpus.Document.build(
        author="p1", assignment="hw", content=b"alpha beta gamma delta again"
    )
    project.documents["hw/p1-bis"] = other  # same author, second document
    assert simengine.all_pairs_similarity(project, "hw") == []


def test_insertion_order_does_not_matter():
    docs = [("p1", "red green blue cyan"), ("p2", "red green blue magenta"), ("p3", "unrelated words here now")]
    a = simengine.all_pairs_similarity(project_with(docs), "hw")
    b = simengine.all_pairs_similarity(project_with(list(reversed(docs))), "hw")
    assert {(r.doc_i, r.doc_j, r.s) for r in a} == {(r.doc_i, r.doc_j, r.s) for r in b}


def test_unknown_assignment():
    with pytest.raises(KeyError):
        simengine.all_pairs_similarity(project_with([("p1", "x y z")]), "hw9")


# -- report import --------------------------------------------------------------


def test_import_good_row(demo_project):
    records = simengine.parse_similarity_csv(
        "doc_i,doc_j,s_ij\nhw1/ana,hw1/boris,0.85\n", demo_project
    )
    assert len(records) == 1
    assert records[0].s == 0.85


def test_import_zero_similarity_rejected(demo_project):
    with pytest.raises(simengine.ReportImportError, match="line 2"):
        simengine.parse_similarity_csv("doc_i,doc_j,s_ij\nhw1/ana,hw1/boris,0.0\n", demo_project)


def test_import_unknown_document_names_line(demo_project):
    with pytest.raises(simengine.ReportImportError, match="line 3.*dX"):
        simengine.parse_similarity_csv(
            "doc_i,doc_j,s_ij\nhw1/ana,hw1/boris,0.5\nhw1/ana,dX,0.5\n", demo_project
        )


def test_import_malformed_row_and_header(demo_project):
    with pytest.raises(simengine.ReportImportError, match="line 1"):
        simengine.parse_similarity_csv("a,b\n", demo_project)
    with pytest.raises(simengine.ReportImportError, match="line 2"):
        simengine.parse_similarity_csv("doc_i,doc_j,s_ij\nonly-two,fields\n", demo_project)
    with pytest.raises(simengine.ReportImportError, match="bad similarity"):
        simengine.parse_similarity_csv("doc_i,doc_j,s_ij\nhw1/ana,hw1/boris,much\n", demo_project)


def test_import_same_author_rejected(demo_project):
    with pytest.raises(simengine.ReportImportError, match="share an author"):
        simengine.parse_similarity_csv(
            "doc_i,doc_j,s_ij\nhw1/ana,essay1/ana,0.5\n", demo_project
        )


def test_export_import_round_trip(demo_project):
    records = simengine.all_pairs_similarity(demo_project, "hw1")
    text = simengine.similarity_csv(records)
    again = simengine.parse_similarity_csv(text, demo_project)
    assert {(r.doc_i, r.doc_j) for r in again} == {(r.doc_i, r.doc_j) for r in records}
