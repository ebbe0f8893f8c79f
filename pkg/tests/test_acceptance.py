"""Acceptance gate: one test per release criterion, each at its pinned
tolerance and runtime budget. The terminal summary prints one line per
criterion (see conftest)."""

import io
import random
import shutil
import time
import warnings
from contextlib import contextmanager, redirect_stderr, redirect_stdout

import numpy as np
import pytest

from spdetect import glmstats as gs
from spdetect import ranking, simengine, synthcohort
from spdetect import socialgraph as sg
from spdetect.cli import main as cli_main
from spdetect.corpus import Weights

from conftest import FIXTURE_DIR, record_acceptance
from oracles import (
    brute_force_winnow,
    chi2_sf_mp,
    direct_binomial_deviance,
    levenshtein_dp,
    two_by_two_logit,
)


@contextmanager
def criterion(name, budget_seconds):
    record_acceptance(name, False)
    started = time.monotonic()
    yield
    elapsed = time.monotonic() - started
    assert elapsed < budget_seconds, f"{name}: {elapsed:.1f}s exceeded {budget_seconds}s budget"
    record_acceptance(name, True)


def test_c1_lrt_arithmetic_from_reported_deviances():
    with criterion("C1 LRT arithmetic on reported deviances", 1.0):
        res = gs.lrt_from_deviances(48.932, 12.479, 3)
        assert res.df == 3
        assert 5.4e-8 <= res.p_value <= 6.6e-8


def test_c2_glm_oracle_suite():
    with criterion("C2 GLM closed-form and deviance oracles", 10.0):
        rng = random.Random(1009)
        checked = 0
        while checked < 100:
            n0, n1 = rng.randint(3, 60), rng.randint(3, 60)
            k0, k1 = rng.randint(1, n0 - 1), rng.randint(1, n1 - 1)
            X = np.array([[1, 0]] * n0 + [[1, 1]] * n1, dtype=float)
            y = np.array([1] * k0 + [0] * (n0 - k0) + [1] * k1 + [0] * (n1 - k1), dtype=float)
            model = gs.fit_logistic(X, y)
            b0, b1 = two_by_two_logit(n0, k0, n1, k1)
            assert abs(model.coefficients[0] - b0) < 1e-6
            assert abs(model.coefficients[1] - b1) < 1e-6
            mu = gs.predict_proba(model, X)
            assert abs(model.residual_deviance - direct_binomial_deviance(y, mu)) < 1e-8
            checked += 1


def test_c3_nesting_invariant_and_chi_square_oracle():
    with criterion("C3 nesting invariant over seeded datasets", 30.0):
        rng = np.random.default_rng(2024)
        done = 0
        while done < 200:
            n = 50
            X_full = np.column_stack([np.ones(n), rng.normal(size=(n, 4))])
            beta = rng.normal(scale=0.8, size=5)
            p = 1 / (1 + np.exp(-(X_full @ beta)))
            y = (rng.random(n) < p).astype(float)
            if y.min() == y.max():
                continue
            X_nested = X_full[:, :2]
            with warnings.catch_warnings():
                warnings.simplefilter("ignore", RuntimeWarning)
                nested = gs.fit_logistic(X_nested, y, names=("intercept", "x1"))
                full = gs.fit_logistic(
                    X_full, y, names=("intercept", "x1", "x2", "x3", "x4")
                )
            assert full.residual_deviance <= nested.residual_deviance + 1e-8
            res = gs.lrt(nested, full)
            oracle = chi2_sf_mp(res.deviance_diff, res.df)
            if oracle > 0:
                assert abs(res.p_value - oracle) <= 1e-9 * oracle + 1e-300
            done += 1


def test_c4_winnowing_guarantee_and_oracle_equality():
    with criterion("C4 winnowing guarantee and window-minima oracle", 30.0):
        rng = random.Random(31337)
        alphabet = "abcdefghij"
        for _ in range(500):
            k = rng.randint(2, 6)
            w = rng.randint(2, 6)
            common = [rng.choice(alphabet) for _ in range(w + k - 1 + rng.randint(0, 10))]
            s1 = [rng.choice(alphabet) for _ in range(rng.randint(0, 40))] + common + [
                rng.choice(alphabet) for _ in range(rng.randint(0, 40))
            ]
            s2 = [rng.choice(alphabet) for _ in range(rng.randint(0, 40))] + common + [
                rng.choice(alphabet) for _ in range(rng.randint(0, 40))
            ]
            fp1 = simengine.fingerprint(tuple(s1), k, w)
            fp2 = simengine.fingerprint(tuple(s2), k, w)
            assert fp1.hashes() & fp2.hashes(), "planted common substring missed"
            for tokens in (s1, s2):
                hashes = simengine.kgram_hashes(tokens, k)
                assert simengine.winnow(hashes, w) == brute_force_winnow(hashes, w)


def test_c5_similarity_contract():
    with criterion("C5 similarity contract", 10.0):
        rng = random.Random(99)
        # self-similarity of every non-empty (fingerprintable) document is 1.0
        for _ in range(100):
            tokens = tuple(rng.choice("abcde") for _ in range(rng.randint(3, 60)))
            fp = simengine.fingerprint(tokens, k=3, w=4)
            if not fp.prints:
                continue
            rec = simengine.pairwise_similarity(fp, fp, "x", "y")
            assert rec is not None and rec.s == 1.0
        # directed containment: d_j contains all of d_i plus an unshared tail
        base = tuple("abcdefghijklmnop")
        tail = tuple("zzyyxxwwvvuuttss")
        small = simengine.fingerprint(base, 3, 4)
        big = simengine.fingerprint(base + tail, 3, 4)
        s_ij = simengine.pairwise_similarity(small, big, "i", "j")
        s_ji = simengine.pairwise_similarity(big, small, "j", "i")
        assert s_ij.s == 1.0
        assert s_ji is not None and s_ji.s < 1.0
        # zero overlap emits no record at all
        assert simengine.pairwise_similarity(
            simengine.fingerprint(tuple("aaaaaaa"), 3, 4),
            simengine.fingerprint(tuple("bbbbbbb"), 3, 4),
            "x",
            "y",
        ) is None


def _order(rows, weights):
    return [
        r[0]
        for r in sorted(
            rows,
            key=lambda r: (-ranking.total_score(r[1], r[2], r[3], weights), -r[1], r[0]),
        )
    ]


def test_c6_ranking_linearity():
    with criterion("C6 ranking linearity and pure-cs degeneration", 10.0):
        rng = random.Random(606)
        for _ in range(100):
            weights = Weights(0.5, 0.3, 0.2)
            rows = [(f"p{i:02d}", rng.random(), rng.random(), rng.random()) for i in range(15)]
            c = rng.uniform(0.01, 1.0)
            scaled = [(n, cs * c, sn * c, se * c) for n, cs, sn, se in rows]
            assert _order(rows, weights) == _order(scaled, weights)
            # check_woSocio degeneration: (1,0,0) ranks purely by cs
            pure = Weights(1.0, 0.0, 0.0)
            by_cs = [r[0] for r in sorted(rows, key=lambda r: (-r[1], r[0]))]
            assert _order(rows, pure) == by_cs


def test_c7_levenshtein_oracle():
    with criterion("C7 Levenshtein against DP oracle", 30.0):
        rng = random.Random(7777)
        alphabet = "abcdefgh"
        strings = [
            "".join(rng.choice(alphabet) for _ in range(rng.randint(0, 30)))
            for _ in range(2000)
        ]
        for i in range(1000):
            a, b = strings[2 * i], strings[2 * i + 1]
            assert sg.levenshtein(a, b) == levenshtein_dp(a, b)
            assert sg.levenshtein(a, b) == sg.levenshtein(b, a)
        for i in range(300):
            a, b, c = strings[i], strings[i + 500], strings[i + 1000]
            assert sg.levenshtein(a, c) <= sg.levenshtein(a, b) + sg.levenshtein(b, c)


def test_c8_end_to_end_synthetic_cohort():
    with criterion("C8 end-to-end synthetic cohort over 20 seeds", 120.0):
        seeds = range(20)
        linked_pass = 0
        null_significant = 0
        for seed in seeds:
            linked = synthcohort.run_cohort_comparison(
                seed, synthcohort.CohortConfig(linked=True)
            )
            if (
                linked.full.residual_deviance < linked.nested.residual_deviance
                and linked.lrt.p_value < 0.01
            ):
                linked_pass += 1
            null = synthcohort.run_cohort_comparison(
                seed, synthcohort.CohortConfig(linked=False)
            )
            if null.lrt.p_value < 0.05:
                null_significant += 1
        assert linked_pass >= 0.95 * 20, f"only {linked_pass}/20 linked cohorts detected"
        assert null_significant <= 0.15 * 20, f"{null_significant}/20 null cohorts significant"


def _cli(*argv):
    out, err = io.StringIO(), io.StringIO()
    with redirect_stdout(out), redirect_stderr(err):
        cli_main(list(argv))
    return out.getvalue() + "\x00" + err.getvalue()


def _pipeline_transcript(workdir):
    shutil.copytree(FIXTURE_DIR, workdir)
    p = str(workdir)
    chunks = [
        _cli("ingest", "--project", p),
        _cli("similarity", "--project", p),
        _cli(
            "social", "--project", p,
            "--directory", str(workdir / "social" / "directory.json"),
            "--actions", str(workdir / "social" / "actions.jsonl"),
            "--confirm", "clara:FB:c.medved",
            "--reject", "clara:FB:clara.medved.5",
        ),
        _cli("search", "--project", p, "--fixture", str(workdir / "search" / "fixture.json")),
        _cli("rank", "--project", p, "--assignment", "hw1"),
        _cli("rank", "--project", p, "--assignment", "essay1", "--sort", "cs"),
        _cli("status", "--project", p, "hw1:ana:boris", "confirmed"),
        _cli("status", "--project", p, "hw1:boris:clara", "rejected"),
        _cli("status", "--project", p, "essay1:ana:boris", "confirmed"),
        _cli("export", "--project", p, "--kind", "similarity"),
        _cli("export", "--project", p, "--kind", "pairs", "--assignment", "hw1"),
        _cli("export", "--project", p, "--kind", "features"),
        _cli("eval", "--project", p),  # deterministic minimum-rows message
    ]
    return "\x1e".join(chunks).encode()


def test_c9_pipeline_determinism(tmp_path):
    with criterion("C9 CLI pipeline byte determinism", 60.0):
        first = _pipeline_transcript(tmp_path / "run1")
        second = _pipeline_transcript(tmp_path / "run2")
        assert first == second
        assert b"ana,boris,hw1" in first
