"""Seeded synthetic cohorts for end-to-end evaluation runs.

Generates a class of people split into friend clusters, essay-style
submissions with planted copying (more likely between cluster mates), social
follow links, and a search fixture. In the linked configuration social
evidence correlates with copying; in the null configuration links and hits
are drawn independently of the planted ground truth, so the model comparison
should find nothing.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field

from .corpus import Assignment, Person, Project, Weights, Document
from .glmstats import FeatureRow, ModelComparison, build_features, compare_models
from .ranking import CONFIRMED, REJECTED, StatusRecord, build_ranked_table, pair_id
from .searchlink import FixtureSearchProvider, build_keywords, collect_evidence, query_string
from .simengine import all_pairs_similarity
from .socialgraph import FOLLOW, MUTUAL_FOLLOW, SUPPORT, SocialAction

DEFAULT_SEED = 0

_FIRST_NAMES = [
    "ana", "boris", "clara", "david", "ema", "filip", "greta", "hugo",
    "iva", "jan", "katja", "luka", "mia", "nik", "olga", "peter",
    "rosa", "simon", "tina", "urban",
]
_LAST_NAMES = [
    "albreht", "bezek", "cerar", "dolenc", "erjavec", "furlan", "golob",
    "horvat", "istenic", "jereb", "kavcic", "lampret", "medved", "novak",
    "oblak", "pirc", "rozman", "sever", "tomsic", "ursic", "vidmar",
    "zajc", "ambroz", "bukovec", "cesar", "debeljak", "erzen", "fink",
    "gregorc", "hribar", "ilic", "jug", "kralj", "logar", "mlakar",
    "nagode", "ogrin", "pavlin", "rupnik", "stare",
]

_VOCAB = [f"{a}{b}{c}" for a in "bdfgklmnprstvz" for b in "aeiou" for c in (
    "ra", "ne", "to", "mi", "ka", "lu",
)]  # 14 * 5 * 6 = 420 distinct pseudo-words


@dataclass
class CohortConfig:
    people: int = 40
    clusters: int = 10
    assignments: int = 3
    copy_p_linked: float = 0.6
    copy_p_other: float = 0.05
    essay_words: int = 200
    prompt_words: int = 80
    # every essay quotes at least this much of the prompt, enough for the
    # winnowing guarantee (w + k - 1 tokens), so every pair has cs > 0 and
    # review-table membership never depends on the social features
    prompt_quote_min: int = 6
    linked: bool = True  # False: social data independent of copying


@dataclass
class Cohort:
    project: Project
    actions: list[SocialAction]
    search_fixture: dict[str, int]
    planted: set[str] = field(default_factory=set)  # pair ids with true copying
    cluster_of: dict[str, int] = field(default_factory=dict)


def generate_cohort(seed: int = DEFAULT_SEED, config: CohortConfig | None = None) -> Cohort:
    cfg = config or CohortConfig()
    rng = random.Random(seed)

    project = Project(id=f"cohort-{seed}-{'linked' if cfg.linked else 'null'}")
    people_ids = []
    for i in range(cfg.people):
        first = _FIRST_NAMES[i % len(_FIRST_NAMES)]
        last = _LAST_NAMES[i % len(_LAST_NAMES)]
        pid = f"p{i:02d}"
        people_ids.append(pid)
        project.people[pid] = Person(
            id=pid,
            full_name=f"{first.title()} {last.title()}",
            keywords=frozenset({first, last}),
        )

    members = people_ids[:]
    rng.shuffle(members)
    cluster_of = {pid: idx % cfg.clusters for idx, pid in enumerate(members)}

    for a in range(cfg.assignments):
        aid = f"hw{a + 1}"
        project.assignments[aid] = Assignment(
            id=aid,
            title=f"Essay {a + 1}",
            keywords=frozenset({f"essay{a + 1}"}),
            weights=Weights(0.5, 0.3, 0.2),
            language_profile="plain-text",
        )

    planted: set[str] = set()
    pairs = [
        (people_ids[i], people_ids[j])
        for i in range(len(people_ids))
        for j in range(i + 1, len(people_ids))
    ]
    n_intra = sum(1 for pi, pj in pairs if cluster_of[pi] == cluster_of[pj])
    # null cohort: copying is drawn independently per pair and assignment at
    # the same blended rate, so rows carry no hidden within-pair correlation
    # that a per-pair-constant covariate could soak up by chance
    p_blend = (
        n_intra * cfg.copy_p_linked + (len(pairs) - n_intra) * cfg.copy_p_other
    ) / len(pairs)

    for aid in project.assignments:
        prompt = rng.choices(_VOCAB, k=cfg.prompt_words)
        essays: dict[str, list[str]] = {}
        for pid in people_ids:
            quoted = prompt[: rng.randint(cfg.prompt_quote_min, cfg.prompt_words)]
            own = rng.choices(_VOCAB, k=cfg.essay_words)
            essays[pid] = quoted + own
        # copying events; source text is the current state so chains can form
        for pi, pj in pairs:
            if cfg.linked:
                linked_pair = cluster_of[pi] == cluster_of[pj]
                p_copy = cfg.copy_p_linked if linked_pair else cfg.copy_p_other
            else:
                p_copy = p_blend
            if rng.random() >= p_copy:
                continue
            src, dst = (pi, pj) if rng.random() < 0.5 else (pj, pi)
            source = essays[src]
            length = max(20, int(rng.uniform(0.10, 0.70) * len(source)))
            start = rng.randint(0, max(0, len(source) - length))
            chunk = source[start : start + length]
            insert = rng.randint(0, len(essays[dst]))
            essays[dst] = essays[dst][:insert] + chunk + essays[dst][insert:]
            planted.add(pair_id(aid, pi, pj))
        for pid, words in essays.items():
            lines = [" ".join(words[i : i + 12]) for i in range(0, len(words), 12)]
            doc = Document.build(author=pid, assignment=aid, content="\n".join(lines).encode())
            project.documents[doc.id] = doc

    actions = _generate_actions(rng, pairs, cluster_of, cfg)
    fixture = _generate_fixture(rng, project, pairs, cluster_of, cfg)
    return Cohort(
        project=project,
        actions=actions,
        search_fixture=fixture,
        planted=planted,
        cluster_of=cluster_of,
    )


def _generate_actions(rng, pairs, cluster_of, cfg: CohortConfig) -> list[SocialAction]:
    actions = []
    for pi, pj in pairs:
        if cfg.linked:
            close = cluster_of[pi] == cluster_of[pj]
            p_fb = 0.85 if close else 0.03
            p_tw = 0.60 if close else 0.02
            p_support = 0.40 if close else 0.02
        else:
            # marginal densities comparable to the linked case, cluster-blind
            p_fb, p_tw, p_support = 0.09, 0.06, 0.05
        if rng.random() < p_fb:
            actions.append(
                SocialAction(network="FB", activity=MUTUAL_FOLLOW, source=pi, target=pj)
            )
        if rng.random() < p_tw:
            src, dst = (pi, pj) if rng.random() < 0.5 else (pj, pi)
            actions.append(SocialAction(network="TW", activity=FOLLOW, source=src, target=dst))
        if rng.random() < p_support:
            src, dst = (pi, pj) if rng.random() < 0.5 else (pj, pi)
            actions.append(
                SocialAction(
                    network=rng.choice(("FB", "TW")),
                    activity=SUPPORT,
                    source=src,
                    target=dst,
                    support_kind=rng.choice(("like", "comment", "share")),
                )
            )
    return actions


def _generate_fixture(rng, project, pairs, cluster_of, cfg: CohortConfig) -> dict[str, int]:
    fixture: dict[str, int] = {}
    for aid, assignment in project.assignments.items():
        for pi, pj in pairs:
            kw = build_keywords(project.people[pi], project.people[pj], assignment)
            if cfg.linked:
                if cluster_of[pi] == cluster_of[pj]:
                    hits = rng.randint(2, 12)
                else:
                    hits = rng.randint(1, 3) if rng.random() < 0.15 else 0
            else:
                hits = rng.randint(1, 8) if rng.random() < 0.25 else 0
            if hits:
                fixture[query_string(kw)] = hits
    return fixture


def cohort_features(cohort: Cohort, k: int | None = None, w: int | None = None) -> list[FeatureRow]:
    """Run the full pipeline and auto-label statuses from the ground truth."""
    provider = FixtureSearchProvider(cohort.search_fixture)
    rows: list[FeatureRow] = []
    for aid in cohort.project.assignments:
        records = all_pairs_similarity(cohort.project, aid, k=k, w=w)
        evidence = collect_evidence(cohort.project, aid, provider)
        table = build_ranked_table(cohort.project, aid, records, cohort.actions, evidence)
        statuses = {
            a.pair_id: StatusRecord(
                status=CONFIRMED if a.pair_id in cohort.planted else REJECTED,
                decided_at="1970-01-01T00:00:00+00:00",
                revision=1,
            )
            for a in table
        }
        labeled = build_ranked_table(
            cohort.project, aid, records, cohort.actions, evidence, statuses=statuses
        )
        rows.extend(build_features(labeled, cohort.actions))
    return rows


def run_cohort_comparison(
    seed: int = DEFAULT_SEED, config: CohortConfig | None = None
) -> ModelComparison:
    cohort = generate_cohort(seed, config)
    return compare_models(cohort_features(cohort))
