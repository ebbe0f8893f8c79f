"""Web-search evidence for person pairs.

The query for a pair is its keyword union (both people's keywords plus the
assignment's), sorted and space-joined so provider cache keys are stable.
Only the relevant-hit count enters the framework; ranking uses a log-scaled
normalization while the raw count is kept for the evaluation models.
"""

from __future__ import annotations

import json
import math
import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Protocol

import requests

from .corpus import Assignment, Person, Project

ENV_ENDPOINT = "SPDETECT_SEARCH_URL"
ENV_KEY_VAR = "SPDETECT_SEARCH_KEY_VAR"
ENV_TIMEOUT = "SPDETECT_SEARCH_TIMEOUT"


class ProviderUnavailable(RuntimeError):
    """The search provider cannot be reached right now; safe to retry."""


class SearchProvider(Protocol):
    def hits(self, query: str) -> int: ...


@dataclass(frozen=True)
class SearchEvidence:
    p_i: str
    p_j: str
    assignment: str
    keywords: frozenset[str]
    hits: int
    se_norm: float

    def __post_init__(self) -> None:
        if self.hits < 0:
            raise ValueError("hit count must be >= 0")
        if not 0.0 <= self.se_norm <= 1.0:
            raise ValueError("se_norm must be in [0, 1]")


@dataclass(frozen=True)
class FixtureSearchProvider:
    """Deterministic file-backed provider; unknown queries count as zero."""

    mapping: dict[str, int] = field(default_factory=dict)

    @classmethod
    def from_file(cls, path: Path | str) -> "FixtureSearchProvider":
        data = json.loads(Path(path).read_text(encoding="utf-8"))
        if not isinstance(data, dict):
            raise ValueError("search fixture must be a JSON object of query -> hits")
        return cls({str(k): int(v) for k, v in data.items()})

    def hits(self, query: str) -> int:
        return int(self.mapping.get(query, 0))


@dataclass(frozen=True)
class HttpSearchProvider:
    """Generic HTTP JSON adapter: GET endpoint?q=... returning a hit count."""

    endpoint: str
    api_key: str | None = None
    timeout: float = 10.0

    @classmethod
    def from_env(cls, environ: dict[str, str] | None = None) -> "HttpSearchProvider":
        env = os.environ if environ is None else environ
        endpoint = env.get(ENV_ENDPOINT)
        if not endpoint:
            raise ValueError(f"{ENV_ENDPOINT} is not set")
        key_var = env.get(ENV_KEY_VAR)
        api_key = env.get(key_var) if key_var else None
        timeout = float(env.get(ENV_TIMEOUT, "10"))
        return cls(endpoint=endpoint, api_key=api_key, timeout=timeout)

    def hits(self, query: str) -> int:
        headers = {"Authorization": f"Bearer {self.api_key}"} if self.api_key else {}
        try:
            resp = requests.get(
                self.endpoint, params={"q": query}, headers=headers, timeout=self.timeout
            )
        except requests.RequestException as exc:
            raise ProviderUnavailable(f"search endpoint unreachable: {exc}") from exc
        if resp.status_code >= 500:
            raise ProviderUnavailable(f"search endpoint returned {resp.status_code}")
        if resp.status_code != 200:
            raise ValueError(f"search endpoint returned {resp.status_code}: {resp.text[:200]}")
        body = resp.json()
        if isinstance(body, dict):
            body = body.get("hits", body.get("count"))
        n = int(body)
        if n < 0:
            raise ValueError(f"search endpoint returned negative count {n}")
        return n


def build_keywords(p_i: Person, p_j: Person, assignment: Assignment) -> set[str]:
    """Keyword union for a pair: both people's terms plus the assignment's."""
    merged = set(p_i.keywords) | set(p_j.keywords) | set(assignment.keywords)
    return {k.casefold() for k in merged}


def query_string(keywords: set[str] | frozenset[str]) -> str:
    return " ".join(sorted(keywords))


def query_hits(provider: SearchProvider, keywords: set[str] | frozenset[str]) -> int:
    if not keywords:
        raise ValueError("keyword set must be non-empty")
    n = provider.hits(query_string(keywords))
    if n < 0:
        raise ValueError(f"provider returned negative hit count {n}")
    return n


def se_score(n: int, n_max: int) -> float:
    """Log-scaled hit count in [0, 1]; raw counts are heavy-tailed."""
    if n < 0 or n_max < 0:
        raise ValueError("hit counts must be >= 0")
    if n > n_max:
        raise ValueError(f"n ({n}) exceeds n_max ({n_max})")
    if n_max == 0:
        return 0.0
    return math.log1p(n) / math.log1p(n_max)


def collect_evidence(
    project: Project, assignment_id: str, provider: SearchProvider
) -> list[SearchEvidence]:
    """Query the provider for every unordered pair of submitters.

    Normalization runs against the maximum hit count over the assignment's
    pairs, so scores are comparable only within one assignment.
    """
    assignment = project.assignments.get(assignment_id)
    if assignment is None:
        raise KeyError(f"unknown assignment id: {assignment_id}")
    submitters = sorted(
        {d.author for d in project.documents_for_assignment(assignment_id)}
    )
    raw: list[tuple[str, str, frozenset[str], int]] = []
    for i, pi in enumerate(submitters):
        for pj in submitters[i + 1 :]:
            kw = frozenset(build_keywords(project.people[pi], project.people[pj], assignment))
            if not kw:
                continue  # nothing to query; the pair simply has no evidence
            raw.append((pi, pj, kw, query_hits(provider, kw)))
    n_max = max((n for *_, n in raw), default=0)
    return [
        SearchEvidence(
            p_i=pi,
            p_j=pj,
            assignment=assignment_id,
            keywords=kw,
            hits=n,
            se_norm=se_score(n, n_max),
        )
        for pi, pj, kw, n in raw
    ]
