"""Social connections between people: identity resolution and action scoring.

People are matched to social accounts by fuzzy full-name search (Levenshtein
distance over case-folded, diacritic-stripped strings); ambiguous matches are
flagged for the investigator instead of auto-resolved. Pairwise actions come
from JSON-lines files and aggregate into a saturating [0, 1] connection score.
"""

from __future__ import annotations

import json
import unicodedata
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Mapping, Optional, Sequence

from .corpus import Person

FOLLOW = "follow"
MUTUAL_FOLLOW = "mutual_follow"
SUPPORT = "support"
ACTIVITIES = (FOLLOW, MUTUAL_FOLLOW, SUPPORT)

SUPPORT_KINDS = ("share", "comment", "reply", "retweet", "favorite", "like", "plus1")

# Applied when an action carries no explicit weight; mutual links are the
# strongest signal, one-off support actions the weakest.
DEFAULT_ACTION_WEIGHTS = {MUTUAL_FOLLOW: 1.0, FOLLOW: 0.5, SUPPORT: 0.25}

# Accept at most this normalized edit distance between a person's name and a
# directory display name.
MATCH_THRESHOLD = 0.25


class ActionImportError(ValueError):
    """An action file line failed validation; message names the line."""


@dataclass(frozen=True)
class SocialAction:
    """One pairwise action; follow/support are directed, mutual_follow is not."""

    network: str
    activity: str
    source: str  # person id
    target: str  # person id
    support_kind: Optional[str] = None
    weight: Optional[float] = None

    def __post_init__(self) -> None:
        if self.activity not in ACTIVITIES:
            raise ValueError(f"unknown activity: {self.activity!r}")
        if self.weight is not None and self.weight < 0:
            raise ValueError(f"action weight must be >= 0, got {self.weight}")
        if self.source == self.target:
            raise ValueError("action must relate two distinct people")
        if self.activity == MUTUAL_FOLLOW and self.source > self.target:
            # unordered: store canonically
            lo, hi = self.target, self.source
            object.__setattr__(self, "source", lo)
            object.__setattr__(self, "target", hi)

    @property
    def pair(self) -> tuple[str, str]:
        return (self.source, self.target) if self.source < self.target else (self.target, self.source)

    @property
    def effective_weight(self) -> float:
        if self.weight is not None:
            return self.weight
        return DEFAULT_ACTION_WEIGHTS[self.activity]


@dataclass(frozen=True)
class Connection:
    """All actions between one unordered pair; the score is never stored stale."""

    p_i: str
    p_j: str
    actions: tuple[SocialAction, ...]

    @property
    def sn_score(self) -> float:
        return sn_score(self.actions)


@dataclass(frozen=True)
class DirectoryEntry:
    network: str
    handle: str
    display_name: str


@dataclass(frozen=True)
class IdentityMatch:
    person: str
    network: str
    candidate_handle: str
    display_name: str
    distance: int
    ambiguous: bool


def levenshtein(a: str, b: str) -> int:
    """Minimum single-character insertions, deletions and substitutions."""
    if a == b:
        return 0
    if not a:
        return len(b)
    if not b:
        return len(a)
    prev = list(range(len(b) + 1))
    for i, ca in enumerate(a, start=1):
        curr = [i]
        for j, cb in enumerate(b, start=1):
            cost = 0 if ca == cb else 1
            curr.append(min(curr[j - 1] + 1, prev[j] + 1, prev[j - 1] + cost))
        prev = curr
    return prev[-1]


def fold_name(name: str) -> str:
    """Casefold and strip diacritics for distance comparison."""
    decomposed = unicodedata.normalize("NFKD", name.casefold())
    return "".join(ch for ch in decomposed if not unicodedata.combining(ch))


def resolve_identities(
    person: Person, directory: Sequence[DirectoryEntry]
) -> list[IdentityMatch]:
    """Directory candidates accepted for a person, best match first.

    A candidate is accepted when its normalized distance d / max(|a|, |b|)
    is at most MATCH_THRESHOLD. When two or more accepted candidates on the
    same network tie at that network's minimum, all of them are flagged
    ambiguous and need explicit investigator confirmation before their
    actions count. A person holding one account per network is not ambiguous.
    """
    folded = fold_name(person.full_name)
    scored: list[tuple[int, int, DirectoryEntry]] = []
    for entry in directory:
        if not entry.display_name:
            continue
        other = fold_name(entry.display_name)
        d = levenshtein(folded, other)
        m = max(len(folded), len(other), 1)
        # d/m <= MATCH_THRESHOLD, kept exact by cross-multiplying
        if d <= MATCH_THRESHOLD * m:
            scored.append((d, m, entry))
    if not scored:
        return []
    # order by normalized distance, then a stable key; exact fraction compare
    scored.sort(key=lambda t: (t[0] / t[1], t[2].network, t[2].handle))
    best: dict[str, tuple[int, int]] = {}
    ties: dict[str, int] = {}
    for d, m, entry in scored:
        held = best.get(entry.network)
        if held is None or d * held[1] < held[0] * m:
            best[entry.network] = (d, m)
            ties[entry.network] = 1
        elif d * held[1] == held[0] * m:
            ties[entry.network] += 1
    matches = []
    for d, m, entry in scored:
        bd, bm = best[entry.network]
        is_min = d * bm == bd * m
        matches.append(
            IdentityMatch(
                person=person.id,
                network=entry.network,
                candidate_handle=entry.handle,
                display_name=entry.display_name,
                distance=d,
                ambiguous=is_min and ties[entry.network] >= 2,
            )
        )
    return matches


def flag_cross_person_conflicts(matches: Sequence[IdentityMatch]) -> list[IdentityMatch]:
    """Mark matches ambiguous when several people claim the same handle."""
    claimants: dict[tuple[str, str], set[str]] = {}
    for m in matches:
        claimants.setdefault((m.network, m.candidate_handle), set()).add(m.person)
    out = []
    for m in matches:
        if len(claimants[(m.network, m.candidate_handle)]) > 1 and not m.ambiguous:
            out.append(
                IdentityMatch(
                    person=m.person,
                    network=m.network,
                    candidate_handle=m.candidate_handle,
                    display_name=m.display_name,
                    distance=m.distance,
                    ambiguous=True,
                )
            )
        else:
            out.append(m)
    return out


def load_directory(path: Path | str) -> list[DirectoryEntry]:
    data = json.loads(Path(path).read_text(encoding="utf-8"))
    return parse_directory(data)


def parse_directory(data: object) -> list[DirectoryEntry]:
    if not isinstance(data, list):
        raise ValueError("account directory must be a JSON array")
    entries = []
    for item in data:
        try:
            entries.append(
                DirectoryEntry(
                    network=str(item["network"]),
                    handle=str(item["handle"]),
                    display_name=str(item.get("display_name", "")),
                )
            )
        except (KeyError, TypeError) as exc:
            raise ValueError(f"bad directory entry {item!r}: {exc}") from exc
    return entries


@dataclass
class ActionImportReport:
    actions: list[SocialAction]
    skipped: list[tuple[int, str]]  # (line number, reason)


def handle_map(resolved: Iterable[IdentityMatch]) -> dict[tuple[str, str], str]:
    """(network, handle) -> person id for confirmed, unambiguous matches."""
    mapping: dict[tuple[str, str], str] = {}
    for m in resolved:
        key = (m.network, m.candidate_handle)
        if key in mapping and mapping[key] != m.person:
            raise ValueError(
                f"handle {m.candidate_handle!r} on {m.network} resolves to both "
                f"{mapping[key]!r} and {m.person!r}; confirm one identity first"
            )
        mapping[key] = m.person
    return mapping


def import_actions(
    path: Path | str, resolved: Iterable[IdentityMatch]
) -> ActionImportReport:
    """Parse a JSON-lines action file against resolved identities.

    Lines whose handles do not resolve to confirmed people are skipped and
    reported, not fatal; malformed lines and unknown activities are errors.
    """
    text = Path(path).read_text(encoding="utf-8")
    return parse_actions(text, resolved)


def parse_actions(text: str, resolved: Iterable[IdentityMatch]) -> ActionImportReport:
    mapping = handle_map(resolved)
    actions: list[SocialAction] = []
    skipped: list[tuple[int, str]] = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        try:
            raw = json.loads(line)
        except json.JSONDecodeError as exc:
            raise ActionImportError(f"line {lineno}: invalid JSON: {exc}") from exc
        action, reason = _line_to_action(raw, mapping, lineno)
        if action is None:
            skipped.append((lineno, reason))
        else:
            actions.append(action)
    return ActionImportReport(actions=actions, skipped=skipped)


def _line_to_action(
    raw: object, mapping: Mapping[tuple[str, str], str], lineno: int
) -> tuple[Optional[SocialAction], str]:
    if not isinstance(raw, dict):
        raise ActionImportError(f"line {lineno}: expected a JSON object")
    try:
        network = str(raw["network"])
        src_handle = str(raw["from"])
        dst_handle = str(raw["to"])
        activity = str(raw["activity"])
    except KeyError as exc:
        raise ActionImportError(f"line {lineno}: missing field {exc.args[0]!r}") from exc
    if activity in (FOLLOW, MUTUAL_FOLLOW):
        kind = None
    elif activity in SUPPORT_KINDS:
        kind, activity = activity, SUPPORT
    else:
        raise ActionImportError(f"line {lineno}: unknown activity {activity!r}")
    weight = raw.get("weight")
    if weight is not None:
        try:
            weight = float(weight)
        except (TypeError, ValueError) as exc:
            raise ActionImportError(f"line {lineno}: bad weight {weight!r}") from exc
        if weight < 0:
            raise ActionImportError(f"line {lineno}: negative weight {weight}")
    source = mapping.get((network, src_handle))
    target = mapping.get((network, dst_handle))
    if source is None:
        return None, f"unresolved handle {src_handle!r} on {network}"
    if target is None:
        return None, f"unresolved handle {dst_handle!r} on {network}"
    if source == target:
        return None, f"self-action by {source!r}"
    return (
        SocialAction(
            network=network,
            activity=activity,
            source=source,
            target=target,
            support_kind=kind,
            weight=weight,
        ),
        "",
    )


def sn_score(actions: Iterable[SocialAction]) -> float:
    """Saturating sum of action weights over both directions, capped at 1."""
    total = 0.0
    pair = None
    for a in actions:
        if pair is None:
            pair = a.pair
        elif a.pair != pair:
            raise ValueError(f"actions mix pairs {pair} and {a.pair}")
        total += a.effective_weight
    return min(1.0, total)


def actions_by_pair(
    actions: Iterable[SocialAction],
) -> dict[tuple[str, str], list[SocialAction]]:
    grouped: dict[tuple[str, str], list[SocialAction]] = {}
    for a in actions:
        grouped.setdefault(a.pair, []).append(a)
    return grouped


def connections(actions: Iterable[SocialAction]) -> list[Connection]:
    return [
        Connection(p_i=pair[0], p_j=pair[1], actions=tuple(acts))
        for pair, acts in sorted(actions_by_pair(actions).items())
    ]


def has_follow_link(actions: Iterable[SocialAction], network: str) -> bool:
    """Whether any follow-type connection exists on the given network."""
    wanted = network.upper()
    return any(
        a.network.upper() == wanted and a.activity in (FOLLOW, MUTUAL_FOLLOW)
        for a in actions
    )
