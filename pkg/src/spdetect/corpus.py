"""Project data model: people, assignments, submitted documents, authorship.

A project lives in a directory with a ``project.json`` manifest and a
``submissions/<assignment_id>/<person_id>/`` tree. Each (assignment, person)
directory that contains files becomes exactly one document; a missing
directory is a missing submission, not an error.
"""

from __future__ import annotations

import base64
import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

MANIFEST_NAME = "project.json"


class ManifestError(ValueError):
    """The manifest and the submission tree disagree, or either is malformed."""


@dataclass(frozen=True)
class Weights:
    """Per-assignment fusion weights for the three evidence factors."""

    w_cs: float
    w_sn: float
    w_se: float

    def __post_init__(self) -> None:
        for name in ("w_cs", "w_sn", "w_se"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ValueError(f"{name} must be in [0, 1], got {v}")
        total = self.w_cs + self.w_sn + self.w_se
        if abs(total - 1.0) > 1e-9:
            raise ValueError(f"weights must sum to 1, got {total}")


@dataclass(frozen=True)
class Person:
    id: str
    full_name: str
    accounts: tuple[tuple[str, str], ...] = ()  # (network, handle)
    keywords: frozenset[str] = frozenset()

    def __post_init__(self) -> None:
        if not self.full_name:
            raise ValueError(f"person {self.id!r} has an empty full_name")
        if len(set(self.accounts)) != len(self.accounts):
            raise ValueError(f"person {self.id!r} has duplicate accounts")


@dataclass(frozen=True)
class Assignment:
    id: str
    title: str
    keywords: frozenset[str] = frozenset()
    weights: Weights = Weights(1.0, 0.0, 0.0)
    language_profile: str = "generic-code"


@dataclass(frozen=True)
class Document:
    id: str
    author: str
    assignment: str
    content: bytes
    content_hash: str

    @classmethod
    def build(cls, author: str, assignment: str, content: bytes) -> "Document":
        if not content:
            raise ValueError("document content must be non-empty")
        return cls(
            id=document_id(assignment, author),
            author=author,
            assignment=assignment,
            content=content,
            content_hash=hashlib.sha256(content).hexdigest(),
        )


def document_id(assignment_id: str, person_id: str) -> str:
    return f"{assignment_id}/{person_id}"


@dataclass
class Project:
    """Immutable after loading; people preserve manifest order."""

    id: str
    people: dict[str, Person] = field(default_factory=dict)
    assignments: dict[str, Assignment] = field(default_factory=dict)
    documents: dict[str, Document] = field(default_factory=dict)

    def documents_for_assignment(self, assignment_id: str) -> list[Document]:
        if assignment_id not in self.assignments:
            raise KeyError(f"unknown assignment id: {assignment_id}")
        return [d for d in self.documents.values() if d.assignment == assignment_id]


def documents_of(project: Project, person_id: str, assignment_id: str) -> Optional[Document]:
    """The unique document submitted by a person for an assignment, if any."""
    if person_id not in project.people:
        raise KeyError(f"unknown person id: {person_id}")
    if assignment_id not in project.assignments:
        raise KeyError(f"unknown assignment id: {assignment_id}")
    return project.documents.get(document_id(assignment_id, person_id))


def parse_manifest(data: dict, default_id: str = "project") -> Project:
    """Build an empty (document-less) Project from a manifest dict."""
    if not isinstance(data, dict):
        raise ManifestError("manifest must be a JSON object")
    project = Project(id=str(data.get("id", default_id)))
    for a in data.get("assignments", []):
        try:
            w = a.get("weights", {"w_cs": 1.0, "w_sn": 0.0, "w_se": 0.0})
            assignment = Assignment(
                id=str(a["id"]),
                title=str(a.get("title", a["id"])),
                keywords=frozenset(str(k).casefold() for k in a.get("keywords", [])),
                weights=Weights(float(w["w_cs"]), float(w["w_sn"]), float(w["w_se"])),
                language_profile=str(a.get("language_profile", "generic-code")),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise ManifestError(f"bad assignment entry {a!r}: {exc}") from exc
        if assignment.id in project.assignments:
            raise ManifestError(f"duplicate assignment id: {assignment.id}")
        project.assignments[assignment.id] = assignment
    for p in data.get("people", []):
        try:
            person = Person(
                id=str(p["id"]),
                full_name=str(p["full_name"]),
                accounts=tuple(
                    (str(acc["network"]), str(acc["handle"])) for acc in p.get("accounts", [])
                ),
                keywords=frozenset(str(k).casefold() for k in p.get("keywords", [])),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise ManifestError(f"bad person entry {p!r}: {exc}") from exc
        if person.id in project.people:
            raise ManifestError(f"duplicate person id: {person.id}")
        project.people[person.id] = person
    return project


def manifest_dict(project: Project) -> dict:
    return {
        "id": project.id,
        "assignments": [
            {
                "id": a.id,
                "title": a.title,
                "keywords": sorted(a.keywords),
                "weights": {"w_cs": a.weights.w_cs, "w_sn": a.weights.w_sn, "w_se": a.weights.w_se},
                "language_profile": a.language_profile,
            }
            for a in project.assignments.values()
        ],
        "people": [
            {
                "id": p.id,
                "full_name": p.full_name,
                "accounts": [{"network": n, "handle": h} for n, h in p.accounts],
                "keywords": sorted(p.keywords),
            }
            for p in project.people.values()
        ],
    }


def load_project(root: Path | str, manifest: dict | None = None) -> Project:
    """Load manifest and submission tree into a Project.

    Submissions are read from ``root/submissions/<assignment>/<person>/``;
    each person's files are concatenated in lexicographic filename order
    with a newline separator. Directories not named in the manifest are an
    error; missing submissions are not.
    """
    root = Path(root)
    if not root.is_dir():
        raise ManifestError(f"project root does not exist: {root}")
    if manifest is None:
        manifest_path = root / MANIFEST_NAME
        try:
            manifest = json.loads(manifest_path.read_text(encoding="utf-8"))
        except OSError as exc:
            raise ManifestError(f"cannot read manifest {manifest_path}: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise ManifestError(f"manifest {manifest_path} is not valid JSON: {exc}") from exc
    project = parse_manifest(manifest, default_id=root.name)

    subs = root / "submissions"
    if not subs.is_dir():
        return project
    for assignment_dir in sorted(p for p in subs.iterdir() if p.is_dir()):
        aid = assignment_dir.name
        if aid not in project.assignments:
            raise ManifestError(f"submission directory for unknown assignment: {aid!r}")
        for person_dir in sorted(p for p in assignment_dir.iterdir() if p.is_dir()):
            pid = person_dir.name
            if pid not in project.people:
                raise ManifestError(f"submission directory for unknown person: {pid!r}")
            content = _read_submission(person_dir)
            if not content:
                continue  # empty directory counts as a missing submission
            doc = Document.build(author=pid, assignment=aid, content=content)
            project.documents[doc.id] = doc
    return project


def _read_submission(person_dir: Path) -> bytes:
    files = sorted(
        (p for p in person_dir.rglob("*") if p.is_file()),
        key=lambda p: p.relative_to(person_dir).as_posix(),
    )
    parts = []
    for f in files:
        try:
            parts.append(f.read_bytes())
        except OSError as exc:
            raise ManifestError(f"cannot read submission file {f}: {exc}") from exc
    return b"\n".join(parts)


def project_to_dict(project: Project) -> dict:
    """JSON-able snapshot of a whole project, documents included."""
    return {
        "manifest": manifest_dict(project),
        "documents": [
            {
                "id": d.id,
                "author": d.author,
                "assignment": d.assignment,
                "content_b64": base64.b64encode(d.content).decode("ascii"),
                "content_hash": d.content_hash,
            }
            for d in project.documents.values()
        ],
    }


def project_from_dict(data: dict) -> Project:
    project = parse_manifest(data["manifest"], default_id=data["manifest"].get("id", "project"))
    for d in data.get("documents", []):
        content = base64.b64decode(d["content_b64"])
        doc = Document.build(author=d["author"], assignment=d["assignment"], content=content)
        if doc.content_hash != d.get("content_hash", doc.content_hash):
            raise ManifestError(f"stored hash mismatch for document {doc.id}")
        project.documents[doc.id] = doc
    return project


def save_project(project: Project, path: Path | str) -> None:
    Path(path).write_text(json.dumps(project_to_dict(project), indent=1), encoding="utf-8")


def read_project(path: Path | str) -> Project:
    return project_from_dict(json.loads(Path(path).read_text(encoding="utf-8")))
