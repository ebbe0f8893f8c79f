#!/usr/bin/env python3
"""Record live API responses for the demo project as frontend test fixtures.

Runs the real service in-process over a throwaway store, replays the demo
workflow, and writes each endpoint body to frontend/tests/fixtures/. The UI
contract tests assert that rendered values equal these recorded values.
"""

import json
import shutil
import sys
import tempfile
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from fastapi.testclient import TestClient  # noqa: E402

from spdetect.service import create_app  # noqa: E402

ROOT = Path(__file__).resolve().parent.parent
DEMO = ROOT / "fixtures" / "demo"
OUT = ROOT / "frontend" / "tests" / "fixtures"


def main() -> int:
    out_dir = Path(sys.argv[1]) if len(sys.argv) > 1 else OUT
    out_dir.mkdir(parents=True, exist_ok=True)
    store = Path(tempfile.mkdtemp(prefix="spdetect-fixture-"))
    try:
        with TestClient(create_app(store)) as client:
            docs = []
            for sub in sorted((DEMO / "submissions").glob("*/*")):
                files = sorted(p for p in sub.rglob("*") if p.is_file())
                docs.append(
                    {
                        "assignment": sub.parent.name,
                        "person": sub.name,
                        "content": "\n".join(p.read_text() for p in files),
                    }
                )
            manifest = json.loads((DEMO / "project.json").read_text())
            client.post("/api/projects", json={"manifest": manifest, "documents": docs})
            client.post("/api/projects/demo/similarity", json={})
            client.post(
                "/api/projects/demo/social",
                json={
                    "directory": json.loads((DEMO / "social" / "directory.json").read_text()),
                    "actions_jsonl": (DEMO / "social" / "actions.jsonl").read_text(),
                },
            )
            client.post(
                "/api/projects/demo/identities",
                json={"confirm": [{"person": "clara", "network": "FB", "handle": "c.medved"}]},
            )
            client.post(
                "/api/projects/demo/search",
                json={"fixture": json.loads((DEMO / "search" / "fixture.json").read_text())},
            )
            # one decided pair so cluster means exist for every color
            client.put(
                "/api/projects/demo/pairs/hw1:boris:clara/status",
                json={"status": "rejected", "revision": 0, "actor": "fixture"},
            )
            client.put(
                "/api/projects/demo/pairs/hw1:ana:david/status",
                json={"status": "confirmed", "revision": 0, "actor": "fixture"},
            )

            recordings = {
                "projects.json": client.get("/api/projects"),
                "pairs_hw1.json": client.get("/api/projects/demo/assignments/hw1/pairs"),
                "pair_detail.json": client.get("/api/projects/demo/pairs/hw1:ana:boris"),
                "clusters_hw1_cs.json": client.get(
                    "/api/projects/demo/assignments/hw1/clusters", params={"factor": "cs"}
                ),
                "clusters_hw1_total.json": client.get(
                    "/api/projects/demo/assignments/hw1/clusters", params={"factor": "total"}
                ),
                "graph.json": client.get("/api/projects/demo/graph"),
                "matrix.json": client.get("/api/projects/demo/matrix"),
            }
            for name, resp in recordings.items():
                assert resp.status_code == 200, f"{name}: {resp.status_code} {resp.text}"
                (out_dir / name).write_text(json.dumps(resp.json(), indent=2, sort_keys=True))
                print(f"wrote {out_dir / name}")
    finally:
        shutil.rmtree(store, ignore_errors=True)
    return 0


if __name__ == "__main__":
    sys.exit(main())
