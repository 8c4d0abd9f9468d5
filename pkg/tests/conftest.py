"""Shared fixtures: the bundled demo corpus and a fully loaded project."""
from __future__ import annotations

from importlib import resources
from pathlib import Path

import pytest

from taskweave.project import ProjectStore

DEMO = resources.files("taskweave") / "demo"


def load_demo(store: ProjectStore, project_id: str = "demo") -> dict:
    """Upload every demo artifact into a fresh project; returns warnings per kind."""
    store.create_or_load(project_id)
    warnings: dict[str, list] = {}
    warnings["manifest"] = store.submit_artifact(
        project_id, "manifest", (DEMO / "manifest.json").read_bytes()
    )["warnings"]
    for entry in sorted(p.name for p in (DEMO / "wsdl").iterdir()):
        r = store.submit_artifact(
            project_id, "wsdl", (DEMO / "wsdl" / entry).read_bytes(), filename=entry
        )
        warnings.setdefault("wsdl", []).extend(r["warnings"])
    for kind, fname in (
        ("logs", "logs.jsonl"),
        ("lexicon", "lexicon.txt"),
        ("bpmn", "process.bpmn"),
        ("specs", "specs.json"),
    ):
        warnings[kind] = store.submit_artifact(
            project_id, kind, (DEMO / fname).read_bytes()
        )["warnings"]
    return warnings


@pytest.fixture()
def demo_store(tmp_path: Path) -> ProjectStore:
    store = ProjectStore(tmp_path)
    load_demo(store)
    return store


@pytest.fixture()
def demo_dir():
    return DEMO
