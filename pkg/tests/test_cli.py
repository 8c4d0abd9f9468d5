"""CLI behavior through the in-process client: ingest, check, match, export."""
import json

import pytest
from click.testing import CliRunner

from taskweave.cli import main

from conftest import DEMO


@pytest.fixture()
def runner():
    return CliRunner()


def ingest_demo(runner, project_dir, specs_bytes=None):
    args = [
        "ingest", "--project-dir", str(project_dir),
        "--manifest", str(DEMO / "manifest.json"),
        "--logs", str(DEMO / "logs.jsonl"),
        "--lexicon", str(DEMO / "lexicon.txt"),
        "--bpmn", str(DEMO / "process.bpmn"),
    ]
    for wsdl in sorted((DEMO / "wsdl").iterdir(), key=lambda p: p.name):
        args += ["--wsdl", str(wsdl)]
    if specs_bytes is None:
        args += ["--specs", str(DEMO / "specs.json")]
    else:
        alt = project_dir.parent / "alt-specs.json"
        alt.write_bytes(specs_bytes)
        args += ["--specs", str(alt)]
    result = runner.invoke(main, args)
    assert result.exit_code == 0, result.output
    return result


class TestIngest:
    def test_uploads_everything(self, runner, tmp_path):
        result = ingest_demo(runner, tmp_path / "proj")
        assert result.output.count("accepted wsdl:") == 12
        for kind in ("manifest", "logs", "lexicon", "bpmn", "specs"):
            assert f"accepted {kind}" in result.output
        assert (tmp_path / "proj" / "process.bpmn").exists()

    def test_surfaces_warnings(self, runner, tmp_path):
        specs = json.loads((DEMO / "specs.json").read_text("utf-8"))
        for task in specs["tasks"]:
            if task["taskId"] == "task-a":
                task["weights"] = None
        ingest = ingest_demo(runner, tmp_path / "proj", json.dumps(specs).encode())
        assert "warning:" in ingest.output
        assert "task-a" in ingest.output

    def test_bad_artifact_fails(self, runner, tmp_path):
        bad = tmp_path / "bad.json"
        bad.write_text("{oops")
        result = runner.invoke(main, [
            "ingest", "--project-dir", str(tmp_path / "proj"), "--manifest", str(bad),
        ])
        assert result.exit_code == 1
        assert "error (422)" in result.output


class TestCheck:
    def test_consistent_process_passes(self, runner, tmp_path):
        ingest_demo(runner, tmp_path / "proj")
        result = runner.invoke(main, ["check", "--project-dir", str(tmp_path / "proj")])
        assert result.exit_code == 0, result.output
        # demo inputs with no upstream provider are informational only
        assert "info:" in result.output
        assert "error:" not in result.output

    def test_type_mismatch_exits_one(self, runner, tmp_path):
        specs = json.loads((DEMO / "specs.json").read_text("utf-8"))
        for task in specs["tasks"]:
            if task["taskId"] == "task-b":
                for param in task["inputs"]:
                    if param["name"] == "fare":
                        param["type"] = "integer"  # upstream produces float
        ingest_demo(runner, tmp_path / "proj", json.dumps(specs).encode())
        result = runner.invoke(main, ["check", "--project-dir", str(tmp_path / "proj")])
        assert result.exit_code == 1
        assert "error: task-a -> task-b param fare" in result.output
        assert "float cannot feed integer" in result.output

    def test_missing_project_fails(self, runner, tmp_path):
        result = runner.invoke(main, ["check", "--project-dir", str(tmp_path / "ghost")])
        assert result.exit_code == 1
        assert "error (404)" in result.output


class TestMatch:
    def test_prints_rankings_and_bindings(self, runner, tmp_path):
        ingest_demo(runner, tmp_path / "proj")
        result = runner.invoke(main, ["match", "--project-dir", str(tmp_path / "proj")])
        assert result.exit_code == 0, result.output
        assert "task task-a (Find Flights)" in result.output
        assert "-> bound to svc-flightfinder.searchFlights" in result.output
        assert "-> composite: svc-seathold.holdSeat -> svc-ticketdesk.confirmTicket" in result.output
        assert "degree=Exact" in result.output

    def test_bind_writes_file(self, runner, tmp_path):
        ingest_demo(runner, tmp_path / "proj")
        out = tmp_path / "bindings.json"
        result = runner.invoke(main, [
            "bind", "--project-dir", str(tmp_path / "proj"), "--out", str(out),
        ])
        assert result.exit_code == 0, result.output
        body = json.loads(out.read_text("utf-8"))
        assert body["processId"] == "travel-booking"
        assert set(body["bindings"]) == {"task-a", "task-b", "task-c", "task-d", "task-e"}


class TestExport:
    def test_to_file_and_stdout(self, runner, tmp_path):
        ingest_demo(runner, tmp_path / "proj")
        assert runner.invoke(
            main, ["match", "--project-dir", str(tmp_path / "proj")]
        ).exit_code == 0

        out = tmp_path / "onto.ttl"
        result = runner.invoke(main, [
            "export", "--project-dir", str(tmp_path / "proj"),
            "--what", "wsonto", "--out", str(out),
        ])
        assert result.exit_code == 0, result.output
        assert out.read_text("utf-8").startswith("@prefix")

        result = runner.invoke(main, [
            "export", "--project-dir", str(tmp_path / "proj"), "--what", "validation",
        ])
        assert result.exit_code == 0
        assert json.loads(result.output) == {"findings": [], "ok": True}

    def test_rejects_unknown_kind(self, runner, tmp_path):
        result = runner.invoke(main, [
            "export", "--project-dir", str(tmp_path / "proj"), "--what", "pdf",
        ])
        assert result.exit_code == 2  # click choice validation


class TestDemo:
    def test_one_command_walkthrough(self, runner, tmp_path):
        result = runner.invoke(main, ["demo", "--project-dir", str(tmp_path / "travel")])
        assert result.exit_code == 0, result.output
        assert "demo project ready" in result.output
        assert result.output.count("-> bound to") == 4
        assert result.output.count("-> composite:") == 1
        assert "unresolved" not in result.output
