"""Command-line client for the HTTP API.

Every command talks to the API: against a remote server with --server, or
an in-process app rooted at the project directory's parent otherwise, so
server and CLI behavior cannot drift apart.
"""
from __future__ import annotations

import json
import sys
import warnings
from importlib import resources
from pathlib import Path

import click
import httpx


def _split_project_dir(project_dir: str) -> tuple:
    path = Path(project_dir).expanduser().resolve()
    return path.parent, path.name


def _client(server: str | None, data_root: Path) -> httpx.Client:
    if server:
        return httpx.Client(base_url=server, timeout=60.0)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")  # test-client shim warns on import
        from fastapi.testclient import TestClient

    from .api import create_app

    return TestClient(create_app(data_root))


def _check(response: httpx.Response) -> httpx.Response:
    if response.status_code >= 400:
        try:
            body = response.json()
            message = body.get("message", response.text)
            detail = body.get("errors") or body.get("missing")
        except ValueError:
            message, detail = response.text, None
        click.echo(f"error ({response.status_code}): {message}", err=True)
        if detail:
            click.echo(json.dumps(detail, indent=2), err=True)
        sys.exit(1)
    return response


project_dir_option = click.option(
    "--project-dir",
    required=True,
    type=click.Path(),
    help="Project directory; its basename is the project id.",
)
server_option = click.option(
    "--server", default=None, help="Base URL of a running server; in-process otherwise."
)


@click.group()
def main() -> None:
    """Bind annotated business-process tasks to registered services."""


def _upload(client: httpx.Client, project: str, kind: str, path: Path, filename: str | None = None) -> None:
    params = {"filename": filename} if filename else None
    response = _check(client.put(
        f"/projects/{project}/artifacts/{kind}",
        content=path.read_bytes(),
        params=params,
    ))
    report = response.json()
    label = f"{kind}:{filename}" if filename else kind
    click.echo(f"accepted {label}")
    for warning in report.get("warnings", []):
        click.echo(f"  warning: {warning}")


@main.command()
@project_dir_option
@server_option
@click.option("--manifest", type=click.Path(exists=True), default=None)
@click.option("--wsdl", "wsdls", type=click.Path(exists=True), multiple=True)
@click.option("--logs", type=click.Path(exists=True), default=None)
@click.option("--lexicon", type=click.Path(exists=True), default=None)
@click.option("--bpmn", type=click.Path(exists=True), default=None)
@click.option("--specs", type=click.Path(exists=True), default=None)
def ingest(project_dir, server, manifest, wsdls, logs, lexicon, bpmn, specs) -> None:
    """Create the project and upload the given artifacts."""
    root, project = _split_project_dir(project_dir)
    with _client(server, root) as client:
        _check(client.post(f"/projects/{project}"))
        if manifest:
            _upload(client, project, "manifest", Path(manifest))
        for wsdl in wsdls:
            path = Path(wsdl)
            _upload(client, project, "wsdl", path, filename=path.name)
        if logs:
            _upload(client, project, "logs", Path(logs))
        if lexicon:
            _upload(client, project, "lexicon", Path(lexicon))
        if bpmn:
            _upload(client, project, "bpmn", Path(bpmn))
        if specs:
            _upload(client, project, "specs", Path(specs))


@main.command()
@project_dir_option
@server_option
@click.option("--tau", default=0.2, show_default=True)
@click.option("--max-depth", default=3, show_default=True)
def check(project_dir, server, tau, max_depth) -> None:
    """Run the datatype consistency check; exit 1 on any type mismatch."""
    root, project = _split_project_dir(project_dir)
    with _client(server, root) as client:
        response = _check(client.post(f"/projects/{project}/match", json={
            "tau": tau, "maxDepth": max_depth, "includeConsistency": True,
        }))
    reports = response.json().get("consistency", [])
    if not reports:
        click.echo("consistent: no findings")
        return
    failed = False
    for report in reports:
        if report["kind"] == "typeMismatch":
            failed = True
            click.echo(
                f"error: {report['upstreamTask']} -> {report['downstreamTask']} "
                f"param {report['paramName']}: {report['outputType']} cannot feed {report['inputType']}"
            )
        else:
            click.echo(
                f"info: {report['downstreamTask']} input {report['paramName']} "
                "has no upstream provider (externally supplied)"
            )
    if failed:
        sys.exit(1)


def _run_match(client: httpx.Client, project: str, tau: float, max_depth: int) -> dict:
    response = _check(client.post(f"/projects/{project}/match", json={
        "tau": tau, "maxDepth": max_depth, "includeConsistency": True,
    }))
    return response.json()


def _print_match(result: dict) -> None:
    for task in result["tasks"]:
        click.echo(f"task {task['taskId']} ({task['name']})")
        if not task["candidates"]:
            click.echo("  no candidates")
        for cand in task["candidates"]:
            click.echo(
                f"  {cand['serviceKey']}.{cand['operation']}"
                f"  degree={cand['degree']}  keyword={cand['keywordScore']:.3f}"
                f"  F={cand['utility']:.4f}"
            )
        binding = task["binding"]
        if binding is None:
            click.echo("  -> unresolved")
        elif binding["kind"] == "atomic":
            click.echo(f"  -> bound to {binding['serviceKey']}.{binding['operation']}")
        else:
            chain = " -> ".join(f"{s['serviceKey']}.{s['operation']}" for s in binding["steps"])
            click.echo(f"  -> composite: {chain}")


@main.command()
@project_dir_option
@server_option
@click.option("--tau", default=0.2, show_default=True)
@click.option("--max-depth", default=3, show_default=True)
def match(project_dir, server, tau, max_depth) -> None:
    """Rank candidates and bind every service task."""
    root, project = _split_project_dir(project_dir)
    with _client(server, root) as client:
        result = _run_match(client, project, tau, max_depth)
    _print_match(result)


@main.command()
@project_dir_option
@server_option
@click.option("--tau", default=0.2, show_default=True)
@click.option("--max-depth", default=3, show_default=True)
@click.option("--out", type=click.Path(), default=None, help="Write bindings JSON here.")
def bind(project_dir, server, tau, max_depth, out) -> None:
    """Run matching and print (or save) the resulting binding set."""
    root, project = _split_project_dir(project_dir)
    with _client(server, root) as client:
        _run_match(client, project, tau, max_depth)
        response = _check(client.get(f"/projects/{project}/bindings"))
    if out:
        Path(out).write_bytes(response.content)
        click.echo(f"wrote {out}")
    else:
        click.echo(response.text)


@main.command()
@project_dir_option
@server_option
@click.option(
    "--what",
    type=click.Choice(["executableBpmn", "wsonto", "bponto", "validation"]),
    required=True,
)
@click.option("--out", type=click.Path(), default=None, help="Output file; stdout otherwise.")
def export(project_dir, server, what, out) -> None:
    """Download an emitter artifact."""
    root, project = _split_project_dir(project_dir)
    with _client(server, root) as client:
        response = _check(client.get(f"/projects/{project}/export/{what}"))
    if out:
        Path(out).write_bytes(response.content)
        click.echo(f"wrote {out}")
    else:
        click.echo(response.content.decode("utf-8"), nl=False)


@main.command()
@click.option("--data-dir", type=click.Path(), default=None, help="Project root directory.")
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=8470, show_default=True)
def serve(data_dir, host, port) -> None:
    """Run the HTTP server."""
    import uvicorn

    from .api import create_app

    uvicorn.run(create_app(data_dir), host=host, port=port)


@main.command()
@project_dir_option
@server_option
def demo(project_dir, server) -> None:
    """Load the bundled travel-booking corpus and run matching."""
    root, project = _split_project_dir(project_dir)
    data = resources.files("taskweave.demo")
    with _client(server, root) as client:
        _check(client.post(f"/projects/{project}"))

        def put(kind: str, name: str, filename: str | None = None):
            payload = (data / name).read_bytes()
            params = {"filename": filename} if filename else None
            _check(client.put(
                f"/projects/{project}/artifacts/{kind}", content=payload, params=params,
            ))

        put("manifest", "manifest.json")
        for entry in sorted(p.name for p in (data / "wsdl").iterdir()):
            payload = (data / "wsdl" / entry).read_bytes()
            _check(client.put(
                f"/projects/{project}/artifacts/wsdl",
                content=payload,
                params={"filename": entry},
            ))
        put("logs", "logs.jsonl")
        put("lexicon", "lexicon.txt")
        put("bpmn", "process.bpmn")
        put("specs", "specs.json")
        result = _run_match(client, project, 0.2, 3)
    click.echo(f"demo project ready at {Path(project_dir).resolve()}")
    _print_match(result)


if __name__ == "__main__":
    main()
