"""HTTP facade over ProjectStore.

All bodies are JSON except artifact uploads (raw payload) and exports (raw
emitter output). Error responses carry {"error", "message"} plus
type-specific fields; the status mapping lives in one table below.
"""
from __future__ import annotations

import os
from pathlib import Path
from typing import Union

from fastapi import FastAPI, Query, Request, Response
from fastapi.responses import JSONResponse
from pydantic import BaseModel, Field

from .annotations import TaskSpec
from .errors import (
    BadTargetError,
    ConflictError,
    ContractError,
    DanglingReferenceError,
    DataTypeError,
    DuplicateKeyError,
    InvalidSlugError,
    MissingDescriptionError,
    MissingSpecError,
    NotFoundError,
    ParseError,
    SpecValidationError,
    TaskweaveError,
)
from .matcher import DEFAULT_KEYWORD_THRESHOLD, DEFAULT_MAX_DEPTH
from .model import Param, datatype_from_json
from .project import ProjectStore

DEFAULT_DATA_DIR = "~/.taskweave/projects"

_STATUS_BY_TYPE = (
    (InvalidSlugError, 400),
    (NotFoundError, 404),
    (ConflictError, 409),
    (MissingSpecError, 409),
    (MissingDescriptionError, 409),
    (ContractError, 409),
    (SpecValidationError, 422),
    (ParseError, 422),
    (DanglingReferenceError, 422),
    (DuplicateKeyError, 422),
    (DataTypeError, 422),
    (BadTargetError, 422),
)


def _status_for(exc: TaskweaveError) -> int:
    for etype, status in _STATUS_BY_TYPE:
        if isinstance(exc, etype):
            return status
    return 500


def _error_body(exc: TaskweaveError) -> dict:
    body = {"error": type(exc).__name__, "message": str(exc)}
    if isinstance(exc, ConflictError):
        body["missing"] = exc.missing
    if isinstance(exc, SpecValidationError):
        body["errors"] = [{"taskId": e.task_id, "message": e.message} for e in exc.errors]
    if isinstance(exc, ParseError) and exc.line is not None:
        body["line"] = exc.line
        body["column"] = exc.column
    return body


class ParamBody(BaseModel):
    name: str
    type: Union[str, dict]


class SpecBody(BaseModel):
    objective: str = ""
    inputs: list[ParamBody] = Field(default_factory=list)
    outputs: list[ParamBody] = Field(default_factory=list)
    weights: dict[str, float] | None = None


class MatchOptions(BaseModel):
    tau: float = Field(default=DEFAULT_KEYWORD_THRESHOLD, ge=0.0, le=1.0)
    maxDepth: int = Field(default=DEFAULT_MAX_DEPTH, ge=1, le=8)
    includeConsistency: bool = True
    categoryStats: bool = False


def _to_task_spec(task_id: str, body: SpecBody) -> TaskSpec:
    return TaskSpec(
        task_id=task_id,
        objective=body.objective,
        inputs=tuple(Param(p.name, datatype_from_json(p.type)) for p in body.inputs),
        outputs=tuple(Param(p.name, datatype_from_json(p.type)) for p in body.outputs),
        weights=dict(body.weights) if body.weights is not None else None,
    )


def create_app(data_dir: Path | str | None = None) -> FastAPI:
    """App factory; the data directory defaults to $TASKWEAVE_DATA_DIR."""
    if data_dir is None:
        data_dir = os.environ.get("TASKWEAVE_DATA_DIR", DEFAULT_DATA_DIR)
    store = ProjectStore(Path(data_dir).expanduser())
    app = FastAPI(title="taskweave", version="1.0.0")
    app.state.store = store

    @app.exception_handler(TaskweaveError)
    async def _taskweave_error(_request: Request, exc: TaskweaveError):
        return JSONResponse(status_code=_status_for(exc), content=_error_body(exc))

    @app.post("/projects/{project_id}")
    def create_project(project_id: str) -> dict:
        return store.create_or_load(project_id)

    @app.put("/projects/{project_id}/artifacts/{kind}")
    async def put_artifact(
        project_id: str,
        kind: str,
        request: Request,
        filename: str | None = Query(default=None),
    ) -> dict:
        payload = await request.body()
        return store.submit_artifact(project_id, kind, payload, filename)

    @app.put("/projects/{project_id}/tasks/{task_id}/spec")
    def put_task_spec(project_id: str, task_id: str, body: SpecBody) -> JSONResponse:
        errors = store.update_task_spec(project_id, task_id, _to_task_spec(task_id, body))
        content = {
            "taskId": task_id,
            "persisted": not errors,
            "errors": [{"taskId": e.task_id, "message": e.message} for e in errors],
        }
        return JSONResponse(status_code=422 if errors else 200, content=content)

    @app.post("/projects/{project_id}/match")
    def run_match(project_id: str, options: MatchOptions | None = None) -> Response:
        options = options or MatchOptions()
        body = store.run_match(
            project_id,
            tau=options.tau,
            max_depth=options.maxDepth,
            include_consistency=options.includeConsistency,
            category_stats=options.categoryStats,
        )
        return Response(content=body, media_type="application/json")

    @app.get("/projects/{project_id}/bindings")
    def get_bindings(project_id: str) -> Response:
        return Response(content=store.get_bindings_json(project_id), media_type="application/json")

    @app.get("/projects/{project_id}/export/{what}")
    def get_export(project_id: str, what: str) -> Response:
        payload, media_type = store.export(project_id, what)
        return Response(content=payload, media_type=media_type)

    @app.get("/projects/{project_id}/process")
    def get_process(project_id: str) -> dict:
        return store.process_view(project_id)

    return app
