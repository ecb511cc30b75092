"""HTTP face of a project.

One process serves one project directory. Every request reopens the
project from disk, so the service and the CLI can interleave freely;
writes go through the same directory lock. Responses are rendered with
the shared canonical JSON encoder, byte for byte what the CLI's
``--json`` flag prints.
"""

from __future__ import annotations

import json
import os
from typing import List, Optional

from fastapi import FastAPI, File, Form, Query, Request, UploadFile
from fastapi.exceptions import RequestValidationError
from fastapi.responses import PlainTextResponse, Response

from .conditioning import parse_observations
from .errors import BadInput, EmptyObservationSet, EngineError
from .project import Project, project_lock
from .relstore import _parse_value
from .report import canonical_json


def _json(obj, status_code=200) -> Response:
    return Response(canonical_json(obj), status_code=status_code,
                    media_type="application/json")


async def _body_obj(request: Request) -> dict:
    try:
        obj = json.loads(await request.body())
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise BadInput(f"request body is not JSON: {exc}") from exc
    if not isinstance(obj, dict):
        raise BadInput("request body must be a JSON object")
    return obj


def _require_int(obj: dict, key: str) -> int:
    value = obj.get(key)
    if isinstance(value, bool) or not isinstance(value, int):
        raise BadInput(f"{key!r} must be an integer, got {value!r}")
    return value


def _optional_number(obj: dict, key: str):
    value = obj.get(key)
    if value is None:
        return None
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise BadInput(f"{key!r} must be a number, got {value!r}")
    return float(value)


def create_app(project_root: str, static_dir: Optional[str] = None) -> FastAPI:
    app = FastAPI(title="hypodb", docs_url=None, redoc_url=None,
                  openapi_url=None)

    def read() -> Project:
        return Project.open(project_root)

    def mutate(operation):
        with project_lock(project_root):
            project = Project.open(project_root)
            result = operation(project)
            project.save()
        return result

    @app.exception_handler(EngineError)
    async def engine_error(request: Request, exc: EngineError):
        return _json({"code": exc.code, "detail": exc.detail},
                     exc.http_status)

    @app.exception_handler(RequestValidationError)
    async def validation_error(request: Request, exc):
        errors = exc.errors()
        if errors:
            loc = ".".join(str(part) for part in errors[0].get("loc", ()))
            detail = f"{loc}: {errors[0].get('msg', 'invalid')}"
        else:
            detail = "invalid request"
        return _json({"code": "BadInput", "detail": detail}, 400)

    @app.post("/phenomena")
    async def add_phenomenon(request: Request):
        data = await request.body()
        return _json(mutate(lambda p: p.add_phenomenon(data)))

    @app.post("/hypotheses")
    async def add_hypothesis(descriptor: UploadFile = File(...),
                             phi: List[int] = Form(default=[])):
        data = await descriptor.read()
        return _json(mutate(lambda p: p.add_hypothesis(data, list(phi))))

    @app.post("/trials")
    async def load_trial(phi: int = Form(...), upsilon: int = Form(...),
                         file: Optional[UploadFile] = File(None),
                         csv: Optional[str] = Form(None)):
        if file is not None:
            text = (await file.read()).decode("utf-8")
        elif csv is not None:
            text = csv
        else:
            raise BadInput("provide the trial CSV as 'file' or 'csv'")
        return _json(mutate(lambda p: p.load_trial_csv(phi, upsilon, text)))

    @app.post("/u-intro")
    async def u_intro(request: Request):
        body = await _body_obj(request)
        phi = _require_int(body, "phi")
        return _json(mutate(lambda p: p.u_intro(phi)))

    @app.get("/catalog")
    async def catalog():
        return _json(read().catalog_obj())

    @app.get("/relations/{name}")
    async def relation(name: str, filter: List[str] = Query(default=[])):
        project = read()
        if name == "W":
            return _json(project.world_table_obj())
        where = {}
        for item in filter:
            if "=" not in item:
                raise BadInput(f"filter needs attr=value, got {item!r}")
            attr, value = item.split("=", 1)
            where[attr] = _parse_value(attr, value)
        return _json(project.relation_obj(name, where))

    @app.get("/world-table")
    async def world_table():
        return _json(read().world_table_obj())

    @app.get("/predictions")
    async def predictions(phi: int):
        return _json(read().predictions_obj(phi))

    @app.post("/condition")
    async def condition(request: Request):
        body = await _body_obj(request)
        phi = _require_int(body, "phi")
        sigma = _optional_number(body, "sigma")
        at = _optional_number(body, "at")
        write_back = body.get("writeBack", True)
        if not isinstance(write_back, bool):
            raise BadInput("'writeBack' must be a boolean")
        mapping = body.get("map") or {}
        if not isinstance(mapping, dict):
            raise BadInput("'map' must be an object of symbol: column")
        samples = body.get("samples")
        csv_text = body.get("csv")

        def run(project: Project):
            if csv_text is not None:
                index_col, value_col, symbol = project.observation_mapping(
                    phi, mapping
                )
                observations = parse_observations(
                    csv_text, index_col, value_col
                )
            elif samples is not None:
                observations, symbol = project.observation_from_samples(
                    phi, samples, body.get("symbol")
                )
            else:
                raise EmptyObservationSet(
                    "provide observations as 'samples' or 'csv'"
                )
            report, _, _, _ = project.condition(
                phi, observations, sigma, at, symbol, write_back=write_back
            )
            return report.to_obj()

        if write_back:
            return _json(mutate(run))
        return _json(run(read()))

    @app.post("/simulate")
    async def simulate(request: Request):
        from . import simkit

        try:
            text = (await request.body()).decode("utf-8")
        except UnicodeDecodeError as exc:
            raise BadInput(f"model JSON is not UTF-8: {exc}") from exc
        model = simkit.parse_model_json(text)
        return PlainTextResponse(simkit.trial_csv(model),
                                 media_type="text/csv")

    if static_dir and os.path.isdir(static_dir):
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=static_dir, html=True),
                  name="ui")

    return app
