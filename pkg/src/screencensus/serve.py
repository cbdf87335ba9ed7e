"""HTTP service exposing analytics documents to the web viewer.

Serves ``GET /api/films`` (listing plus validation errors for rejected
files) and ``GET /api/films/{id}`` over a directory of analytics JSON
documents, alongside the static viewer bundle when one is available.
Documents are validated against the v1 schema at startup; invalid files
are listed with their validation error but never served.
"""

from __future__ import annotations

import json
import logging
from pathlib import Path

import jsonschema
from fastapi import FastAPI
from fastapi.responses import FileResponse, HTMLResponse, JSONResponse
from fastapi.staticfiles import StaticFiles

from .errors import InputError

logger = logging.getLogger(__name__)

_SCHEMA_PATH = Path(__file__).parent / "assets" / "analytics_schema_v1.json"

_FALLBACK_PAGE = """<!doctype html>
<html><head><title>screencensus</title></head>
<body>
<h1>screencensus analytics API</h1>
<p>The viewer bundle is not built. The JSON API is available at
<a href="/api/films">/api/films</a>.</p>
</body></html>
"""


def load_schema() -> dict:
    return json.loads(_SCHEMA_PATH.read_text())


def validate_document(doc: dict, schema: dict | None = None) -> None:
    """Raise InputError naming the failing field on schema violations."""
    schema = schema or load_schema()
    try:
        jsonschema.validate(doc, schema)
    except jsonschema.ValidationError as exc:
        path = "/".join(str(p) for p in exc.absolute_path) or "(document root)"
        raise InputError(f"schema violation at {path}: {exc.message}") from exc


def scan_analytics_dir(analytics_dir: Path):
    """Split a directory's JSON files into valid documents and rejects."""
    schema = load_schema()
    films: dict[str, dict] = {}
    invalid: list[dict] = []
    for path in sorted(analytics_dir.glob("*.json")):
        try:
            doc = json.loads(path.read_text())
            validate_document(doc, schema)
        except (json.JSONDecodeError, InputError) as exc:
            logger.warning("rejecting %s: %s", path.name, exc)
            invalid.append({"file": path.name, "error": str(exc)})
            continue
        films[doc["film_id"]] = doc
    return films, invalid


def create_app(analytics_dir, static_dir=None) -> FastAPI:
    analytics_dir = Path(analytics_dir)
    if not analytics_dir.is_dir():
        raise InputError(f"analytics directory not found: {analytics_dir}")
    films, invalid = scan_analytics_dir(analytics_dir)
    if not films:
        raise InputError(
            f"no schema-valid analytics documents in {analytics_dir} "
            f"({len(invalid)} rejected)"
        )

    app = FastAPI(title="screencensus analytics", version="1")

    @app.get("/api/films")
    def list_films():
        return {
            "films": [
                {"film_id": film_id, "n_faces": doc["n_faces"]}
                for film_id, doc in sorted(films.items())
            ],
            "invalid": invalid,
        }

    @app.get("/api/films/{film_id}")
    def get_film(film_id: str):
        doc = films.get(film_id)
        if doc is None:
            return JSONResponse(
                status_code=404,
                content={"error": "not found", "detail": f"no film {film_id!r}"},
            )
        return doc

    static_dir = Path(static_dir) if static_dir else None
    if static_dir and static_dir.is_dir():
        index = static_dir / "index.html"

        @app.get("/", include_in_schema=False)
        def root():
            return FileResponse(index)

        app.mount("/", StaticFiles(directory=str(static_dir)), name="viewer")
    else:
        @app.get("/", include_in_schema=False)
        def fallback_root():
            return HTMLResponse(_FALLBACK_PAGE)

    return app


def run_server(analytics_dir, port: int, static_dir=None, host: str = "127.0.0.1"):
    import socket

    import uvicorn

    app = create_app(analytics_dir, static_dir=static_dir)
    probe = socket.socket(socket.AF_INET, socket.SOCK_STREAM)
    try:
        probe.setsockopt(socket.SOL_SOCKET, socket.SO_REUSEADDR, 1)
        probe.bind((host, port))
    except OSError as exc:
        raise InputError(f"cannot bind {host}:{port}: {exc}") from exc
    finally:
        probe.close()
    uvicorn.run(app, host=host, port=port, log_level="info")
