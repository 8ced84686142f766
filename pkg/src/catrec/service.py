"""FastAPI service wrapping the pipeline stages.

Every stage is a POST endpoint taking a working directory plus the full run
configuration; responses carry the stage summary. Error codes: 400/422 for
configuration problems, 404 for missing upstream artifacts, 409 for numerical
divergence.
"""

from __future__ import annotations

from pathlib import Path

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse
from pydantic import BaseModel, ConfigDict

from . import __version__, pipeline
from .config import RunConfig
from .errors import ConfigError, DivergenceError, MissingArtifactError

app = FastAPI(title="catrec", version=__version__)


class StageRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")

    workdir: str
    config: RunConfig = RunConfig()


class BaselineRequest(StageRequest):
    variant: str


class RecommendRequest(StageRequest):
    user: str | None = None
    k: int | None = None


class Project2dRequest(StageRequest):
    nodes: list[str] | None = None


class StageResponse(BaseModel):
    stage: str
    summary: dict


@app.exception_handler(ConfigError)
async def _config_error(request: Request, exc: ConfigError):
    return JSONResponse(status_code=400, content={"error": "config", "detail": str(exc)})


@app.exception_handler(MissingArtifactError)
async def _missing_artifact(request: Request, exc: MissingArtifactError):
    return JSONResponse(
        status_code=404, content={"error": "missing-artifact", "detail": str(exc)}
    )


@app.exception_handler(DivergenceError)
async def _divergence(request: Request, exc: DivergenceError):
    return JSONResponse(
        status_code=409,
        content={"error": "divergence", "detail": str(exc), "epoch": exc.epoch},
    )


@app.get("/health")
def health() -> dict:
    return {"status": "ok", "version": __version__}


def _run(stage: str, fn, req: StageRequest, **kwargs) -> StageResponse:
    summary = fn(Path(req.workdir), req.config, **kwargs)
    return StageResponse(stage=stage, summary=summary)


@app.post("/synth", response_model=StageResponse)
def synth(req: StageRequest):
    return _run("synth", pipeline.run_synth, req)


@app.post("/ingest", response_model=StageResponse)
def ingest(req: StageRequest):
    return _run("ingest", pipeline.run_ingest, req)


@app.post("/matrices", response_model=StageResponse)
def matrices(req: StageRequest):
    return _run("matrices", pipeline.run_matrices, req)


@app.post("/walk", response_model=StageResponse)
def walk(req: StageRequest):
    return _run("walk", pipeline.run_walk, req)


@app.post("/skipgram", response_model=StageResponse)
def skipgram(req: StageRequest):
    return _run("skipgram", pipeline.run_skipgram, req)


@app.post("/train-vi", response_model=StageResponse)
def train_vi(req: StageRequest):
    return _run("train-vi", pipeline.run_train_vi, req)


@app.post("/baseline", response_model=StageResponse)
def baseline(req: BaselineRequest):
    return _run("baseline", pipeline.run_baseline, req, variant=req.variant)


@app.post("/recommend", response_model=StageResponse)
def recommend(req: RecommendRequest):
    return _run("recommend", pipeline.run_recommend, req, user=req.user, k=req.k)


@app.post("/evaluate", response_model=StageResponse)
def evaluate(req: StageRequest):
    return _run("evaluate", pipeline.run_evaluate, req)


@app.post("/project2d", response_model=StageResponse)
def project2d(req: Project2dRequest):
    return _run("project2d", pipeline.run_project2d, req, nodes=req.nodes)
