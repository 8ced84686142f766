"""Thin command-line client for the pipeline service.

Without --server the service app is mounted in-process, so runs are local,
offline, and deterministic; with --server requests go to a running instance.
Exit codes: 0 success, 2 config error, 3 missing artifact, 4 divergence.
"""

from __future__ import annotations

import json
import sys

import click

from .config import RunConfig, dump_config, load_config
from .errors import ConfigError

EXIT_CONFIG = 2
EXIT_MISSING = 3
EXIT_DIVERGENCE = 4

_EXIT_BY_ERROR = {"config": EXIT_CONFIG, "missing-artifact": EXIT_MISSING, "divergence": EXIT_DIVERGENCE}


class Session:
    def __init__(self, config: RunConfig, workdir: str, server: str | None):
        self.config = config
        self.workdir = workdir
        self.server = server
        self._client = None

    def client(self):
        if self._client is None:
            if self.server:
                import httpx

                self._client = httpx.Client(base_url=self.server, timeout=3600.0)
            else:
                from fastapi.testclient import TestClient

                from .service import app

                self._client = TestClient(app, raise_server_exceptions=False)
        return self._client

    def post(self, endpoint: str, **extra) -> dict:
        payload = {"workdir": self.workdir, "config": self.config.model_dump(), **extra}
        response = self.client().post(endpoint, json=payload)
        try:
            body = response.json()
        except ValueError:
            click.echo(f"error (server): {response.status_code} {response.text[:200]}", err=True)
            sys.exit(1)
        if response.status_code != 200:
            error = body.get("error", "config")
            detail = body.get("detail", body)
            click.echo(f"error ({error}): {detail}", err=True)
            sys.exit(_EXIT_BY_ERROR.get(error, EXIT_CONFIG))
        return body["summary"]


pass_session = click.make_pass_decorator(Session)


@click.group()
@click.option("--config", "config_path", type=click.Path(), default=None, help="JSON or YAML run config.")
@click.option("--seed", type=int, default=None, help="Override the run seed.")
@click.option("--threads", type=int, default=None, help="Worker threads; 1 is the deterministic reference.")
@click.option("--workdir", type=click.Path(), default="work", show_default=True, help="Stage artifact directory.")
@click.option("--server", default=None, help="Base URL of a running service; default runs in-process.")
@click.pass_context
def main(ctx, config_path, seed, threads, workdir, server):
    """Category recommendation pipeline client."""
    try:
        cfg = load_config(config_path) if config_path else RunConfig()
    except ConfigError as e:
        click.echo(f"error (config): {e}", err=True)
        sys.exit(EXIT_CONFIG)
    if seed is not None:
        cfg.seed = seed
    if threads is not None:
        cfg.threads = threads
    ctx.obj = Session(cfg, workdir, server)


def _line(stage: str, summary: dict, keys: tuple[str, ...]) -> str:
    parts = [stage]
    for key in keys:
        if key in summary and summary[key] is not None:
            value = summary[key]
            if isinstance(value, float):
                value = f"{value:.4f}"
            parts.append(f"{key}={value}")
    if "elapsed" in summary:
        parts.append(f"elapsed={summary['elapsed']:.2f}s")
    return " ".join(parts)


@main.command()
@pass_session
def synth(session):
    """Generate the synthetic transaction fixture."""
    summary = session.post("/synth")
    click.echo(_line("synth", summary, ("records", "path")))


@main.command()
@pass_session
def ingest(session):
    """Parse, split, filter, and index the transaction log."""
    summary = session.post("/ingest")
    click.echo(
        _line(
            "ingest",
            summary,
            ("train_records", "test_records", "users", "categories", "malformed", "boundary"),
        )
    )


@main.command()
@pass_session
def matrices(session):
    """Build the binary transaction and temporal affinity matrices."""
    summary = session.post("/matrices")
    click.echo(_line("matrices", summary, ("nnz", "shift", "scale")))


@main.command()
@pass_session
def walk(session):
    """Generate metapath-constrained random walks."""
    summary = session.post("/walk")
    click.echo(_line("walk", summary, ("walks",)))


@main.command()
@pass_session
def skipgram(session):
    """Train skip-gram embeddings over the walk corpus."""
    summary = session.post("/skipgram")
    loss = summary.get("epoch_losses") or [float("nan")]
    click.echo(_line("skipgram", {**summary, "final_loss": loss[-1]}, ("nodes", "dimension", "final_loss")))


@main.command("train-vi")
@pass_session
def train_vi(session):
    """Run the variational inference training loop."""
    summary = session.post("/train-vi")
    click.echo(_line("train-vi", summary, ("epochs", "first_elbo", "last_elbo", "cold_nodes")))


@main.command()
@click.argument("variant", type=click.Choice(["pop", "mf", "bpr", "m2v"]))
@pass_session
def baseline(session, variant):
    """Fit one baseline model: pop, mf, bpr, or m2v."""
    summary = session.post("/baseline", variant=variant)
    click.echo(_line(f"baseline-{variant}", summary, ("objective", "mean_loss")))


@main.command()
@click.option("--user", default=None, help="Single external user ID; default all users.")
@click.option("-k", type=int, default=None, help="List length; default from config.")
@pass_session
def recommend(session, user, k):
    """Write top-k category recommendations from the trained model."""
    summary = session.post("/recommend", user=user, k=k)
    click.echo(_line("recommend", summary, ("users", "k", "path")))


@main.command()
@pass_session
def evaluate(session):
    """Evaluate all models on the test split and write the metric table."""
    summary = session.post("/evaluate")
    ndcg5 = {name: row.get("NDCG@5") for name, row in summary.get("table", {}).items()}
    pretty = " ".join(f"{name}={value:.4f}" for name, value in ndcg5.items() if value is not None)
    click.echo(_line("evaluate", summary, ("users", "path")) + " NDCG@5[" + pretty + "]")


@main.command()
@click.option("--nodes", default=None, help="Comma-separated node tokens; default all users+categories.")
@pass_session
def project2d(session, nodes):
    """Export a 2-D principal-component projection of the embeddings."""
    node_list = [tok for tok in nodes.split(",") if tok] if nodes else None
    summary = session.post("/project2d", nodes=node_list)
    click.echo(_line("project2d", summary, ("rows", "path")))


@main.command("show-config")
@pass_session
def show_config(session):
    """Print the effective run configuration."""
    click.echo(dump_config(session.config), nl=False)


@main.command()
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", type=int, default=8000, show_default=True)
def serve(host, port):
    """Run the HTTP service."""
    import uvicorn

    from .service import app

    uvicorn.run(app, host=host, port=port)


if __name__ == "__main__":
    main()
