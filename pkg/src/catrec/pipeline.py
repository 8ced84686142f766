"""Stage runners over a working directory.

Each stage reads its predecessors' files, writes its own artifacts plus an
effective-config snapshot, and returns a summary dict. Every stage is a pure
function of (input files, config, seed): reruns reproduce identical bytes.
"""

from __future__ import annotations

import json
import time
from pathlib import Path

import numpy as np

from . import affinity, baselines, evalkit, hetgraph, ingest, skipgram, synth, vimodel
from .config import RunConfig
from .errors import ConfigError, MissingArtifactError

BASELINE_VARIANTS = ("pop", "mf", "bpr", "m2v")
MODEL_NAMES = ("Pop", "MF", "BPR", "M2V", "VI")


def _require(path: Path, what: str) -> Path:
    if not path.exists():
        raise MissingArtifactError(f"missing {what}: {path}")
    return path


def _write_effective_config(workdir: Path, stage: str, cfg: RunConfig, **resolved) -> None:
    payload = {"stage": stage, "config": cfg.model_dump(), "resolved": resolved}
    path = workdir / f"{stage}.config.json"
    path.write_text(json.dumps(payload, sort_keys=True, indent=2) + "\n", encoding="utf-8")


def _columns(cfg: RunConfig) -> ingest.ColumnSpec:
    return ingest.ColumnSpec(
        user_id=cfg.data.user_column,
        basket_id=cfg.data.basket_column,
        category_id=cfg.data.category_column,
        epoch_seconds=cfg.data.epoch_column,
        delimiter=cfg.data.delimiter,
    )


def _load_idmaps(workdir: Path) -> ingest.IdMaps:
    return ingest.IdMaps(
        user_index=ingest.read_id_map(_require(workdir / "users.tsv", "user ID map")),
        category_index=ingest.read_id_map(_require(workdir / "categories.tsv", "category ID map")),
        basket_index=ingest.read_id_map(_require(workdir / "baskets.tsv", "basket ID map")),
    )


def _load_split(workdir: Path, cfg: RunConfig, which: str) -> ingest.TransactionLog:
    path = _require(workdir / f"{which}.csv", f"{which} split")
    log, _ = ingest.parse_transactions(path, _columns(cfg))
    return log


def _read_meta(workdir: Path) -> dict:
    path = _require(workdir / "ingest.meta.json", "ingest metadata")
    return json.loads(path.read_text(encoding="utf-8"))


def run_synth(workdir: Path, cfg: RunConfig) -> dict:
    workdir.mkdir(parents=True, exist_ok=True)
    t0 = time.perf_counter()
    log = synth.generate_synthetic(
        users=cfg.synth.users,
        categories=cfg.synth.categories,
        blocks=cfg.synth.blocks,
        noise=cfg.synth.noise,
        seed=cfg.seed,
    )
    path = workdir / "transactions.csv"
    ingest.write_transactions(path, log, _columns(cfg))
    _write_effective_config(workdir, "synth", cfg)
    return {"records": len(log), "path": str(path), "elapsed": time.perf_counter() - t0}


def run_ingest(workdir: Path, cfg: RunConfig) -> dict:
    workdir.mkdir(parents=True, exist_ok=True)
    t0 = time.perf_counter()
    source = Path(cfg.data.input) if cfg.data.input else workdir / "transactions.csv"
    _require(source, "transaction log")
    log, malformed = ingest.parse_transactions(source, _columns(cfg))
    boundary = cfg.split.boundary
    if boundary is None:
        span = log.max_timestamp - log.min_timestamp
        boundary = log.min_timestamp + int(round(cfg.split.fraction * span))
    train, test = ingest.split_by_time(log, boundary)
    train, test = ingest.filter_users(train, test, cfg.filter.min_tx, cfg.filter.max_tx)
    train, test = ingest.filter_categories(train, test)
    idmaps = ingest.build_id_maps(train)
    cols = _columns(cfg)
    ingest.write_transactions(workdir / "train.csv", train, cols)
    ingest.write_transactions(workdir / "test.csv", test, cols)
    ingest.write_id_map(workdir / "users.tsv", idmaps.user_index)
    ingest.write_id_map(workdir / "categories.tsv", idmaps.category_index)
    ingest.write_id_map(workdir / "baskets.tsv", idmaps.basket_index)
    meta = {
        "boundary": boundary,
        "malformed": malformed,
        "train_records": len(train),
        "test_records": len(test),
        "users": idmaps.num_users,
        "categories": idmaps.num_categories,
        "baskets": idmaps.num_baskets,
    }
    (workdir / "ingest.meta.json").write_text(
        json.dumps(meta, sort_keys=True, indent=2) + "\n", encoding="utf-8"
    )
    _write_effective_config(workdir, "ingest", cfg, boundary=boundary)
    return {**meta, "elapsed": time.perf_counter() - t0}


def run_matrices(workdir: Path, cfg: RunConfig) -> dict:
    t0 = time.perf_counter()
    train = _load_split(workdir, cfg, "train")
    idmaps = _load_idmaps(workdir)
    meta = _read_meta(workdir)
    reference_time = cfg.affinity.reference_time or meta["boundary"]
    half_life = cfg.affinity.half_life_days * affinity.DAY
    matrices = affinity.build_matrices(train, idmaps, half_life, reference_time)
    norm = affinity.normalize_affinity(matrices.A)
    affinity.write_sparse(workdir / "T.txt", matrices.T)
    affinity.write_sparse(workdir / "A.txt", matrices.A)
    affinity.write_normalized(workdir / "A_norm.txt", norm)
    _write_effective_config(
        workdir, "matrices", cfg, reference_time=reference_time, half_life_seconds=half_life
    )
    return {
        "nnz": matrices.T.nnz,
        "shift": norm.shift,
        "scale": norm.scale,
        "elapsed": time.perf_counter() - t0,
    }


def _load_matrices(workdir: Path, cfg: RunConfig, idmaps: ingest.IdMaps):
    shape = (idmaps.num_users, idmaps.num_categories)
    T = affinity.read_sparse(_require(workdir / "T.txt", "transaction matrix"), shape)
    A = affinity.read_sparse(_require(workdir / "A.txt", "affinity matrix"), shape)
    meta = _read_meta(workdir)
    reference_time = cfg.affinity.reference_time or meta["boundary"]
    return affinity.InteractionMatrices(T=T, A=A, reference_time=reference_time)


def run_walk(workdir: Path, cfg: RunConfig) -> dict:
    t0 = time.perf_counter()
    train = _load_split(workdir, cfg, "train")
    idmaps = _load_idmaps(workdir)
    graph = hetgraph.build_graph(train, idmaps)
    schema = hetgraph.MetapathSchema(tuple(cfg.walk.schema_types))
    corpus = hetgraph.generate_corpus(
        graph,
        schema,
        walks_per_node=cfg.walk.walks_per_node,
        length=cfg.walk.length,
        epsilon0=cfg.walk.epsilon0,
        gamma=cfg.walk.gamma,
        seed=cfg.seed,
    )
    hetgraph.write_corpus(workdir / "walks.txt", corpus)
    _write_effective_config(workdir, "walk", cfg)
    return {"walks": len(corpus), "elapsed": time.perf_counter() - t0}


def run_skipgram(workdir: Path, cfg: RunConfig) -> dict:
    t0 = time.perf_counter()
    corpus = hetgraph.read_corpus(_require(workdir / "walks.txt", "walk corpus"), cfg.seed)
    sg = cfg.sgns
    table, losses = skipgram.train_skipgram(
        corpus,
        skipgram.SgnsConfig(
            dimension=sg.dimension,
            window=sg.window,
            negatives=sg.negatives,
            lr_start=sg.lr_start,
            lr_end=sg.lr_end,
            epochs=sg.epochs,
            unigram_power=sg.unigram_power,
            seed=cfg.seed,
        ),
    )
    skipgram.save_embeddings(workdir / "embeddings.txt", table)
    _write_effective_config(workdir, "skipgram", cfg)
    return {
        "nodes": len(table.tokens),
        "dimension": table.dimension,
        "epoch_losses": losses,
        "elapsed": time.perf_counter() - t0,
    }


def _hyper(cfg: RunConfig) -> vimodel.Hyperparameters:
    vi = cfg.vi
    return vimodel.Hyperparameters(
        dimension=cfg.sgns.dimension,
        alpha_bu=vi.alpha_bu,
        alpha_bv=vi.alpha_bv,
        alpha_kt=vi.alpha_kt,
        alpha_pt=vi.alpha_pt,
        alpha_ka=vi.alpha_ka,
        alpha_pa=vi.alpha_pa,
        alpha_A=vi.alpha_A,
        negatives_ratio=vi.negatives_ratio,
        batch_size=vi.batch_size,
        epochs=vi.epochs,
        learning_rate=vi.learning_rate,
        mc_samples=vi.mc_samples,
        predict_weight=vi.predict_weight,
        optimizer=vi.optimizer,
        seed=cfg.seed,
    )


def run_train_vi(workdir: Path, cfg: RunConfig) -> dict:
    t0 = time.perf_counter()
    idmaps = _load_idmaps(workdir)
    matrices = _load_matrices(workdir, cfg, idmaps)
    table = skipgram.load_embeddings(_require(workdir / "embeddings.txt", "embeddings"))
    hyper = _hyper(cfg)
    state, trace = vimodel.fit(matrices, table, idmaps, hyper)
    vimodel.save_latent(workdir / "latent", state, cfg.seed)
    with open(workdir / "trace.txt", "w", encoding="utf-8") as fh:
        for epoch, value in enumerate(trace):
            fh.write(f"{epoch} {float(value)!r}\n")
    _write_effective_config(workdir, "train-vi", cfg)
    return {
        "epochs": len(trace),
        "first_elbo": trace[0] if trace else None,
        "last_elbo": trace[-1] if trace else None,
        "cold_nodes": state.cold_nodes,
        "elapsed": time.perf_counter() - t0,
    }


def run_baseline(workdir: Path, cfg: RunConfig, variant: str) -> dict:
    t0 = time.perf_counter()
    if variant not in BASELINE_VARIANTS:
        raise ConfigError(f"unknown baseline variant {variant!r}")
    train = _load_split(workdir, cfg, "train")
    idmaps = _load_idmaps(workdir)
    counts = affinity.build_count_matrix(train, idmaps)
    model_dir = workdir / "models" / variant
    model_dir.mkdir(parents=True, exist_ok=True)
    info: dict = {"variant": variant}

    def save_vectors(name, arr, prefix):
        mat = np.asarray(arr, dtype=np.float64)
        mat = mat if mat.ndim == 2 else mat[:, None]
        with open(model_dir / name, "w", encoding="utf-8") as fh:
            fh.write(f"{mat.shape[0]} {mat.shape[1]}\n")
            for i, row in enumerate(mat):
                fh.write(f"{prefix}{i} " + " ".join(repr(float(x)) for x in row) + "\n")

    if variant == "pop":
        model = baselines.itempop_fit(counts)
        save_vectors("counts.txt", model.counts, "c")
    elif variant == "mf":
        model, objectives = baselines.als_fit(
            counts,
            factors=cfg.mf.factors,
            regularization=cfg.mf.regularization,
            confidence_alpha=cfg.mf.confidence_alpha,
            iterations=cfg.mf.iterations,
            seed=cfg.seed,
        )
        save_vectors("user_factors.txt", model.user_factors, "u")
        save_vectors("item_factors.txt", model.item_factors, "c")
        info["objective"] = objectives[-1]
    elif variant == "bpr":
        model, trace = baselines.bpr_fit(
            counts,
            factors=cfg.bpr.factors,
            learning_rate=cfg.bpr.learning_rate,
            regularization=cfg.bpr.regularization,
            epochs=cfg.bpr.epochs,
            seed=cfg.seed,
        )
        save_vectors("user_factors.txt", model.user_factors, "u")
        save_vectors("item_factors.txt", model.item_factors, "c")
        save_vectors("item_bias.txt", model.item_bias, "c")
        info["mean_loss"] = trace[-1]
    else:  # m2v
        table = skipgram.load_embeddings(_require(workdir / "embeddings.txt", "embeddings"))
        model = baselines.m2v_model(table, idmaps.num_users, idmaps.num_categories)
        save_vectors("user_vectors.txt", model.user_vectors, "u")
        save_vectors("item_vectors.txt", model.item_vectors, "c")
    (model_dir / "manifest.txt").write_text(f"variant={variant}\n", encoding="utf-8")
    _write_effective_config(workdir, f"baseline-{variant}", cfg)
    return {**info, "elapsed": time.perf_counter() - t0}


def _load_table(path) -> np.ndarray:
    with open(path, encoding="utf-8") as fh:
        count, dim = map(int, fh.readline().split())
        rows = [[float(x) for x in fh.readline().split()[1:]] for _ in range(count)]
    out = np.array(rows)
    return out[:, 0] if dim == 1 else out


def load_baseline(workdir: Path, variant: str):
    model_dir = workdir / "models" / variant
    _require(model_dir / "manifest.txt", f"{variant} model")
    if variant == "pop":
        return baselines.PopModel(counts=_load_table(model_dir / "counts.txt"))
    if variant == "mf":
        return baselines.AlsModel(
            user_factors=_load_table(model_dir / "user_factors.txt"),
            item_factors=_load_table(model_dir / "item_factors.txt"),
        )
    if variant == "bpr":
        return baselines.BprModel(
            user_factors=_load_table(model_dir / "user_factors.txt"),
            item_factors=_load_table(model_dir / "item_factors.txt"),
            item_bias=_load_table(model_dir / "item_bias.txt"),
        )
    if variant == "m2v":
        return baselines.M2vModel(
            user_vectors=_load_table(model_dir / "user_vectors.txt"),
            item_vectors=_load_table(model_dir / "item_vectors.txt"),
        )
    raise ConfigError(f"unknown baseline variant {variant!r}")


class ViScorer:
    """Frozen posterior-predictive scorer with a per-user derived RNG seed."""

    def __init__(self, state: vimodel.LatentState, hyper: vimodel.Hyperparameters, seed: int):
        self.state = state
        self.hyper = hyper
        self.seed = seed

    def scores_for_user(self, p: int) -> np.ndarray:
        rng = np.random.default_rng([self.seed, 0x5C0BE, p])
        return vimodel.predict_scores(self.state, p, self.hyper, rng)


def load_vi_scorer(workdir: Path, cfg: RunConfig) -> ViScorer:
    state = vimodel.load_latent(_require(workdir / "latent", "trained VI state"))
    return ViScorer(state, _hyper(cfg), cfg.seed)


def run_recommend(workdir: Path, cfg: RunConfig, user: str | None = None, k: int | None = None) -> dict:
    t0 = time.perf_counter()
    idmaps = _load_idmaps(workdir)
    scorer = load_vi_scorer(workdir, cfg)
    k = k or cfg.eval.top_k
    cats = idmaps.categories_by_index()
    if user is not None:
        if user not in idmaps.user_index:
            raise ConfigError(f"unknown user {user!r}")
        users = [user]
    else:
        users = idmaps.users_by_index()
    path = workdir / "recommendations.tsv"
    with open(path, "w", encoding="utf-8") as fh:
        for external in users:
            p = idmaps.user_index[external]
            ranked = evalkit.rank_scores(scorer.scores_for_user(p))[:k]
            fh.write(external + "\t" + "\t".join(cats[q] for q in ranked) + "\n")
    _write_effective_config(workdir, "recommend", cfg)
    return {"users": len(users), "k": k, "path": str(path), "elapsed": time.perf_counter() - t0}


def run_evaluate(workdir: Path, cfg: RunConfig) -> dict:
    t0 = time.perf_counter()
    idmaps = _load_idmaps(workdir)
    test = _load_split(workdir, cfg, "test")
    truth = evalkit.ground_truth(test, idmaps)
    n = idmaps.num_categories
    scorers = {
        "Pop": load_baseline(workdir, "pop"),
        "MF": load_baseline(workdir, "mf"),
        "BPR": load_baseline(workdir, "bpr"),
        "M2V": load_baseline(workdir, "m2v"),
        "VI": load_vi_scorer(workdir, cfg),
    }
    reports = {}
    for name, scorer in scorers.items():
        reports[name] = evalkit.evaluate(
            lambda p, s=scorer: evalkit.rank_scores(s.scores_for_user(p)),
            truth,
            ks=cfg.eval.ks,
            n=n,
        )
    evalkit.write_report(workdir / "report.tsv", reports, ks=cfg.eval.ks)
    _write_effective_config(workdir, "evaluate", cfg)
    table = {
        name: {f"{metric}@{k}": report.values[(metric, k)] for metric, k in report.values}
        for name, report in reports.items()
    }
    return {
        "users": reports["VI"].user_count,
        "path": str(workdir / "report.tsv"),
        "table": table,
        "elapsed": time.perf_counter() - t0,
    }


def project_2d(vectors: np.ndarray) -> np.ndarray:
    """Row-normalize, center, and project onto the top-2 principal components."""
    if vectors.shape[0] < 3:
        raise ConfigError("need at least 3 nodes to project")
    norms = np.linalg.norm(vectors, axis=1, keepdims=True)
    normed = vectors / np.where(norms == 0.0, 1.0, norms)
    centered = normed - normed.mean(axis=0)
    _, _, vt = np.linalg.svd(centered, full_matrices=False)
    return centered @ vt[:2].T


def run_project2d(workdir: Path, cfg: RunConfig, nodes: list[str] | None = None) -> dict:
    t0 = time.perf_counter()
    table = skipgram.load_embeddings(_require(workdir / "embeddings.txt", "embeddings"))
    if nodes:
        missing = [tok for tok in nodes if tok not in table]
        if missing:
            raise ConfigError(f"nodes not in embedding table: {missing[:5]}")
        selected = nodes
    else:
        selected = [tok for tok in table.tokens if tok[0] in ("u", "c")]
    vectors = np.array([table.vector(tok) for tok in selected])
    coords = project_2d(vectors)
    path = workdir / "projection.csv"
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("node,x,y,label\n")
        for tok, (x, y) in zip(selected, coords):
            fh.write(f"{tok},{float(x)!r},{float(y)!r},{tok[0]}\n")
    _write_effective_config(workdir, "project2d", cfg)
    return {"rows": len(selected), "path": str(path), "elapsed": time.perf_counter() - t0}
