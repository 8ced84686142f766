"""Dual-matrix probabilistic model: Bernoulli transactions bounded by the
Jaakkola-Jordan quadratic, Gaussian temporal affinities, mean-field Gaussian
variational family trained by reparameterized stochastic gradient ascent."""

from __future__ import annotations

import math
import os
from dataclasses import dataclass, field

import numpy as np

from .affinity import InteractionMatrices, normalize_affinity
from .errors import ConfigError, DivergenceError
from .ingest import IdMaps
from .skipgram import EmbeddingTable

LOG_2PI = math.log(2.0 * math.pi)


@dataclass
class Hyperparameters:
    dimension: int = 64
    alpha_bu: float = 1.0
    alpha_bv: float = 1.0
    alpha_kt: float = 1.0
    alpha_pt: float = 1.0
    alpha_ka: float = 1.0
    alpha_pa: float = 1.0
    alpha_A: float = 1.0
    negatives_ratio: int = 4
    batch_size: int = 512
    epochs: int = 20
    learning_rate: float = 0.005
    mc_samples: int = 50
    predict_weight: float = 1.0
    optimizer: str = "adam"
    seed: int = 0

    def validate(self) -> None:
        if self.optimizer not in ("adam", "sgd"):
            raise ConfigError("optimizer must be 'adam' or 'sgd'")
        for name in ("alpha_bu", "alpha_bv", "alpha_kt", "alpha_pt", "alpha_ka", "alpha_pa", "alpha_A"):
            if getattr(self, name) <= 0:
                raise ConfigError(f"{name} must be positive")
        if self.mc_samples < 1:
            raise ConfigError("mc_samples must be >= 1")
        if self.negatives_ratio < 0:
            raise ConfigError("negatives_ratio must be >= 0")


# (name, prior mean, hyperparameter giving the prior precision or None for std 1)
GROUPS = (
    ("u", 0.0, None),
    ("v", 0.0, None),
    ("bu", 0.0, "alpha_bu"),
    ("bv", 0.0, "alpha_bv"),
    ("kt", 1.0, "alpha_kt"),
    ("pt", 0.0, "alpha_pt"),
    ("ka", 1.0, "alpha_ka"),
    ("pa", 0.0, "alpha_pa"),
)


def prior_for(name: str, hyper: Hyperparameters) -> tuple[float, float]:
    for group, mean, alpha in GROUPS:
        if group == name:
            std = 1.0 if alpha is None else 1.0 / math.sqrt(getattr(hyper, alpha))
            return mean, std
    raise KeyError(name)


@dataclass
class LatentState:
    """Variational means and log-stds for every latent variable, plus the
    per-observed-entry auxiliary xi of the logistic bound."""

    d: int
    m: int
    n: int
    means: dict[str, np.ndarray]
    logstds: dict[str, np.ndarray]
    pos_rows: np.ndarray  # observed T support, aligned with xi
    pos_cols: np.ndarray
    xi: np.ndarray
    cold_nodes: int = 0
    trained_epochs: int = 0

    def copy(self) -> "LatentState":
        return LatentState(
            d=self.d,
            m=self.m,
            n=self.n,
            means={k: v.copy() for k, v in self.means.items()},
            logstds={k: v.copy() for k, v in self.logstds.items()},
            pos_rows=self.pos_rows.copy(),
            pos_cols=self.pos_cols.copy(),
            xi=self.xi.copy(),
            cold_nodes=self.cold_nodes,
            trained_epochs=self.trained_epochs,
        )


@dataclass
class ModelSample:
    """Concrete draw of all latent variables from the variational family."""

    u: np.ndarray
    v: np.ndarray
    bu: np.ndarray
    bv: np.ndarray
    kt: float
    pt: float
    ka: float
    pa: float


@dataclass
class TBatch:
    p: np.ndarray
    q: np.ndarray
    t: np.ndarray  # 0/1
    xi: np.ndarray

    def __len__(self) -> int:
        return len(self.p)


@dataclass
class ABatch:
    p: np.ndarray
    q: np.ndarray
    a: np.ndarray  # normalized affinity values

    def __len__(self) -> int:
        return len(self.p)


def empty_tbatch() -> TBatch:
    z = np.empty(0, dtype=np.int64)
    return TBatch(p=z, q=z.copy(), t=z.copy(), xi=np.empty(0))


def empty_abatch() -> ABatch:
    z = np.empty(0, dtype=np.int64)
    return ABatch(p=z, q=z.copy(), a=np.empty(0))


def init_latent_state(
    embeddings: EmbeddingTable,
    idmaps: IdMaps,
    hyper: Hyperparameters,
    support: tuple[np.ndarray, np.ndarray] | None = None,
) -> LatentState:
    """Variational means start at the graph-embedding vectors; biases at 0;
    scales at 1, locations at 0; every log-std at -3. Nodes absent from the
    table get small random means and are counted as cold."""
    hyper.validate()
    d = hyper.dimension
    if embeddings.dimension != d:
        raise ConfigError(
            f"embedding dimension {embeddings.dimension} != model dimension {d}"
        )
    m, n = idmaps.num_users, idmaps.num_categories
    rng_cold = np.random.default_rng([hyper.seed, 0xC01D])
    cold = 0

    def pull(prefix: str, count: int) -> tuple[np.ndarray, int]:
        out = np.empty((count, d))
        missing = 0
        for i in range(count):
            token = f"{prefix}{i}"
            if token in embeddings:
                out[i] = embeddings.vector(token)
            else:
                out[i] = rng_cold.normal(0.0, 0.1, size=d)
                missing += 1
        return out, missing

    u_mean, miss_u = pull("u", m)
    v_mean, miss_v = pull("c", n)
    cold = miss_u + miss_v
    means = {
        "u": u_mean,
        "v": v_mean,
        "bu": np.zeros(m),
        "bv": np.zeros(n),
        "kt": np.ones(1),
        "pt": np.zeros(1),
        "ka": np.ones(1),
        "pa": np.zeros(1),
    }
    logstds = {k: np.full(v.shape, -3.0) for k, v in means.items()}
    if support is not None:
        pos_rows = np.asarray(support[0], dtype=np.int64)
        pos_cols = np.asarray(support[1], dtype=np.int64)
    else:
        pos_rows = np.empty(0, dtype=np.int64)
        pos_cols = np.empty(0, dtype=np.int64)
    return LatentState(
        d=d,
        m=m,
        n=n,
        means=means,
        logstds=logstds,
        pos_rows=pos_rows,
        pos_cols=pos_cols,
        xi=np.ones(len(pos_rows)),
        cold_nodes=cold,
    )


def make_noise(state: LatentState, rng: np.random.Generator) -> dict[str, np.ndarray]:
    return {k: rng.standard_normal(v.shape) for k, v in state.means.items()}


def draw_sample(state: LatentState, noise: dict[str, np.ndarray]) -> ModelSample:
    values = {
        k: state.means[k] + np.exp(state.logstds[k]) * noise[k] for k in state.means
    }
    return ModelSample(
        u=values["u"],
        v=values["v"],
        bu=values["bu"],
        bv=values["bv"],
        kt=float(values["kt"][0]),
        pt=float(values["pt"][0]),
        ka=float(values["ka"][0]),
        pa=float(values["pa"][0]),
    )


def jj_lambda(xi):
    """tanh(xi/2) / (4 xi), continuously extended to 1/8 at xi = 0.

    Below 1e-6 the ratio is evaluated as its limit: the Taylor correction is
    O(xi^2) and subnormal xi would otherwise underflow to a spurious 0.
    """
    xi = np.asarray(xi, dtype=np.float64)
    tiny = np.abs(xi) < 1e-6
    safe = np.where(tiny, 1.0, 4.0 * xi)
    out = np.where(tiny, 0.125, np.tanh(xi / 2.0) / safe)
    return float(out) if out.ndim == 0 else out


def log_sigmoid(x):
    return -np.logaddexp(0.0, -np.asarray(x, dtype=np.float64))


def jj_bound(x, xi):
    """Quadratic lower bound on log sigmoid(x), tight at x = +/- xi."""
    x = np.asarray(x, dtype=np.float64)
    xi = np.asarray(xi, dtype=np.float64)
    out = log_sigmoid(xi) + (x - xi) / 2.0 - jj_lambda(xi) * (x * x - xi * xi)
    return float(out) if out.ndim == 0 else out


def score(sample: ModelSample, p: int, q: int) -> float:
    """s_pq = u_p . v_q + bu_p + bv_q."""
    return float(sample.u[p] @ sample.v[q] + sample.bu[p] + sample.bv[q])


def _scores(sample: ModelSample, p: np.ndarray, q: np.ndarray) -> np.ndarray:
    return (sample.u[p] * sample.v[q]).sum(axis=1) + sample.bu[p] + sample.bv[q]


def log_lik_T(sample: ModelSample, batch: TBatch) -> float:
    """Sum of JJ-bounded Bernoulli log-likelihood terms over the batch."""
    if len(batch) == 0:
        return 0.0
    s = _scores(sample, batch.p, batch.q)
    x = sample.kt * s + sample.pt
    y = (2.0 * batch.t - 1.0) * x
    total = float(np.sum(jj_bound(y, batch.xi)))
    if not np.isfinite(total):
        raise DivergenceError("non-finite transaction log-likelihood")
    return total


def log_lik_A(sample: ModelSample, batch: ABatch, alpha_A: float) -> float:
    """Gaussian log-likelihood of the normalized affinities, precision alpha_A."""
    if len(batch) == 0:
        return 0.0
    s = _scores(sample, batch.p, batch.q)
    resid = batch.a - (sample.ka * s + sample.pa)
    total = float(
        0.5 * len(batch) * (math.log(alpha_A) - LOG_2PI) - 0.5 * alpha_A * np.sum(resid**2)
    )
    if not np.isfinite(total):
        raise DivergenceError("non-finite affinity log-likelihood")
    return total


def kl_gaussian(q_mean, q_logstd, p_mean, p_std: float) -> float:
    """KL(N(q_mean, exp(q_logstd)^2) || N(p_mean, p_std^2)), summed over coords."""
    if p_std <= 0:
        raise ConfigError("prior std must be positive")
    q_mean = np.asarray(q_mean, dtype=np.float64)
    q_logstd = np.asarray(q_logstd, dtype=np.float64)
    var = np.exp(2.0 * q_logstd)
    terms = (
        math.log(p_std)
        - q_logstd
        + (var + (q_mean - p_mean) ** 2) / (2.0 * p_std**2)
        - 0.5
    )
    return float(np.sum(terms))


def kl_total(state: LatentState, hyper: Hyperparameters) -> float:
    total = 0.0
    for name, _, _ in GROUPS:
        p_mean, p_std = prior_for(name, hyper)
        total += kl_gaussian(state.means[name], state.logstds[name], p_mean, p_std)
    return total


def elbo(
    state: LatentState,
    batch_T: TBatch,
    batch_A: ABatch,
    noise: dict[str, np.ndarray],
    scale_T: float,
    scale_A: float,
    hyper: Hyperparameters,
) -> float:
    """Single-sample reparameterized ELBO estimate: scaled batch likelihoods
    minus the full KL to the priors. Deterministic given the noise."""
    sample = draw_sample(state, noise)
    value = (
        scale_T * log_lik_T(sample, batch_T)
        + scale_A * log_lik_A(sample, batch_A, hyper.alpha_A)
        - kl_total(state, hyper)
    )
    if not np.isfinite(value):
        raise DivergenceError("non-finite ELBO")
    return value


def elbo_and_grads(
    state: LatentState,
    batch_T: TBatch,
    batch_A: ABatch,
    noise: dict[str, np.ndarray],
    scale_T: float,
    scale_A: float,
    hyper: Hyperparameters,
):
    """ELBO value plus analytic gradients w.r.t. every mean and log-std.

    The likelihood gradient flows through the reparameterized sample
    theta = mean + exp(logstd) * eps; the KL gradient is closed form.
    """
    sample = draw_sample(state, noise)
    g_theta = {k: np.zeros_like(v) for k, v in state.means.items()}

    value = -kl_total(state, hyper)

    def accumulate(p, q, g_s, g_scale_terms):
        np.add.at(g_theta["u"], p, g_s[:, None] * sample.v[q])
        np.add.at(g_theta["v"], q, g_s[:, None] * sample.u[p])
        np.add.at(g_theta["bu"], p, g_s)
        np.add.at(g_theta["bv"], q, g_s)
        for name, contrib in g_scale_terms:
            g_theta[name][0] += contrib

    if len(batch_T):
        s = _scores(sample, batch_T.p, batch_T.q)
        x = sample.kt * s + sample.pt
        sign = 2.0 * batch_T.t - 1.0
        y = sign * x
        value += scale_T * float(np.sum(jj_bound(y, batch_T.xi)))
        g_x = scale_T * sign * (0.5 - 2.0 * jj_lambda(batch_T.xi) * y)
        accumulate(
            batch_T.p,
            batch_T.q,
            g_x * sample.kt,
            (("kt", float(np.sum(g_x * s))), ("pt", float(np.sum(g_x)))),
        )
    if len(batch_A):
        s = _scores(sample, batch_A.p, batch_A.q)
        resid = batch_A.a - (sample.ka * s + sample.pa)
        value += scale_A * (
            0.5 * len(batch_A) * (math.log(hyper.alpha_A) - LOG_2PI)
            - 0.5 * hyper.alpha_A * float(np.sum(resid**2))
        )
        g_mu = scale_A * hyper.alpha_A * resid
        accumulate(
            batch_A.p,
            batch_A.q,
            g_mu * sample.ka,
            (("ka", float(np.sum(g_mu * s))), ("pa", float(np.sum(g_mu)))),
        )
    if not np.isfinite(value):
        raise DivergenceError("non-finite ELBO")

    g_means = {}
    g_logstds = {}
    for name, _, _ in GROUPS:
        p_mean, p_std = prior_for(name, hyper)
        std = np.exp(state.logstds[name])
        g_means[name] = g_theta[name] - (state.means[name] - p_mean) / p_std**2
        g_logstds[name] = g_theta[name] * std * noise[name] - (-1.0 + std**2 / p_std**2)
    return value, g_means, g_logstds


def update_xi(state: LatentState, hyper: Hyperparameters, rng: np.random.Generator) -> None:
    """Coordinate-ascent update of the bound auxiliaries:
    xi_pq = sqrt(E_q[x_pq^2]) estimated with mc_samples draws."""
    if len(state.pos_rows) == 0:
        return
    acc = np.zeros(len(state.pos_rows))
    for _ in range(hyper.mc_samples):
        sample = draw_sample(state, make_noise(state, rng))
        s = _scores(sample, state.pos_rows, state.pos_cols)
        x = sample.kt * s + sample.pt
        acc += x * x
    state.xi = np.sqrt(acc / hyper.mc_samples)


def _sample_unobserved(
    m: int, n: int, observed: set[int], count: int, rng: np.random.Generator
) -> tuple[np.ndarray, np.ndarray]:
    """Uniform (p, q) pairs outside the observed support, with replacement."""
    ps, qs = [], []
    need = count
    while need > 0:
        cand_p = rng.integers(0, m, size=2 * need)
        cand_q = rng.integers(0, n, size=2 * need)
        for p, q in zip(cand_p, cand_q):
            if int(p) * n + int(q) not in observed:
                ps.append(int(p))
                qs.append(int(q))
                if len(ps) == count:
                    break
        need = count - len(ps)
    return np.array(ps, dtype=np.int64), np.array(qs, dtype=np.int64)


class _AdamMoments:
    """Diagonal adaptive ascent state for one family of parameter arrays.

    Gradient magnitudes differ by orders of magnitude between the embedding
    rows and the shared scalars once batch losses are rescaled to full-data
    sums, so per-coordinate step normalization is what keeps training stable.
    """

    def __init__(self, shapes: dict[str, tuple], beta1=0.9, beta2=0.999, eps=1e-8):
        self.m = {k: np.zeros(s) for k, s in shapes.items()}
        self.v = {k: np.zeros(s) for k, s in shapes.items()}
        self.beta1, self.beta2, self.eps = beta1, beta2, eps
        self.t = 0

    def step(self, params: dict[str, np.ndarray], grads: dict[str, np.ndarray], lr: float) -> None:
        self.t += 1
        b1, b2 = self.beta1, self.beta2
        for k, g in grads.items():
            self.m[k] = b1 * self.m[k] + (1.0 - b1) * g
            self.v[k] = b2 * self.v[k] + (1.0 - b2) * g * g
            m_hat = self.m[k] / (1.0 - b1**self.t)
            v_hat = self.v[k] / (1.0 - b2**self.t)
            params[k] += lr * m_hat / (np.sqrt(v_hat) + self.eps)


def fit(
    matrices: InteractionMatrices,
    embeddings: EmbeddingTable,
    idmaps: IdMaps,
    hyper: Hyperparameters,
) -> tuple[LatentState, list[float]]:
    """Stochastic variational training loop.

    Per epoch: shuffle observed positives, append sampled unobserved pairs as
    zeros, mini-batch both matrices, take one reparameterized gradient-ascent
    step per batch, then refresh the bound auxiliaries. Returns the final
    state and the per-epoch mean ELBO trace.
    """
    hyper.validate()
    norm = normalize_affinity(matrices.A)
    T = matrices.T
    state = init_latent_state(embeddings, idmaps, hyper, support=(T.rows, T.cols))
    m, n = state.m, state.n
    observed = {int(p) * n + int(q) for p, q in zip(T.rows, T.cols)}
    n_pos = T.nnz
    lr = hyper.learning_rate
    trace: list[float] = []
    if hyper.optimizer == "adam":
        shapes = {k: v.shape for k, v in state.means.items()}
        opt_means = _AdamMoments(shapes)
        opt_logstds = _AdamMoments(shapes)
    else:
        opt_means = opt_logstds = None

    for epoch in range(hyper.epochs):
        rng = np.random.default_rng([hyper.seed, 500 + epoch])
        neg_count = n_pos * hyper.negatives_ratio
        if neg_count > 0:
            neg_p, neg_q = _sample_unobserved(m, n, observed, neg_count, rng)
        else:
            neg_p = neg_q = np.empty(0, dtype=np.int64)
        all_p = np.concatenate([T.rows, neg_p])
        all_q = np.concatenate([T.cols, neg_q])
        all_t = np.concatenate([np.ones(n_pos), np.zeros(neg_count)])
        all_xi = np.concatenate([state.xi, np.ones(neg_count)])
        perm = rng.permutation(len(all_p))
        all_p, all_q, all_t, all_xi = all_p[perm], all_q[perm], all_t[perm], all_xi[perm]

        a_perm = rng.permutation(norm.values.nnz)
        a_p = norm.values.rows[a_perm]
        a_q = norm.values.cols[a_perm]
        a_v = norm.values.vals[a_perm]

        n_batches = max(1, math.ceil(len(all_p) / hyper.batch_size))
        t_chunks = np.array_split(np.arange(len(all_p)), n_batches)
        a_chunks = np.array_split(np.arange(len(a_p)), n_batches)

        epoch_values = []
        for t_idx, a_idx in zip(t_chunks, a_chunks):
            batch_T = TBatch(p=all_p[t_idx], q=all_q[t_idx], t=all_t[t_idx], xi=all_xi[t_idx])
            batch_A = ABatch(p=a_p[a_idx], q=a_q[a_idx], a=a_v[a_idx])
            scale_T = len(all_p) / len(batch_T) if len(batch_T) else 0.0
            scale_A = len(a_p) / len(batch_A) if len(batch_A) else 0.0
            noise = make_noise(state, rng)
            try:
                value, g_means, g_logstds = elbo_and_grads(
                    state, batch_T, batch_A, noise, scale_T, scale_A, hyper
                )
            except DivergenceError as e:
                raise DivergenceError(str(e), epoch=epoch) from e
            if opt_means is not None:
                opt_means.step(state.means, g_means, lr)
                opt_logstds.step(state.logstds, g_logstds, lr)
            else:
                for name in state.means:
                    state.means[name] += lr * g_means[name]
                    state.logstds[name] += lr * g_logstds[name]
            epoch_values.append(value)
        trace.append(float(np.mean(epoch_values)))
        if not np.isfinite(trace[-1]):
            raise DivergenceError("non-finite epoch ELBO", epoch=epoch)
        update_xi(state, hyper, np.random.default_rng([hyper.seed, 900 + epoch]))
    state.trained_epochs = hyper.epochs
    return state, trace


def predict_scores(
    state: LatentState, p: int, hyper: Hyperparameters, rng: np.random.Generator
) -> np.ndarray:
    """Posterior-predictive score per category for user p.

    Averages, over mc_samples draws, the transaction probability
    sigmoid(kt*s + pt) plus predict_weight times the affinity mean ka*s + pa.
    """
    S = hyper.mc_samples
    n, d = state.n, state.d

    def draw(name, shape_extra):
        mean = state.means[name]
        std = np.exp(state.logstds[name])
        return mean + std * rng.standard_normal((S, *shape_extra))

    u = state.means["u"][p] + np.exp(state.logstds["u"][p]) * rng.standard_normal((S, d))
    v = draw("v", (n, d))
    bu = state.means["bu"][p] + np.exp(state.logstds["bu"][p]) * rng.standard_normal(S)
    bv = draw("bv", (n,))
    kt = draw("kt", (1,))
    pt = draw("pt", (1,))
    ka = draw("ka", (1,))
    pa = draw("pa", (1,))

    s = np.einsum("sd,snd->sn", u, v) + bu[:, None] + bv
    t_term = 1.0 / (1.0 + np.exp(-(kt * s + pt)))
    a_term = ka * s + pa
    return t_term.mean(axis=0) + hyper.predict_weight * a_term.mean(axis=0)


def recommend(
    state: LatentState,
    p: int,
    k: int,
    hyper: Hyperparameters,
    rng: np.random.Generator,
    exclude: set[int] | None = None,
) -> np.ndarray:
    """Top-k categories by predictive score, ties broken by ascending index.

    Previously purchased categories are kept by default (repeat purchases are
    the point); pass their indices in `exclude` to drop them.
    """
    if not (1 <= k <= state.n):
        raise ConfigError(f"k must be in [1, {state.n}]")
    scores = predict_scores(state, p, hyper, rng)
    if exclude:
        scores = scores.copy()
        scores[sorted(exclude)] = -np.inf
    order = np.lexsort((np.arange(state.n), -scores))
    return order[:k]


# ---------------------------------------------------------------------------
# Persistence: a directory of plain-text files plus a manifest line.

_VECTOR_FILES = (
    ("u", "u_mean.txt", "u_logstd.txt", "u"),
    ("v", "v_mean.txt", "v_logstd.txt", "c"),
    ("bu", "bu_mean.txt", "bu_logstd.txt", "u"),
    ("bv", "bv_mean.txt", "bv_logstd.txt", "c"),
)
_SCALARS = ("kt", "pt", "ka", "pa")


def _write_table(path, prefix: str, arr: np.ndarray) -> None:
    mat = arr if arr.ndim == 2 else arr[:, None]
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"{mat.shape[0]} {mat.shape[1]}\n")
        for i, row in enumerate(mat):
            fh.write(f"{prefix}{i} " + " ".join(repr(float(x)) for x in row) + "\n")


def _read_table(path) -> np.ndarray:
    with open(path, encoding="utf-8") as fh:
        count, dim = map(int, fh.readline().split())
        rows = [[float(x) for x in fh.readline().split()[1:]] for _ in range(count)]
    out = np.array(rows)
    return out[:, 0] if dim == 1 else out


def save_latent(directory, state: LatentState, seed: int) -> None:
    os.makedirs(directory, exist_ok=True)
    with open(os.path.join(directory, "manifest.txt"), "w", encoding="utf-8") as fh:
        fh.write(
            f"d={state.d} m={state.m} n={state.n} seed={seed} "
            f"epochs={state.trained_epochs} cold_nodes={state.cold_nodes}\n"
        )
    for name, mean_file, logstd_file, prefix in _VECTOR_FILES:
        _write_table(os.path.join(directory, mean_file), prefix, state.means[name])
        _write_table(os.path.join(directory, logstd_file), prefix, state.logstds[name])
    with open(os.path.join(directory, "scalars.txt"), "w", encoding="utf-8") as fh:
        for name in _SCALARS:
            fh.write(
                f"{name} {float(state.means[name][0])!r} {float(state.logstds[name][0])!r}\n"
            )
    with open(os.path.join(directory, "xi.txt"), "w", encoding="utf-8") as fh:
        for p, q, x in zip(state.pos_rows, state.pos_cols, state.xi):
            fh.write(f"{p} {q} {float(x)!r}\n")


def load_latent(directory) -> LatentState:
    with open(os.path.join(directory, "manifest.txt"), encoding="utf-8") as fh:
        fields = dict(kv.split("=") for kv in fh.readline().split())
    means: dict[str, np.ndarray] = {}
    logstds: dict[str, np.ndarray] = {}
    for name, mean_file, logstd_file, _ in _VECTOR_FILES:
        means[name] = _read_table(os.path.join(directory, mean_file))
        logstds[name] = _read_table(os.path.join(directory, logstd_file))
    with open(os.path.join(directory, "scalars.txt"), encoding="utf-8") as fh:
        for line in fh:
            name, mean, logstd = line.split()
            means[name] = np.array([float(mean)])
            logstds[name] = np.array([float(logstd)])
    rows, cols, xi = [], [], []
    with open(os.path.join(directory, "xi.txt"), encoding="utf-8") as fh:
        for line in fh:
            p, q, x = line.split()
            rows.append(int(p))
            cols.append(int(q))
            xi.append(float(x))
    return LatentState(
        d=int(fields["d"]),
        m=int(fields["m"]),
        n=int(fields["n"]),
        means=means,
        logstds=logstds,
        pos_rows=np.array(rows, dtype=np.int64),
        pos_cols=np.array(cols, dtype=np.int64),
        xi=np.array(xi),
        cold_nodes=int(fields["cold_nodes"]),
        trained_epochs=int(fields["epochs"]),
    )
