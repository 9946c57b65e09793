"""Latent Dirichlet Allocation via collapsed Gibbs sampling.

One document = one poem.  Randomness is drawn from per-document PCG64
streams keyed by ``(seed, poem_index, sweep)``, and documents are visited
in poem-index order, so a fit is bit-reproducible and independent of the
order in which poems are passed in.  Topic draws map a uniform ``u`` to
the smallest topic whose cumulative unnormalized weight exceeds
``u * total``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from .errors import DataError
from .features import Vocabulary
from .textprep import TokenizedPoem

__all__ = [
    "LdaConfig",
    "TopicModel",
    "doc_topic_vector",
    "export_theta_csv",
    "fit_lda",
    "load_topic_model",
    "log_likelihood",
    "save_topic_model",
    "topic_top_words",
]

_PLATEAU_PATIENCE = 5  # consecutive small-delta sweeps before stopping


@dataclass
class LdaConfig:
    """Sampler hyperparameters; ``alpha_dirichlet`` defaults to 50/k."""

    k: int = 4
    alpha_dirichlet: float | None = None
    beta_dirichlet: float = 0.01
    max_sweeps: int = 1000
    ll_tolerance: float = 1e-4
    seed: int = 42

    def __post_init__(self):
        if self.k < 1:
            raise ValueError("k must be at least 1")
        if self.alpha_dirichlet is None:
            self.alpha_dirichlet = 50.0 / self.k
        if self.alpha_dirichlet <= 0 or self.beta_dirichlet <= 0:
            raise ValueError("Dirichlet priors must be positive")
        if self.max_sweeps < 1:
            raise ValueError("max_sweeps must be at least 1")


@dataclass(frozen=True)
class TopicModel:
    """Fitted sampler state: distributions, assignments, and the loss trace."""

    k: int
    theta: np.ndarray  # D x k, rows sum to 1
    phi: np.ndarray  # k x V, rows sum to 1
    assignments: tuple[tuple[int, ...], ...] | None
    alpha_dirichlet: float
    beta_dirichlet: float
    seed: int
    iterations_run: int
    doc_ids: tuple[int, ...]
    log_likelihood_trace: tuple[float, ...] = field(default=())


def _doc_rng(seed: int, doc_id: int, sweep: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence([seed, doc_id, sweep])))


def _theta_phi(n_dk, n_kw, n_k, alpha: float, beta: float):
    n_dk = np.asarray(n_dk, dtype=float)
    n_kw = np.asarray(n_kw, dtype=float)
    n_k = np.asarray(n_k, dtype=float)
    v = n_kw.shape[1]
    theta = (n_dk + alpha) / (n_dk.sum(axis=1, keepdims=True) + n_dk.shape[1] * alpha)
    phi = (n_kw + beta) / (n_k[:, None] + v * beta)
    return theta, phi


def _trace_log_likelihood(docs: Sequence[list[int]], theta: np.ndarray, phi: np.ndarray) -> float:
    total = 0.0
    for d, words in enumerate(docs):
        if words:
            probs = theta[d] @ phi[:, words]
            total += float(np.log(probs).sum())
    return total


def fit_lda(poems: Sequence[TokenizedPoem], vocab: Vocabulary, config: LdaConfig) -> TopicModel:
    """Run the collapsed Gibbs sampler until plateau or ``max_sweeps``.

    Every sweep visits tokens in (document, position) order, removes the
    token from the counts, and resamples its topic with weight
    ``(n_dk + α) · (n_kw + β) / (n_k + |V|·β)``.  The sampler stops early
    once the absolute log-likelihood change stays below
    ``ll_tolerance · |ll|`` for five consecutive sweeps.
    """
    if not poems:
        raise DataError("cannot fit topics on an empty corpus")
    ids = [p.poem_index for p in poems]
    if len(set(ids)) != len(ids):
        raise DataError("poem indices must be unique within one fit")

    index = vocab.index
    try:
        token_docs = [[index[t] for t in p.flat_tokens] for p in poems]
    except KeyError as exc:
        raise DataError(f"token not in vocabulary: {exc.args[0]!r}") from exc

    k = config.k
    v = len(vocab)
    alpha = float(config.alpha_dirichlet)
    beta = float(config.beta_dirichlet)
    v_beta = v * beta

    # Documents are processed in poem-index order regardless of input order.
    order = sorted(range(len(poems)), key=lambda i: ids[i])
    docs = [token_docs[i] for i in order]
    doc_ids = [ids[i] for i in order]

    n_dk = [[0] * k for _ in docs]
    n_kw = [[0] * v for _ in range(k)]
    n_k = [0] * k
    z: list[list[int]] = []
    for d, words in enumerate(docs):
        uniforms = _doc_rng(config.seed, doc_ids[d], 0).random(len(words)).tolist()
        topics = [min(int(u * k), k - 1) for u in uniforms]
        z.append(topics)
        row = n_dk[d]
        for w, t in zip(words, topics):
            row[t] += 1
            n_kw[t][w] += 1
            n_k[t] += 1

    trace: list[float] = []
    plateau = 0
    sweeps_run = 0
    topic_range = range(k)
    cumulative = [0.0] * k
    for sweep in range(1, config.max_sweeps + 1):
        sweeps_run = sweep
        for d, words in enumerate(docs):
            if not words:
                continue
            uniforms = _doc_rng(config.seed, doc_ids[d], sweep).random(len(words)).tolist()
            row = n_dk[d]
            topics = z[d]
            for i, w in enumerate(words):
                t_old = topics[i]
                row[t_old] -= 1
                n_kw[t_old][w] -= 1
                n_k[t_old] -= 1
                total = 0.0
                for t in topic_range:
                    total += (row[t] + alpha) * (n_kw[t][w] + beta) / (n_k[t] + v_beta)
                    cumulative[t] = total
                target = uniforms[i] * total
                t_new = 0
                while t_new < k - 1 and cumulative[t_new] <= target:
                    t_new += 1
                topics[i] = t_new
                row[t_new] += 1
                n_kw[t_new][w] += 1
                n_k[t_new] += 1

        theta, phi = _theta_phi(n_dk, n_kw, n_k, alpha, beta)
        ll = _trace_log_likelihood(docs, theta, phi)
        if trace and abs(ll - trace[-1]) < config.ll_tolerance * max(abs(ll), 1.0):
            plateau += 1
        else:
            plateau = 0
        trace.append(ll)
        if plateau >= _PLATEAU_PATIENCE:
            break

    theta, phi = _theta_phi(n_dk, n_kw, n_k, alpha, beta)
    # Undo the internal sort so rows line up with the input poem order.
    position = {doc_id: pos for pos, doc_id in enumerate(doc_ids)}
    input_rows = [position[i] for i in ids]
    return TopicModel(
        k=k,
        theta=theta[input_rows],
        phi=phi,
        assignments=tuple(tuple(z[position[i]]) for i in ids),
        alpha_dirichlet=alpha,
        beta_dirichlet=beta,
        seed=config.seed,
        iterations_run=sweeps_run,
        doc_ids=tuple(ids),
        log_likelihood_trace=tuple(trace),
    )


def doc_topic_vector(model: TopicModel, d: int) -> np.ndarray:
    """Row ``d`` of theta (topic mixture of document d)."""
    if not 0 <= d < model.theta.shape[0]:
        raise IndexError(f"document index {d} out of range [0, {model.theta.shape[0]})")
    return model.theta[d].copy()


def topic_top_words(model: TopicModel, t: int, n: int, vocab: Vocabulary) -> list:
    """The ``n`` highest-probability terms of topic ``t``; ties keep vocabulary order."""
    if not 0 <= t < model.k:
        raise IndexError(f"topic index {t} out of range [0, {model.k})")
    if n < 1:
        raise ValueError("n must be at least 1")
    row = model.phi[t]
    ranked = sorted(range(len(vocab)), key=lambda w: (-row[w], w))[: min(n, len(vocab))]
    return [vocab.terms[w] for w in ranked]


def log_likelihood(model: TopicModel, poems: Sequence[TokenizedPoem], vocab: Vocabulary) -> float:
    """Σ over tokens of log Σ_t theta·phi for a fitted model."""
    index = vocab.index
    total = 0.0
    for d, poem in enumerate(poems):
        words = [index[t] for t in poem.flat_tokens]
        if words:
            probs = model.theta[d] @ model.phi[:, words]
            total += float(np.log(probs).sum())
    return total


def _write_rows(lines: list[str], matrix: np.ndarray):
    for row in matrix:
        lines.append(" ".join(repr(float(x)) for x in row))


def save_topic_model(model: TopicModel, path: str | Path) -> Path:
    """Serialize to the versioned plain-text model format."""
    path = Path(path)
    d = model.theta.shape[0]
    v = model.phi.shape[1]
    lines = [
        "divan-topic-model v1",
        f"k {model.k}",
        f"vocab_size {v}",
        f"docs {d}",
        f"alpha {repr(float(model.alpha_dirichlet))}",
        f"beta {repr(float(model.beta_dirichlet))}",
        f"seed {model.seed}",
        f"iterations {model.iterations_run}",
        "doc_ids " + " ".join(str(i) for i in model.doc_ids),
        "theta",
    ]
    _write_rows(lines, model.theta)
    lines.append("phi")
    _write_rows(lines, model.phi)
    path.write_text("\n".join(lines) + "\n", encoding="utf-8", newline="\n")
    return path


def load_topic_model(path: str | Path) -> TopicModel:
    """Read a model written by :func:`save_topic_model`."""
    path = Path(path)
    lines = path.read_text(encoding="utf-8").splitlines()
    if not lines or lines[0] != "divan-topic-model v1":
        raise DataError(f"not a divan-topic-model v1 file: {path}")
    header: dict[str, str] = {}
    pos = 1
    while pos < len(lines) and lines[pos] != "theta":
        key, _, value = lines[pos].partition(" ")
        header[key] = value
        pos += 1
    try:
        k = int(header["k"])
        v = int(header["vocab_size"])
        d = int(header["docs"])
        alpha = float(header["alpha"])
        beta = float(header["beta"])
        seed = int(header["seed"])
        iterations = int(header["iterations"])
        doc_ids = tuple(int(x) for x in header["doc_ids"].split())
    except (KeyError, ValueError) as exc:
        raise DataError(f"malformed topic-model header in {path}: {exc}") from exc
    theta_rows = lines[pos + 1 : pos + 1 + d]
    phi_rows = lines[pos + 2 + d : pos + 2 + d + k]
    theta = np.array([[float(x) for x in row.split()] for row in theta_rows])
    phi = np.array([[float(x) for x in row.split()] for row in phi_rows])
    if theta.shape != (d, k) or phi.shape != (k, v):
        raise DataError(f"topic-model body does not match its header in {path}")
    return TopicModel(
        k=k,
        theta=theta,
        phi=phi,
        assignments=None,
        alpha_dirichlet=alpha,
        beta_dirichlet=beta,
        seed=seed,
        iterations_run=iterations,
        doc_ids=doc_ids,
    )


def export_theta_csv(model: TopicModel, path: str | Path) -> Path:
    """Write per-document topic mixtures as CSV."""
    path = Path(path)
    lines = ["poem_index," + ",".join(f"topic_{t}" for t in range(model.k))]
    for doc_id, row in zip(model.doc_ids, model.theta):
        lines.append(f"{doc_id}," + ",".join(format(float(x), ".9g") for x in row))
    path.write_text("\n".join(lines) + "\n", encoding="utf-8", newline="\n")
    return path
