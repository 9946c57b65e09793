"""Feature fusion: α-scaled topic mixtures concatenated with poem embeddings,
compressed to a 16-dim latent by a single-hidden-layer autoencoder.

The autoencoder is input → 16 (ReLU) → input (linear), trained with plain
seeded SGD on mean squared reconstruction error.  Adaptive optimizers are
avoided on purpose: fixed-step SGD with one PCG64 stream makes training
bit-reproducible.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from .errors import DataError, DivergenceError

__all__ = [
    "Autoencoder",
    "FusedLatent",
    "FusionInput",
    "build_fusion_input",
    "encode",
    "export_loss_csv",
    "load_autoencoder",
    "save_autoencoder",
    "train_autoencoder",
]

DEFAULT_ALPHA = 15.0
DEFAULT_HIDDEN_DIM = 16
_LEARNING_RATE = 1e-3
_CLIP_NORM = 5.0
_THETA_SUM_TOL = 1e-6


@dataclass(frozen=True)
class FusionInput:
    """[α·theta ‖ embedding] for one poem."""

    vector: np.ndarray
    alpha: float
    n_topics: int
    poem_index: int = -1


@dataclass(frozen=True)
class FusedLatent:
    """Hidden-layer activation used as the fused feature vector."""

    poem_index: int
    vector: np.ndarray


@dataclass(frozen=True)
class Autoencoder:
    """Weights of the trained compressor plus its training-loss log."""

    w_enc: np.ndarray  # input_dim x hidden_dim
    b_enc: np.ndarray
    w_dec: np.ndarray  # hidden_dim x input_dim
    b_dec: np.ndarray
    seed: int
    training_log: tuple[float, ...]

    @property
    def input_dim(self) -> int:
        return self.w_enc.shape[0]

    @property
    def hidden_dim(self) -> int:
        return self.w_enc.shape[1]


def build_fusion_input(
    theta: np.ndarray,
    embedding: np.ndarray,
    alpha: float = DEFAULT_ALPHA,
    expected_topics: int | None = None,
    expected_dim: int | None = None,
    poem_index: int = -1,
) -> FusionInput:
    """Concatenate ``α·theta`` with the poem embedding."""
    if alpha <= 0:
        raise ValueError(f"alpha must be positive, got {alpha}")
    theta = np.asarray(theta, dtype=float)
    embedding = np.asarray(embedding, dtype=float)
    if abs(float(theta.sum()) - 1.0) > _THETA_SUM_TOL:
        raise ValueError(f"theta must sum to 1, got {float(theta.sum())!r}")
    if expected_topics is not None and len(theta) != expected_topics:
        raise ValueError(f"expected {expected_topics} topics, got {len(theta)}")
    if expected_dim is not None and len(embedding) != expected_dim:
        raise ValueError(f"expected embedding dim {expected_dim}, got {len(embedding)}")
    vector = np.concatenate([alpha * theta, embedding])
    return FusionInput(vector=vector, alpha=alpha, n_topics=len(theta), poem_index=poem_index)


def _relu(x: np.ndarray) -> np.ndarray:
    return np.maximum(x, 0.0)


def _glorot(rng: np.random.Generator, fan_in: int, fan_out: int) -> np.ndarray:
    limit = np.sqrt(6.0 / (fan_in + fan_out))
    return rng.uniform(-limit, limit, size=(fan_in, fan_out))


def train_autoencoder(
    inputs: Sequence[FusionInput],
    epochs: int = 1000,
    batch: int = 128,
    seed: int = 42,
    hidden_dim: int = DEFAULT_HIDDEN_DIM,
) -> Autoencoder:
    """Minimize mean squared reconstruction error with seeded mini-batch SGD.

    Batches come from a fresh seeded shuffle each epoch (final partial
    batch kept); the recorded per-epoch loss is the sample-weighted mean
    of the batch losses measured before each update.
    """
    if not inputs:
        raise DataError("cannot train an autoencoder on zero inputs")
    if epochs < 1:
        raise ValueError("epochs must be at least 1")
    if batch < 1:
        raise ValueError("batch size must be at least 1")
    data = np.vstack([np.asarray(fi.vector, dtype=float) for fi in inputs])
    n, dim = data.shape

    rng = np.random.Generator(np.random.PCG64(seed))
    w_enc = _glorot(rng, dim, hidden_dim)
    b_enc = np.zeros(hidden_dim)
    w_dec = _glorot(rng, hidden_dim, dim)
    b_dec = np.zeros(dim)

    losses = []
    # Overflow surfaces as the DivergenceError below, not as a warning.
    with np.errstate(over="ignore", invalid="ignore"):
        for epoch in range(1, epochs + 1):
            order = rng.permutation(n)
            epoch_loss = 0.0
            for start in range(0, n, batch):
                rows = order[start : start + batch]
                x = data[rows]
                b = len(rows)

                hidden_pre = x @ w_enc + b_enc
                hidden = _relu(hidden_pre)
                recon = hidden @ w_dec + b_dec
                err = recon - x
                # Loss: squared residual norm per sample, averaged over the batch.
                loss = float(np.sum(err * err)) / b
                epoch_loss += loss * b

                grad_recon = (2.0 / b) * err
                grad_w_dec = hidden.T @ grad_recon
                grad_b_dec = grad_recon.sum(axis=0)
                grad_hidden = grad_recon @ w_dec.T
                grad_hidden[hidden_pre <= 0.0] = 0.0
                grad_w_enc = x.T @ grad_hidden
                grad_b_enc = grad_hidden.sum(axis=0)

                grads = (grad_w_enc, grad_b_enc, grad_w_dec, grad_b_dec)
                norm = float(np.sqrt(sum(float(np.sum(g * g)) for g in grads)))
                scale = _LEARNING_RATE if norm <= _CLIP_NORM else _LEARNING_RATE * _CLIP_NORM / norm
                w_enc -= scale * grad_w_enc
                b_enc -= scale * grad_b_enc
                w_dec -= scale * grad_w_dec
                b_dec -= scale * grad_b_dec

            epoch_loss /= n
            if not np.isfinite(epoch_loss):
                raise DivergenceError(f"autoencoder loss became non-finite at epoch {epoch}")
            losses.append(epoch_loss)

    return Autoencoder(
        w_enc=w_enc,
        b_enc=b_enc,
        w_dec=w_dec,
        b_dec=b_dec,
        seed=seed,
        training_log=tuple(losses),
    )


def encode(model: Autoencoder, fusion_input: FusionInput) -> FusedLatent:
    """Hidden-layer activation of one fusion input."""
    vector = np.asarray(fusion_input.vector, dtype=float)
    if vector.shape != (model.input_dim,):
        raise ValueError(f"input length {vector.shape} does not match model ({model.input_dim},)")
    latent = _relu(vector @ model.w_enc + model.b_enc)
    return FusedLatent(poem_index=fusion_input.poem_index, vector=latent)


def save_autoencoder(model: Autoencoder, path: str | Path) -> Path:
    """Serialize weights to the versioned plain-text format."""
    path = Path(path)
    lines = [
        "divan-autoencoder v1",
        f"input_dim {model.input_dim}",
        f"hidden_dim {model.hidden_dim}",
        f"seed {model.seed}",
        f"epochs {len(model.training_log)}",
    ]
    for name, matrix in (
        ("w_enc", model.w_enc),
        ("b_enc", model.b_enc.reshape(1, -1)),
        ("w_dec", model.w_dec),
        ("b_dec", model.b_dec.reshape(1, -1)),
    ):
        lines.append(name)
        for row in matrix:
            lines.append(" ".join(repr(float(x)) for x in row))
    path.write_text("\n".join(lines) + "\n", encoding="utf-8", newline="\n")
    return path


def load_autoencoder(path: str | Path) -> Autoencoder:
    """Read weights written by :func:`save_autoencoder` (training log not kept)."""
    path = Path(path)
    lines = path.read_text(encoding="utf-8").splitlines()
    if not lines or lines[0] != "divan-autoencoder v1":
        raise DataError(f"not a divan-autoencoder v1 file: {path}")
    try:
        input_dim = int(lines[1].split()[1])
        hidden_dim = int(lines[2].split()[1])
        seed = int(lines[3].split()[1])
    except (IndexError, ValueError) as exc:
        raise DataError(f"malformed autoencoder header in {path}") from exc

    sections: dict[str, list[list[float]]] = {}
    name = None
    for line in lines[5:]:
        if line in ("w_enc", "b_enc", "w_dec", "b_dec"):
            name = line
            sections[name] = []
        elif name is not None and line.strip():
            sections[name].append([float(x) for x in line.split()])
    try:
        w_enc = np.array(sections["w_enc"])
        b_enc = np.array(sections["b_enc"][0])
        w_dec = np.array(sections["w_dec"])
        b_dec = np.array(sections["b_dec"][0])
    except (KeyError, IndexError) as exc:
        raise DataError(f"missing weight section in {path}") from exc
    if w_enc.shape != (input_dim, hidden_dim) or w_dec.shape != (hidden_dim, input_dim):
        raise DataError(f"weight shapes do not match the header in {path}")
    return Autoencoder(
        w_enc=w_enc, b_enc=b_enc, w_dec=w_dec, b_dec=b_dec, seed=seed, training_log=()
    )


def export_loss_csv(model: Autoencoder, path: str | Path) -> Path:
    """Write the per-epoch training loss as CSV."""
    path = Path(path)
    lines = ["epoch,loss"]
    for epoch, loss in enumerate(model.training_log, start=1):
        lines.append(f"{epoch},{format(loss, '.9g')}")
    path.write_text("\n".join(lines) + "\n", encoding="utf-8", newline="\n")
    return path
