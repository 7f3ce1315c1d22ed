"""Mention encoder: projected max-pool over the mention span plus
multiplicative mention-to-context attention, with a hand-written backward.
"""
from __future__ import annotations

import hashlib
from dataclasses import dataclass

import numpy as np


class ShapeError(ValueError):
    pass


class StaleCacheError(RuntimeError):
    pass


@dataclass
class EncoderParams:
    T: np.ndarray  # (d_w, d_w) mention projection
    Q: np.ndarray  # (d_w, d_w) attention bilinear form
    dropout: float = 0.0

    def __post_init__(self):
        if not 0.0 <= self.dropout < 1.0:
            raise ValueError(f"dropout must be in [0, 1), got {self.dropout}")

    @property
    def dim(self) -> int:
        return self.T.shape[0]


@dataclass
class MentionInstance:
    """Token vectors ``vectors`` (n, d_w), 1-based inclusive span, gold labels."""

    vectors: np.ndarray
    span: tuple[int, int]
    gold: frozenset = frozenset()

    def __post_init__(self):
        self.vectors = np.asarray(self.vectors, dtype=np.float64)
        if self.vectors.ndim != 2 or self.vectors.shape[0] < 1:
            raise ShapeError(f"expected (n, d_w) token vectors, got shape {self.vectors.shape}")
        l, r = self.span
        if not 1 <= l <= r <= self.vectors.shape[0]:
            raise ValueError(f"span {self.span} outside sentence of length {self.vectors.shape[0]}")
        self.span = (int(l), int(r))


@dataclass
class EncoderCache:
    T: np.ndarray
    Q: np.ndarray
    words: np.ndarray  # token vectors after dropout
    mask: np.ndarray | None  # dropout scale per entry, None when no dropout
    span: tuple[int, int]
    argmax: np.ndarray  # row within the span chosen per coordinate
    m: np.ndarray
    u: np.ndarray  # Q^T m
    attn: np.ndarray
    consumed: bool = False


def softmax(s: np.ndarray) -> np.ndarray:
    e = np.exp(s - s.max())
    return e / e.sum()


def encode(params: EncoderParams, x: MentionInstance, train_mode: bool = False,
           rng_seed: int | None = None) -> tuple[np.ndarray, EncoderCache]:
    """Return the feature ``[m ; c]`` of length ``2 * d_w`` and a backward cache."""
    d = params.dim
    W = x.vectors
    if W.shape[1] != d or params.T.shape != (d, d) or params.Q.shape != (d, d):
        raise ShapeError(
            f"token dim {W.shape[1]} does not match T {params.T.shape} / Q {params.Q.shape}")

    mask = None
    if train_mode and params.dropout > 0.0:
        rng = np.random.default_rng(rng_seed)
        keep = rng.random(W.shape) >= params.dropout
        mask = keep / (1.0 - params.dropout)
        W = W * mask

    l, r = x.span
    proj = W[l - 1:r] @ params.T.T  # (span_len, d)
    argmax = np.argmax(proj, axis=0)  # first index on ties
    m = proj[argmax, np.arange(d)]

    u = params.Q.T @ m
    attn = softmax(W @ u)
    c = attn @ W
    cache = EncoderCache(params.T.copy(), params.Q.copy(), W, mask, (l, r), argmax, m, u, attn)
    return np.concatenate([m, c]), cache


def encode_backward(cache: EncoderCache, grad_feature: np.ndarray) -> dict[str, np.ndarray]:
    """Gradients w.r.t. ``T``, ``Q`` and the (pre-dropout) token vectors."""
    if cache.consumed:
        raise StaleCacheError("encoder cache was already used for a backward pass")
    d = cache.m.shape[0]
    grad_feature = np.asarray(grad_feature, dtype=np.float64)
    if grad_feature.shape != (2 * d,):
        raise StaleCacheError(
            f"upstream gradient shape {grad_feature.shape} does not match cache (dim {2 * d})")
    cache.consumed = True
    gm, gc = grad_feature[:d].copy(), grad_feature[d:]
    W, a, u = cache.words, cache.attn, cache.u

    # c = a @ W
    gW = np.outer(a, gc)
    ga = W @ gc
    # softmax Jacobian
    gs = a * (ga - a @ ga)
    # s = W @ u,  u = Q^T m
    gW += np.outer(gs, u)
    gu = W.T @ gs
    gQ = np.outer(cache.m, gu)
    gm += cache.Q @ gu

    # m_j = (T w_{argmax_j})_j
    l, _ = cache.span
    rows = l - 1 + cache.argmax
    gT = gm[:, None] * W[rows]
    np.add.at(gW, rows, gm[:, None] * cache.T)

    if cache.mask is not None:
        gW = gW * cache.mask
    return {"T": gT, "Q": gQ, "words": gW}


def hashed_vector(token: str, d_w: int, seed: int = 0) -> np.ndarray:
    """Deterministic pseudo-embedding in [-1, 1]^d_w derived from a hash of ``token``."""
    digest = hashlib.blake2b(f"{seed}\x00{token}".encode("utf-8"), digest_size=16).digest()
    rng = np.random.default_rng(int.from_bytes(digest, "little"))
    return rng.uniform(-1.0, 1.0, size=d_w)
