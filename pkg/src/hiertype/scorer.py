"""Type scorer: two tanh layers map the mention feature into type space and
each type is scored by an inner product with its embedding."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .encoder import ShapeError, StaleCacheError


@dataclass
class ScorerParams:
    W1: np.ndarray  # (d_h, 2 d_w)
    b1: np.ndarray  # (d_h,)
    W2: np.ndarray  # (d_t, d_h)
    b2: np.ndarray  # (d_t,)
    type_emb: np.ndarray  # (num_nodes, d_t), row per tree node incl. ENTITY / OTHER


@dataclass
class ScorerCache:
    feature: np.ndarray
    h1: np.ndarray
    h: np.ndarray
    W1: np.ndarray
    W2: np.ndarray
    type_emb: np.ndarray
    consumed: bool = False


def score_all(params: ScorerParams, feature: np.ndarray) -> tuple[np.ndarray, ScorerCache]:
    """Scores for every tree node, in node-index order."""
    feature = np.asarray(feature, dtype=np.float64)
    if feature.shape != (params.W1.shape[1],):
        raise ShapeError(f"feature shape {feature.shape} does not match W1 {params.W1.shape}")
    if params.W2.shape[1] != params.W1.shape[0] or params.type_emb.shape[1] != params.W2.shape[0]:
        raise ShapeError("inconsistent scorer dimensions")
    h1 = np.tanh(params.W1 @ feature + params.b1)
    h = np.tanh(params.W2 @ h1 + params.b2)
    scores = params.type_emb @ h
    cache = ScorerCache(feature, h1, h, params.W1.copy(), params.W2.copy(), params.type_emb.copy())
    return scores, cache


def score_backward(cache: ScorerCache, grad_scores: np.ndarray) -> dict[str, np.ndarray]:
    if cache.consumed:
        raise StaleCacheError("scorer cache was already used for a backward pass")
    grad_scores = np.asarray(grad_scores, dtype=np.float64)
    if grad_scores.shape != (cache.type_emb.shape[0],):
        raise StaleCacheError(
            f"upstream gradient has shape {grad_scores.shape}, cache expects "
            f"({cache.type_emb.shape[0]},)")
    cache.consumed = True
    g_emb = np.outer(grad_scores, cache.h)
    gz2 = (cache.type_emb.T @ grad_scores) * (1.0 - cache.h ** 2)
    gW2 = np.outer(gz2, cache.h1)
    gz1 = (cache.W2.T @ gz2) * (1.0 - cache.h1 ** 2)
    gW1 = np.outer(gz1, cache.feature)
    return {
        "W1": gW1,
        "b1": gz1,
        "W2": gW2,
        "b2": gz2,
        "type_emb": g_emb,
        "feature": cache.W1.T @ gz1,
    }
