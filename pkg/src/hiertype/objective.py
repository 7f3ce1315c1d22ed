"""Ranking losses over the type tree and the ComplEx subtyping constraint.

Every loss returns ``(value, gradient)``; hinges use subgradient 0 at the kink,
so satisfied constraints contribute exactly nothing.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .ontology import ROOT, ContractError, TypeTree, is_ancestor_closed


def default_margins(L: int) -> tuple[float, ...]:
    """Per-level margins ``L - l + 1`` for levels ``l = 1..L``."""
    if L < 1:
        raise ValueError(f"number of levels must be >= 1, got {L}")
    return tuple(float(L - l + 1) for l in range(1, L + 1))


@dataclass(frozen=True)
class MarginSchedule:
    xi: tuple[float, ...]
    alpha: float

    def __post_init__(self):
        if not 0.0 <= self.alpha <= 1.0:
            raise ValueError(f"alpha must be in [0,1], got {self.alpha}")
        if any(x <= 0 for x in self.xi):
            raise ValueError(f"margins must be positive, got {self.xi}")

    @classmethod
    def for_tree(cls, tree: TypeTree, alpha: float, xi: Sequence[float] | None = None):
        xi = default_margins(tree.depth) if xi is None else tuple(float(v) for v in xi)
        if len(xi) < tree.depth:
            raise ValueError(f"need {tree.depth} margins, got {len(xi)}")
        return cls(xi, alpha)


@dataclass(frozen=True)
class ObjectiveWeights:
    beta: float = 0.1
    lam: float = 0.0  # realized as decoupled weight decay, never added to the loss

    def __post_init__(self):
        if self.beta < 0 or self.lam < 0:
            raise ValueError("beta and lambda must be non-negative")


def flat_rank_loss(scores: np.ndarray, Y: Iterable[int], xi: float = 1.0):
    """Rank every gold type above every non-gold type (ENTITY excluded) by ``xi``."""
    scores = np.asarray(scores, dtype=np.float64)
    pos = np.array(sorted(Y), dtype=int)
    if pos.size == 0:
        raise ContractError("flat ranking loss needs at least one gold type")
    is_neg = np.ones(scores.shape[0], dtype=bool)
    is_neg[pos] = False
    is_neg[ROOT] = False
    neg = np.flatnonzero(is_neg)
    margin = xi - scores[pos][:, None] + scores[neg][None, :]
    active = margin > 0
    grad = np.zeros_like(scores)
    np.add.at(grad, pos, -active.sum(axis=1))
    np.add.at(grad, neg, active.sum(axis=0))
    return float(margin[active].sum()), grad


def hier_rank_loss(tree: TypeTree, scores: np.ndarray, Y: Iterable[int], sched: MarginSchedule):
    """Parent-as-threshold ranking loss.

    For each gold type ``y`` with parent ``p`` and margin ``xi`` of its level:
    ``y`` above ``p`` by ``alpha*xi``, ``p`` above each non-gold sibling by
    ``(1-alpha)*xi`` and ``y`` above each non-gold sibling by ``xi``.
    """
    scores = np.asarray(scores, dtype=np.float64)
    Y = frozenset(Y)
    if ROOT in Y:
        raise ContractError("ENTITY cannot be a gold label")
    if not is_ancestor_closed(tree, Y):
        raise ContractError("gold label set is not ancestor-closed")
    alpha = sched.alpha
    grad = np.zeros_like(scores)
    loss = 0.0
    for y in sorted(Y):
        p = tree.parent[y]
        xi = sched.xi[tree.level[y] - 1]
        v = alpha * xi - scores[y] + scores[p]
        if v > 0:
            loss += v
            grad[y] -= 1.0
            grad[p] += 1.0
        for s in tree.siblings(y):
            if s in Y:
                continue
            v = (1.0 - alpha) * xi - scores[p] + scores[s]
            if v > 0:
                loss += v
                grad[p] -= 1.0
                grad[s] += 1.0
            v = xi - scores[y] + scores[s]
            if v > 0:
                loss += v
                grad[y] -= 1.0
                grad[s] += 1.0
    return loss, grad


def complex_subtype_score(emb_y: np.ndarray, emb_z: np.ndarray, rel: np.ndarray) -> float:
    """``Re(sum_k r_k * phi(y)_k * conj(phi(z))_k)`` with real/imag halves."""
    a, b, c, d, p, q = _halves(emb_y, emb_z, rel)
    return float(p @ (a * c + b * d) - q @ (b * c - a * d))


def _halves(emb_y, emb_z, rel):
    emb_y, emb_z, rel = (np.asarray(v, dtype=np.float64) for v in (emb_y, emb_z, rel))
    n = emb_y.shape[-1]
    if n % 2:
        raise ValueError(f"ComplEx needs an even embedding dimension, got {n}")
    if emb_z.shape[-1] != n or rel.shape[-1] != n:
        raise ValueError("embedding and relation dimensions disagree")
    h = n // 2
    return emb_y[:h], emb_y[h:], emb_z[:h], emb_z[h:], rel[:h], rel[h:]


def complex_subtype_grad(emb_y, emb_z, rel):
    """Gradients of :func:`complex_subtype_score` w.r.t. ``emb_y``, ``emb_z``, ``rel``."""
    a, b, c, d, p, q = _halves(emb_y, emb_z, rel)
    gy = np.concatenate([p * c + q * d, p * d - q * c])
    gz = np.concatenate([p * a - q * b, p * b + q * a])
    gr = np.concatenate([a * c + b * d, a * d - b * c])
    return gy, gz, gr


def subtype_rel_loss(tree: TypeTree, Y: Iterable[int], type_emb: np.ndarray, rel: np.ndarray):
    """Hinge loss asking ``r(y, parent) >= 1`` and ``r(y, y') <= -1`` for the
    siblings of ``y`` and of its parent. Returns ``(loss, g_type_emb, g_rel)``."""
    Y = frozenset(Y)
    if not is_ancestor_closed(tree, Y):
        raise ContractError("gold label set is not ancestor-closed")
    g_emb = np.zeros_like(type_emb, dtype=np.float64)
    g_rel = np.zeros_like(rel, dtype=np.float64)
    loss = 0.0

    def pair(y, z, sign):
        # hinge [1 + sign * r(y, z)]_+
        nonlocal loss
        v = 1.0 + sign * complex_subtype_score(type_emb[y], type_emb[z], rel)
        if v > 0:
            loss += v
            gy, gz, gr = complex_subtype_grad(type_emb[y], type_emb[z], rel)
            g_emb[y] += sign * gy
            g_emb[z] += sign * gz
            g_rel[:] += sign * gr

    for y in sorted(Y):
        p = tree.parent[y]
        pair(y, p, -1.0)
        for s in sorted(set(tree.siblings(y)) | set(tree.siblings(p))):
            pair(y, s, 1.0)
    return loss, g_emb, g_rel


def instance_objective(model, x, weights: ObjectiveWeights, sched: MarginSchedule,
                       train_mode: bool = False, rng_seed: int | None = None):
    """``J_hier + beta * J_rel`` for one instance and its full gradient set."""
    s, caches = model.forward(x, train_mode, rng_seed)
    j_hier, g_scores = hier_rank_loss(model.tree, s, x.gold, sched)
    grads = model.backward(caches, g_scores)
    loss = j_hier
    if weights.beta > 0:
        j_rel, g_emb, g_rel = subtype_rel_loss(model.tree, x.gold, model.scorer.type_emb, model.rel)
        loss += weights.beta * j_rel
        grads["type_emb"] += weights.beta * g_emb
        grads["rel"] = weights.beta * g_rel
    else:
        grads["rel"] = np.zeros_like(model.rel)
    return loss, grads


def total_objective(batch, model, weights: ObjectiveWeights, sched: MarginSchedule,
                    train_mode: bool = False, rng_seeds: Sequence[int] | None = None):
    """Batch mean of ``J_hier + beta * J_rel``.

    The L2 term is deliberately absent: it is applied by the optimizer as
    decoupled weight decay. Gradients are accumulated in instance order.
    """
    batch = list(batch)
    if not batch:
        raise ValueError("empty batch")
    total = 0.0
    acc = {k: np.zeros_like(v) for k, v in model.arrays().items()}
    for i, x in enumerate(batch):
        seed = None if rng_seeds is None else rng_seeds[i]
        loss, grads = instance_objective(model, x, weights, sched, train_mode, seed)
        total += loss
        for k, g in grads.items():
            acc[k] += g
    n = len(batch)
    return total / n, {k: g / n for k, g in acc.items()}
