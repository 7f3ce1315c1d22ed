"""Finite-difference check of the hand-written backward passes."""
from __future__ import annotations

import numpy as np

from .encoder import MentionInstance
from .model import HierTypingModel
from .objective import MarginSchedule, ObjectiveWeights, total_objective
from .ontology import TypeTree, parse_ontology

TOLERANCE = 1e-4

# 12 nodes including ENTITY, 3 levels
GRADCHECK_ONTOLOGY = [
    "/a/x/p", "/a/x/q", "/a/y/p", "/b/x/p", "/b/y", "/c",
]


def numerical_grad(f, arr: np.ndarray, step: float = 1e-5) -> np.ndarray:
    """Central differences of scalar ``f()`` w.r.t. every entry of ``arr`` (in place)."""
    out = np.zeros_like(arr)
    flat, gflat = arr.reshape(-1), out.reshape(-1)
    for i in range(flat.size):
        orig = flat[i]
        flat[i] = orig + step
        hi = f()
        flat[i] = orig - step
        lo = f()
        flat[i] = orig
        gflat[i] = (hi - lo) / (2 * step)
    return out


def relative_error(analytic: np.ndarray, numeric: np.ndarray, floor: float = 1e-6) -> float:
    denom = np.maximum(np.maximum(np.abs(analytic), np.abs(numeric)), floor)
    return float(np.max(np.abs(analytic - numeric) / denom)) if analytic.size else 0.0


def random_instance(tree: TypeTree, rng, d_w: int, n_tokens: int = 5) -> MentionInstance:
    picks = [int(rng.integers(1, len(tree)))]
    if rng.random() < 0.5:
        picks.append(int(rng.integers(1, len(tree))))
    gold = frozenset(a for y in picks for a in [y, *tree.ancestors(y)])
    l = int(rng.integers(1, n_tokens + 1))
    r = int(rng.integers(l, n_tokens + 1))
    return MentionInstance(rng.normal(size=(n_tokens, d_w)), (l, r), gold)


def run_gradcheck(seed: int = 0, d_w: int = 6, d_h: int = 8, d_t: int = 8,
                  batch: int = 2, step: float = 1e-5, alpha: float = 0.3,
                  beta: float = 0.5) -> dict[str, float]:
    """Max relative error between analytic and central-difference gradients,
    per parameter block, for a random model on the fixed 12-node tree."""
    if d_t % 2:
        raise ValueError(f"d_t must be even for the complex relation embedding, got {d_t}")
    rng = np.random.default_rng(seed)
    tree = parse_ontology(GRADCHECK_ONTOLOGY)
    model = HierTypingModel.init(tree, d_w, d_t, d_h, seed=seed)
    arrays = model.arrays()
    # spread parameters so hinges are a mix of active and inactive
    for name, arr in arrays.items():
        arr += rng.normal(0.0, 0.5, size=arr.shape)
    data = [random_instance(tree, rng, d_w) for _ in range(batch)]
    sched = MarginSchedule.for_tree(tree, alpha)
    weights = ObjectiveWeights(beta=beta)

    _, grads = total_objective(data, model, weights, sched)

    def f():
        return total_objective(data, model, weights, sched)[0]

    return {name: relative_error(grads[name], numerical_grad(f, arr, step))
            for name, arr in arrays.items()}
