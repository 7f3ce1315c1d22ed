"""Coarse-to-fine decoding over the type tree.

Starting from ENTITY, a child is admitted when its score strictly exceeds its
parent's; at most ``k[level]`` admitted children are kept per parent.
"""
from __future__ import annotations

import math
from collections import deque
from typing import Iterable, Mapping, Sequence

import numpy as np

from .ontology import ROOT, ContractError, TypeTree


def _score_array(tree: TypeTree, scores) -> np.ndarray:
    if isinstance(scores, Mapping):
        missing = [p for p in tree.paths if p not in scores]
        if missing:
            raise ContractError(f"no score for type {missing[0]}")
        return np.array([scores[p] for p in tree.paths], dtype=np.float64)
    arr = np.asarray(scores, dtype=np.float64)
    if arr.shape != (len(tree),):
        raise ContractError(f"expected {len(tree)} scores, got shape {arr.shape}")
    return arr


def _limit(k: Sequence[int | None] | None, level: int) -> float:
    if k is None or level > len(k) or k[level - 1] is None:
        return math.inf
    if k[level - 1] < 1:
        raise ValueError(f"branching factor must be >= 1, got {k[level - 1]}")
    return k[level - 1]


def hier_type_dec(tree: TypeTree, scores, k: Sequence[int | None] | None = None,
                  trace: list | None = None) -> frozenset[int]:
    """Decode a label set. ``k[l-1]`` caps children admitted at level ``l``
    (``None`` or a missing entry means unbounded). When ``trace`` is a list,
    the visited nodes are appended to it in queue order."""
    F = _score_array(tree, scores)
    out: set[int] = set()
    queue = deque([ROOT])
    while queue:
        y = queue.popleft()
        if trace is not None:
            trace.append(y)
        theta = F[y]
        kids = [z for z in tree.children[y] if F[z] > theta]
        if not kids:
            continue
        cap = _limit(k, tree.level[y] + 1)
        # children are in canonical-path order, so a stable sort on -score
        # breaks ties by ascending path
        kids.sort(key=lambda z: -F[z])
        if len(kids) > cap:
            kids = kids[: int(cap)]
        out.update(kids)
        queue.extend(kids)
    return frozenset(out)


def strip_synthetic(tree: TypeTree, labels: Iterable[int]) -> frozenset[int]:
    """Drop OTHER nodes (and ENTITY) before reporting."""
    return frozenset(y for y in labels if y != ROOT and not tree.is_other(y))

