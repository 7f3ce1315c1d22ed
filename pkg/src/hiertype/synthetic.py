"""Small synthetic typing datasets with known structure, for tests and demos.

Each label class owns a few mention words; all mention words get hashed
vectors that are linearly independent, so any labelling of them is linearly
separable.
"""
from __future__ import annotations

import numpy as np

from .data import DatasetRecord
from .encoder import hashed_vector

# 15 types over 3 levels
ONTOLOGY = [
    "/a/x/p", "/a/x/q", "/a/y",
    "/b/x", "/b/y/p", "/b/y/q",
    "/c/x/p", "/c/x/q", "/c/y",
]

# gold label sets; partial paths (/a/x, /c) and two multi-path classes included
CLASSES = [
    ["/a/x/p"], ["/a/x/q"], ["/a/y"], ["/b/x"], ["/b/y/p"], ["/b/y/q"],
    ["/c/x/p"], ["/c/y"], ["/a/x"], ["/c"], ["/a/y", "/b/x"], ["/b/y/q", "/c/x/q"],
]


def class_words(n_classes: int, words_per_class: int) -> list[list[str]]:
    return [[f"m{c}_{j}" for j in range(words_per_class)] for c in range(n_classes)]


def words_independent(words, d_w: int, hash_seed: int = 0) -> bool:
    mat = np.stack([hashed_vector(w, d_w, hash_seed) for w in words])
    return np.linalg.matrix_rank(mat) == len(words)


def make_records(n: int, seed: int = 0, classes=CLASSES, words_per_class: int = 2,
                 n_filler: int = 30, max_len: int = 8) -> list[DatasetRecord]:
    """``n`` single-word mentions in random filler context."""
    rng = np.random.default_rng(seed)
    vocab = class_words(len(classes), words_per_class)
    out = []
    for _ in range(n):
        c = int(rng.integers(len(classes)))
        length = int(rng.integers(3, max_len + 1))
        tokens = [f"f{int(rng.integers(n_filler))}" for _ in range(length)]
        pos = int(rng.integers(length))
        tokens[pos] = vocab[c][int(rng.integers(words_per_class))]
        out.append(DatasetRecord(tokens, (pos + 1, pos + 1), list(classes[c])))
    return out


def split(records, n_dev: int):
    return records[n_dev:], records[:n_dev]
