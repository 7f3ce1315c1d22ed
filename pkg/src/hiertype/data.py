"""JSONL mention records and token-vector resolution."""
from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .decoder import strip_synthetic
from .encoder import MentionInstance, hashed_vector
from .ontology import TypeTree, UnknownTypeError, normalize_labels

logger = logging.getLogger(__name__)


class DataError(ValueError):
    """Malformed input file; the message names the file and line."""


@dataclass
class DatasetRecord:
    tokens: list[str]
    span: tuple[int, int]  # 1-based, inclusive
    labels: list[str] = field(default_factory=list)
    vectors: list[list[float]] | None = None

    @classmethod
    def from_json(cls, obj: dict, where: str = "") -> "DatasetRecord":
        try:
            tokens = [str(t) for t in obj["tokens"]]
            l, r = (int(v) for v in obj["span"])
        except (KeyError, TypeError, ValueError) as exc:
            raise DataError(f"{where}: record needs 'tokens' and a 2-element 'span' ({exc})") from None
        if not 1 <= l <= r <= len(tokens):
            raise DataError(f"{where}: span [{l}, {r}] outside 1..{len(tokens)}")
        labels = obj.get("labels", [])
        if not isinstance(labels, list):
            raise DataError(f"{where}: 'labels' must be a list")
        vectors = obj.get("vectors")
        if vectors is not None and len(vectors) != len(tokens):
            raise DataError(f"{where}: {len(vectors)} vectors for {len(tokens)} tokens")
        return cls(tokens, (l, r), [str(x) for x in labels], vectors)

    def to_json(self) -> dict:
        out = {"tokens": self.tokens, "span": list(self.span), "labels": self.labels}
        if self.vectors is not None:
            out["vectors"] = self.vectors
        return out


def read_jsonl(path) -> list[DatasetRecord]:
    records = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            where = f"{path}:{lineno}"
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise DataError(f"{where}: invalid JSON ({exc.msg})") from None
            records.append(DatasetRecord.from_json(obj, where))
    return records


def write_jsonl(path, rows) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for row in rows:
            fh.write(json.dumps(row, sort_keys=True) + "\n")


def read_vector_table(path) -> dict[str, np.ndarray]:
    """Token -> vector table from a TSV file (token, then d_w floats)."""
    table: dict[str, np.ndarray] = {}
    dim = None
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.rstrip("\n")
            if not line:
                continue
            token, *vals = line.split("\t")
            try:
                vec = np.array([float(v) for v in vals])
            except ValueError:
                raise DataError(f"{path}:{lineno}: non-numeric vector entry") from None
            if dim is None:
                dim = len(vec)
            elif len(vec) != dim:
                raise DataError(f"{path}:{lineno}: expected {dim} values, got {len(vec)}")
            table[token] = vec
    return table


class VectorResolver:
    """Resolves token vectors: inline record vectors, then a TSV table, then
    the hashed provider."""

    def __init__(self, table: dict[str, np.ndarray] | None = None,
                 hashed_dim: int | None = None, hash_seed: int = 0):
        self.table = table
        self.hashed_dim = hashed_dim
        self.hash_seed = hash_seed
        self._oov = 0

    @property
    def dim(self) -> int | None:
        if self.table:
            return len(next(iter(self.table.values())))
        return self.hashed_dim

    def __call__(self, rec: DatasetRecord) -> np.ndarray:
        if rec.vectors is not None:
            return np.asarray(rec.vectors, dtype=np.float64)
        if self.table is not None:
            rows = []
            for tok in rec.tokens:
                vec = self.table.get(tok)
                if vec is None:
                    self._oov += 1
                    vec = np.zeros(self.dim)
                rows.append(vec)
            return np.stack(rows)
        if self.hashed_dim is not None:
            return np.stack([hashed_vector(t, self.hashed_dim, self.hash_seed) for t in rec.tokens])
        raise DataError("record has no inline vectors and no vector table or hashed dim was given")

    def describe(self) -> str:
        if self.table is not None:
            return f"table ({len(self.table)} tokens, {self._oov} OOV lookups)"
        if self.hashed_dim is not None:
            return f"hashed (dim {self.hashed_dim}, seed {self.hash_seed})"
        return "inline"


def to_instances(records, tree: TypeTree, mode: str, resolver: VectorResolver,
                 source: str = "", require_labels: bool = True) -> list[MentionInstance]:
    out = []
    completed = 0
    for i, rec in enumerate(records, start=1):
        if require_labels and not rec.labels:
            raise DataError(f"{source}:{i}: training record without labels")
        try:
            gold = normalize_labels(tree, rec.labels, mode) if rec.labels else frozenset()
        except UnknownTypeError as exc:
            raise DataError(f"{source}:{i}: {exc}") from None
        if len(strip_synthetic(tree, gold)) > len(set(rec.labels)):
            completed += 1
        out.append(MentionInstance(resolver(rec), rec.span, gold))
    if completed:
        logger.warning("%s: ancestor types added to %d record(s) with incomplete label paths",
                       source or "dataset", completed)
    return out


def load_dataset(path, tree: TypeTree, mode: str, resolver: VectorResolver,
                 require_labels: bool = True) -> list[MentionInstance]:
    return to_instances(read_jsonl(path), tree, mode, resolver, str(Path(path)), require_labels)
