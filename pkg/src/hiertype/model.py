"""Parameter bundle for the full typing model plus the binary checkpoint format.

Checkpoint layout (all integers little-endian)::

    b"HTYPECKP"  uint32 version  uint64 header_len  header (UTF-8 JSON)
    float32 arrays, concatenated in header["arrays"] order
"""
from __future__ import annotations

import json
import struct
from dataclasses import dataclass

import numpy as np

from .encoder import EncoderParams, MentionInstance, encode, encode_backward
from .ontology import TypeTree
from .scorer import ScorerParams, score_all, score_backward

MAGIC = b"HTYPECKP"
VERSION = 1
PARAM_NAMES = ("T", "Q", "W1", "b1", "W2", "b2", "type_emb", "rel")
NO_DECAY = frozenset({"b1", "b2"})


class CheckpointError(ValueError):
    pass


class OntologyMismatchError(CheckpointError):
    pass


def _glorot(rng, fan_out, fan_in):
    s = np.sqrt(6.0 / (fan_in + fan_out))
    return rng.uniform(-s, s, size=(fan_out, fan_in))


@dataclass
class HierTypingModel:
    tree: TypeTree
    encoder: EncoderParams
    scorer: ScorerParams
    rel: np.ndarray  # (d_t,) = [Re r ; Im r]

    @classmethod
    def init(cls, tree: TypeTree, d_w: int, d_t: int = 1024, d_h: int | None = None,
             dropout: float = 0.0, seed: int = 0) -> "HierTypingModel":
        if d_t % 2:
            raise ValueError(f"type embedding dimension must be even, got {d_t}")
        d_h = d_t if d_h is None else d_h
        rng = np.random.default_rng(seed)
        enc = EncoderParams(_glorot(rng, d_w, d_w), _glorot(rng, d_w, d_w), dropout)
        sc = ScorerParams(
            W1=_glorot(rng, d_h, 2 * d_w),
            b1=np.zeros(d_h),
            W2=_glorot(rng, d_t, d_h),
            b2=np.zeros(d_t),
            type_emb=rng.normal(0.0, 0.1, size=(len(tree), d_t)),
        )
        rel = rng.normal(0.0, 0.1, size=d_t)
        return cls(tree, enc, sc, rel)

    @property
    def dims(self) -> dict:
        return {
            "d_w": int(self.encoder.T.shape[0]),
            "d_h": int(self.scorer.W1.shape[0]),
            "d_t": int(self.scorer.W2.shape[0]),
        }

    def arrays(self) -> dict[str, np.ndarray]:
        """Live references to every trainable array, keyed by name."""
        e, s = self.encoder, self.scorer
        return {"T": e.T, "Q": e.Q, "W1": s.W1, "b1": s.b1, "W2": s.W2, "b2": s.b2,
                "type_emb": s.type_emb, "rel": self.rel}

    def copy(self) -> "HierTypingModel":
        a = {k: v.copy() for k, v in self.arrays().items()}
        return HierTypingModel(
            self.tree,
            EncoderParams(a["T"], a["Q"], self.encoder.dropout),
            ScorerParams(a["W1"], a["b1"], a["W2"], a["b2"], a["type_emb"]),
            a["rel"],
        )

    def scores(self, x: MentionInstance) -> np.ndarray:
        feature, _ = encode(self.encoder, x, train_mode=False)
        s, _ = score_all(self.scorer, feature)
        return s

    def forward(self, x: MentionInstance, train_mode: bool = False, rng_seed: int | None = None):
        feature, enc_cache = encode(self.encoder, x, train_mode, rng_seed)
        s, sc_cache = score_all(self.scorer, feature)
        return s, (enc_cache, sc_cache)

    def backward(self, caches, grad_scores: np.ndarray) -> dict[str, np.ndarray]:
        enc_cache, sc_cache = caches
        g = score_backward(sc_cache, grad_scores)
        ge = encode_backward(enc_cache, g.pop("feature"))
        g["T"], g["Q"] = ge["T"], ge["Q"]
        return g


def save_checkpoint(path, model: HierTypingModel, meta: dict | None = None) -> None:
    arrays = model.arrays()
    header = {
        "dims": model.dims,
        "ontology_hash": model.tree.fingerprint(),
        "num_nodes": len(model.tree),
        "other_augmented": model.tree.other_augmented,
        "dropout": model.encoder.dropout,
        "arrays": [[name, list(arrays[name].shape)] for name in PARAM_NAMES],
        "meta": meta or {},
    }
    blob = json.dumps(header, sort_keys=True).encode("utf-8")
    with open(path, "wb") as fh:
        fh.write(MAGIC)
        fh.write(struct.pack("<IQ", VERSION, len(blob)))
        fh.write(blob)
        for name in PARAM_NAMES:
            fh.write(np.ascontiguousarray(arrays[name], dtype="<f4").tobytes())


def read_checkpoint_header(path) -> dict:
    with open(path, "rb") as fh:
        return _read_header(fh)


def _read_header(fh) -> dict:
    if fh.read(len(MAGIC)) != MAGIC:
        raise CheckpointError("not a checkpoint file (bad magic)")
    version, n = struct.unpack("<IQ", fh.read(12))
    if version != VERSION:
        raise CheckpointError(f"unsupported checkpoint version {version}")
    return json.loads(fh.read(n).decode("utf-8"))


def load_checkpoint(path, tree: TypeTree) -> tuple[HierTypingModel, dict]:
    """Load parameters; ``tree`` must match the ontology the model was trained on."""
    with open(path, "rb") as fh:
        header = _read_header(fh)
        if header["ontology_hash"] != tree.fingerprint():
            raise OntologyMismatchError(
                "ontology does not match checkpoint (node ordering hash differs)")
        arrays = {}
        for name, shape in header["arrays"]:
            count = int(np.prod(shape, dtype=np.int64))
            buf = fh.read(4 * count)
            if len(buf) != 4 * count:
                raise CheckpointError(f"truncated checkpoint while reading {name}")
            arrays[name] = np.frombuffer(buf, dtype="<f4").astype(np.float64).reshape(shape)
    model = HierTypingModel(
        tree,
        EncoderParams(arrays["T"], arrays["Q"], header.get("dropout", 0.0)),
        ScorerParams(arrays["W1"], arrays["b1"], arrays["W2"], arrays["b2"], arrays["type_emb"]),
        arrays["rel"],
    )
    return model, header
