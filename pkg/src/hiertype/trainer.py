"""AdamW training with early stopping on dev micro F1, and the branching
factor sweep used at validation time."""
from __future__ import annotations

import dataclasses
import itertools
import json
import logging
import math
import time
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .decoder import hier_type_dec, strip_synthetic
from .metrics import evaluate
from .model import NO_DECAY, HierTypingModel
from .objective import MarginSchedule, ObjectiveWeights, total_objective
from .ontology import MODES, TypeTree

logger = logging.getLogger(__name__)

CLIP_NORM = 5.0


class ConfigError(ValueError):
    pass


class NonFiniteGradientError(FloatingPointError):
    def __init__(self, name: str, step: int):
        super().__init__(f"non-finite gradient in '{name}' at step {step}")
        self.name = name
        self.step = step


@dataclass
class Hyperparams:
    alpha: float = 0.15
    beta: float = 0.1
    lambda_: float = 0.001
    p_D: float = 0.5
    learning_rate: float = 1e-5
    batch_size: int = 256
    max_epochs: int = 100
    patience: int = 5
    seed: int = 0
    mode: str = "exclusive"
    k: list | None = None
    xi: list | None = None
    d_t: int = 1024
    d_h: int | None = None

    def __post_init__(self):
        self.validate()

    def validate(self) -> None:
        if not 0.0 <= self.alpha <= 1.0:
            raise ConfigError("alpha must be in [0,1]")
        if self.beta < 0:
            raise ConfigError("beta must be >= 0")
        if self.lambda_ < 0:
            raise ConfigError("lambda must be >= 0")
        if not 0.0 <= self.p_D < 1.0:
            raise ConfigError("p_D must be in [0,1)")
        if self.learning_rate < 0:
            raise ConfigError("learning_rate must be >= 0")
        if self.batch_size < 1:
            raise ConfigError("batch_size must be >= 1")
        if self.patience < 1:
            raise ConfigError("patience must be >= 1")
        if self.max_epochs < 1:
            raise ConfigError("max_epochs must be >= 1")
        if self.mode not in MODES:
            raise ConfigError(f"mode must be one of {MODES}")
        if self.k is not None and any(v is not None and v < 1 for v in self.k):
            raise ConfigError("branching factors must be >= 1")
        if self.xi is not None and any(v <= 0 for v in self.xi):
            raise ConfigError("margins must be positive")
        if self.d_t < 2 or self.d_t % 2:
            raise ConfigError("d_t must be a positive even number")
        if self.d_h is not None and self.d_h < 1:
            raise ConfigError("d_h must be >= 1")

    @classmethod
    def from_dict(cls, obj: dict) -> "Hyperparams":
        names = {f.name for f in dataclasses.fields(cls)}
        kwargs = {}
        for key, value in obj.items():
            name = "lambda_" if key == "lambda" else key
            if name not in names:
                raise ConfigError(f"unknown config key {key!r}")
            kwargs[name] = value
        try:
            return cls(**kwargs)
        except TypeError as exc:
            raise ConfigError(str(exc)) from None

    def to_dict(self) -> dict:
        d = dataclasses.asdict(self)
        d["lambda"] = d.pop("lambda_")
        return d


@dataclass
class OptimizerState:
    m: dict = field(default_factory=dict)
    v: dict = field(default_factory=dict)
    step: int = 0
    betas: tuple = (0.9, 0.999)
    eps: float = 1e-8


def adamw_step(params: dict, grads: dict, state: OptimizerState, lr: float,
               weight_decay: float, no_decay: frozenset = NO_DECAY) -> None:
    """One in-place AdamW update. Decay acts on the pre-update weights and
    skips the names in ``no_decay``."""
    for name, g in grads.items():
        if not np.all(np.isfinite(g)):
            raise NonFiniteGradientError(name, state.step + 1)
    state.step += 1
    b1, b2 = state.betas
    c1 = 1.0 - b1 ** state.step
    c2 = 1.0 - b2 ** state.step
    for name, g in grads.items():
        p = params[name]
        m = state.m.setdefault(name, np.zeros_like(p))
        v = state.v.setdefault(name, np.zeros_like(p))
        m *= b1
        m += (1.0 - b1) * g
        v *= b2
        v += (1.0 - b2) * g * g
        update = (m / c1) / (np.sqrt(v / c2) + state.eps)
        if weight_decay and name not in no_decay:
            p -= lr * weight_decay * p
        p -= lr * update


def clip_global_norm(grads: dict, max_norm: float = CLIP_NORM) -> float:
    norm = math.sqrt(sum(float(np.sum(g * g)) for g in grads.values()))
    if norm > max_norm:
        scale = max_norm / norm
        for g in grads.values():
            g *= scale
    return norm


def predict_labels(model: HierTypingModel, instances, k) -> list[frozenset[int]]:
    return [hier_type_dec(model.tree, model.scores(x), k) for x in instances]


def dev_report(model: HierTypingModel, dev, k):
    preds = predict_labels(model, dev, k)
    tree = model.tree
    pairs = [(strip_synthetic(tree, x.gold), strip_synthetic(tree, p)) for x, p in zip(dev, preds)]
    return evaluate(pairs, tree=tree)


@dataclass
class TrainResult:
    model: HierTypingModel
    log: list[dict]
    best_epoch: int

    def log_jsonl(self) -> str:
        return "".join(json.dumps(r, sort_keys=True) + "\n" for r in self.log)


def train(train_set, dev_set, tree: TypeTree, hyper: Hyperparams, d_w: int | None = None,
          model: HierTypingModel | None = None,
          clock: Callable[[], float] | None = None) -> TrainResult:
    """Train and return the best-dev checkpoint with one log record per epoch.

    ``wall_ms`` is only recorded when a ``clock`` is supplied; otherwise it is
    ``None`` so that logs are reproducible byte for byte.
    """
    train_set = list(train_set)
    if not train_set:
        raise ValueError("empty training set")
    if model is None:
        d_w = d_w if d_w is not None else train_set[0].vectors.shape[1]
        model = HierTypingModel.init(tree, d_w, hyper.d_t, hyper.d_h, hyper.p_D, hyper.seed)
    sched = MarginSchedule.for_tree(tree, hyper.alpha, hyper.xi)
    weights = ObjectiveWeights(hyper.beta, hyper.lambda_)
    rng = np.random.default_rng(hyper.seed)
    state = OptimizerState()
    params = model.arrays()

    best_f1, best_model, best_epoch, waited = -math.inf, model.copy(), 0, 0
    log = []
    for epoch in range(1, hyper.max_epochs + 1):
        start = clock() if clock else None
        order = rng.permutation(len(train_set))
        losses = []
        for lo in range(0, len(order), hyper.batch_size):
            batch = [train_set[i] for i in order[lo:lo + hyper.batch_size]]
            seeds = rng.integers(0, 2**63 - 1, size=len(batch))
            loss, grads = total_objective(batch, model, weights, sched, True, seeds)
            clip_global_norm(grads)
            adamw_step(params, grads, state, hyper.learning_rate, hyper.lambda_)
            losses.append(loss * len(batch))
        train_loss = sum(losses) / len(train_set)
        report = dev_report(model, dev_set, hyper.k) if dev_set else None
        rec = {
            "epoch": epoch,
            "train_loss": float(train_loss),
            "dev_strict": report.strict_acc if report else None,
            "dev_macro_f1": report.macro_f1 if report else None,
            "dev_micro_f1": report.micro_f1 if report else None,
            "wall_ms": round(1000 * (clock() - start), 3) if clock else None,
        }
        log.append(rec)
        logger.info("epoch %d loss %.4f dev MiF %s", epoch, train_loss, rec["dev_micro_f1"])
        score = report.micro_f1 if report else -train_loss
        if score > best_f1:
            best_f1, best_model, best_epoch, waited = score, model.copy(), epoch, 0
        else:
            waited += 1
            if waited >= hyper.patience:
                break
    return TrainResult(best_model, log, best_epoch)


def sweep_branching(dev_set, model: HierTypingModel, grid: Sequence[Sequence[int]]):
    """Branching factors with the best dev micro F1; ties go to the
    lexicographically smallest candidate."""
    grid = [tuple(k) for k in grid]
    if not grid:
        raise ValueError("empty branching-factor grid")
    results = {k: dev_report(model, dev_set, k).micro_f1 for k in grid}
    best = max(results.values())
    return min(k for k, v in results.items() if v == best), results


def branching_grid(L: int, max_k: int = 3) -> list[tuple[int, ...]]:
    return list(itertools.product(range(1, max_k + 1), repeat=L))


def wall_clock() -> float:
    return time.perf_counter()
