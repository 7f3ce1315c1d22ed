"""Strict accuracy, macro / micro F1 and per-level accuracy for typed mentions.

Label sets are sets of canonical path strings (or node indices, when a tree
is supplied to convert them).
"""
from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
from typing import Iterable

from .ontology import OTHER, SEP, TypeTree, split_path, join_path


def _check(pairs) -> list[tuple[frozenset, frozenset]]:
    pairs = [(frozenset(g), frozenset(p)) for g, p in pairs]
    if not pairs:
        raise ValueError("no instances to evaluate")
    return pairs


def strict_accuracy(pairs) -> float:
    pairs = _check(pairs)
    return sum(g == p for g, p in pairs) / len(pairs)


def instance_f1(gold: frozenset, pred: frozenset) -> float:
    if not gold and not pred:
        return 1.0
    tp = len(gold & pred)
    return 2.0 * tp / (len(gold) + len(pred))


def macro_micro_f1(pairs) -> tuple[float, float]:
    pairs = _check(pairs)
    macro = sum(instance_f1(g, p) for g, p in pairs) / len(pairs)
    tp, fp, fn = _counts(pairs)
    denom = 2 * tp + fp + fn
    micro = 1.0 if denom == 0 else 2.0 * tp / denom
    return macro, micro


def _counts(pairs):
    tp = sum(len(g & p) for g, p in pairs)
    fp = sum(len(p - g) for g, p in pairs)
    fn = sum(len(g - p) for g, p in pairs)
    return tp, fp, fn


def _as_paths(tree: TypeTree | None, labels) -> set[str]:
    out = set()
    for y in labels:
        if isinstance(y, str):
            out.add(join_path(split_path(y)))
        else:
            if tree is None:
                raise TypeError("node-index labels need a tree")
            out.add(tree.paths[y])
    out.discard(SEP)
    return out


def padded_level(labels: Iterable[str], level: int) -> frozenset[str]:
    """The level-``level`` view of an ancestor-closed path set.

    Paths deeper than ``level`` are cut, then every chain that stops short is
    extended with ``<other>`` segments, e.g. ``/person`` at level 3 becomes
    ``/person/<other>/<other>``.
    """
    segs = {split_path(p) for p in labels}
    kept = {s for s in segs if len(s) <= level}
    closed = set(kept)
    for s in kept:
        closed.update(s[:j] for j in range(1, len(s)))
    has_child = {s[:-1] for s in closed}
    ends = [s for s in closed | {()} if s not in has_child]
    return frozenset(join_path(s + (OTHER,) * (level - len(s))) for s in ends)


def level_accuracy(pairs, level: int, L: int, tree: TypeTree | None = None) -> float:
    if not 1 <= level <= L:
        raise ValueError(f"level must be in 1..{L}, got {level}")
    pairs = [(_as_paths(tree, g), _as_paths(tree, p)) for g, p in pairs]
    if not pairs:
        raise ValueError("no instances to evaluate")
    hits = sum(padded_level(g, level) == padded_level(p, level) for g, p in pairs)
    return hits / len(pairs)


def per_level_accuracy(tree: TypeTree | None, pairs, L: int | None = None) -> list[float]:
    pairs = list(pairs)
    if L is None:
        if tree is None:
            raise ValueError("either a tree or L is required")
        L = tree.depth
    return [level_accuracy(pairs, l, L, tree) for l in range(1, L + 1)]


def strip_other_paths(labels: Iterable[str]) -> frozenset[str]:
    return frozenset(p for p in labels if p != SEP and OTHER not in split_path(p))


def close_paths(labels: Iterable[str]) -> frozenset[str]:
    """Add every ancestor prefix of each path."""
    out = set()
    for p in labels:
        s = split_path(p)
        out.update(join_path(s[:j]) for j in range(1, len(s) + 1))
    return frozenset(out)


@dataclass
class EvalReport:
    strict_acc: float
    macro_f1: float
    micro_f1: float
    per_level_acc: list[float] = field(default_factory=list)
    instances: int = 0
    tp: int = 0
    fp: int = 0
    fn: int = 0

    def to_json(self) -> str:
        return json.dumps(asdict(self), sort_keys=True)

    def to_table(self) -> str:
        rows = [("Acc", self.strict_acc), ("MaF", self.macro_f1), ("MiF", self.micro_f1)]
        rows += [(f"L{i}", v) for i, v in enumerate(self.per_level_acc, start=1)]
        width = max(len(name) for name, _ in rows)
        lines = [f"{name.ljust(width)}  {100 * v:6.2f}" for name, v in rows]
        lines.append(f"{'n'.ljust(width)}  {self.instances:6d}")
        return "\n".join(lines)


def evaluate(pairs, L: int | None = None, tree: TypeTree | None = None) -> EvalReport:
    """Full report. OTHER labels are stripped for Acc/MaF/MiF but still count
    towards the padded per-level comparison."""
    raw = [(_as_paths(tree, g), _as_paths(tree, p)) for g, p in pairs]
    if not raw:
        raise ValueError("no instances to evaluate")
    stripped = [(strip_other_paths(g), strip_other_paths(p)) for g, p in raw]
    if L is None:
        L = tree.depth if tree is not None else max(
            (len(split_path(x)) for g, p in raw for x in g | p), default=1)
    macro, micro = macro_micro_f1(stripped)
    tp, fp, fn = _counts(stripped)
    return EvalReport(
        strict_acc=strict_accuracy(stripped),
        macro_f1=macro,
        micro_f1=micro,
        per_level_acc=[level_accuracy(raw, l, L) for l in range(1, L + 1)],
        instances=len(raw),
        tp=tp,
        fp=fp,
        fn=fn,
    )
