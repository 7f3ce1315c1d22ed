"""Type ontology: parsing type paths into a rooted tree, OTHER augmentation,
and gold-label normalization under the exclusive / undefined interpretations.

Nodes are addressed by integer index. Index order is lexicographic by the
canonical path string, so the ENTITY root ``/`` is always node 0 and every
parent precedes its children.
"""
from __future__ import annotations

import hashlib
import logging
from dataclasses import dataclass, field
from typing import Iterable, Sequence

logger = logging.getLogger(__name__)

SEP = "/"
OTHER = "<other>"
ROOT = 0

EXCLUSIVE = "exclusive"
UNDEFINED = "undefined"
MODES = (EXCLUSIVE, UNDEFINED)


class OntologyError(ValueError):
    """Malformed ontology input (bad path, reserved name, ...)."""


class UnknownTypeError(KeyError):
    def __init__(self, path: str):
        super().__init__(path)
        self.path = path

    def __str__(self) -> str:
        return f"unknown type: {self.path}"


class AugmentationError(RuntimeError):
    """Raised when OTHER nodes are added to an already augmented tree."""


class ContractError(ValueError):
    """A caller-side precondition was violated."""


def split_path(path: str, lineno: int | None = None) -> tuple[str, ...]:
    """Split a canonical path into segments. ``"/"`` gives the empty tuple."""
    where = f" (line {lineno})" if lineno is not None else ""
    path = path.strip()
    if not path.startswith(SEP):
        raise OntologyError(f"type path must start with '/': {path!r}{where}")
    if path == SEP:
        return ()
    body = path[1:]
    if body.endswith(SEP):
        body = body[:-1]
    segments = tuple(body.split(SEP))
    if any(s == "" for s in segments):
        raise OntologyError(f"empty segment in type path {path!r}{where}")
    return segments


def join_path(segments: Sequence[str]) -> str:
    return SEP + SEP.join(segments)


@dataclass(frozen=True)
class TypeTree:
    """Immutable rooted type tree. Build with :func:`parse_ontology`."""

    paths: tuple[str, ...]
    parent: tuple[int, ...]  # parent[ROOT] == -1
    children: tuple[tuple[int, ...], ...]
    level: tuple[int, ...]
    other_augmented: bool = False
    _index: dict = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "_index", {p: i for i, p in enumerate(self.paths)})

    @classmethod
    def from_paths(cls, paths: Iterable[str], other_augmented: bool = False) -> "TypeTree":
        """Build from an ancestor-closed collection of canonical paths."""
        ordered = sorted(set(paths) | {SEP})
        index = {p: i for i, p in enumerate(ordered)}
        parent, level = [], []
        kids: list[list[int]] = [[] for _ in ordered]
        for i, p in enumerate(ordered):
            segs = split_path(p)
            level.append(len(segs))
            if not segs:
                parent.append(-1)
                continue
            par = index[join_path(segs[:-1])]
            parent.append(par)
            kids[par].append(i)
        return cls(
            paths=tuple(ordered),
            parent=tuple(parent),
            children=tuple(tuple(k) for k in kids),
            level=tuple(level),
            other_augmented=other_augmented,
        )

    def __len__(self) -> int:
        return len(self.paths)

    @property
    def depth(self) -> int:
        return max(self.level)

    def index(self, path: str) -> int:
        try:
            return self._index[path]
        except KeyError:
            # tolerate trailing slash / whitespace variants
            try:
                return self._index[join_path(split_path(path))]
            except (KeyError, OntologyError):
                raise UnknownTypeError(path) from None

    def __contains__(self, path: str) -> bool:
        try:
            self.index(path)
        except UnknownTypeError:
            return False
        return True

    def path(self, node: int) -> str:
        return self.paths[node]

    def siblings(self, node: int) -> tuple[int, ...]:
        if node == ROOT:
            return ()
        return tuple(c for c in self.children[self.parent[node]] if c != node)

    def ancestors(self, node: int) -> list[int]:
        """Proper ancestors of ``node``, nearest first, ENTITY excluded."""
        out = []
        node = self.parent[node]
        while node > ROOT:
            out.append(node)
            node = self.parent[node]
        return out

    def is_other(self, node: int) -> bool:
        return node != ROOT and self.paths[node].rsplit(SEP, 1)[-1] == OTHER

    def other_child(self, node: int) -> int | None:
        for c in self.children[node]:
            if self.is_other(c):
                return c
        return None

    def nodes_at_level(self, lev: int) -> list[int]:
        return [i for i, v in enumerate(self.level) if v == lev]

    def fingerprint(self) -> str:
        """Hash of the node ordering; used to pair checkpoints with ontologies."""
        h = hashlib.sha256("\n".join(self.paths).encode("utf-8"))
        return h.hexdigest()

    def labels_to_paths(self, labels: Iterable[int]) -> list[str]:
        return sorted(self.paths[i] for i in labels)


def parse_ontology(lines: Iterable[str]) -> TypeTree:
    """Parse type paths (one per line) into a tree rooted at ENTITY.

    Blank lines and ``#`` comments are skipped; duplicates are merged and every
    ancestor prefix is added.
    """
    closed: set[str] = set()
    for lineno, raw in enumerate(lines, start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        segs = split_path(line, lineno)
        if not segs:
            raise OntologyError(f"the root '/' is implicit and cannot be listed (line {lineno})")
        if OTHER in segs:
            raise OntologyError(f"reserved segment {OTHER!r} in {line!r} (line {lineno})")
        for j in range(1, len(segs) + 1):
            closed.add(join_path(segs[:j]))
    if not closed:
        raise OntologyError("ontology contains no types")
    return TypeTree.from_paths(closed)


def load_ontology(path) -> TypeTree:
    with open(path, encoding="utf-8") as fh:
        return parse_ontology(fh)


def augment_other(tree: TypeTree) -> TypeTree:
    """Give every node that has children an extra ``<other>`` child."""
    if tree.other_augmented:
        raise AugmentationError("tree already carries OTHER nodes")
    extra = [
        join_path(split_path(tree.paths[i]) + (OTHER,))
        for i, kids in enumerate(tree.children)
        if kids
    ]
    return TypeTree.from_paths(list(tree.paths) + extra, other_augmented=True)


def build_tree(lines: Iterable[str], mode: str) -> TypeTree:
    """Parse and, under the exclusive interpretation, augment with OTHER."""
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}, got {mode!r}")
    tree = parse_ontology(lines)
    return augment_other(tree) if mode == EXCLUSIVE else tree


def normalize_labels(tree: TypeTree, raw: Iterable[str], mode: str) -> frozenset[int]:
    """Map raw gold paths to an ancestor-closed label set.

    Under ``exclusive`` every label with children in the tree but none among
    the labels also gets its ``<other>`` child.
    """
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}, got {mode!r}")
    given = {tree.index(p) for p in raw}
    given.discard(ROOT)
    labels = set(given)
    for y in given:
        labels.update(tree.ancestors(y))
    if len(labels) != len(given):
        logger.debug("completed %d missing ancestor label(s)", len(labels) - len(given))
    if mode == EXCLUSIVE:
        if not tree.other_augmented:
            raise ContractError("exclusive mode needs an OTHER-augmented tree")
        for y in list(labels):
            if tree.children[y] and not labels.intersection(tree.children[y]):
                labels.add(tree.other_child(y))
    return frozenset(labels)


def is_ancestor_closed(tree: TypeTree, labels: Iterable[int]) -> bool:
    labels = set(labels)
    return all(tree.parent[y] == ROOT or tree.parent[y] in labels for y in labels)
