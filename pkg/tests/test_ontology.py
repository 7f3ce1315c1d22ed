import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hiertype.ontology import (
    OTHER,
    AugmentationError,
    OntologyError,
    UnknownTypeError,
    augment_other,
    is_ancestor_closed,
    normalize_labels,
    parse_ontology,
)
from oracles import random_tree


def test_prefix_closure_and_levels():
    t = parse_ontology(["/person/artist/singer", "/location"])
    assert set(t.paths) == {"/", "/person", "/person/artist", "/person/artist/singer", "/location"}
    assert t.depth == 3
    assert t.level[t.index("/location")] == 1
    assert t.level[t.index("/person/artist/singer")] == 3
    assert t.parent[0] == -1


def test_empty_segment_is_rejected_with_line_number():
    with pytest.raises(OntologyError, match="line 2"):
        parse_ontology(["/ok", "/a//b"])


def test_comments_blank_lines_and_duplicates():
    t = parse_ontology(["# header", "", "/a/b", "/a/b", "/a"])
    assert t.paths == ("/", "/a", "/a/b")


@pytest.mark.parametrize("line", ["/a/<other>", "/", "noslash"])
def test_reserved_and_malformed_lines(line):
    with pytest.raises(OntologyError):
        parse_ontology([line])


def test_ordering_is_lexicographic_and_deterministic():
    a = parse_ontology(["/z", "/b/c", "/a"])
    b = parse_ontology(["/a", "/z", "/b/c", "/a"])
    assert a.paths == b.paths == tuple(sorted(a.paths))
    assert a.fingerprint() == b.fingerprint()


def test_siblings(tree):
    singer = tree.index("/person/artist/singer")
    actor = tree.index("/person/artist/actor")
    assert tree.siblings(singer) == (actor,)
    assert singer not in tree.siblings(singer)
    assert tree.siblings(0) == ()


def test_augment_only_branch_nodes():
    t = augment_other(parse_ontology(["/person/artist"]))
    assert "/person/<other>" in t
    assert "/<other>" in t
    assert "/person/artist/<other>" not in t
    assert t.other_augmented


def test_augment_twice_is_a_state_error(tree):
    with pytest.raises(AugmentationError):
        augment_other(augment_other(tree))


def test_every_branch_node_has_one_other_child(xtree):
    for y, kids in enumerate(xtree.children):
        if xtree.is_other(y):
            assert not kids
        elif kids:
            assert sum(xtree.is_other(c) for c in kids) == 1


def test_exclusive_adds_other(xtree):
    labels = normalize_labels(xtree, ["/person"], "exclusive")
    assert xtree.labels_to_paths(labels) == ["/person", f"/person/{OTHER}"]


def test_undefined_leaves_partial_paths(tree):
    labels = normalize_labels(tree, ["/person"], "undefined")
    assert tree.labels_to_paths(labels) == ["/person"]


def test_ancestor_closure(tree):
    labels = normalize_labels(tree, ["/person/artist/singer"], "undefined")
    assert tree.labels_to_paths(labels) == ["/person", "/person/artist", "/person/artist/singer"]


def test_exclusive_full_path_gets_no_other(xtree):
    labels = normalize_labels(xtree, ["/person/artist/singer", "/location"], "exclusive")
    assert xtree.labels_to_paths(labels) == [
        "/location", f"/location/{OTHER}", "/person", "/person/artist", "/person/artist/singer"]


def test_unknown_type(tree):
    with pytest.raises(UnknownTypeError, match="/nope"):
        normalize_labels(tree, ["/nope"], "undefined")


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**32 - 1), st.sampled_from(["exclusive", "undefined"]))
def test_tree_and_label_invariants(seed, mode):
    rng = np.random.default_rng(seed)
    t = random_tree(rng, max_nodes=20, max_depth=4)
    if mode == "exclusive":
        t = augment_other(t)
    for y in range(1, len(t)):
        assert y in t.children[t.parent[y]]
        assert t.level[y] == t.level[t.parent[y]] + 1
    real = [y for y in range(1, len(t)) if not t.is_other(y)]
    picks = rng.choice(real, size=min(3, len(real)), replace=False)
    labels = normalize_labels(t, [t.paths[i] for i in picks], mode)
    assert is_ancestor_closed(t, labels)
    if mode == "exclusive":
        for y in labels:
            if t.children[y]:
                assert labels.intersection(t.children[y])
