"""
Type ontologies and label normalization
=======================================

A type ontology is a list of slash paths. Parsing adds every prefix, hangs the
forest under the ENTITY root "/" and numbers nodes in path order.
"""

# %%
from hiertype.ontology import build_tree, normalize_labels, parse_ontology

lines = [
    "/person/artist/singer",
    "/person/artist/actor",
    "/person/doctor",
    "/location/city",
    "/organization",
]
tree = parse_ontology(lines)
for i, path in enumerate(tree.paths):
    print(i, "  " * tree.level[i] + path)

# %%
# A mention labelled "/person/artist" has a partial path. Under the undefined
# reading we just close it under ancestors; its subtype is unknown.
print(tree.labels_to_paths(normalize_labels(tree, ["/person/artist"], "undefined")))

# %%
# Under the exclusive reading "/person" means "a person, but none of the listed
# kinds". The tree gets an <other> child under every internal node and the
# label set is completed with it.
xtree = build_tree(lines, "exclusive")
print(len(tree), "->", len(xtree), "nodes")
print(xtree.labels_to_paths(normalize_labels(xtree, ["/person"], "exclusive")))
print(xtree.labels_to_paths(normalize_labels(xtree, ["/person/artist/singer"], "exclusive")))

# %%
# Checkpoints remember the node ordering through a fingerprint of the paths.
print(tree.fingerprint()[:16], xtree.fingerprint()[:16])
