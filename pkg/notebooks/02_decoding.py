"""
Decoding with the parent as threshold
=====================================

A type is emitted when its score beats its parent's. Children are visited
breadth first, and at most k_l children per parent survive at level l.
"""

# %%
import numpy as np

from hiertype.decoder import hier_type_dec
from hiertype.ontology import parse_ontology

tree = parse_ontology(["/person/artist/singer", "/person/artist/actor", "/person/doctor",
                       "/location/city", "/organization"])
scores = {
    "/": 0.0,
    "/location": 0.8, "/location/city": 0.1,
    "/organization": -1.0,
    "/person": 1.5, "/person/artist": 2.0, "/person/doctor": 1.9,
    "/person/artist/actor": 2.5, "/person/artist/singer": 2.4,
}

# %%
# Unbounded: every node whose whole ancestor chain is increasing.
print(tree.labels_to_paths(hier_type_dec(tree, scores)))

# %%
# Single path: one child per parent on every level.
print(tree.labels_to_paths(hier_type_dec(tree, scores, (1, 1, 1))))

# %%
# Two top-level types, then single children below them.
print(tree.labels_to_paths(hier_type_dec(tree, scores, (2, 1, 1))))

# %%
# The output is always closed under ancestors, whatever the scores.
rng = np.random.default_rng(0)
for _ in range(3):
    F = rng.normal(size=len(tree))
    print(tree.labels_to_paths(hier_type_dec(tree, F, (2, 2, 1))))
