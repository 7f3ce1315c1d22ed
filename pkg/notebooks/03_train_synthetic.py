"""
Training on a synthetic typing task
===================================

Mention words get hashed vectors that are linearly independent, so every
labelling of them is separable. The model should fit it almost perfectly,
including the partial-path and multi-path classes.
"""

# %%
import time

from hiertype import synthetic as syn
from hiertype.data import VectorResolver, to_instances
from hiertype.decoder import hier_type_dec, strip_synthetic
from hiertype.ontology import build_tree
from hiertype.trainer import Hyperparams, sweep_branching, train

mode = "exclusive"
tree = build_tree(syn.ONTOLOGY, mode)
train_recs, dev_recs = syn.split(syn.make_records(200, seed=0), 40)
resolver = VectorResolver(hashed_dim=32)
train_set = to_instances(train_recs, tree, mode, resolver)
dev_set = to_instances(dev_recs, tree, mode, resolver)
print(len(tree), "nodes,", len(train_set), "train,", len(dev_set), "dev")

# %%
hyper = Hyperparams(alpha=0.15, beta=0.1, lambda_=0.001, p_D=0.0, learning_rate=0.01,
                    batch_size=16, max_epochs=100, patience=10, seed=0, k=[2, 1, 1],
                    d_t=32, d_h=32)
t0 = time.perf_counter()
result = train(train_set, dev_set, tree, hyper)
print(f"{len(result.log)} epochs in {time.perf_counter() - t0:.1f}s, best epoch {result.best_epoch}")
for row in result.log[::3]:
    print(row["epoch"], round(row["train_loss"], 3), round(row["dev_strict"], 3),
          round(row["dev_micro_f1"], 3))

# %%
# A few decoded dev mentions, with and without the synthetic <other> types.
model = result.model
for rec, x in list(zip(dev_recs, dev_set))[:6]:
    out = hier_type_dec(tree, model.scores(x), hyper.k)
    print(rec.labels, "->", tree.labels_to_paths(strip_synthetic(tree, out)),
          "| raw", tree.labels_to_paths(out))

# %%
# Branching factors picked on dev micro F1.
best, scores = sweep_branching(dev_set, model, [(1, 1, 1), (2, 1, 1), (2, 2, 1), (3, 1, 1)])
for k, f1 in sorted(scores.items()):
    print(k, round(f1, 4))
print("best", best)
