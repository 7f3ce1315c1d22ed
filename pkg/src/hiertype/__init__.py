"""Hierarchical entity typing as multi-level learning to rank over a type tree.

Training ranks each gold type above its parent and its parent above the
non-gold siblings, with per-level margins and a ComplEx subtyping constraint
on the type embeddings. Prediction walks the tree from the root and keeps a
child only when it outscores its parent, so outputs always respect the
hierarchy.
"""
from .decoder import hier_type_dec, strip_synthetic
from .encoder import EncoderParams, MentionInstance, encode, encode_backward, hashed_vector
from .metrics import EvalReport, evaluate, macro_micro_f1, per_level_accuracy, strict_accuracy
from .model import HierTypingModel, load_checkpoint, save_checkpoint
from .objective import (
    MarginSchedule,
    ObjectiveWeights,
    complex_subtype_score,
    default_margins,
    flat_rank_loss,
    hier_rank_loss,
    subtype_rel_loss,
    total_objective,
)
from .ontology import (
    OTHER,
    TypeTree,
    augment_other,
    build_tree,
    normalize_labels,
    parse_ontology,
)
from .scorer import ScorerParams, score_all, score_backward
from .trainer import Hyperparams, OptimizerState, adamw_step, sweep_branching, train

__version__ = "0.1.0"
