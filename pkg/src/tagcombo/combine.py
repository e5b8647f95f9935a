"""Run any combination method over a Tune / Test pair of tagger matrices."""

from __future__ import annotations

from .corpus import Tag, TaggerMatrix
from .pairwise import train_pair_table, vote_tagpair
from .stacker import StackVariant, predict_stack_mbl, predict_stack_tree, train_stack_mbl, train_stack_tree
from .tree import DEFAULT_CF
from .voting import (
    compute_weight_table,
    row_rng,
    vote_majority,
    vote_precision_recall,
    vote_tag_precision,
    vote_tot_precision,
)

VOTING_METHODS = ("majority", "totprec", "tagprec", "precrec")
METHODS = VOTING_METHODS + ("tagpair", "stack-mbl", "stack-tree")


def combine(
    method: str,
    tune: TaggerMatrix | None,
    test: TaggerMatrix,
    seed: int = 0,
    variant: str = "tags",
    prune_cf: float | None = DEFAULT_CF,
    min_pair_count: int = 1,
) -> list[Tag]:
    """Flat list of combined tags, one per ``test`` row.

    Tie-breaks for row r draw from a generator seeded by (seed, r).
    """
    if method not in METHODS:
        raise ValueError(f"unknown method {method!r}; choose from {', '.join(METHODS)}")
    if method != "majority":
        if tune is None:
            raise ValueError(f"method {method!r} needs a Tune matrix")
        if tuple(tune.tagger_ids) != tuple(test.tagger_ids):
            raise ValueError(f"tagger ids differ: tune {tune.tagger_ids} vs test {test.tagger_ids}")
    rows = test.rows
    if method == "majority":
        return [vote_majority(r.suggestions, row_rng(seed, k)) for k, r in enumerate(rows)]
    if method in VOTING_METHODS:
        table = compute_weight_table(tune)
        vote = {"totprec": vote_tot_precision, "tagprec": vote_tag_precision, "precrec": vote_precision_recall}[method]
        return [vote(r.suggestions, table, row_rng(seed, k)) for k, r in enumerate(rows)]
    if method == "tagpair":
        table = train_pair_table(tune, min_pair_count)
        return [vote_tagpair(r.suggestions, table, row_rng(seed, k)) for k, r in enumerate(rows)]
    v = StackVariant(variant)
    if method == "stack-mbl":
        return predict_stack_mbl(train_stack_mbl(tune, v), test, v)
    return predict_stack_tree(train_stack_tree(tune, v, prune_cf), test, v)
