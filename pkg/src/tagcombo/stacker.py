"""Stacked second-stage classifiers trained on first-stage tagger output:
memory-based (Tags, Tags+Word, Tags+Context) and decision tree (Tags,
Tags+Context)."""

from __future__ import annotations

from enum import Enum
from typing import Sequence

from .corpus import Tag, TaggerMatrix
from .mbl import BOUNDARY, Case, CaseBase, case_base_from_cases
from .tree import DEFAULT_CF, DecisionTree, train_tree, tree_classify


class StackVariant(str, Enum):
    TAGS = "tags"
    TAGS_WORD = "tags-word"
    TAGS_CONTEXT = "tags-context"


def variant_arity(variant: StackVariant, n_taggers: int) -> int:
    variant = StackVariant(variant)
    return {
        StackVariant.TAGS: n_taggers,
        StackVariant.TAGS_WORD: n_taggers + 1,
        StackVariant.TAGS_CONTEXT: 3 * n_taggers,
    }[variant]


def variant_schema(variant: StackVariant, tagger_ids: Sequence[str]) -> tuple[str, ...]:
    variant = StackVariant(variant)
    if variant is StackVariant.TAGS:
        return tuple(tagger_ids)
    if variant is StackVariant.TAGS_WORD:
        return tuple(tagger_ids) + ("word",)
    return (
        tuple(f"{t}-1" for t in tagger_ids)
        + tuple(tagger_ids)
        + tuple(f"{t}+1" for t in tagger_ids)
    )


def stack_features(matrix: TaggerMatrix, variant: StackVariant) -> list[tuple]:
    """One feature vector per matrix row (gold not required)."""
    variant = StackVariant(variant)
    n = len(matrix.tagger_ids)
    edge = (BOUNDARY,) * n
    out = []
    for utt in matrix.utterances:
        for p, row in enumerate(utt):
            if variant is StackVariant.TAGS:
                out.append(row.suggestions)
            elif variant is StackVariant.TAGS_WORD:
                out.append(row.suggestions + (row.token,))
            else:
                prev = utt[p - 1].suggestions if p > 0 else edge
                nxt = utt[p + 1].suggestions if p + 1 < len(utt) else edge
                out.append(prev + row.suggestions + nxt)
    return out


def build_stack_cases(matrix: TaggerMatrix, variant: StackVariant) -> list[Case]:
    gold = matrix.gold()
    return [Case(x, g) for x, g in zip(stack_features(matrix, variant), gold)]


def disagreement_rate(matrix: TaggerMatrix) -> float:
    """Fraction of rows whose suggestions are not unanimous."""
    if not len(matrix):
        return 0.0
    return sum(1 for r in matrix.rows if len(set(r.suggestions)) > 1) / len(matrix)


def stack_metric(variant: StackVariant) -> str:
    return "ig" if StackVariant(variant) is StackVariant.TAGS_CONTEXT else "overlap"


def train_stack_mbl(matrix: TaggerMatrix, variant: StackVariant) -> CaseBase:
    variant = StackVariant(variant)
    cases = build_stack_cases(matrix, variant)
    return case_base_from_cases(variant_schema(variant, matrix.tagger_ids), cases, stack_metric(variant))


def stack_classify_mbl(base: CaseBase, variant: StackVariant, instance: Sequence) -> Tag:
    if base.metric != stack_metric(variant):
        raise ValueError(f"case base metric {base.metric!r} does not match variant {StackVariant(variant).value}")
    label, _ = base.classify(instance)
    return label


def train_stack_tree(matrix: TaggerMatrix, variant: StackVariant, confidence: float | None = DEFAULT_CF) -> DecisionTree:
    variant = StackVariant(variant)
    return train_tree(build_stack_cases(matrix, variant), confidence, variant=variant)


def predict_stack_mbl(base: CaseBase, matrix: TaggerMatrix, variant: StackVariant) -> list[Tag]:
    return [stack_classify_mbl(base, variant, x) for x in stack_features(matrix, variant)]


def predict_stack_tree(tree: DecisionTree, matrix: TaggerMatrix, variant: StackVariant) -> list[Tag]:
    return [tree_classify(tree, x) for x in stack_features(matrix, variant)]
