"""Simple voting combiners (Majority, TotPrecision, TagPrecision,
Precision-Recall) and the Tune-derived weight table they share."""

from __future__ import annotations

import random
from collections import Counter, defaultdict
from dataclasses import dataclass
from typing import Mapping, Sequence

from .corpus import Tag, TaggerMatrix

# scores within this of the best are tied
SCORE_TOL = 1e-9

_MASK64 = (1 << 64) - 1


def mix_seed(seed: int, row: int) -> int:
    """Per-row seed: splitmix64 finalizer over seed * golden-ratio + row.
    Rows can then be combined in any order with the same tie outcomes."""
    z = (seed * 0x9E3779B97F4A7C15 + row + 1) & _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return z ^ (z >> 31)


def row_rng(seed: int, row: int) -> random.Random:
    return random.Random(mix_seed(seed, row))


def pick_winner(scores: Mapping[Tag, float], rng: random.Random) -> Tag:
    """Argmax; ties broken by a random draw from the sorted winners."""
    if not scores:
        raise ValueError("nothing to choose from")
    best = max(scores.values())
    winners = sorted(t for t, s in scores.items() if s >= best - SCORE_TOL)
    if len(winners) == 1:
        return winners[0]
    return rng.choice(winners)


@dataclass(frozen=True)
class WeightTable:
    tagger_ids: tuple[str, ...]
    accuracy: tuple[float, ...]
    precision: tuple[dict[Tag, float], ...]
    recall: tuple[dict[Tag, float], ...]
    suggested: tuple[dict[Tag, int], ...]
    correct: tuple[dict[Tag, int], ...]
    gold_counts: dict[Tag, int]

    def prec(self, i: int, tag: Tag) -> float:
        return self.precision[i].get(tag, self.accuracy[i])

    def rec(self, i: int, tag: Tag) -> float:
        return self.recall[i].get(tag, self.accuracy[i])

    def permuted(self, order: Sequence[int]) -> "WeightTable":
        pick = lambda xs: tuple(xs[k] for k in order)  # noqa: E731
        return WeightTable(
            pick(self.tagger_ids), pick(self.accuracy), pick(self.precision),
            pick(self.recall), pick(self.suggested), pick(self.correct), self.gold_counts,
        )


def compute_weight_table(matrix: TaggerMatrix) -> WeightTable:
    matrix.require_gold()
    n = len(matrix.tagger_ids)
    suggested = [Counter() for _ in range(n)]
    correct = [Counter() for _ in range(n)]
    gold_counts: Counter = Counter()
    for row in matrix.rows:
        gold_counts[row.gold] += 1
        for i, s in enumerate(row.suggestions):
            suggested[i][s] += 1
            if s == row.gold:
                correct[i][s] += 1
    total = len(matrix)
    acc = tuple(sum(c.values()) / total if total else 0.0 for c in correct)
    prec = tuple({t: correct[i][t] / k for t, k in suggested[i].items()} for i in range(n))
    rec = tuple({t: correct[i][t] / k for t, k in gold_counts.items()} for i in range(n))
    return WeightTable(
        tuple(matrix.tagger_ids), acc, prec, rec,
        tuple(dict(c) for c in suggested), tuple(dict(c) for c in correct), dict(gold_counts),
    )


def majority_scores(suggestions: Sequence[Tag]) -> dict[Tag, float]:
    return dict(Counter(suggestions))


def tot_precision_scores(suggestions: Sequence[Tag], table: WeightTable) -> dict[Tag, float]:
    scores: dict[Tag, float] = defaultdict(float)
    for i, s in enumerate(suggestions):
        scores[s] += table.accuracy[i]
    return dict(scores)


def tag_precision_scores(suggestions: Sequence[Tag], table: WeightTable) -> dict[Tag, float]:
    scores: dict[Tag, float] = defaultdict(float)
    for i, s in enumerate(suggestions):
        scores[s] += table.prec(i, s)
    return dict(scores)


def precision_recall_scores(suggestions: Sequence[Tag], table: WeightTable) -> dict[Tag, float]:
    """Each tagger adds its precision on its own tag, and 1 - its recall on
    every other suggested tag."""
    suggested = set(suggestions)
    scores = {t: 0.0 for t in suggested}
    for i, s in enumerate(suggestions):
        scores[s] += table.prec(i, s)
        for t in suggested:
            if t != s:
                scores[t] += 1.0 - table.rec(i, t)
    return scores


def vote_majority(suggestions: Sequence[Tag], rng: random.Random) -> Tag:
    if not suggestions:
        raise ValueError("no suggestions")
    return pick_winner(majority_scores(suggestions), rng)


def vote_tot_precision(suggestions: Sequence[Tag], table: WeightTable, rng: random.Random) -> Tag:
    return pick_winner(tot_precision_scores(suggestions, table), rng)


def vote_tag_precision(suggestions: Sequence[Tag], table: WeightTable, rng: random.Random) -> Tag:
    return pick_winner(tag_precision_scores(suggestions, table), rng)


def vote_precision_recall(suggestions: Sequence[Tag], table: WeightTable, rng: random.Random) -> Tag:
    return pick_winner(precision_recall_scores(suggestions, table), rng)
