"""TagPair: every tagger pair votes its Tune-estimated distribution over the
correct tag given the two tags the pair suggested."""

from __future__ import annotations

import random
from collections import Counter, defaultdict
from dataclasses import dataclass
from itertools import combinations
from typing import Sequence

from .corpus import Tag, TaggerMatrix
from .voting import pick_winner, vote_majority


@dataclass(frozen=True)
class PairTable:
    tagger_ids: tuple[str, ...]
    pair_counts: dict[tuple[int, int, Tag, Tag], dict[Tag, int]]
    single_counts: dict[tuple[int, Tag], dict[Tag, int]]
    min_pair_count: int = 1

    def pair_dist(self, i: int, j: int, t1: Tag, t2: Tag) -> dict[Tag, float] | None:
        if i > j:
            i, j, t1, t2 = j, i, t2, t1
        c = self.pair_counts.get((i, j, t1, t2))
        if not c:
            return None
        n = sum(c.values())
        if n < self.min_pair_count:
            return None
        return {t: k / n for t, k in c.items()}

    def single_dist(self, i: int, t: Tag) -> dict[Tag, float] | None:
        c = self.single_counts.get((i, t))
        if not c:
            return None
        n = sum(c.values())
        return {x: k / n for x, k in c.items()}

    def contribution(self, i: int, j: int, si: Tag, sj: Tag) -> dict[Tag, float]:
        """Pair distribution if observed; otherwise the equal mix of the two
        single-tagger distributions (unseen halves contribute nothing)."""
        d = self.pair_dist(i, j, si, sj)
        if d is not None:
            return d
        out: dict[Tag, float] = defaultdict(float)
        for k, s in ((i, si), (j, sj)):
            single = self.single_dist(k, s)
            if single:
                for t, p in single.items():
                    out[t] += 0.5 * p
        return dict(out)

    def with_min_pair_count(self, k: int) -> "PairTable":
        return PairTable(self.tagger_ids, self.pair_counts, self.single_counts, k)


def train_pair_table(matrix: TaggerMatrix, min_pair_count: int = 1) -> PairTable:
    matrix.require_gold()
    n = len(matrix.tagger_ids)
    if n < 2:
        raise ValueError("TagPair needs at least two taggers")
    pairs: dict = defaultdict(Counter)
    singles: dict = defaultdict(Counter)
    for row in matrix.rows:
        s = row.suggestions
        for i in range(n):
            singles[(i, s[i])][row.gold] += 1
        for i, j in combinations(range(n), 2):
            pairs[(i, j, s[i], s[j])][row.gold] += 1
    return PairTable(
        tuple(matrix.tagger_ids),
        {k: dict(v) for k, v in pairs.items()},
        {k: dict(v) for k, v in singles.items()},
        min_pair_count,
    )


def tagpair_scores(suggestions: Sequence[Tag], table: PairTable) -> dict[Tag, float]:
    scores: dict[Tag, float] = defaultdict(float)
    for i, j in combinations(range(len(suggestions)), 2):
        for t, p in table.contribution(i, j, suggestions[i], suggestions[j]).items():
            scores[t] += p
    return {t: s for t, s in scores.items() if s > 0}


def vote_tagpair(suggestions: Sequence[Tag], table: PairTable, rng: random.Random) -> Tag:
    if len(suggestions) != len(table.tagger_ids):
        raise ValueError(f"{len(suggestions)} suggestions for a {len(table.tagger_ids)}-tagger table")
    scores = tagpair_scores(suggestions, table)
    if not scores:
        return vote_majority(suggestions, rng)
    return pick_winner(scores, rng)


def format_pair_distribution(table: PairTable, first: str, second: str, t1: Tag, t2: Tag) -> str:
    """Text rendering of P(correct tag | first said t1, second said t2)."""
    ids = list(table.tagger_ids)
    i, j = ids.index(first), ids.index(second)
    d = table.pair_dist(i, j, t1, t2)
    if d is None:
        return f"pair ({first}={t1}, {second}={t2}) not observed\n"
    key = (i, j, t1, t2) if i < j else (j, i, t2, t1)
    n = sum(table.pair_counts[key].values())
    lines = [f"{first}={t1} {second}={t2} (n={n})"]
    for t in sorted(d):
        lines.append(f"{t}\t{d[t]:.4f}")
    return "\n".join(lines) + "\n"
