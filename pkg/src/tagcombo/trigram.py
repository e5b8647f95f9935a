"""Tagger T: interpolated trigram context model with Viterbi decoding.

Lexical term is P(t|w) from the Train lexicon for known words; unknown
words get their tag distribution from a pluggable proposer (by default the
memory-based unknown-word case base).
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field
from typing import Callable, Mapping, Sequence

from .corpus import Lexicon, Tag, TaggedCorpus, build_lexicon

BOUNDARY = "<S>"
DEFAULT_LAMBDAS = (0.7, 0.2, 0.1)

# proposer(tokens, i) -> {tag: prob} for the unknown token tokens[i]
Proposer = Callable[[Sequence[str], int], Mapping[Tag, float]]


class DecodeError(ValueError):
    pass


@dataclass
class TrigramModel:
    lexicon: Lexicon
    lambdas: tuple[float, float, float]
    tri: dict[tuple[Tag, Tag], Counter]
    bi: dict[Tag, Counter]
    uni: Counter
    boundary: Tag = BOUNDARY
    _tri_n: dict = field(default_factory=dict, repr=False)
    _bi_n: dict = field(default_factory=dict, repr=False)
    _uni_n: int = 0
    _cache: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        l3, l2, l1 = self.lambdas
        if min(self.lambdas) < 0 or abs(l3 + l2 + l1 - 1.0) > 1e-9:
            raise ValueError(f"interpolation weights must be >= 0 and sum to 1, got {self.lambdas}")
        self._tri_n = {h: sum(c.values()) for h, c in self.tri.items()}
        self._bi_n = {h: sum(c.values()) for h, c in self.bi.items()}
        self._uni_n = sum(self.uni.values())

    @property
    def tagset(self) -> list[Tag]:
        return sorted(self.uni)

    def raw(self, tag: Tag, prev1: Tag, prev2: Tag) -> tuple[float, float, float]:
        """Relative frequencies (f3, f2, f1) of ``tag`` after history
        (prev2, prev1).  An unseen history borrows the next lower order."""
        f1 = self.uni.get(tag, 0) / self._uni_n if self._uni_n else 0.0
        n2 = self._bi_n.get(prev1)
        f2 = self.bi[prev1].get(tag, 0) / n2 if n2 else f1
        n3 = self._tri_n.get((prev2, prev1))
        f3 = self.tri[(prev2, prev1)].get(tag, 0) / n3 if n3 else f2
        return f3, f2, f1

    def context_prob(self, tag: Tag, prev1: Tag, prev2: Tag) -> float:
        """Interpolated P(tag | prev1, prev2)."""
        key = (tag, prev1, prev2)
        p = self._cache.get(key)
        if p is None:
            f3, f2, f1 = self.raw(tag, prev1, prev2)
            l3, l2, l1 = self.lambdas
            p = l3 * f3 + l2 * f2 + l1 * f1
            self._cache[key] = p
        return p

    def context_distribution(self, prev1: Tag, prev2: Tag) -> dict[Tag, float]:
        return {t: self.context_prob(t, prev1, prev2) for t in self.tagset}

    def with_lambdas(self, lambdas) -> "TrigramModel":
        return TrigramModel(self.lexicon, tuple(lambdas), self.tri, self.bi, self.uni, self.boundary)

    def __getstate__(self):
        state = dict(self.__dict__)
        state["_cache"] = {}
        return state


def train_trigram(train: TaggedCorpus, lambdas=DEFAULT_LAMBDAS, lexicon: Lexicon | None = None) -> TrigramModel:
    if not train.utterances:
        raise ValueError("empty training corpus")
    tri: dict[tuple[Tag, Tag], Counter] = {}
    bi: dict[Tag, Counter] = {}
    uni: Counter = Counter()
    for tags in train.tags():
        p2 = p1 = BOUNDARY
        for t in tags:
            tri.setdefault((p2, p1), Counter())[t] += 1
            bi.setdefault(p1, Counter())[t] += 1
            uni[t] += 1
            p2, p1 = p1, t
    return TrigramModel(lexicon or build_lexicon(train), tuple(lambdas), tri, bi, uni)


def lexical_candidates(model: TrigramModel, tokens: Sequence[str], proposer: Proposer | None) -> list[dict[Tag, float]]:
    """Per-position {tag: P(tag|word)} restricted to nonzero tags."""
    out = []
    for i, w in enumerate(tokens):
        if model.lexicon.known(w):
            dist = model.lexicon.distribution(w)
        elif proposer is not None:
            dist = {t: p for t, p in proposer(tokens, i).items() if p > 0}
        else:
            dist = {}
        if not dist:
            raise DecodeError(f"no candidate tags for token {w!r} at position {i}")
        out.append(dist)
    return out


def viterbi_decode(
    candidates: Sequence[Mapping[Tag, float]],
    context_prob: Callable[[Tag, Tag, Tag], float],
    boundary: Tag = BOUNDARY,
) -> tuple[list[Tag], float]:
    """Second-order Viterbi over candidate sets.

    Maximizes sum_i log P(t_i|w_i) + log P(t_i|t_{i-1},t_{i-2}); returns the
    best tag sequence and its log score.  States are (t_{i-1}, t_i) pairs;
    ties at each backpointer, and among final states, go to the
    lexicographically smallest tag.
    """
    if not candidates:
        raise DecodeError("empty token sequence")
    neg = -math.inf

    def log(p):
        return math.log(p) if p > 0 else neg

    # column: {(prev, cur): score}, backpointers: {(prev, cur): prevprev}
    col: dict[tuple[Tag, Tag], float] = {}
    for t in sorted(candidates[0]):
        col[(boundary, t)] = log(candidates[0][t]) + log(context_prob(t, boundary, boundary))
    back: list[dict[tuple[Tag, Tag], Tag]] = [{}]
    prev_tags = [boundary]
    for i in range(1, len(candidates)):
        cur_tags = sorted(candidates[i])
        new: dict[tuple[Tag, Tag], float] = {}
        bp: dict[tuple[Tag, Tag], Tag] = {}
        p1_tags = sorted(candidates[i - 1])
        for t in cur_tags:
            lex = log(candidates[i][t])
            for p1 in p1_tags:
                best, arg = neg, None
                for p2 in prev_tags:
                    s = col.get((p2, p1), neg)
                    if s == neg:
                        continue
                    s += log(context_prob(t, p1, p2))
                    if s > best:
                        best, arg = s, p2
                if arg is None:
                    # every path into (p1, t) has zero probability; keep a
                    # deterministic backpointer so decoding still succeeds
                    arg = prev_tags[0]
                new[(p1, t)] = best + lex
                bp[(p1, t)] = arg
        col = new
        back.append(bp)
        prev_tags = p1_tags

    final = max(sorted(col), key=lambda k: col[k])
    # max() keeps the first maximum of the sorted keys
    score = col[final]
    seq = [final[1]]
    state = final
    for i in range(len(candidates) - 1, 0, -1):
        p2 = back[i][state]
        seq.append(state[0])
        state = (p2, state[0])
    seq.reverse()
    return seq, score


def viterbi_tag(model: TrigramModel, tokens: Sequence[str], proposer: Proposer | None = None) -> list[Tag]:
    cands = lexical_candidates(model, tokens, proposer)
    seq, _ = viterbi_decode(cands, model.context_prob, model.boundary)
    return seq


def sequence_score(
    tags: Sequence[Tag],
    candidates: Sequence[Mapping[Tag, float]],
    context_prob: Callable[[Tag, Tag, Tag], float],
    boundary: Tag = BOUNDARY,
) -> float:
    """Log score of one complete tag sequence under the decoding objective."""
    s = 0.0
    p2 = p1 = boundary
    for i, t in enumerate(tags):
        p = candidates[i].get(t, 0.0) * context_prob(t, p1, p2)
        if p <= 0:
            return -math.inf
        s += math.log(p)
        p2, p1 = p1, t
    return s


def tag_corpus(model: TrigramModel, sentences: Sequence[Sequence[str]], proposer: Proposer | None = None) -> list[list[Tag]]:
    return [viterbi_tag(model, s, proposer) for s in sentences]
