"""Memory-based learning: case bases with Information-Gain feature weights,
nearest-set classification, tagger M and the unknown-word proposer.
"""

from __future__ import annotations

import math
from collections import Counter, defaultdict
from dataclasses import dataclass, field
from typing import Hashable, Iterable, Mapping, NamedTuple, Sequence

import numpy as np

from .corpus import Lexicon, Tag, TaggedCorpus, build_lexicon

BOUNDARY = "<B>"
UNKNOWN_CLASS = "<UNK>"
# distances within this of the minimum belong to the nearest set
DIST_TOL = 1e-9

KNOWN_SCHEMA = ("tag-1", "tag-2", "word", "amb+1", "amb+2")
UNKNOWN_SCHEMA = ("tag-1", "amb+1", "suf-3", "suf-2", "suf-1", "cap", "hyphen", "digit")


class EmptyCaseBaseError(ValueError):
    pass


class Case(NamedTuple):
    features: tuple
    label: Tag


def entropy(counts: Iterable[int]) -> float:
    counts = [c for c in counts if c > 0]
    n = sum(counts)
    if n == 0:
        return 0.0
    return -sum(c / n * math.log2(c / n) for c in counts)


def information_gain(features: Sequence[Sequence[Hashable]], labels: Sequence[Tag]) -> list[float]:
    """Per-feature IG in bits: H(labels) - sum_v P(v) H(labels | v)."""
    if not labels:
        raise ValueError("information gain needs at least one case")
    n = len(labels)
    h = entropy(Counter(labels).values())
    arity = len(features[0])
    weights = []
    for f in range(arity):
        by_value: dict = defaultdict(Counter)
        for x, y in zip(features, labels):
            by_value[x[f]][y] += 1
        cond = sum(sum(c.values()) / n * entropy(c.values()) for c in by_value.values())
        weights.append(min(max(h - cond, 0.0), h))
    return weights


@dataclass
class CaseBase:
    """Stored cases plus feature weights.

    Identical feature vectors are pooled; classification works on the pooled
    vectors with a vectorized distance, which is equivalent to a linear scan
    over all cases.
    """

    schema: tuple[str, ...]
    features: list[tuple]
    labels: list[Tag]
    weights: list[float]
    metric: str = "ig"
    tie_counts: dict[Tag, int] | None = None
    _vectors: list[tuple] = field(default_factory=list, repr=False)
    _vector_labels: list[Counter] = field(default_factory=list, repr=False)
    _exact: dict = field(default_factory=dict, repr=False)
    _codes: list[dict] = field(default_factory=list, repr=False)
    _matrix: np.ndarray | None = field(default=None, repr=False)
    _w: np.ndarray | None = field(default=None, repr=False)

    def __post_init__(self):
        if self.metric not in ("overlap", "ig"):
            raise ValueError(f"unknown metric {self.metric!r}")
        if len(self.weights) != len(self.schema):
            raise ValueError("one weight per feature required")
        if not all(math.isfinite(w) and w >= 0 for w in self.weights):
            raise ValueError("weights must be finite and >= 0")
        for x in self.features:
            if len(x) != len(self.schema):
                raise ValueError(f"case arity {len(x)} != schema arity {len(self.schema)}")
        if self.tie_counts is None:
            self.tie_counts = dict(Counter(self.labels))
        self._index()

    def _index(self):
        pooled: dict[tuple, Counter] = {}
        for x, y in zip(self.features, self.labels):
            pooled.setdefault(tuple(x), Counter())[y] += 1
        self._vectors = list(pooled)
        self._vector_labels = [pooled[v] for v in self._vectors]
        self._exact = {v: i for i, v in enumerate(self._vectors)}
        arity = len(self.schema)
        self._codes = [{} for _ in range(arity)]
        m = np.empty((len(self._vectors), arity), dtype=np.int64)
        for r, v in enumerate(self._vectors):
            for f, val in enumerate(v):
                m[r, f] = self._codes[f].setdefault(val, len(self._codes[f]))
        self._matrix = m
        self._w = np.asarray(self.effective_weights(), dtype=np.float64)

    def __getstate__(self):
        state = dict(self.__dict__)
        for k in ("_vectors", "_vector_labels", "_exact", "_codes", "_matrix", "_w"):
            state.pop(k, None)
        return state

    def __setstate__(self, state):
        self.__dict__.update(state)
        self._index()

    def __len__(self):
        return len(self.labels)

    def effective_weights(self) -> list[float]:
        return [1.0] * len(self.schema) if self.metric == "overlap" else list(self.weights)

    def nearest(self, instance: Sequence[Hashable]) -> Counter:
        """Label counts of all cases at minimum distance from ``instance``."""
        if not self.labels:
            raise EmptyCaseBaseError("cannot classify with an empty case base")
        if len(instance) != len(self.schema):
            raise ValueError(f"instance arity {len(instance)} != schema arity {len(self.schema)}")
        key = tuple(instance)
        w = self._w
        if key in self._exact and (len(w) == 0 or w.min() > DIST_TOL):
            return Counter(self._vector_labels[self._exact[key]])
        q = np.array([self._codes[f].get(v, -1) for f, v in enumerate(key)], dtype=np.int64)
        dist = (self._matrix != q) @ w
        rows = np.flatnonzero(dist <= dist.min() + DIST_TOL)
        out: Counter = Counter()
        for r in rows:
            out.update(self._vector_labels[r])
        return out

    def classify(self, instance: Sequence[Hashable]) -> tuple[Tag, dict[Tag, float]]:
        counts = self.nearest(instance)
        return modal_label(counts, self.tie_counts), normalize(counts)


def modal_label(counts: Mapping[Tag, int], tie_counts: Mapping[Tag, int] | None = None) -> Tag:
    """Most frequent label; ties by global frequency, then lexicographic."""
    tie_counts = tie_counts or {}
    return min(counts, key=lambda t: (-counts[t], -tie_counts.get(t, 0), t))


def normalize(counts: Mapping[Tag, float]) -> dict[Tag, float]:
    n = sum(counts.values())
    return {t: c / n for t, c in sorted(counts.items())}


def make_case_base(schema, features, labels, metric="ig", tie_counts=None) -> CaseBase:
    features = [tuple(x) for x in features]
    labels = list(labels)
    if not labels:
        raise EmptyCaseBaseError("no cases")
    weights = information_gain(features, labels)
    return CaseBase(tuple(schema), features, labels, weights, metric, tie_counts)


def case_base_from_cases(schema, cases: Sequence[Case], metric="ig", tie_counts=None) -> CaseBase:
    return make_case_base(schema, [c.features for c in cases], [c.label for c in cases], metric, tie_counts)


def classify(base: CaseBase, instance: Sequence[Hashable]) -> tuple[Tag, dict[Tag, float]]:
    return base.classify(instance)


# -- feature extraction -------------------------------------------------------

def _amb(lexicon: Lexicon, tokens: Sequence[str], i: int) -> str:
    if i >= len(tokens):
        return BOUNDARY
    return lexicon.ambiguity_class(tokens[i]) or UNKNOWN_CLASS


def known_features(lexicon: Lexicon, tokens: Sequence[str], i: int, left: Sequence[Tag]) -> tuple:
    """(tag-1, tag-2, word, amb+1, amb+2); ``left`` holds the already
    disambiguated tags of positions < i."""
    t1 = left[i - 1] if i >= 1 else BOUNDARY
    t2 = left[i - 2] if i >= 2 else BOUNDARY
    return (t1, t2, tokens[i], _amb(lexicon, tokens, i + 1), _amb(lexicon, tokens, i + 2))


def word_shape(token: str) -> tuple:
    """Three suffix letters (padded at the left for short words) and the
    capital / hyphen / digit flags."""
    suf = [BOUNDARY] * max(0, 3 - len(token)) + list(token[-3:])
    return (
        suf[0], suf[1], suf[2],
        any(c.isupper() for c in token),
        "-" in token,
        any(c.isdigit() for c in token),
    )


def unknown_features(lexicon: Lexicon, tokens: Sequence[str], i: int, left_tag: Tag | None) -> tuple:
    return (left_tag if left_tag is not None else BOUNDARY, _amb(lexicon, tokens, i + 1)) + word_shape(tokens[i])


# -- tagger M -----------------------------------------------------------------

UNKNOWN_MAX_FREQ = 2


@dataclass
class UnknownProposer:
    """Tag distributions for words outside the lexicon, from the unknown-word
    case base.  Used as tagger T's proposer: the left tag is not decoded yet
    there, so the lexically most likely tag of the previous token (or the
    proposer's own guess for it) stands in."""

    lexicon: Lexicon
    unknown: CaseBase

    def __call__(self, tokens: Sequence[str], i: int) -> dict[Tag, float]:
        left = None
        if i > 0:
            left = self.lexicon.most_likely(tokens[i - 1])
            if left is None:
                left = modal_label(
                    self.unknown.nearest(unknown_features(self.lexicon, tokens, i - 1, None)),
                    self.unknown.tie_counts,
                )
        return propose_unknown(self, tokens, i, left)


@dataclass
class MemoryTagger:
    lexicon: Lexicon
    known: CaseBase
    unknown: CaseBase

    def tag(self, tokens: Sequence[str]) -> list[Tag]:
        return tag_m(self, self.lexicon, tokens)

    @property
    def proposer(self) -> UnknownProposer:
        return UnknownProposer(self.lexicon, self.unknown)


def _unknown_cases(train: TaggedCorpus, lexicon: Lexicon, max_freq: int | None):
    ux, uy = [], []
    for utt in train.utterances:
        tokens = [w for w, _ in utt]
        tags = [t for _, t in utt]
        for i, (w, t) in enumerate(utt):
            if max_freq is None or lexicon.freq(w) <= max_freq:
                ux.append(unknown_features(lexicon, tokens, i, tags[i - 1] if i else None))
                uy.append(t)
    return ux, uy


def train_unknown_base(train: TaggedCorpus, lexicon: Lexicon, max_freq: int = UNKNOWN_MAX_FREQ) -> CaseBase:
    """Case base over Train tokens of frequency <= ``max_freq``; every token
    if there are none that rare."""
    ux, uy = _unknown_cases(train, lexicon, max_freq)
    if not ux:
        ux, uy = _unknown_cases(train, lexicon, None)
    return make_case_base(UNKNOWN_SCHEMA, ux, uy, "ig", dict(lexicon.total_tag_counts))


def train_proposer(train: TaggedCorpus, lexicon: Lexicon | None = None, max_freq: int = UNKNOWN_MAX_FREQ) -> UnknownProposer:
    lexicon = lexicon or build_lexicon(train)
    return UnknownProposer(lexicon, train_unknown_base(train, lexicon, max_freq))


def train_tagger_m(train: TaggedCorpus, lexicon: Lexicon | None = None, max_unknown_freq: int = UNKNOWN_MAX_FREQ) -> MemoryTagger:
    """Known base from every Train token (gold left tags); unknown base from
    the low-frequency Train tokens."""
    if not train.utterances:
        raise ValueError("empty training corpus")
    lexicon = lexicon or build_lexicon(train)
    kx, ky = [], []
    for utt in train.utterances:
        tokens = [w for w, _ in utt]
        tags = [t for _, t in utt]
        for i, t in enumerate(tags):
            kx.append(known_features(lexicon, tokens, i, tags))
            ky.append(t)
    known = make_case_base(KNOWN_SCHEMA, kx, ky, "ig", dict(lexicon.total_tag_counts))
    return MemoryTagger(lexicon, known, train_unknown_base(train, lexicon, max_unknown_freq))


def tag_m(model: MemoryTagger, lexicon: Lexicon, tokens: Sequence[str]) -> list[Tag]:
    """Left to right; each decision feeds the left context of later ones."""
    out: list[Tag] = []
    for i, w in enumerate(tokens):
        if lexicon.known(w):
            label, _ = model.known.classify(known_features(lexicon, tokens, i, out))
        else:
            label, _ = model.unknown.classify(unknown_features(lexicon, tokens, i, out[i - 1] if i else None))
        out.append(label)
    return out


def propose_unknown(model, tokens: Sequence[str], i: int, left_tag: Tag | None) -> dict[Tag, float]:
    """Distribution over tags for tokens[i] from the unknown-word base of
    ``model`` (anything with ``lexicon`` and ``unknown`` attributes)."""
    _, dist = model.unknown.classify(unknown_features(model.lexicon, tokens, i, left_tag))
    return dist
