"""Seedable synthetic data: a tagged corpus generator and a simulated tagger
ensemble with controlled, independent error processes.

The corpus has a Zipfian vocabulary, per-word ambiguity classes, peaked
first-order tag transitions, and tag-correlated word shapes (suffixes,
capitals, digits, hyphens) so both context and unknown-word features carry
signal.
"""

from __future__ import annotations

import string
from dataclasses import dataclass

import numpy as np

from .corpus import Tag, TaggedCorpus, TaggerMatrix, align_outputs

TAG_NAMES = (
    "ATI", "NN", "NNS", "VB", "VBD", "IN", "JJ", "RB", "CC", "PP3", "CS", "DT",
    "NP", "AT", "MD", "CD", "BEZ", "HV", "TO", "WDT", "ABN", "QL", "WPR", "NPT",
)
_SHAPED = {"NP": "cap", "NPT": "cap", "CD": "digit"}


@dataclass
class CorpusSpec:
    n_tokens: int = 20000
    n_tags: int = 12
    n_words: int = 3000
    zipf_s: float = 1.1
    transition_alpha: float = 0.25
    min_len: int = 5
    max_len: int = 25


def _tag_names(n: int) -> list[Tag]:
    if n <= len(TAG_NAMES):
        return list(TAG_NAMES[:n])
    return list(TAG_NAMES) + [f"X{i:02d}" for i in range(n - len(TAG_NAMES))]


def generate_corpus(spec: CorpusSpec | None = None, seed: int = 0, **overrides) -> TaggedCorpus:
    spec = spec or CorpusSpec()
    for k, v in overrides.items():
        setattr(spec, k, v)
    rng = np.random.default_rng(seed)
    tags = _tag_names(spec.n_tags)
    K = len(tags)

    # row K is the utterance-start state
    trans = rng.dirichlet(np.full(K, spec.transition_alpha), size=K + 1)

    suffixes = {}
    letters = list(string.ascii_lowercase)
    used = set()
    for t in tags:
        opts = []
        while len(opts) < 2:
            s = "".join(rng.choice(letters, size=2))
            if s not in used:
                used.add(s)
                opts.append(s)
        suffixes[t] = opts

    # ambiguity classes: 1 tag (60%), 2 (30%), 3 (10%)
    sizes = rng.choice([1, 2, 3], size=spec.n_words, p=[0.6, 0.3, 0.1])
    zipf = 1.0 / np.arange(1, spec.n_words + 1) ** spec.zipf_s
    words, classes = [], []
    seen = set()
    for i in range(spec.n_words):
        cls = list(rng.choice(K, size=min(sizes[i], K), replace=False))
        primary = tags[cls[0]]
        while True:
            stem = "".join(rng.choice(letters, size=int(rng.integers(2, 6))))
            w = stem + suffixes[primary][int(rng.integers(2))]
            shape = _SHAPED.get(primary)
            if shape == "cap":
                w = w.capitalize()
            elif shape == "digit":
                w = str(int(rng.integers(1, 999))) + w[:2]
            if rng.random() < 0.03:
                w = w[:2] + "-" + w[2:]
            if w not in seen:
                seen.add(w)
                break
        words.append(w)
        prefs = rng.dirichlet(np.ones(len(cls)) * 0.7)
        classes.append(dict(zip(cls, prefs)))

    emit_words = [[] for _ in range(K)]
    emit_p = [[] for _ in range(K)]
    for i, cls in enumerate(classes):
        for k, pref in cls.items():
            emit_words[k].append(i)
            emit_p[k].append(zipf[i] * pref)
    # every tag must be able to emit something
    for k in range(K):
        if not emit_words[k]:
            emit_words[k].append(int(rng.integers(spec.n_words)))
            emit_p[k].append(1.0)
    emit_p = [np.asarray(p) / np.sum(p) for p in emit_p]

    utts = []
    total = 0
    while total < spec.n_tokens:
        n = int(rng.integers(spec.min_len, spec.max_len + 1))
        n = min(n, spec.n_tokens - total) or 1
        state = K
        utt = []
        for _ in range(n):
            k = int(rng.choice(K, p=trans[state]))
            w = words[emit_words[k][int(rng.choice(len(emit_words[k]), p=emit_p[k]))]]
            utt.append((w, tags[k]))
            state = k
        utts.append(utt)
        total += n
    return TaggedCorpus.from_lists(utts)


def simulate_columns(
    benchmark: TaggedCorpus,
    accuracies: list[float],
    seed: int = 0,
    confusion_alpha: float = 0.3,
) -> list[list[list[Tag]]]:
    """One output column per target accuracy.

    Tagger i errs on exactly round((1 - acc_i) * n) positions drawn
    independently of the other taggers; a wrong tag is drawn from a
    tagger-specific confusion distribution over the other tags, so each
    tagger has systematic error habits.
    """
    rng = np.random.default_rng(seed)
    gold = benchmark.flat_tags()
    n = len(gold)
    tagset = sorted(set(gold))
    if len(tagset) < 2:
        raise ValueError("need at least two distinct gold tags to inject errors")
    index = {t: k for k, t in enumerate(tagset)}
    K = len(tagset)
    columns = []
    for acc in accuracies:
        if not 0.0 <= acc <= 1.0:
            raise ValueError(f"accuracy {acc} outside [0, 1]")
        confusion = rng.dirichlet(np.full(K - 1, confusion_alpha), size=K)
        n_err = int(round((1.0 - acc) * n))
        err_pos = rng.choice(n, size=n_err, replace=False)
        out = list(gold)
        draws = rng.random(n_err)
        for pos, u in zip(err_pos, draws):
            g = index[gold[pos]]
            others = [k for k in range(K) if k != g]
            cdf = np.cumsum(confusion[g])
            j = int(np.searchsorted(cdf, u * cdf[-1], side="right"))
            out[pos] = tagset[others[min(j, K - 2)]]
        columns.append(benchmark_shape(benchmark, out))
    return columns


def benchmark_shape(benchmark: TaggedCorpus, flat: list[Tag]) -> list[list[Tag]]:
    out, pos = [], 0
    for utt in benchmark.utterances:
        out.append(flat[pos:pos + len(utt)])
        pos += len(utt)
    return out


def synthetic_ensemble(
    n_tokens: int,
    accuracies: list[float],
    seed: int = 0,
    tagger_ids: list[str] | None = None,
    n_tags: int = 12,
) -> TaggerMatrix:
    """Benchmark corpus plus simulated columns, aligned into one matrix."""
    bench = generate_corpus(seed=seed, n_tokens=n_tokens, n_tags=n_tags)
    cols = simulate_columns(bench, accuracies, seed=seed + 1)
    ids = tagger_ids or default_ids(len(accuracies))
    return align_outputs(bench, cols, ids)


def default_ids(n: int) -> list[str]:
    base = ["T", "R", "M", "E"]
    if n <= len(base):
        return base[:n]
    return [f"C{i}" for i in range(n)]


def halve(matrix: TaggerMatrix) -> tuple[TaggerMatrix, TaggerMatrix]:
    """Alternate utterances into (tune, test)."""
    n = len(matrix.utterances)
    return (
        matrix.select_utterances(range(0, n, 2)),
        matrix.select_utterances(range(1, n, 2)),
    )
