import math
import random

import pytest

from oracles import brute_force_decode, random_corpus, recount_raw
from tagcombo.corpus import TaggedCorpus, build_lexicon
from tagcombo.mbl import train_proposer
from tagcombo.synth import generate_corpus
from tagcombo.trigram import (
    BOUNDARY,
    DecodeError,
    lexical_candidates,
    sequence_score,
    train_trigram,
    viterbi_decode,
    viterbi_tag,
)


def test_single_observation():
    m = train_trigram(TaggedCorpus.from_lists([[("a", "X"), ("b", "Y")]]), lambdas=(1, 0, 0))
    assert m.context_prob("Y", "X", BOUNDARY) == 1.0
    assert m.context_prob("X", BOUNDARY, BOUNDARY) == 1.0


def test_lambdas_validated():
    c = TaggedCorpus.from_lists([[("a", "X")]])
    with pytest.raises(ValueError):
        train_trigram(c, lambdas=(0.5, 0.5, 0.5))
    with pytest.raises(ValueError):
        train_trigram(c, lambdas=(1.2, -0.1, -0.1))


def test_raw_trigram_mode_reproduces_relative_frequencies():
    c = generate_corpus(seed=11, n_tokens=500, n_tags=6)
    m = train_trigram(c, lambdas=(1, 0, 0))
    tri, _, _ = recount_raw(c, BOUNDARY)
    hist = {}
    for (a, b, _), n in tri.items():
        hist[(a, b)] = hist.get((a, b), 0) + n
    for (a, b, t), n in tri.items():
        assert m.context_prob(t, b, a) == pytest.approx(n / hist[(a, b)], abs=1e-12)


def test_interpolation_matches_recount():
    c = generate_corpus(seed=12, n_tokens=500, n_tags=6)
    lam = (0.6, 0.3, 0.1)
    m = train_trigram(c, lambdas=lam)
    tri, bi, uni = recount_raw(c, BOUNDARY)
    total = sum(uni.values())
    tags = sorted(uni)
    hists = {(a, b) for a, b, _ in tri}
    for a, b in hists:
        n3 = sum(v for (x, y, _), v in tri.items() if (x, y) == (a, b))
        n2 = sum(v for (x, _), v in bi.items() if x == b)
        dist = {}
        for t in tags:
            expect = lam[0] * tri[(a, b, t)] / n3 + lam[1] * bi[(b, t)] / n2 + lam[2] * uni[t] / total
            assert m.context_prob(t, b, a) == pytest.approx(expect, abs=1e-12)
            dist[t] = m.context_prob(t, b, a)
        assert sum(dist.values()) == pytest.approx(1.0, abs=1e-9)


def test_unseen_history_still_normalized():
    c = generate_corpus(seed=13, n_tokens=300, n_tags=6)
    m = train_trigram(c)
    d = m.context_distribution("NOPE", "NADA")
    assert sum(d.values()) == pytest.approx(1.0, abs=1e-9)


def test_unambiguous_tokens_force_sequence():
    c = TaggedCorpus.from_lists([[("the", "AT"), ("dog", "NN"), ("runs", "VBZ")], [("dog", "NN"), ("the", "AT")]])
    m = train_trigram(c)
    assert viterbi_tag(m, ["the", "dog", "the", "runs"]) == ["AT", "NN", "AT", "VBZ"]


def test_uniform_model_is_deterministic():
    utts = [[("a", t1), ("b", t2)] for t1 in "XYZ" for t2 in "XYZ"]
    m = train_trigram(TaggedCorpus.from_lists(utts), lambdas=(0, 0, 1))
    first = viterbi_tag(m, ["a", "b", "a"])
    for _ in range(5):
        assert viterbi_tag(m, ["a", "b", "a"]) == first
    # all scores tie: the lexicographic tie rule picks X everywhere
    assert first == ["X", "X", "X"]


def test_unknown_word_without_proposer_fails():
    m = train_trigram(TaggedCorpus.from_lists([[("a", "X")]]))
    with pytest.raises(DecodeError, match="zzz"):
        viterbi_tag(m, ["a", "zzz"])


def test_proposer_used_for_unknown_words():
    m = train_trigram(TaggedCorpus.from_lists([[("a", "X"), ("b", "Y")]]))
    seen = []

    def proposer(tokens, i):
        seen.append(tokens[i])
        return {"Y": 1.0}

    assert viterbi_tag(m, ["a", "q"], proposer) == ["X", "Y"]
    assert seen == ["q"]


def test_mbl_proposer_end_to_end():
    c = generate_corpus(seed=21, n_tokens=3000)
    lex = build_lexicon(c)
    prop = train_proposer(c, lex)
    m = train_trigram(c, lexicon=lex)
    tokens = ["Qzzyxab", "unheardof", c.utterances[0][0][0]]
    tags = viterbi_tag(m, tokens, prop)
    assert len(tags) == 3
    for i in range(2):
        assert tags[i] in prop(tokens, i)


def random_instance(rng, max_tags=5, max_len=6):
    n_tags = rng.randint(1, max_tags)
    corpus = random_corpus(rng, rng.randint(3, 30), n_tags, rng.randint(2, 6))
    l3 = rng.random()
    l2 = rng.random() * (1 - l3)
    model = train_trigram(corpus, lambdas=(l3, l2, 1 - l3 - l2))
    vocab = sorted(model.lexicon.entries) + ["unk1", "unk2"]
    tokens = [rng.choice(vocab) for _ in range(rng.randint(1, max_len))]
    tagset = model.tagset
    probs = {}

    def proposer(toks, i):
        if toks[i] not in probs:
            chosen = rng.sample(tagset, rng.randint(1, len(tagset)))
            w = [rng.random() + 0.01 for _ in chosen]
            probs[toks[i]] = {t: x / sum(w) for t, x in zip(chosen, w)}
        return probs[toks[i]]

    return model, tokens, proposer


def check_against_enumeration(model, tokens, proposer):
    cands = lexical_candidates(model, tokens, proposer)
    seq, score = viterbi_decode(cands, model.context_prob, model.boundary)
    scores, seqs = brute_force_decode(cands, model.context_prob, model.boundary)
    best = scores.max()
    assert score == pytest.approx(best, abs=1e-9)
    assert sequence_score(seq, cands, model.context_prob) == pytest.approx(best, abs=1e-9)
    top = [s for s, v in zip(seqs, scores) if v >= best - 1e-9]
    if len(top) == 1:
        assert seq == top[0]
    else:
        assert seq in top


def test_viterbi_equals_enumeration_five_tags():
    rng = random.Random(5)
    for _ in range(200):
        check_against_enumeration(*random_instance(rng, max_tags=5))


def test_viterbi_on_generated_sentences():
    c = generate_corpus(seed=3, n_tokens=2000, n_tags=5)
    lex = build_lexicon(c)
    m = train_trigram(c, lexicon=lex)
    prop = train_proposer(c, lex)
    for utt in c.utterances[:80]:
        tokens = [w for w, _ in utt][:6]
        check_against_enumeration(m, tokens, prop)


def test_score_is_log_space_product():
    m = train_trigram(TaggedCorpus.from_lists([[("a", "X"), ("b", "Y")], [("a", "Y")]]))
    cands = lexical_candidates(m, ["a", "b"], None)
    s = sequence_score(["X", "Y"], cands, m.context_prob)
    expect = math.log(0.5 * m.context_prob("X", BOUNDARY, BOUNDARY)) + math.log(1.0 * m.context_prob("Y", "X", BOUNDARY))
    assert s == pytest.approx(expect)
