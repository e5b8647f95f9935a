import itertools
import random

import pytest

from oracles import linear_scan_nearest, modal_with_ties
from tagcombo.corpus import MatrixRow, TaggerMatrix
from tagcombo.mbl import BOUNDARY, Case
from tagcombo.stacker import (
    StackVariant,
    build_stack_cases,
    disagreement_rate,
    predict_stack_mbl,
    stack_classify_mbl,
    stack_features,
    train_stack_mbl,
    train_stack_tree,
    variant_arity,
)
from tagcombo.synth import halve, synthetic_ensemble
from tagcombo.tree import (
    UnsupportedVariantError,
    pessimistic_errors,
    train_tree,
    tree_classify,
)


def small_matrix():
    utt1 = tuple(MatrixRow(f"w{i}", ("A", "A", "B", "A"), "A") for i in range(6))
    utt2 = tuple(MatrixRow(f"v{i}", ("B", "C", "B", "B"), "B") for i in range(4))
    return TaggerMatrix(("T", "R", "M", "E"), (utt1, utt2))


def test_tags_cases_shape():
    cases = build_stack_cases(small_matrix(), "tags")
    assert len(cases) == 10
    assert all(len(c.features) == 4 for c in cases)
    assert cases[0] == Case(("A", "A", "B", "A"), "A")


def test_variant_arities():
    m = small_matrix()
    for v in StackVariant:
        feats = stack_features(m, v)
        assert {len(x) for x in feats} == {variant_arity(v, 4)}
    assert stack_features(m, "tags-word")[0][-1] == "w0"


def test_tags_context_edges():
    feats = stack_features(small_matrix(), "tags-context")
    assert feats[0][:4] == (BOUNDARY,) * 4
    assert feats[0][4:8] == ("A", "A", "B", "A")
    assert feats[5][8:] == (BOUNDARY,) * 4  # last token of utterance 1
    assert feats[6][:4] == (BOUNDARY,) * 4  # first token of utterance 2
    assert feats[1][:4] == ("A", "A", "B", "A")


def test_disagreement_rate():
    m = small_matrix()
    assert disagreement_rate(m) == 1.0
    unanimous = TaggerMatrix(("a", "b"), ((MatrixRow("x", ("A", "A"), "A"), MatrixRow("y", ("A", "B"), "A")),))
    assert disagreement_rate(unanimous) == 0.5


def test_stack_mbl_exact_and_unanimous():
    rows = [(("X", "X", "X", "X"), "X")] * 5 + [(("X", "Y", "Y", "Z"), "Y")]
    m = TaggerMatrix(tuple("TRME"), (tuple(MatrixRow("w", s, g) for s, g in rows),))
    base = train_stack_mbl(m, "tags")
    assert base.metric == "overlap"
    assert stack_classify_mbl(base, "tags", ("X", "Y", "Y", "Z")) == "Y"
    assert stack_classify_mbl(base, "tags", ("X", "X", "X", "X")) == "X"


def test_stack_mbl_metrics_by_variant():
    m = synthetic_ensemble(1000, [0.8, 0.9, 0.85], seed=1)
    assert train_stack_mbl(m, "tags-word").metric == "overlap"
    assert train_stack_mbl(m, "tags-context").metric == "ig"
    with pytest.raises(ValueError):
        stack_classify_mbl(train_stack_mbl(m, "tags"), "tags-context", ("A",) * 9)


@pytest.mark.parametrize("variant", list(StackVariant))
def test_stack_mbl_equals_linear_scan(variant):
    m = synthetic_ensemble(1500, [0.8, 0.85, 0.9, 0.92], seed=2)
    tune, test = halve(m)
    base = train_stack_mbl(tune, variant)
    queries = stack_features(test, variant)[:200]
    for q in queries:
        counts = linear_scan_nearest(base.features, base.labels, base.effective_weights(), q)
        assert stack_classify_mbl(base, variant, q) == modal_with_ties(counts, base.tie_counts)


@pytest.mark.parametrize("variant", list(StackVariant))
def test_stack_mbl_fits_consistent_training_data(variant):
    m = synthetic_ensemble(1500, [0.8, 0.85, 0.9], seed=3)
    feats = stack_features(m, variant)
    gold = m.gold()
    # keep only rows whose feature vector always has the same gold tag
    seen = {}
    for x, g in zip(feats, gold):
        seen.setdefault(x, set()).add(g)
    keep = [k for k, x in enumerate(feats) if len(seen[x]) == 1]
    base = train_stack_mbl(m, variant)
    for k in keep:
        assert stack_classify_mbl(base, variant, feats[k]) == gold[k]


def test_tree_single_feature():
    cases = [Case(("a", "p"), "X"), Case(("a", "q"), "X"), Case(("b", "p"), "Y"), Case(("b", "q"), "Y")] * 3
    t = train_tree(cases, None)
    assert t.root.feature == 0
    assert all(c.is_leaf for c in t.root.children.values())
    assert all(tree_classify(t, c.features) == c.label for c in cases)


def test_tree_single_leaf():
    t = train_tree([Case(("a",), "X"), Case(("b",), "X")], None)
    assert t.root.is_leaf and t.node_count() == 1


def xor_cases(copies=5):
    return [Case((a, b), "T" if a != b else "F") for a in (0, 1) for b in (0, 1) for _ in range(copies)]


def test_xor_fit_unpruned():
    cases = xor_cases()
    t = train_tree(cases, None)
    assert all(tree_classify(t, c.features) == c.label for c in cases)


def noisy_xor(seed=0, n=400, flip=0.1):
    rng = random.Random(seed)
    cases = []
    for _ in range(n):
        a, b = rng.randint(0, 1), rng.randint(0, 1)
        label = "T" if a != b else "F"
        if rng.random() < flip:
            label = "F" if label == "T" else "T"
        cases.append(Case((a, b, rng.randint(0, 3), rng.randint(0, 3)), label))
    return cases


def test_pruning_shrinks_noisy_tree():
    cases = noisy_xor()
    full = train_tree(cases, None)
    pruned = train_tree(cases, 0.25)
    assert pruned.node_count() < full.node_count()
    # the XOR structure survives pruning
    for a, b in itertools.product((0, 1), repeat=2):
        assert tree_classify(pruned, (a, b, 0, 0)) == ("T" if a != b else "F")


@pytest.mark.parametrize("seed", range(5))
def test_pruning_never_grows_and_agrees_off_pruned_paths(seed):
    cases = noisy_xor(seed, n=300, flip=0.15)
    full = train_tree(cases, None)
    for cf in (0.05, 0.25, 0.5, 0.75):
        pruned = train_tree(cases, cf)
        assert pruned.node_count() <= full.node_count()
        for x in itertools.product((0, 1), (0, 1), range(5), range(5)):
            a, b = full.root, pruned.root
            while not b.is_leaf:
                v = x[b.feature]
                key = v if v in b.children else b.default
                a, b = a.children[key], b.children[key]
            if a.is_leaf:
                assert tree_classify(full, x) == tree_classify(pruned, x)


def test_constant_feature_never_chosen():
    rng = random.Random(1)
    cases = [Case(("k", rng.choice("ab"), rng.choice("xyz")), rng.choice("PQ")) for _ in range(100)]
    t = train_tree(cases, None)
    stack = [t.root]
    while stack:
        n = stack.pop()
        assert n.feature != 0
        stack.extend(n.children.values())


def test_paths_test_each_feature_once():
    cases = noisy_xor(3)
    t = train_tree(cases, None)

    def walk(node, used):
        if node.is_leaf:
            return
        assert node.feature not in used
        assert node.feature < t.arity
        for c in node.children.values():
            walk(c, used | {node.feature})

    walk(t.root, frozenset())


def test_exhaustive_table_lookup():
    rng = random.Random(5)
    space = list(itertools.product("ABC", repeat=4))
    table = {x: rng.choice("XYZ") for x in space}
    t = train_tree([Case(x, y) for x, y in table.items()], None)
    assert all(tree_classify(t, x) == table[x] for x in space)


def test_unseen_value_takes_default_branch():
    cases = [Case(("a",), "X")] * 5 + [Case(("b",), "Y")] * 2
    t = train_tree(cases, None)
    assert t.root.default == "a"
    assert tree_classify(t, ("zzz",)) == "X"
    assert tree_classify(t, ("zzz",)) == tree_classify(t, ("zzz",))


def test_tags_word_rejected():
    m = synthetic_ensemble(500, [0.8, 0.9], seed=4)
    with pytest.raises(UnsupportedVariantError, match="tags-word"):
        train_stack_tree(m, "tags-word")
    with pytest.raises(UnsupportedVariantError):
        train_tree(build_stack_cases(m, "tags-word"), variant=StackVariant.TAGS_WORD)


def test_feature_cardinality_guard():
    cases = [Case((str(i),), "X" if i % 2 else "Y") for i in range(50)]
    with pytest.raises(UnsupportedVariantError):
        train_tree(cases, None, max_values=20)


def test_pessimistic_errors():
    # zero observed errors: n * (1 - cf ** (1 / n))
    assert pessimistic_errors(10, 0, 0.25) == pytest.approx(10 * (1 - 0.25 ** 0.1))
    assert pessimistic_errors(0, 0, 0.25) == 0.0
    assert pessimistic_errors(4, 4, 0.25) == 4.0
    assert pessimistic_errors(100, 10, 0.25) > 10


def test_tree_stacker_on_ensemble():
    m = synthetic_ensemble(4000, [0.85, 0.9, 0.92, 0.94], seed=6)
    tune, test = halve(m)
    for v in ("tags", "tags-context"):
        tree = train_stack_tree(tune, v)
        preds = [tree_classify(tree, x) for x in stack_features(test, v)]
        acc = sum(p == g for p, g in zip(preds, test.gold())) / len(test)
        assert acc > 0.9


def test_predict_stack_mbl_length():
    m = synthetic_ensemble(800, [0.85, 0.9], seed=7)
    tune, test = halve(m)
    assert len(predict_stack_mbl(train_stack_mbl(tune, "tags"), test, "tags")) == len(test)
