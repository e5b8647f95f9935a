"""C4.5-style decision trees over symbolic features: multiway splits on the
best gain ratio, pessimistic (upper confidence bound) error pruning."""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field
from typing import Hashable, Sequence

from scipy.stats import beta

from .mbl import Case, entropy, modal_label

DEFAULT_CF = 0.25
MIN_SPLIT = 2
MAX_FEATURE_VALUES = 1000


class UnsupportedVariantError(ValueError):
    pass


@dataclass
class Node:
    label: str
    counts: dict[str, int]
    feature: int | None = None
    children: dict[Hashable, "Node"] = field(default_factory=dict)
    default: Hashable | None = None

    @property
    def is_leaf(self) -> bool:
        return self.feature is None

    @property
    def n(self) -> int:
        return sum(self.counts.values())

    def errors(self) -> int:
        return self.n - self.counts.get(self.label, 0)


@dataclass
class DecisionTree:
    root: Node
    arity: int
    confidence: float | None

    def classify(self, instance: Sequence[Hashable]) -> str:
        return tree_classify(self, instance)

    def node_count(self) -> int:
        return count_nodes(self.root)

    def leaf_count(self) -> int:
        return sum(1 for n in iter_nodes(self.root) if n.is_leaf)


def iter_nodes(node: Node):
    stack = [node]
    while stack:
        n = stack.pop()
        yield n
        stack.extend(n.children.values())


def count_nodes(node: Node) -> int:
    return sum(1 for _ in iter_nodes(node))


def split_stats(features, labels, idx, f) -> tuple[float, float, dict]:
    """(information gain, split information, value -> case indices)."""
    parts: dict = {}
    for k in idx:
        parts.setdefault(features[k][f], []).append(k)
    n = len(idx)
    base = entropy(Counter(labels[k] for k in idx).values())
    cond = 0.0
    split = 0.0
    for ks in parts.values():
        p = len(ks) / n
        cond += p * entropy(Counter(labels[k] for k in ks).values())
        split -= p * math.log2(p)
    return max(base - cond, 0.0), split, parts


def _sort_key(v):
    return (type(v).__name__, repr(v))


def train_tree(
    cases: Sequence[Case],
    confidence: float | None = DEFAULT_CF,
    variant=None,
    min_split: int = MIN_SPLIT,
    max_values: int = MAX_FEATURE_VALUES,
) -> DecisionTree:
    """Grow a tree on ``cases`` and, unless ``confidence`` is None, prune it.

    Candidate features are those not yet tested on the path with at least
    two values at the node; among the candidates whose gain is at least the
    mean candidate gain, the best gain ratio wins (lowest index on ties).
    """
    from .stacker import StackVariant

    if variant is not None and StackVariant(variant) is StackVariant.TAGS_WORD:
        raise UnsupportedVariantError(
            "the tags-word variant is not supported by the decision tree learner "
            "(too many distinct feature values)"
        )
    if not cases:
        raise ValueError("no training cases")
    if confidence is not None and not 0.0 < confidence < 1.0:
        raise ValueError(f"pruning confidence must be in (0, 1), got {confidence}")
    features = [tuple(c.features) for c in cases]
    labels = [c.label for c in cases]
    arity = len(features[0])
    for f in range(arity):
        nvals = len({x[f] for x in features})
        if nvals > max_values:
            raise UnsupportedVariantError(
                f"feature {f} has {nvals} distinct values (limit {max_values})"
            )
    tie_counts = Counter(labels)

    def grow(idx: list[int], used: frozenset) -> Node:
        counts = Counter(labels[k] for k in idx)
        node = Node(modal_label(counts, tie_counts), dict(counts))
        if len(counts) == 1 or len(idx) < min_split:
            return node
        stats = {}
        for f in range(arity):
            if f in used:
                continue
            if len({features[k][f] for k in idx}) < 2:
                continue
            stats[f] = split_stats(features, labels, idx, f)
        if not stats:
            return node
        mean_gain = sum(s[0] for s in stats.values()) / len(stats)
        best_f, best_ratio = None, -1.0
        for f in sorted(stats):
            gain, split, _ = stats[f]
            if gain < mean_gain - 1e-12:
                continue
            ratio = gain / split
            if ratio > best_ratio + 1e-12:
                best_f, best_ratio = f, ratio
        parts = stats[best_f][2]
        node.feature = best_f
        for v in sorted(parts, key=_sort_key):
            node.children[v] = grow(parts[v], used | {best_f})
        node.default = max(sorted(parts, key=_sort_key), key=lambda v: len(parts[v]))
        return node

    root = grow(list(range(len(cases))), frozenset())
    tree = DecisionTree(root, arity, confidence)
    if confidence is not None:
        prune(tree.root, confidence)
    return tree


def pessimistic_errors(n: int, e: int, cf: float) -> float:
    """n times the upper ``cf`` confidence limit of the binomial error rate
    after observing e errors in n cases (Clopper-Pearson bound)."""
    if n == 0:
        return 0.0
    if e >= n:
        return float(n)
    return n * float(beta.ppf(1.0 - cf, e + 1, n - e))


def prune(node: Node, cf: float) -> float:
    """Bottom-up pruning; returns the node's estimated error count."""
    as_leaf = pessimistic_errors(node.n, node.errors(), cf)
    if node.is_leaf:
        return as_leaf
    subtree = sum(prune(c, cf) for c in node.children.values())
    if as_leaf <= subtree + 1e-9:
        node.feature = None
        node.children = {}
        node.default = None
        return as_leaf
    return subtree


def tree_classify(tree: DecisionTree, instance: Sequence[Hashable]) -> str:
    if len(instance) != tree.arity:
        raise ValueError(f"instance arity {len(instance)} != tree arity {tree.arity}")
    node = tree.root
    while not node.is_leaf:
        child = node.children.get(instance[node.feature])
        node = child if child is not None else node.children[node.default]
    return node.label


def max_depth(node: Node) -> int:
    if node.is_leaf:
        return 0
    return 1 + max(max_depth(c) for c in node.children.values())
