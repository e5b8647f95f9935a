"""Measurement: accuracy, per-tag precision/recall, baselines, agreement
patterns, oracle bounds, McNemar's test and the all-subsets sweep."""

from __future__ import annotations

import math
import random
from collections import Counter
from dataclasses import dataclass, field
from itertools import combinations
from typing import Sequence

from .combine import combine
from .corpus import Lexicon, Tag, TaggerMatrix

UNKNOWN_RANDOM_POOL = 20


def accuracy(pred: Sequence[Tag], gold: Sequence[Tag]) -> float:
    if len(pred) != len(gold):
        raise ValueError(f"length mismatch: {len(pred)} predictions vs {len(gold)} gold tags")
    if not gold:
        raise ValueError("empty sequences")
    return sum(p == g for p, g in zip(pred, gold)) / len(gold)


def per_tag_scores(pred: Sequence[Tag], gold: Sequence[Tag]) -> dict[Tag, dict[str, float]]:
    """precision / recall / support per tag (tags seen in either sequence)."""
    if len(pred) != len(gold):
        raise ValueError("length mismatch")
    tp: Counter = Counter()
    npred = Counter(pred)
    ngold = Counter(gold)
    for p, g in zip(pred, gold):
        if p == g:
            tp[p] += 1
    out = {}
    for t in sorted(set(npred) | set(ngold)):
        out[t] = {
            "precision": tp[t] / npred[t] if npred[t] else 0.0,
            "recall": tp[t] / ngold[t] if ngold[t] else 0.0,
            "support": ngold[t],
        }
    return out


# -- baselines ----------------------------------------------------------------

def baseline_random(lexicon: Lexicon, tokens: Sequence[str], rng: random.Random) -> list[Tag]:
    """Uniform draw from the token's Train tag set; unknown tokens draw from
    the most frequent Train tags."""
    pool = lexicon.tags_by_frequency()[:UNKNOWN_RANDOM_POOL]
    return [rng.choice(lexicon.tags_of(w) or pool) for w in tokens]


def baseline_lexprob(lexicon: Lexicon, tokens: Sequence[str]) -> list[Tag]:
    """Modal Train tag; unknown tokens get the globally most frequent tag."""
    default = lexicon.tags_by_frequency()[0]
    return [lexicon.most_likely(w) or default for w in tokens]


# -- agreement ----------------------------------------------------------------

CATEGORIES = (
    "all_correct",
    "majority_correct",
    "correct_present_no_majority",
    "minority_correct",
    "all_wrong",
)


def agreement_category(suggestions: Sequence[Tag], gold: Tag) -> str:
    """Classify one row by the size of the correct tag's bloc relative to
    the largest competing bloc."""
    blocs = Counter(suggestions)
    own = blocs.get(gold, 0)
    if own == 0:
        return "all_wrong"
    if own == len(suggestions):
        return "all_correct"
    rival = max(c for t, c in blocs.items() if t != gold)
    if own > rival:
        return "majority_correct"
    if own == rival:
        return "correct_present_no_majority"
    return "minority_correct"


@dataclass(frozen=True)
class AgreementBreakdown:
    all_correct: float
    majority_correct: float
    correct_present_no_majority: float
    minority_correct: float
    all_wrong: float
    counts: dict[str, int] = field(default_factory=dict, compare=False)

    def __post_init__(self):
        total = sum(self.as_dict().values())
        if abs(total - 1.0) > 1e-9:
            raise ValueError(f"agreement fractions sum to {total}, not 1")

    def as_dict(self) -> dict[str, float]:
        return {c: getattr(self, c) for c in CATEGORIES}

    @classmethod
    def from_percentages(cls, max_rounding: float = 0.05, **pcts: float) -> "AgreementBreakdown":
        """Build from rounded published percentages, rescaled to sum to 1.

        Rounded figures rarely add up to exactly 100; anything further off
        than ``max_rounding`` points is rejected rather than rescaled."""
        missing = set(CATEGORIES) - set(pcts)
        if missing:
            raise ValueError(f"missing categories: {sorted(missing)}")
        total = sum(pcts[c] for c in CATEGORIES)
        if abs(total - 100.0) > max_rounding:
            raise ValueError(f"percentages sum to {total}, too far from 100")
        return cls(**{c: pcts[c] / total for c in CATEGORIES})


def agreement_breakdown(matrix: TaggerMatrix) -> AgreementBreakdown:
    gold = matrix.gold()
    counts = Counter(agreement_category(r.suggestions, g) for r, g in zip(matrix.rows, gold))
    n = len(gold)
    return AgreementBreakdown(**{c: counts[c] / n for c in CATEGORIES}, counts={c: counts[c] for c in CATEGORIES})


def oracle_bounds(breakdown: AgreementBreakdown | TaggerMatrix) -> tuple[float, float]:
    """(some tagger correct, correct tag not outvoted)."""
    if isinstance(breakdown, TaggerMatrix):
        breakdown = agreement_breakdown(breakdown)
    any_correct = 1.0 - breakdown.all_wrong
    not_outvoted = breakdown.all_correct + breakdown.majority_correct + breakdown.correct_present_no_majority
    return any_correct, not_outvoted


# -- significance -------------------------------------------------------------

@dataclass(frozen=True)
class McNemarResult:
    b: int
    c: int
    chi_square: float
    p: float


def chi2_sf_1df(x: float) -> float:
    """Survival function of chi-square with one degree of freedom."""
    if x <= 0:
        return 1.0
    return math.erfc(math.sqrt(x / 2.0))


def mcnemar(pred_a: Sequence[Tag], pred_b: Sequence[Tag], gold: Sequence[Tag], continuity: bool = True) -> McNemarResult:
    """b = A right & B wrong, c = A wrong & B right."""
    if not (len(pred_a) == len(pred_b) == len(gold)):
        raise ValueError("length mismatch")
    b = c = 0
    for x, y, g in zip(pred_a, pred_b, gold):
        if x == g and y != g:
            b += 1
        elif x != g and y == g:
            c += 1
    return mcnemar_from_counts(b, c, continuity)


def mcnemar_from_counts(b: int, c: int, continuity: bool = True) -> McNemarResult:
    if b + c == 0:
        return McNemarResult(b, c, 0.0, 1.0)
    diff = abs(b - c)
    if continuity:
        diff = max(diff - 1, 0)
    chi = diff * diff / (b + c)
    return McNemarResult(b, c, chi, chi2_sf_1df(chi))


def format_p(p: float) -> str:
    if p < 1e-12:
        return "<1e-12"
    return f"{p:.4g}"


# -- subset sweep -------------------------------------------------------------

@dataclass(frozen=True)
class SweepRow:
    name: str
    members: tuple[str, ...]
    accuracy: float
    component_average: float | None
    best_component: str | None
    error_reduction: float | None

    @property
    def increase(self) -> float | None:
        if self.component_average is None:
            return None
        return self.accuracy - self.component_average


def subset_name(members: Sequence[str]) -> str:
    if all(len(m) == 1 for m in members):
        return "".join(members)
    return "+".join(members)


def sweep_subsets(test: TaggerMatrix, tune: TaggerMatrix, method: str = "tagpair", seed: int = 0, **options) -> list[SweepRow]:
    """Every non-empty tagger subset: singletons scored raw, larger subsets
    combined with ``method``.  Rows come sorted by accuracy."""
    n = len(test.tagger_ids)
    if n < 2:
        raise ValueError("sweep needs at least two taggers")
    gold = test.gold()
    single = {tid: accuracy(test.column(k), gold) for k, tid in enumerate(test.tagger_ids)}
    rows = []
    for size in range(1, n + 1):
        for idx in combinations(range(n), size):
            members = tuple(test.tagger_ids[k] for k in idx)
            if size == 1:
                rows.append(SweepRow(members[0], members, single[members[0]], None, None, None))
                continue
            pred = combine(method, tune.subset(idx), test.subset(idx), seed=seed, **options)
            acc = accuracy(pred, gold)
            avg = sum(single[m] for m in members) / size
            best = max(members, key=lambda m: (single[m], -members.index(m)))
            err_best = 1.0 - single[best]
            red = (err_best - (1.0 - acc)) / err_best if err_best > 0 else 0.0
            rows.append(SweepRow(subset_name(members), members, acc, avg, best, red))
    rows.sort(key=lambda r: (r.accuracy, r.name))
    return rows


def format_sweep(rows: Sequence[SweepRow], fmt: str = "text") -> str:
    if fmt == "machine":
        lines = []
        for r in rows:
            lines.append(f"{r.name}.accuracy: {r.accuracy:.6f}")
            if r.component_average is not None:
                lines.append(f"{r.name}.component_average: {r.component_average:.6f}")
                lines.append(f"{r.name}.increase: {r.increase:.6f}")
                lines.append(f"{r.name}.best_component: {r.best_component}")
                lines.append(f"{r.name}.error_reduction: {r.error_reduction:.6f}")
        return "\n".join(lines) + "\n"
    out = [f"{'subset':<12}{'acc%':>8}  {'vs avg':<16}{'err red (best)':<16}"]
    for r in rows:
        if r.component_average is None:
            out.append(f"{r.name:<12}{100 * r.accuracy:8.2f}  {'-':<16}{'-':<16}")
        else:
            inc = f"{100 * r.component_average:.2f}{100 * r.increase:+.2f}"
            red = f"{100 * r.error_reduction:.1f} ({r.best_component})"
            out.append(f"{r.name:<12}{100 * r.accuracy:8.2f}  {inc:<16}{red:<16}")
    return "\n".join(out) + "\n"


# -- reports ------------------------------------------------------------------

@dataclass
class EvalReport:
    accuracy: float
    correct: int
    total: int
    per_tag: dict[Tag, dict[str, float]]
    mcnemar: McNemarResult | None = None
    against_accuracy: float | None = None
    manifest: dict = field(default_factory=dict)

    def render(self, fmt: str = "text") -> str:
        if fmt == "machine":
            return self._machine()
        return self._text()

    def _machine(self) -> str:
        lines = [
            f"accuracy: {self.accuracy:.6f}",
            f"correct: {self.correct}",
            f"tokens: {self.total}",
        ]
        if self.mcnemar is not None:
            lines += [
                f"against.accuracy: {self.against_accuracy:.6f}",
                f"mcnemar.b: {self.mcnemar.b}",
                f"mcnemar.c: {self.mcnemar.c}",
                f"mcnemar.chi_square: {self.mcnemar.chi_square:.4f}",
                f"mcnemar.p: {format_p(self.mcnemar.p)}",
            ]
        for t, s in self.per_tag.items():
            lines.append(f"tag.{t}.precision: {s['precision']:.6f}")
            lines.append(f"tag.{t}.recall: {s['recall']:.6f}")
            lines.append(f"tag.{t}.support: {s['support']}")
        for k in sorted(self.manifest):
            lines.append(f"manifest.{k}: {self.manifest[k]}")
        return "\n".join(lines) + "\n"

    def _text(self) -> str:
        lines = [f"accuracy  {100 * self.accuracy:.2f}%  ({self.correct}/{self.total})"]
        if self.mcnemar is not None:
            m = self.mcnemar
            lines.append(f"against   {100 * self.against_accuracy:.2f}%")
            lines.append(f"McNemar   b={m.b} c={m.c} chi2={m.chi_square:.2f} p={format_p(m.p)}")
        lines.append("")
        lines.append(f"{'tag':<10}{'prec':>8}{'rec':>8}{'support':>9}")
        for t, s in self.per_tag.items():
            lines.append(f"{t:<10}{100 * s['precision']:8.2f}{100 * s['recall']:8.2f}{s['support']:9d}")
        return "\n".join(lines) + "\n"


def evaluate(pred: Sequence[Tag], gold: Sequence[Tag], against: Sequence[Tag] | None = None,
             continuity: bool = True, manifest: dict | None = None) -> EvalReport:
    acc = accuracy(pred, gold)
    report = EvalReport(
        accuracy=acc,
        correct=sum(p == g for p, g in zip(pred, gold)),
        total=len(gold),
        per_tag=per_tag_scores(pred, gold),
        manifest=dict(manifest or {}),
    )
    if against is not None:
        report.mcnemar = mcnemar(pred, against, gold, continuity)
        report.against_accuracy = accuracy(against, gold)
    return report


def format_breakdown(b: AgreementBreakdown) -> str:
    labels = {
        "all_correct": "All Taggers Correct",
        "majority_correct": "Majority Correct",
        "correct_present_no_majority": "Correct Present, No Majority",
        "minority_correct": "Minority Correct",
        "all_wrong": "All Taggers Wrong",
    }
    lines = [f"{labels[c]:<32}{100 * v:6.2f}" for c, v in b.as_dict().items()]
    any_c, not_out = oracle_bounds(b)
    lines.append(f"{'oracle: any correct':<32}{100 * any_c:6.2f}")
    lines.append(f"{'oracle: not outvoted':<32}{100 * not_out:6.2f}")
    return "\n".join(lines) + "\n"
