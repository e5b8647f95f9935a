"""Tagged corpora: parsing, splitting, lexicon and tagger-output alignment.

The single interchange format is the vertical file: one ``token<TAB>tag``
per line, utterances separated by one blank line.  Tag-column files hold
one tag per line with blank lines mirroring the utterance boundaries.
"""

from __future__ import annotations

import io
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Sequence, TextIO

Tag = str
Utterance = list[tuple[str, Tag]]


class CorpusFormatError(ValueError):
    """Malformed vertical corpus or tag-column input."""

    def __init__(self, message: str, line: int | None = None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class AlignmentError(ValueError):
    """A tag column does not line up with the benchmark."""

    def __init__(self, message: str, column: str, row: int):
        super().__init__(f"column {column!r}, row {row}: {message}")
        self.column = column
        self.row = row


@dataclass(frozen=True)
class TaggedCorpus:
    utterances: tuple[tuple[tuple[str, Tag], ...], ...]

    def __post_init__(self):
        for i, utt in enumerate(self.utterances):
            if not utt:
                raise CorpusFormatError(f"utterance {i} is empty")
            for token, tag in utt:
                if not token or not tag:
                    raise CorpusFormatError(f"utterance {i} has an empty token or tag")

    @classmethod
    def from_lists(cls, utterances: Iterable[Iterable[tuple[str, Tag]]]) -> "TaggedCorpus":
        return cls(tuple(tuple((w, t) for w, t in utt) for utt in utterances))

    def __len__(self):
        return len(self.utterances)

    @property
    def n_tokens(self) -> int:
        return sum(len(u) for u in self.utterances)

    def tokens(self) -> list[list[str]]:
        return [[w for w, _ in utt] for utt in self.utterances]

    def tags(self) -> list[list[Tag]]:
        return [[t for _, t in utt] for utt in self.utterances]

    def pairs(self):
        for utt in self.utterances:
            yield from utt

    def flat_tags(self) -> list[Tag]:
        return [t for utt in self.utterances for _, t in utt]


def parse_corpus(stream: TextIO | str) -> TaggedCorpus:
    """Read a vertical corpus.  Blank lines end utterances; runs of blank
    lines are treated as a single boundary."""
    if isinstance(stream, str):
        stream = io.StringIO(stream)
    utterances: list[Utterance] = []
    current: Utterance = []
    for lineno, raw in enumerate(stream, start=1):
        line = raw.rstrip("\n").rstrip("\r")
        if not line.strip():
            if current:
                utterances.append(current)
                current = []
            continue
        fields = line.split("\t")
        if len(fields) != 2:
            raise CorpusFormatError(f"expected 2 tab-separated fields, got {len(fields)}", lineno)
        token, tag = fields
        if not token or not tag or any(c.isspace() for c in tag):
            raise CorpusFormatError(f"bad token/tag pair {line!r}", lineno)
        current.append((token, tag))
    if current:
        utterances.append(current)
    if not utterances:
        raise CorpusFormatError("empty corpus")
    return TaggedCorpus.from_lists(utterances)


def serialize_corpus(corpus: TaggedCorpus) -> str:
    return "\n".join(
        "".join(f"{w}\t{t}\n" for w, t in utt) for utt in corpus.utterances
    )


def read_corpus(path) -> TaggedCorpus:
    with open(path, encoding="utf-8") as fh:
        return parse_corpus(fh)


def write_corpus(corpus: TaggedCorpus, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(serialize_corpus(corpus))


def parse_tokens(stream: TextIO | str) -> list[list[str]]:
    """Read untagged input: vertical lines with the token in the first field
    (a second tag field, if present, is ignored)."""
    if isinstance(stream, str):
        stream = io.StringIO(stream)
    out: list[list[str]] = []
    current: list[str] = []
    for lineno, raw in enumerate(stream, start=1):
        line = raw.rstrip("\r\n")
        if not line.strip():
            if current:
                out.append(current)
                current = []
            continue
        fields = line.split("\t")
        if len(fields) > 2 or not fields[0]:
            raise CorpusFormatError(f"expected token or token<TAB>tag, got {line!r}", lineno)
        current.append(fields[0])
    if current:
        out.append(current)
    if not out:
        raise CorpusFormatError("empty input")
    return out


def parse_column(stream: TextIO | str) -> list[list[Tag]]:
    """Read a tag-column file into per-utterance tag lists."""
    if isinstance(stream, str):
        stream = io.StringIO(stream)
    out: list[list[Tag]] = []
    current: list[Tag] = []
    for lineno, raw in enumerate(stream, start=1):
        line = raw.rstrip("\r\n")
        if not line.strip():
            if current:
                out.append(current)
                current = []
            continue
        if "\t" in line or " " in line:
            raise CorpusFormatError(f"expected a single tag, got {line!r}", lineno)
        current.append(line)
    if current:
        out.append(current)
    return out


def serialize_column(tags: Sequence[Sequence[Tag]]) -> str:
    return "\n".join("".join(f"{t}\n" for t in utt) for utt in tags)


def read_column(path) -> list[list[Tag]]:
    with open(path, encoding="utf-8") as fh:
        return parse_column(fh)


def write_column(tags: Sequence[Sequence[Tag]], path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(serialize_column(tags))


def split_corpus(corpus: TaggedCorpus) -> tuple[TaggedCorpus, TaggedCorpus, TaggedCorpus]:
    """Train/Tune/Test split: of every ten utterances the first eight go to
    Train, the ninth to Tune and the tenth to Test."""
    parts: tuple[list, list, list] = ([], [], [])
    for i, utt in enumerate(corpus.utterances):
        r = i % 10
        parts[0 if r < 8 else (1 if r == 8 else 2)].append(utt)
    return tuple(TaggedCorpus(tuple(p)) for p in parts)  # type: ignore[return-value]


@dataclass(frozen=True)
class Lexicon:
    entries: dict[str, dict[Tag, int]]
    total_tag_counts: dict[Tag, int]

    def __contains__(self, token: str) -> bool:
        return token in self.entries

    def known(self, token: str) -> bool:
        return token in self.entries

    def freq(self, token: str) -> int:
        return sum(self.entries.get(token, {}).values())

    def tags_of(self, token: str) -> list[Tag]:
        """Sorted tag set of a known token; empty for unknown tokens."""
        return sorted(self.entries.get(token, ()))

    def prob(self, tag: Tag, token: str) -> float:
        """P(tag | token) as relative Train frequency; 0.0 if unknown."""
        counts = self.entries.get(token)
        if not counts:
            return 0.0
        return counts.get(tag, 0) / sum(counts.values())

    def distribution(self, token: str) -> dict[Tag, float]:
        counts = self.entries.get(token)
        if not counts:
            return {}
        n = sum(counts.values())
        return {t: c / n for t, c in counts.items()}

    def most_likely(self, token: str) -> Tag | None:
        """Modal Train tag; ties go to the globally more frequent tag, then
        lexicographic order."""
        counts = self.entries.get(token)
        if not counts:
            return None
        return min(counts, key=lambda t: (-counts[t], -self.total_tag_counts.get(t, 0), t))

    def ambiguity_class(self, token: str) -> str | None:
        counts = self.entries.get(token)
        if not counts:
            return None
        return "|".join(sorted(counts))

    def tags_by_frequency(self) -> list[Tag]:
        return sorted(self.total_tag_counts, key=lambda t: (-self.total_tag_counts[t], t))

    @property
    def tagset(self) -> list[Tag]:
        return sorted(self.total_tag_counts)


def build_lexicon(train: TaggedCorpus) -> Lexicon:
    entries: dict[str, dict[Tag, int]] = {}
    totals: Counter = Counter()
    for token, tag in train.pairs():
        slot = entries.setdefault(token, {})
        slot[tag] = slot.get(tag, 0) + 1
        totals[tag] += 1
    return Lexicon(entries, dict(totals))


def novelty(train_lexicon: Lexicon, other: TaggedCorpus) -> tuple[float, float]:
    """Fractions of tokens in ``other`` that are new wrt Train, and that are
    known but carry a tag never seen with them in Train."""
    n = new = new_tag = 0
    for token, tag in other.pairs():
        n += 1
        counts = train_lexicon.entries.get(token)
        if counts is None:
            new += 1
        elif tag not in counts:
            new_tag += 1
    if n == 0:
        return 0.0, 0.0
    return new / n, new_tag / n


@dataclass(frozen=True)
class MatrixRow:
    token: str
    suggestions: tuple[Tag, ...]
    gold: Tag | None = None


@dataclass(frozen=True)
class TaggerMatrix:
    """Token-aligned suggestions of several taggers, grouped in utterances."""

    tagger_ids: tuple[str, ...]
    utterances: tuple[tuple[MatrixRow, ...], ...]
    _rows: tuple[MatrixRow, ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        n = len(self.tagger_ids)
        if len(set(self.tagger_ids)) != n:
            raise ValueError(f"duplicate tagger ids in {self.tagger_ids}")
        rows = tuple(r for utt in self.utterances for r in utt)
        for i, r in enumerate(rows):
            if len(r.suggestions) != n:
                raise ValueError(f"row {i} has {len(r.suggestions)} suggestions, expected {n}")
        object.__setattr__(self, "_rows", rows)

    @property
    def rows(self) -> tuple[MatrixRow, ...]:
        return self._rows

    def __len__(self):
        return len(self._rows)

    @property
    def has_gold(self) -> bool:
        return all(r.gold is not None for r in self._rows)

    def require_gold(self) -> None:
        if not self.has_gold:
            raise ValueError("tagger matrix has no gold tags")

    def gold(self) -> list[Tag]:
        self.require_gold()
        return [r.gold for r in self._rows]  # type: ignore[misc]

    def column(self, k: int) -> list[Tag]:
        return [r.suggestions[k] for r in self._rows]

    def boundaries(self) -> list[int]:
        """Utterance lengths."""
        return [len(u) for u in self.utterances]

    def subset(self, indices: Sequence[int]) -> "TaggerMatrix":
        """Matrix restricted to the taggers at ``indices`` (in that order)."""
        ids = tuple(self.tagger_ids[k] for k in indices)
        utts = tuple(
            tuple(MatrixRow(r.token, tuple(r.suggestions[k] for k in indices), r.gold) for r in utt)
            for utt in self.utterances
        )
        return TaggerMatrix(ids, utts)

    def select_utterances(self, indices: Iterable[int]) -> "TaggerMatrix":
        return TaggerMatrix(self.tagger_ids, tuple(self.utterances[i] for i in indices))

    def regroup(self, flat: Sequence[Tag]) -> list[list[Tag]]:
        """Split a flat per-row sequence back into utterances."""
        out, pos = [], 0
        for n in self.boundaries():
            out.append(list(flat[pos:pos + n]))
            pos += n
        return out


def align_outputs(
    benchmark: TaggedCorpus,
    columns: Sequence[Sequence[Sequence[Tag]]],
    tagger_ids: Sequence[str],
    with_gold: bool = True,
) -> TaggerMatrix:
    """Zip tag columns against a benchmark into a TaggerMatrix.

    Each column is a list of utterances of tags with the benchmark's exact
    boundary structure; mismatches raise AlignmentError with a global row
    index (0-based) pointing at the first offending position.
    """
    if len(columns) != len(tagger_ids):
        raise ValueError(f"{len(columns)} columns but {len(tagger_ids)} tagger ids")
    for col, name in zip(columns, tagger_ids):
        _check_column(benchmark, col, name)
    utts = []
    for u, utt in enumerate(benchmark.utterances):
        rows = []
        for p, (token, gold) in enumerate(utt):
            sugg = tuple(col[u][p] for col in columns)
            rows.append(MatrixRow(token, sugg, gold if with_gold else None))
        utts.append(tuple(rows))
    return TaggerMatrix(tuple(tagger_ids), tuple(utts))


def _check_column(benchmark: TaggedCorpus, column, name: str) -> None:
    row = 0
    for u, utt in enumerate(benchmark.utterances):
        if u >= len(column):
            raise AlignmentError("column ends before benchmark", name, row)
        if len(column[u]) != len(utt):
            short = min(len(column[u]), len(utt))
            raise AlignmentError(
                f"utterance {u} has {len(column[u])} tags, benchmark has {len(utt)}",
                name, row + short,
            )
        row += len(utt)
    if len(column) > len(benchmark.utterances):
        raise AlignmentError("column has more rows than benchmark", name, row)


# Matrix file: a header line "#token<TAB>gold<TAB>id1..." (gold column is
# "_" throughout when absent), then one row per token, blank line between
# utterances.

def serialize_matrix(matrix: TaggerMatrix) -> str:
    lines = ["#token\tgold\t" + "\t".join(matrix.tagger_ids)]
    for u, utt in enumerate(matrix.utterances):
        if u:
            lines.append("")
        for r in utt:
            lines.append("\t".join((r.token, r.gold or "_") + r.suggestions))
    return "\n".join(lines) + "\n"


def parse_matrix(stream: TextIO | str) -> TaggerMatrix:
    if isinstance(stream, str):
        stream = io.StringIO(stream)
    header = stream.readline().rstrip("\r\n")
    if not header.startswith("#token\tgold\t"):
        raise CorpusFormatError("missing matrix header", 1)
    ids = tuple(header.split("\t")[2:])
    width = 2 + len(ids)
    utts: list[tuple[MatrixRow, ...]] = []
    current: list[MatrixRow] = []
    for lineno, raw in enumerate(stream, start=2):
        line = raw.rstrip("\r\n")
        if not line.strip():
            if current:
                utts.append(tuple(current))
                current = []
            continue
        fields = line.split("\t")
        if len(fields) != width:
            raise CorpusFormatError(f"expected {width} fields, got {len(fields)}", lineno)
        gold = None if fields[1] == "_" else fields[1]
        current.append(MatrixRow(fields[0], tuple(fields[2:]), gold))
    if current:
        utts.append(tuple(current))
    if not utts:
        raise CorpusFormatError("empty matrix")
    return TaggerMatrix(ids, tuple(utts))


def read_matrix(path) -> TaggerMatrix:
    with open(path, encoding="utf-8") as fh:
        return parse_matrix(fh)


def write_matrix(matrix: TaggerMatrix, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(serialize_matrix(matrix))
