"""Scoring computed topics against linguist-assigned ("assumed") topics."""
from __future__ import annotations

import enum
import math
import statistics
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Mapping, Sequence, TextIO

from .corpus import Corpus
from .norms import NormStore
from .topics import (
    DEFAULT_FRACTION,
    ShiftReport,
    TopicResult,
    identify_topics,
    topic_shift,
)
from .weights import InterpolationWeights

PRONOUN = "?PRONOUN"

ROW_LABELS = (
    "average # of candidates",
    "average rank of assumed topic",
    "frequency of candidates",
    "frequency of assumed topic",
    "frequency of computed topic",
    "average rank of topic in previous paragraph",
)


class GoldFormatError(ValueError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


@dataclass(frozen=True)
class GoldAnnotation:
    doc_id: str
    paragraph_index: int
    topic: str | None  # None when the assumed topic is a pronoun
    line: int = field(default=0, compare=False)

    @property
    def pronoun(self) -> bool:
        return self.topic is None

    @property
    def key(self) -> tuple[str, int]:
        return (self.doc_id, self.paragraph_index)


class Outcome(enum.Enum):
    CORRECT = "+"
    ERROR = "-"
    UNDECIDABLE = "?"


@dataclass(frozen=True)
class RowStat:
    mean: float
    std: float


@dataclass(frozen=True)
class MetricsTable:
    rows: tuple[RowStat | None, ...]  # six rows; None when nothing was evaluable

    def __getitem__(self, row: int) -> RowStat | None:
        """1-based row access, matching the row numbers of the report."""
        return self.rows[row - 1]


@dataclass(frozen=True)
class OutcomeCounts:
    correct: int = 0
    error: int = 0
    undecidable: int = 0

    @property
    def total(self) -> int:
        return self.correct + self.error + self.undecidable

    @classmethod
    def of(cls, outcomes: Sequence[Outcome]) -> OutcomeCounts:
        return cls(
            sum(o is Outcome.CORRECT for o in outcomes),
            sum(o is Outcome.ERROR for o in outcomes),
            sum(o is Outcome.UNDECIDABLE for o in outcomes),
        )

    def __add__(self, other: OutcomeCounts) -> OutcomeCounts:
        return OutcomeCounts(
            self.correct + other.correct,
            self.error + other.error,
            self.undecidable + other.undecidable,
        )


@dataclass
class EvalReport:
    texts: list[str]
    metrics: dict[str, MetricsTable]
    counts: dict[str, OutcomeCounts]

    @property
    def totals(self) -> OutcomeCounts:
        total = OutcomeCounts()
        for name in self.texts:
            total = total + self.counts[name]
        return total

    @property
    def correct_rate(self) -> float | None:
        t = self.totals
        return t.correct / t.total if t.total else None


def load_gold(source: TextIO) -> list[GoldAnnotation]:
    golds: list[GoldAnnotation] = []
    seen: dict[tuple[str, int], int] = {}
    for lineno, raw in enumerate(source, 1):
        line = raw.rstrip("\r\n")
        if not line.strip() or line.startswith("#"):
            continue
        parts = line.split("\t")
        if len(parts) != 3 or not parts[0] or not parts[2]:
            raise GoldFormatError(f"expected doc<TAB>paragraph<TAB>topic, got {line!r}", lineno)
        try:
            index = int(parts[1])
        except ValueError:
            index = 0
        if index < 1:
            raise GoldFormatError(f"bad paragraph index {parts[1]!r}", lineno)
        key = (parts[0], index)
        if key in seen:
            raise GoldFormatError(f"duplicate annotation for {key}, first on line {seen[key]}", lineno)
        seen[key] = lineno
        topic = None if parts[2] == PRONOUN else parts[2].lower()
        golds.append(GoldAnnotation(parts[0], index, topic, lineno))
    return golds


def classify(result: TopicResult, gold: GoldAnnotation) -> Outcome:
    if (result.doc_id, result.paragraph_index) != gold.key:
        raise ValueError(
            f"result for {(result.doc_id, result.paragraph_index)} compared with gold {gold.key}"
        )
    if gold.pronoun:
        return Outcome.UNDECIDABLE
    return Outcome.CORRECT if gold.topic in result.topic_set else Outcome.ERROR


def _stat(values: Sequence[float]) -> RowStat | None:
    if not values:
        return None
    return RowStat(math.fsum(values) / len(values), statistics.pstdev(values))


def assumed_rank(result: TopicResult, gold: GoldAnnotation) -> int:
    """Rank of the assumed topic; one past the last candidate when it is not a noun there."""
    rank = result.rank_of(gold.topic)
    return rank if rank is not None else len(result.candidates) + 1


def metrics(
    results: Sequence[TopicResult],
    golds: Mapping[tuple[str, int], GoldAnnotation],
    shifts: Sequence[ShiftReport] = (),
) -> MetricsTable:
    """The six per-text performance rows as (mean, population std) pairs.

    Only paragraphs with a gold annotation are evaluated. Pronoun-valued
    gold topics are left out of rows 2 and 4.
    """
    evaluated = [r for r in results if (r.doc_id, r.paragraph_index) in golds]
    candidates = [len(r.candidates) for r in evaluated]
    decidable = [(r, golds[(r.doc_id, r.paragraph_index)]) for r in evaluated]
    decidable = [(r, g) for r, g in decidable if not g.pronoun]

    row1 = _stat(candidates)
    row2 = _stat([assumed_rank(r, g) for r, g in decidable])

    tokens = sum(r.noun_tokens for r in evaluated)
    bases = sum(candidates)
    if bases:
        ratios = [r.noun_tokens / len(r.candidates) for r in evaluated if r.candidates]
        row3 = RowStat(tokens / bases, statistics.pstdev(ratios))
    else:
        row3 = None

    row4 = _stat([r.frequency_of(g.topic) for r, g in decidable])
    row5 = _stat([r.candidates[0].frequency for r in evaluated if r.candidates])

    wanted = {(r.doc_id, r.paragraph_index) for r in evaluated}
    prev_ranks = [
        step.entries[0].rank
        for rep in shifts
        for step in rep.steps
        if step.entries and (rep.doc_id, step.paragraph_index) in wanted
    ]
    row6 = _stat(prev_ranks)
    return MetricsTable((row1, row2, row3, row4, row5, row6))


def summarize(
    per_text: Mapping[str, MetricsTable],
    outcomes: Mapping[str, Sequence[Outcome] | OutcomeCounts],
) -> EvalReport:
    texts = list(per_text)
    counts = {}
    for name in texts:
        got = outcomes.get(name, ())
        counts[name] = got if isinstance(got, OutcomeCounts) else OutcomeCounts.of(got)
    return EvalReport(texts, dict(per_text), counts)


def _cell(stat: RowStat | None) -> str:
    return "-" if stat is None else f"({stat.mean:.2f}, {stat.std:.2f})"


def format_rate(report: EvalReport) -> str:
    t = report.totals
    rate = report.correct_rate
    if rate is None:
        return "correct rate: n/a (0 paragraphs)"
    return f"correct rate: {100 * rate:.2f}% ({t.correct} of {t.total} paragraphs)"


def format_report(report: EvalReport) -> str:
    """Plain-text table: one column per text, metric rows then outcome counts."""
    header = ["(mean, std)"] + report.texts
    body = []
    for i, label in enumerate(ROW_LABELS, 1):
        body.append([f"({i})"] + [_cell(report.metrics[t][i]) for t in report.texts])
    body.append(["(+)"] + [str(report.counts[t].correct) for t in report.texts])
    body.append(["(-)"] + [str(report.counts[t].error) for t in report.texts])
    body.append(["(?)"] + [str(report.counts[t].undecidable) for t in report.texts])
    widths = [max(len(row[c]) for row in [header] + body) for c in range(len(header))]
    out = ["  ".join(cell.ljust(w) for cell, w in zip(row, widths)).rstrip() for row in [header] + body]
    out.append("")
    out += [f"({i}) {label}" for i, label in enumerate(ROW_LABELS, 1)]
    out.append("")
    out.append(format_rate(report))
    return "\n".join(out) + "\n"


def figure1_csv(report: EvalReport) -> str:
    lines = ["text,correct,error,undecidable"]
    for t in report.texts:
        c = report.counts[t]
        lines.append(f"{t},{c.correct},{c.error},{c.undecidable}")
    return "\n".join(lines) + "\n"


def figure2_csv(report: EvalReport) -> str:
    def mean(stat: RowStat | None) -> str:
        return "" if stat is None else f"{stat.mean:.6f}"

    lines = ["text,freq_candidates,freq_assumed,freq_computed"]
    for t in report.texts:
        m = report.metrics[t]
        lines.append(f"{t},{mean(m[3])},{mean(m[4])},{mean(m[5])}")
    return "\n".join(lines) + "\n"


@dataclass
class ParagraphOutcome:
    result: TopicResult
    gold: GoldAnnotation
    outcome: Outcome


def evaluate_corpus(
    corpus: Corpus,
    store: NormStore,
    weights: InterpolationWeights,
    golds: Sequence[GoldAnnotation],
    fraction: float = DEFAULT_FRACTION,
    threads: int = 1,
) -> tuple[EvalReport, list[ParagraphOutcome]]:
    """Run identification and shift analysis on every annotated document.

    Each document is one text column of the report.
    """
    paragraphs = {(p.doc_id, p.index) for p in corpus.paragraphs()}
    for g in golds:
        if g.key not in paragraphs:
            raise GoldFormatError(f"no paragraph {g.paragraph_index} in document {g.doc_id!r}", g.line)
    by_key = {g.key: g for g in golds}
    docs = [d for d in corpus.documents if any((d.id, p.index) in by_key for p in d.paragraphs)]

    def run(doc):
        results = [identify_topics(p, store, weights, fraction) for p in doc.paragraphs]
        shifts = [topic_shift(doc, store, weights, fraction, results)] if len(results) > 1 else []
        return results, shifts

    if threads > 1 and len(docs) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            runs = list(pool.map(run, docs))
    else:
        runs = [run(d) for d in docs]

    per_text: dict[str, MetricsTable] = {}
    outcomes: dict[str, list[Outcome]] = {}
    details: list[ParagraphOutcome] = []
    for doc, (results, shifts) in zip(docs, runs):
        per_text[doc.id] = metrics(results, by_key, shifts)
        outcomes[doc.id] = []
        for r in results:
            gold = by_key.get((r.doc_id, r.paragraph_index))
            if gold is None:
                continue
            o = classify(r, gold)
            outcomes[doc.id].append(o)
            details.append(ParagraphOutcome(r, gold, o))
    return summarize(per_text, outcomes), details
