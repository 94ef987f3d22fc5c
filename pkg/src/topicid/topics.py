"""Per-paragraph topic scoring, ranking and cross-paragraph topic shift."""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import TYPE_CHECKING, Iterable, Sequence

from .corpus import Document, Paragraph, Token
from .norms import NormStore, distance, lookup_ann, lookup_anv

if TYPE_CHECKING:
    from .weights import InterpolationWeights

DEFAULT_FRACTION = 0.2

# NCS values equal to this many decimals are ranked as ties, so that
# rescaling every norm cannot reorder candidates through rounding noise.
TIE_DECIMALS = 10


@dataclass(frozen=True)
class OccurrenceScore:
    base_form: str
    cardinal: int
    csnn: float
    csnv: float
    cs_raw: float
    cs: float


@dataclass(frozen=True)
class CandidateScore:
    base_form: str
    occurrences: tuple[OccurrenceScore, ...]
    ncs: float
    rank: int

    @property
    def frequency(self) -> int:
        return len(self.occurrences)

    @property
    def first_cardinal(self) -> int:
        return self.occurrences[0].cardinal


@dataclass(frozen=True)
class TopicResult:
    doc_id: str
    paragraph_index: int
    candidates: tuple[CandidateScore, ...]
    topic_set: tuple[str, ...]

    def rank_of(self, base: str) -> int | None:
        for cand in self.candidates:
            if cand.base_form == base:
                return cand.rank
        return None

    def frequency_of(self, base: str) -> int:
        for cand in self.candidates:
            if cand.base_form == base:
                return cand.frequency
        return 0

    @property
    def noun_tokens(self) -> int:
        return sum(c.frequency for c in self.candidates)


@dataclass(frozen=True)
class ShiftEntry:
    prev_topic: str
    rank: int
    virtual: bool


@dataclass(frozen=True)
class ShiftStep:
    paragraph_index: int  # the current paragraph; topics come from paragraph_index - 1
    entries: tuple[ShiftEntry, ...]


@dataclass(frozen=True)
class ShiftReport:
    doc_id: str
    steps: tuple[ShiftStep, ...]


def score_occurrence(paragraph: Paragraph, occ: Token, store: NormStore) -> tuple[float, float]:
    """Connective strengths (csnn, csnv) of one noun occurrence within its paragraph."""
    if occ not in paragraph.nouns:
        raise ValueError("occurrence is not a noun of this paragraph")
    csnn = 0.0
    for other in paragraph.nouns:
        if other.base_form == occ.base_form:
            continue
        csnn += lookup_ann(store, occ.base_form, other.base_form) / distance(occ, other)
    csnv = 0.0
    for verb in paragraph.verbs:
        csnv += lookup_anv(store, occ.base_form, verb.base_form) / distance(occ, verb)
    return csnn, csnv


def combine_cs(csnn: float, csnv: float, weights: InterpolationWeights) -> float:
    return weights.pn * csnn + weights.pv * csnv


def normalize_cs(raw_scores: Sequence[float]) -> list[float]:
    top = max(raw_scores, default=0.0)
    if top <= 0.0:
        return [0.0] * len(raw_scores)
    return [r / top for r in raw_scores]


def merge_ncs(cs_values: Iterable[float]) -> float:
    """Fold ``ncs <- ncs + (1 - ncs) * cs`` over occurrences in cardinal order."""
    it = iter(cs_values)
    try:
        ncs = next(it)
    except StopIteration:
        raise ValueError("merge_ncs needs at least one value") from None
    for cs in it:
        ncs = ncs + (1.0 - ncs) * cs
    return ncs


def topic_set_size(m: int, fraction: float) -> int:
    if m == 0:
        return 0
    frac = Fraction(fraction).limit_denominator(10**6)
    return max(1, min(m, math.ceil(frac * m)))


def _rank_key(base: str, ncs: float, freq: int, first: float):
    return (-round(ncs, TIE_DECIMALS), -freq, first, base)


def identify_topics(
    paragraph: Paragraph,
    store: NormStore,
    weights: InterpolationWeights,
    fraction: float = DEFAULT_FRACTION,
) -> TopicResult:
    if not 0 < fraction <= 1:
        raise ValueError("fraction must lie in (0, 1]")
    nouns = paragraph.nouns
    pairs = [score_occurrence(paragraph, occ, store) for occ in nouns]
    raw = [combine_cs(nn, nv, weights) for nn, nv in pairs]
    norm = normalize_cs(raw)

    by_base: dict[str, list[OccurrenceScore]] = {}
    for occ, (nn, nv), r, cs in zip(nouns, pairs, raw, norm):
        by_base.setdefault(occ.base_form, []).append(
            OccurrenceScore(occ.base_form, occ.cardinal, nn, nv, r, cs)
        )

    scored = [(base, tuple(occs), merge_ncs(o.cs for o in occs)) for base, occs in by_base.items()]
    scored.sort(key=lambda s: _rank_key(s[0], s[2], len(s[1]), s[1][0].cardinal))
    candidates = tuple(
        CandidateScore(base, occs, ncs, rank) for rank, (base, occs, ncs) in enumerate(scored, 1)
    )
    k = topic_set_size(len(candidates), fraction)
    return TopicResult(
        paragraph.doc_id,
        paragraph.index,
        candidates,
        tuple(c.base_form for c in candidates[:k]),
    )


def _mean_pair_distance(paragraph: Paragraph) -> float:
    cards = [t.cardinal for t in paragraph.tokens if t.cardinal is not None]
    if len(cards) < 2:
        return 1.0
    total = sum(abs(a - b) for i, a in enumerate(cards) for b in cards[i + 1:])
    return total / (len(cards) * (len(cards) - 1) / 2)


def virtual_ncs(
    topic: str, paragraph: Paragraph, store: NormStore, weights: InterpolationWeights
) -> float:
    """NCS of a topic that does not occur in ``paragraph``.

    The topic is scored as one notional occurrence whose distance to every
    noun and verb of the paragraph is the paragraph's mean pairwise
    distance, then divided by the paragraph's largest raw CS. Unlike a real
    NCS the result may exceed 1 when the absent topic is better connected
    than every noun actually present.
    """
    d = _mean_pair_distance(paragraph)
    csnn = sum(lookup_ann(store, topic, n.base_form) for n in paragraph.nouns if n.base_form != topic) / d
    csnv = sum(lookup_anv(store, topic, v.base_form) for v in paragraph.verbs) / d
    raw = combine_cs(csnn, csnv, weights)
    if raw <= 0.0:
        return 0.0
    top = max(
        (combine_cs(*score_occurrence(paragraph, occ, store), weights) for occ in paragraph.nouns),
        default=0.0,
    )
    return 1.0 if top <= 0.0 else raw / top


def topic_shift(
    document: Document,
    store: NormStore,
    weights: InterpolationWeights,
    fraction: float = DEFAULT_FRACTION,
    results: Sequence[TopicResult] | None = None,
) -> ShiftReport:
    """Rank each paragraph's topic set again inside the following paragraph.

    A previous topic missing from the current paragraph gets a virtual score
    (see :func:`virtual_ncs`) and the rank it would take among the real
    candidates, losing every tie; such entries are flagged ``virtual``.
    """
    paras = document.paragraphs
    if len(paras) < 2:
        raise ValueError(f"nothing to compare: document {document.id!r} has one paragraph")
    if results is None:
        results = [identify_topics(p, store, weights, fraction) for p in paras]
    steps = []
    for prev, cur, cur_para in zip(results, results[1:], paras[1:]):
        entries = []
        for topic in prev.topic_set:
            rank = cur.rank_of(topic)
            if rank is not None:
                entries.append(ShiftEntry(topic, rank, False))
                continue
            v = round(virtual_ncs(topic, cur_para, store, weights), TIE_DECIMALS)
            beaten_by = sum(1 for c in cur.candidates if round(c.ncs, TIE_DECIMALS) >= v)
            entries.append(ShiftEntry(topic, beaten_by + 1, True))
        steps.append(ShiftStep(cur.paragraph_index, tuple(entries)))
    return ShiftReport(document.id, tuple(steps))


def format_topics_tsv(results: Iterable[TopicResult]) -> str:
    lines = []
    for res in results:
        chosen = set(res.topic_set)
        for c in res.candidates:
            lines.append(
                f"{res.doc_id}\t{res.paragraph_index}\t{c.rank}\t{c.base_form}\t"
                f"{c.ncs:.9f}\t{c.frequency}\t{int(c.base_form in chosen)}"
            )
    return "".join(line + "\n" for line in lines)


def format_shift_tsv(reports: Iterable[ShiftReport]) -> str:
    lines = []
    for rep in reports:
        for step in rep.steps:
            for e in step.entries:
                lines.append(
                    f"{rep.doc_id}\t{step.paragraph_index}\t{e.prev_topic}\t{e.rank}\t{int(e.virtual)}"
                )
    return "".join(line + "\n" for line in lines)
