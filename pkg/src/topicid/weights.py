"""Deleted-interpolation estimate of the noun/verb mixing weights PN and PV."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence, TextIO

from .corpus import Corpus
from .norms import NormStore
from .topics import score_occurrence


@dataclass(frozen=True)
class InterpolationWeights:
    pn: float = 0.5

    def __post_init__(self):
        if not 0.0 <= self.pn <= 1.0:
            raise ValueError(f"PN must lie in [0, 1], got {self.pn}")

    @property
    def pv(self) -> float:
        return 1.0 - self.pn


@dataclass(frozen=True)
class WeightTrainConfig:
    split_ratio: Fraction = Fraction(3)
    init_pn: float = 0.5
    tolerance: float = 1e-6
    max_iterations: int = 200

    def __post_init__(self):
        if not 0.0 < self.init_pn < 1.0:
            raise ValueError("init_pn must lie strictly between 0 and 1")
        if self.tolerance <= 0:
            raise ValueError("tolerance must be positive")
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be positive")
        if self.split_ratio <= 0:
            raise ValueError("split ratio must be positive")


@dataclass
class WeightEstimate:
    weights: InterpolationWeights
    iterations: int
    converged: bool
    trace: list[float] = field(default_factory=list)  # PN after each iteration


def parse_ratio(text: str) -> Fraction:
    """``"3:1"`` -> Fraction(3, 1); a bare number is also accepted."""
    try:
        if ":" in text:
            a, b = text.split(":", 1)
            ratio = Fraction(a.strip()) / Fraction(b.strip())
        else:
            ratio = Fraction(text.strip())
    except (ValueError, ZeroDivisionError):
        raise ValueError(f"bad split ratio {text!r}") from None
    if ratio <= 0:
        raise ValueError(f"split ratio must be positive, got {text!r}")
    return ratio


def split_corpus(corpus: Corpus, ratio: Fraction = Fraction(3)) -> tuple[Corpus, Corpus]:
    """Split by document order into a training part and a held-out part.

    The training part takes ``ceil(ratio * N / (ratio + 1))`` documents,
    clamped so that both parts keep at least one document.
    """
    n = len(corpus.documents)
    if n < 2:
        raise ValueError("cannot split: need at least 2 documents")
    ratio = Fraction(ratio)
    k = math.ceil(ratio * n / (ratio + 1))
    k = min(max(k, 1), n - 1)
    return Corpus(corpus.documents[:k]), Corpus(corpus.documents[k:])


def collect_evidence(store: NormStore, heldout: Corpus) -> list[tuple[float, float]]:
    """Per-noun-occurrence (CSNN, CSNV), each divided by its paragraph maximum.

    Ordered by document, paragraph and cardinal.
    """
    evidence = []
    for para in heldout.paragraphs():
        pairs = [score_occurrence(para, occ, store) for occ in para.nouns]
        if not pairs:
            continue
        top_nn = max(p[0] for p in pairs)
        top_nv = max(p[1] for p in pairs)
        for nn, nv in pairs:
            evidence.append((nn / top_nn if top_nn > 0 else 0.0, nv / top_nv if top_nv > 0 else 0.0))
    return evidence


def em_weights(
    evidence: Sequence[tuple[float, float]], cfg: WeightTrainConfig = WeightTrainConfig()
) -> WeightEstimate:
    """Iterate PN <- mean over occurrences of PN*nn / (PN*nn + PV*nv).

    Occurrences where both weighted terms vanish are skipped for that
    iteration.
    """
    if not any(nn > 0 or nv > 0 for nn, nv in evidence):
        raise ValueError("no evidence: held-out part has no scorable noun occurrence")
    pn = cfg.init_pn
    trace: list[float] = []
    for it in range(1, cfg.max_iterations + 1):
        pv = 1.0 - pn
        total = 0.0
        used = 0
        for nn, nv in evidence:
            a = pn * nn
            b = pv * nv
            if a + b > 0:
                total += a / (a + b)
                used += 1
        if used == 0:
            # PN has collapsed onto a component with no support
            return WeightEstimate(InterpolationWeights(pn), it, False, trace)
        new = min(1.0, max(0.0, total / used))
        trace.append(new)
        delta = abs(new - pn)
        pn = new
        if delta < cfg.tolerance:
            return WeightEstimate(InterpolationWeights(pn), it, True, trace)
    return WeightEstimate(InterpolationWeights(pn), cfg.max_iterations, False, trace)


def estimate_weights(
    store: NormStore, heldout: Corpus, cfg: WeightTrainConfig = WeightTrainConfig()
) -> WeightEstimate:
    return em_weights(collect_evidence(store, heldout), cfg)


def save_weights(weights: InterpolationWeights, sink: TextIO) -> None:
    sink.write(f"PN {weights.pn:.6f}\nPV {weights.pv:.6f}\n")


def load_weights(source: TextIO) -> InterpolationWeights:
    values = {}
    for lineno, raw in enumerate(source, 1):
        line = raw.strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 2 or parts[0] not in ("PN", "PV") or parts[0] in values:
            raise ValueError(f"line {lineno}: malformed weights line {line!r}")
        try:
            values[parts[0]] = float(parts[1])
        except ValueError:
            raise ValueError(f"line {lineno}: bad number {parts[1]!r}") from None
    if set(values) != {"PN", "PV"}:
        raise ValueError("weights file needs both PN and PV")
    if abs(values["PN"] + values["PV"] - 1.0) > 2e-6:
        raise ValueError("PN + PV must equal 1")
    return InterpolationWeights(values["PN"])
