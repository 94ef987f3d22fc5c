"""IDF tables and distance-weighted noun-noun / noun-verb association norms."""
from __future__ import annotations

import hashlib
import io
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import TextIO

from .corpus import Corpus, Document, Kind, Token

STORE_VERSION = "v1"
STORE_MAGIC = "#TOPICNORMS"
DEFAULT_C_NOUN = 0.77
DEFAULT_C_VERB = 2.46

_EMPTY_FINGERPRINT = hashlib.sha256(b"").hexdigest()


class StoreFormatError(ValueError):
    pass


@dataclass
class IdfTable:
    kind: Kind
    P: int
    c: float
    values: dict[str, float] = field(default_factory=dict)

    def __getitem__(self, word: str) -> float:
        return self.values.get(word, 0.0)


@dataclass
class StoreMeta:
    P: int
    c_noun: float
    c_verb: float
    fingerprint: str = _EMPTY_FINGERPRINT
    version: str = STORE_VERSION


@dataclass
class NormStore:
    """Trained association norms.

    ``ann`` keys are ``(noun_a, noun_b)`` with ``noun_a < noun_b``;
    ``anv`` keys are ``(noun, verb)``. Absent pairs have norm 0.
    """

    idf_noun: IdfTable
    idf_verb: IdfTable
    ann: dict[tuple[str, str], float]
    anv: dict[tuple[str, str], float]
    meta: StoreMeta

    def scaled(self, factor: float) -> NormStore:
        """Copy with every ANN and ANV value multiplied by ``factor``."""
        return NormStore(
            self.idf_noun,
            self.idf_verb,
            {k: v * factor for k, v in self.ann.items()},
            {k: v * factor for k, v in self.anv.items()},
            self.meta,
        )


def nn_key(a: str, b: str) -> tuple[str, str]:
    return (a, b) if a <= b else (b, a)


def lookup_ann(store: NormStore, noun_a: str, noun_b: str) -> float:
    return store.ann.get(nn_key(noun_a, noun_b), 0.0)


def lookup_anv(store: NormStore, noun: str, verb: str) -> float:
    return store.anv.get((noun, verb), 0.0)


def idf_value(P: int, O: int, c: float) -> float:
    """``max(0, ln((P - O) / O) + c)``; a word present in every document scores 0."""
    if not 0 < O <= P:
        raise ValueError(f"document frequency {O} outside (0, {P}]")
    if O == P:
        return 0.0
    return max(0.0, math.log((P - O) / O) + c)


def compute_idf(corpus: Corpus, kind: Kind, c: float) -> IdfTable:
    if not corpus.documents:
        raise ValueError("no documents")
    if c < 0:
        raise ValueError("threshold c must be non-negative")
    doc_freq: dict[str, int] = {}
    for doc in corpus.documents:
        present = {t.base_form for p in doc.paragraphs for t in p.tokens if t.kind is kind}
        for word in present:
            doc_freq[word] = doc_freq.get(word, 0) + 1
    P = len(corpus.documents)
    values = {w: idf_value(P, o, c) for w, o in sorted(doc_freq.items())}
    return IdfTable(kind, P, c, values)


def distance(x: Token, y: Token) -> int:
    if x.cardinal is None or y.cardinal is None:
        raise ValueError("distance is defined only between nouns and verbs")
    if (x.doc_id, x.paragraph_index) != (y.doc_id, y.paragraph_index):
        raise ValueError("not co-located: tokens are in different paragraphs")
    if x.cardinal == y.cardinal:
        raise ValueError("zero distance: same token occurrence")
    return abs(x.cardinal - y.cardinal)


def occurrence_strength_nv(idf_n: float, idf_v: float, d: float) -> float:
    return idf_n * idf_v / d


def occurrence_strength_nn(idf_a: float, idf_b: float, d: float) -> float:
    return idf_a * idf_b / d


def _document_pairs(
    doc: Document, idf_n: IdfTable, idf_v: IdfTable
) -> tuple[dict[tuple[str, str], float], dict[tuple[str, str], float]]:
    ann: dict[tuple[str, str], float] = {}
    anv: dict[tuple[str, str], float] = {}
    for para in doc.paragraphs:
        nouns = para.nouns
        for i, x in enumerate(nouns):
            wx = idf_n[x.base_form]
            if wx == 0.0:
                continue
            for y in nouns[i + 1:]:
                wy = idf_n[y.base_form]
                if wy == 0.0 or y.base_form == x.base_form:
                    continue
                key = nn_key(x.base_form, y.base_form)
                ann[key] = ann.get(key, 0.0) + occurrence_strength_nn(wx, wy, distance(x, y))
        for sent in para.sentences:
            verbs = sent.verbs()
            for x in sent.nouns():
                wx = idf_n[x.base_form]
                if wx == 0.0:
                    continue
                for v in verbs:
                    wv = idf_v[v.base_form]
                    if wv == 0.0:
                        continue
                    key = (x.base_form, v.base_form)
                    anv[key] = anv.get(key, 0.0) + occurrence_strength_nv(wx, wv, distance(x, v))
    return ann, anv


def accumulate(
    corpus: Corpus, idf_n: IdfTable, idf_v: IdfTable, threads: int = 1
) -> tuple[dict[tuple[str, str], float], dict[tuple[str, str], float]]:
    """Sum pair strengths under fixed IDF tables; zero sums are dropped.

    Pair sums are built per document and then folded in document order,
    so the result does not depend on ``threads``.
    """

    def work(doc: Document):
        return _document_pairs(doc, idf_n, idf_v)

    if threads > 1 and len(corpus.documents) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            partials = list(pool.map(work, corpus.documents))
    else:
        partials = [work(doc) for doc in corpus.documents]

    ann: dict[tuple[str, str], float] = {}
    anv: dict[tuple[str, str], float] = {}
    for part_nn, part_nv in partials:
        for key, v in part_nn.items():
            ann[key] = ann.get(key, 0.0) + v
        for key, v in part_nv.items():
            anv[key] = anv.get(key, 0.0) + v
    return (
        {k: ann[k] for k in sorted(ann) if ann[k] > 0},
        {k: anv[k] for k in sorted(anv) if anv[k] > 0},
    )


def train(
    corpus: Corpus,
    c_noun: float = DEFAULT_C_NOUN,
    c_verb: float = DEFAULT_C_VERB,
    threads: int = 1,
) -> NormStore:
    """IDF tables from ``corpus``, then ANN over paragraphs and ANV over sentences."""
    idf_n = compute_idf(corpus, Kind.NOUN, c_noun)
    idf_v = compute_idf(corpus, Kind.VERB, c_verb)
    ann, anv = accumulate(corpus, idf_n, idf_v, threads)
    meta = StoreMeta(len(corpus.documents), c_noun, c_verb, corpus.fingerprint())
    return NormStore(idf_n, idf_v, ann, anv, meta)


# --- persistence ------------------------------------------------------------

def _fmt(x: float) -> str:
    return f"{x:.9f}"


def save_store(store: NormStore, sink: TextIO) -> None:
    m = store.meta
    lines = [
        f"{STORE_MAGIC} {m.version}",
        f"#P {m.P}",
        f"#CNOUN {_fmt(m.c_noun)}",
        f"#CVERB {_fmt(m.c_verb)}",
        f"#FINGERPRINT {m.fingerprint}",
        "#IDF_NOUN",
    ]
    lines += [f"{w}\t{_fmt(v)}" for w, v in sorted(store.idf_noun.values.items())]
    lines.append("#IDF_VERB")
    lines += [f"{w}\t{_fmt(v)}" for w, v in sorted(store.idf_verb.values.items())]
    lines.append("#ANN")
    lines += [f"{a}\t{b}\t{_fmt(v)}" for (a, b), v in sorted(store.ann.items())]
    lines.append("#ANV")
    lines += [f"{n}\t{v_}\t{_fmt(v)}" for (n, v_), v in sorted(store.anv.items())]
    sink.write("\n".join(lines) + "\n")


def dumps_store(store: NormStore) -> str:
    buf = io.StringIO()
    save_store(store, buf)
    return buf.getvalue()


_SECTIONS = ("#IDF_NOUN", "#IDF_VERB", "#ANN", "#ANV")


def _value(text: str, lineno: int) -> float:
    try:
        v = float(text)
    except ValueError:
        raise StoreFormatError(f"line {lineno}: bad number {text!r}") from None
    if not math.isfinite(v):
        raise StoreFormatError(f"line {lineno}: non-finite value")
    if v < 0:
        raise StoreFormatError(f"line {lineno}: negative value {text}")
    return v


def _meta_line(line: str, tag: str, lineno: int) -> str:
    prefix = tag + " "
    if not line.startswith(prefix):
        raise StoreFormatError(f"line {lineno}: expected {tag}")
    return line[len(prefix):]


def load_store(source: TextIO) -> NormStore:
    lines = source.read().split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    if len(lines) < 5:
        raise StoreFormatError("truncated store header")
    head = lines[0].split(" ")
    if head[0] != STORE_MAGIC:
        raise StoreFormatError("not a norm store")
    if len(head) != 2 or head[1] != STORE_VERSION:
        raise StoreFormatError(f"version mismatch: {lines[0]!r}, expected {STORE_VERSION}")
    try:
        P = int(_meta_line(lines[1], "#P", 2))
    except ValueError as exc:
        raise StoreFormatError(f"line 2: {exc}") from None
    if P < 0:
        raise StoreFormatError("line 2: negative document count")
    c_noun = _value(_meta_line(lines[2], "#CNOUN", 3), 3)
    c_verb = _value(_meta_line(lines[3], "#CVERB", 4), 4)
    fingerprint = _meta_line(lines[4], "#FINGERPRINT", 5)

    tables: dict[str, dict] = {name: {} for name in _SECTIONS}
    expected = list(_SECTIONS)
    current: str | None = None
    for lineno, line in enumerate(lines[5:], 6):
        if line.startswith("#"):
            if not expected or line != expected[0]:
                raise StoreFormatError(f"line {lineno}: unexpected section {line!r}")
            current = expected.pop(0)
            continue
        if current is None:
            raise StoreFormatError(f"line {lineno}: data outside a section")
        parts = line.split("\t")
        width = 2 if current.startswith("#IDF") else 3
        if len(parts) != width or not all(parts[:-1]):
            raise StoreFormatError(f"line {lineno}: malformed line {line!r}")
        value = _value(parts[-1], lineno)
        key = parts[0] if width == 2 else (parts[0], parts[1])
        if current == "#ANN" and not parts[0] < parts[1]:
            raise StoreFormatError(f"line {lineno}: ANN key not in canonical order")
        if key in tables[current]:
            raise StoreFormatError(f"line {lineno}: duplicate key")
        tables[current][key] = value
    if expected:
        raise StoreFormatError(f"missing section {expected[0]}")

    return NormStore(
        IdfTable(Kind.NOUN, P, c_noun, tables["#IDF_NOUN"]),
        IdfTable(Kind.VERB, P, c_verb, tables["#IDF_VERB"]),
        tables["#ANN"],
        tables["#ANV"],
        StoreMeta(P, c_noun, c_verb, fingerprint),
    )
