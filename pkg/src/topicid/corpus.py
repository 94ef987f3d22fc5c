"""Reading LOB-style tagged text into documents, paragraphs, sentences and tokens.

File layout::

    #DOC D01
    With_IN so_RB many_AP problems_NNS to_TO solve_VB ,_,
    ...                                  <- one sentence per line
                                         <- blank line ends a paragraph
    #DOC D02
    ...

Each token is ``surface_TAG``; the last underscore separates the tag.
"""
from __future__ import annotations

import enum
import hashlib
import io
from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Iterator, Mapping, TextIO


class ParseError(ValueError):
    """Raised for input that does not follow the corpus or lemma file format."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


class Kind(enum.Enum):
    NOUN = "N"
    VERB = "V"
    OTHER = "O"


@dataclass(frozen=True)
class TagPolicy:
    """Which tags count as nouns or verbs.

    A tag is a noun (verb) when it starts with one of ``noun_prefixes``
    (``verb_prefixes``), is not listed in ``excluded_tags`` and is not a
    ditto tag. LOB marks the parts of a multiword unit with a trailing
    digit, so ditto detection defaults to "ends in a digit".
    """

    noun_prefixes: frozenset[str] = frozenset({"N"})
    verb_prefixes: frozenset[str] = frozenset({"V"})
    excluded_tags: frozenset[str] = frozenset({"NC", "NNU", "NNUS"})
    ditto_suffix_digit: bool = True

    def is_ditto(self, tag: str) -> bool:
        return self.ditto_suffix_digit and tag[-1:].isdigit()


DEFAULT_POLICY = TagPolicy()


@dataclass(frozen=True)
class Token:
    surface: str
    tag: str
    kind: Kind
    base_form: str = ""
    cardinal: int | None = None
    doc_id: str = ""
    paragraph_index: int = 0

    @property
    def is_content(self) -> bool:
        return self.kind is not Kind.OTHER


@dataclass(frozen=True)
class Sentence:
    tokens: tuple[Token, ...]

    def nouns(self) -> list[Token]:
        return [t for t in self.tokens if t.kind is Kind.NOUN]

    def verbs(self) -> list[Token]:
        return [t for t in self.tokens if t.kind is Kind.VERB]


@dataclass(frozen=True)
class Paragraph:
    sentences: tuple[Sentence, ...]
    doc_id: str = ""
    index: int = 0  # 1-based within the document

    @cached_property
    def tokens(self) -> tuple[Token, ...]:
        return tuple(t for s in self.sentences for t in s.tokens)

    @cached_property
    def nouns(self) -> tuple[Token, ...]:
        """Noun occurrences in cardinal order."""
        return tuple(t for t in self.tokens if t.kind is Kind.NOUN)

    @cached_property
    def verbs(self) -> tuple[Token, ...]:
        return tuple(t for t in self.tokens if t.kind is Kind.VERB)

    @property
    def m(self) -> int:
        """Number of distinct noun base forms."""
        return len({t.base_form for t in self.nouns})

    @property
    def n(self) -> int:
        """Number of distinct verb base forms."""
        return len({t.base_form for t in self.verbs})


@dataclass(frozen=True)
class Document:
    id: str
    paragraphs: tuple[Paragraph, ...]


@dataclass(frozen=True)
class Corpus:
    documents: tuple[Document, ...] = ()

    def __len__(self) -> int:
        return len(self.documents)

    def paragraphs(self) -> Iterator[Paragraph]:
        for doc in self.documents:
            yield from doc.paragraphs

    def document(self, doc_id: str) -> Document:
        for doc in self.documents:
            if doc.id == doc_id:
                return doc
        raise KeyError(doc_id)

    def fingerprint(self) -> str:
        """SHA-256 over every token's surface, tag, kind and base form."""
        h = hashlib.sha256()
        for doc in self.documents:
            h.update(f"#DOC {doc.id}\n".encode())
            for para in doc.paragraphs:
                for sent in para.sentences:
                    for t in sent.tokens:
                        h.update(f"{t.surface}\t{t.tag}\t{t.kind.value}\t{t.base_form}\n".encode())
                    h.update(b"\n")
                h.update(b"\f")
        return h.hexdigest()


@dataclass(frozen=True)
class CorpusStats:
    document_count: int = 0
    paragraph_count: int = 0
    sentence_count: int = 0
    distinct_nouns: int = 0
    distinct_verbs: int = 0
    nn_pair_count: int = 0
    vn_pair_count: int = 0

    def format_table(self) -> str:
        rows = [
            ("Document", self.document_count),
            ("Paragraph", self.paragraph_count),
            ("Sentences", self.sentence_count),
            ("Nouns", self.distinct_nouns),
            ("Verbs", self.distinct_verbs),
            ("N-N Pairs", self.nn_pair_count),
            ("V-N Pairs", self.vn_pair_count),
        ]
        return "".join(f"{name:<12}{value:>10}\n" for name, value in rows)


def classify_token(tag: str, policy: TagPolicy = DEFAULT_POLICY) -> Kind:
    if not tag or tag in policy.excluded_tags or policy.is_ditto(tag):
        return Kind.OTHER
    if tag.startswith(tuple(policy.noun_prefixes)):
        return Kind.NOUN
    if tag.startswith(tuple(policy.verb_prefixes)):
        return Kind.VERB
    return Kind.OTHER


# --- base forms -------------------------------------------------------------

LemmaMap = Mapping[tuple[str, Kind], str]

_ES_AFTER = ("ch", "sh", "ss", "x", "z")
_NO_UNDOUBLE = set("lsz")
_VOWELS = set("aeiouy")


def _undouble(stem: str) -> str:
    if len(stem) >= 3 and stem[-1] == stem[-2] and stem[-1] not in _VOWELS | _NO_UNDOUBLE:
        return stem[:-1]
    return stem


def _noun_stem(w: str) -> str:
    if len(w) > 4 and w.endswith("ies"):
        return w[:-3] + "y"
    if len(w) > 3 and w.endswith("es") and w[:-2].endswith(_ES_AFTER):
        return w[:-2]
    if len(w) > 2 and w.endswith("s") and not w.endswith(("ss", "us", "is")):
        return w[:-1]
    return w


def _verb_stem(w: str) -> str:
    if len(w) > 4 and w.endswith("ies"):
        return w[:-3] + "y"
    if len(w) >= 6 and w.endswith("ing"):
        return _undouble(w[:-3])
    if len(w) >= 5 and w.endswith("ed"):
        return _undouble(w[:-2])
    if len(w) > 3 and w.endswith("es") and w[:-2].endswith(_ES_AFTER):
        return w[:-2]
    if len(w) > 2 and w.endswith("s") and not w.endswith("ss"):
        return w[:-1]
    return w


def base_form(surface: str, kind: Kind, lemmas: LemmaMap | None = None) -> str:
    """Lowercased lemma of a noun or verb: lemma map first, then suffix rules."""
    w = surface.lower()
    if lemmas:
        hit = lemmas.get((w, kind))
        if hit is not None:
            return hit
    if kind is Kind.NOUN:
        return _noun_stem(w)
    if kind is Kind.VERB:
        return _verb_stem(w)
    raise ValueError(f"base_form needs a noun or verb, got {kind}")


def load_lemma_map(source: TextIO) -> dict[tuple[str, Kind], str]:
    """Read ``surface<TAB>kind<TAB>lemma`` lines (kind N or V)."""
    lemmas: dict[tuple[str, Kind], str] = {}
    for lineno, raw in enumerate(source, 1):
        line = raw.rstrip("\n")
        if not line.strip() or line.startswith("#"):
            continue
        parts = line.split("\t")
        if len(parts) != 3 or parts[1] not in ("N", "V") or not parts[0] or not parts[2]:
            raise ParseError(f"malformed lemma entry {line!r}", lineno)
        lemmas[(parts[0].lower(), Kind(parts[1]))] = parts[2].lower()
    return lemmas


# --- parsing ----------------------------------------------------------------

@dataclass
class _DocChunk:
    doc_id: str
    header_line: int
    lines: list[tuple[int, str]] = field(default_factory=list)


def _split_documents(lines: Iterable[str]) -> list[_DocChunk]:
    chunks: list[_DocChunk] = []
    for lineno, raw in enumerate(lines, 1):
        line = raw.rstrip("\r\n")
        if line.startswith("#DOC"):
            parts = line.split(None, 1)
            if parts[0] != "#DOC" or len(parts) < 2 or not parts[1].strip():
                raise ParseError("document header without an id", lineno)
            chunks.append(_DocChunk(parts[1].strip(), lineno))
        elif chunks:
            chunks[-1].lines.append((lineno, line))
        elif line.strip():
            raise ParseError("text before the first #DOC header", lineno)
    if not chunks:
        raise ParseError("no documents")
    seen: set[str] = set()
    for chunk in chunks:
        if chunk.doc_id in seen:
            raise ParseError(f"duplicate document id {chunk.doc_id!r}", chunk.header_line)
        seen.add(chunk.doc_id)
    return chunks


def _split_token(item: str, lineno: int) -> tuple[str, str]:
    surface, sep, tag = item.rpartition("_")
    if not sep or not surface or not tag:
        raise ParseError(f"malformed token {item!r} (expected surface_TAG)", lineno)
    return surface, tag


def _parse_document(chunk: _DocChunk, policy: TagPolicy, lemmas: LemmaMap | None) -> Document:
    blocks: list[list[tuple[int, str]]] = [[]]
    for lineno, line in chunk.lines:
        if line.strip():
            blocks[-1].append((lineno, line))
        elif blocks[-1]:
            blocks.append([])
    blocks = [b for b in blocks if b]
    if not blocks:
        raise ParseError(f"document {chunk.doc_id!r} has no sentences", chunk.header_line)

    paragraphs = []
    for p_index, block in enumerate(blocks, 1):
        cardinal = 0
        sentences = []
        for lineno, line in block:
            tokens = []
            for item in line.split():
                surface, tag = _split_token(item, lineno)
                kind = classify_token(tag, policy)
                if kind is Kind.OTHER:
                    tokens.append(Token(surface, tag, kind, doc_id=chunk.doc_id, paragraph_index=p_index))
                    continue
                cardinal += 1
                tokens.append(Token(
                    surface, tag, kind,
                    base_form=base_form(surface, kind, lemmas),
                    cardinal=cardinal,
                    doc_id=chunk.doc_id,
                    paragraph_index=p_index,
                ))
            sentences.append(Sentence(tuple(tokens)))
        paragraphs.append(Paragraph(tuple(sentences), chunk.doc_id, p_index))
    return Document(chunk.doc_id, tuple(paragraphs))


def parse_corpus(
    source: TextIO | str,
    policy: TagPolicy = DEFAULT_POLICY,
    lemmas: LemmaMap | None = None,
    threads: int = 1,
) -> Corpus:
    """Parse a corpus file (or its text) into a :class:`Corpus`.

    Documents are parsed independently, on ``threads`` workers when more
    than one is requested; document order always follows the input.
    """
    if isinstance(source, str):
        source = io.StringIO(source)
    chunks = _split_documents(source)
    if threads > 1 and len(chunks) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            docs = list(pool.map(lambda c: _parse_document(c, policy, lemmas), chunks))
    else:
        docs = [_parse_document(c, policy, lemmas) for c in chunks]
    return Corpus(tuple(docs))


def dump_corpus(corpus: Corpus) -> str:
    """Serialize back to the corpus file format (parse(dump(c)) == c)."""
    out = []
    for doc in corpus.documents:
        out.append(f"#DOC {doc.id}\n")
        for i, para in enumerate(doc.paragraphs):
            if i:
                out.append("\n")
            for sent in para.sentences:
                out.append(" ".join(f"{t.surface}_{t.tag}" for t in sent.tokens) + "\n")
    return "".join(out)


def corpus_stats(corpus: Corpus) -> CorpusStats:
    nouns: set[str] = set()
    verbs: set[str] = set()
    paragraphs = sentences = nn = vn = 0
    for para in corpus.paragraphs():
        paragraphs += 1
        sentences += len(para.sentences)
        bases = [t.base_form for t in para.nouns]
        nouns.update(bases)
        verbs.update(t.base_form for t in para.verbs)
        # unordered noun-token pairs with distinct base forms
        total = len(bases) * (len(bases) - 1) // 2
        same = sum(c * (c - 1) // 2 for c in Counter(bases).values())
        nn += total - same
        for sent in para.sentences:
            vn += len(sent.nouns()) * len(sent.verbs())
    return CorpusStats(
        document_count=len(corpus.documents),
        paragraph_count=paragraphs,
        sentence_count=sentences,
        distinct_nouns=len(nouns),
        distinct_verbs=len(verbs),
        nn_pair_count=nn,
        vn_pair_count=vn,
    )

