import math
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import TRAIN_FIXTURES, load_fixture
from oracles import brute_scores
from topicid.corpus import Kind, parse_corpus
from topicid.norms import IdfTable, NormStore, StoreMeta, train
from topicid.topics import (
    combine_cs,
    format_shift_tsv,
    format_topics_tsv,
    identify_topics,
    merge_ncs,
    normalize_cs,
    score_occurrence,
    topic_set_size,
    topic_shift,
)
from topicid.weights import InterpolationWeights

HALF = InterpolationWeights(0.5)


def make_store(ann=None, anv=None):
    ann = {tuple(sorted(k)): v for k, v in (ann or {}).items()}
    return NormStore(
        IdfTable(Kind.NOUN, 1, 0.77), IdfTable(Kind.VERB, 1, 2.46), ann, dict(anv or {}), StoreMeta(1, 0.77, 2.46)
    )


def paragraph(line):
    return parse_corpus("#DOC d\n" + line + "\n").documents[0].paragraphs[0]


def test_score_single_noun():
    para = paragraph("a_NN")
    assert score_occurrence(para, para.nouns[0], make_store()) == (0.0, 0.0)


def test_score_two_nouns():
    para = paragraph("a_NN x_IN y_JJ z_VB b_NN")
    a = para.nouns[0]
    assert (a.cardinal, para.nouns[1].cardinal) == (1, 3)
    csnn, csnv = score_occurrence(para, a, make_store({("a", "b"): 4.0}))
    assert (csnn, csnv) == (2.0, 0.0)


def test_score_noun_verb():
    para = paragraph("a_NN v_VB")
    assert score_occurrence(para, para.nouns[0], make_store(anv={("a", "v"): 6.0})) == (0.0, 6.0)


def test_score_rejects_foreign_occurrence():
    para = paragraph("a_NN v_VB")
    other = paragraph("b_NN")
    with pytest.raises(ValueError):
        score_occurrence(para, other.nouns[0], make_store())


@pytest.mark.parametrize("csnn, csnv, pn, expected", [
    (0, 0, 0.3, 0.0),
    (2, 6, 0.5, 4.0),
    (10, 0, 0.675844, 6.75844),
])
def test_combine_cs(csnn, csnv, pn, expected):
    assert combine_cs(csnn, csnv, InterpolationWeights(pn)) == pytest.approx(expected, rel=1e-15)


@pytest.mark.parametrize("raw, expected", [
    ([4, 2, 0], [1.0, 0.5, 0.0]),
    ([0, 0], [0.0, 0.0]),
    ([7.3], [1.0]),
    ([], []),
])
def test_normalize_cs(raw, expected):
    assert normalize_cs(raw) == expected


@pytest.mark.parametrize("values, expected", [
    ([0.6], 0.6),
    ([0.5, 0.5], 0.75),
    ([1.0, 0.3], 1.0),
    ([1.0, 0.0], 1.0),
    ([0.0, 0.0, 0.2], 0.2),
])
def test_merge_ncs(values, expected):
    assert merge_ncs(values) == pytest.approx(expected, abs=1e-15)


def test_merge_ncs_empty():
    with pytest.raises(ValueError):
        merge_ncs([])


@settings(max_examples=300)
@given(st.lists(st.floats(0, 1), min_size=1, max_size=100), st.floats(0, 1))
def test_merge_ncs_closed_form_and_monotone(values, extra):
    got = merge_ncs(values)
    assert abs(got - (1 - math.prod(1 - v for v in values))) <= 1e-12
    assert 0.0 <= got <= 1.0
    assert merge_ncs(values + [extra]) >= got


@pytest.mark.parametrize("m, fraction, size", [
    (10, 0.2, 2), (7, 0.2, 2), (15, 0.2, 3), (5, 0.2, 1), (1, 0.2, 1), (3, 0.01, 1),
    (4, 1.0, 4), (0, 0.2, 0),
])
def test_topic_set_size(m, fraction, size):
    assert topic_set_size(m, fraction) == size


def test_identify_dominant_repeated_noun():
    # positions b1 a2 c3 a4 v5; ANN(a,b)=ANN(a,c)=10, ANV(a,v)=6, PN=0.5
    # raw CS by hand: b 20/3, a@2 11, c 10, a@4 29/3; normalized by 11
    para = paragraph("b_NN a_NN c_NN a_NN v_VB")
    store = make_store({("a", "b"): 10.0, ("a", "c"): 10.0}, {("a", "v"): 6.0})
    res = identify_topics(para, store, HALF, 0.2)
    assert [c.base_form for c in res.candidates] == ["a", "c", "b"]
    assert res.topic_set == ("a",)
    by = {c.base_form: c for c in res.candidates}
    assert by["a"].ncs == pytest.approx(1.0)
    assert by["c"].ncs == pytest.approx(10 / 11)
    assert by["b"].ncs == pytest.approx((20 / 3) / 11)
    assert [o.cs for o in by["a"].occurrences] == pytest.approx([1.0, (29 / 3) / 11])
    assert by["a"].frequency == 2


def test_identify_topic_set_from_fraction():
    nouns = " ".join(f"n{i}_NN" for i in range(10))
    ann = {(f"n{i}", f"n{i + 1}"): float(i + 1) for i in range(9)}
    res = identify_topics(paragraph(nouns), make_store(ann), HALF, 0.2)
    assert len(res.topic_set) == 2
    assert list(res.topic_set) == [c.base_form for c in res.candidates[:2]]
    assert identify_topics(paragraph(nouns), make_store(ann), HALF, 1.0).topic_set == tuple(
        c.base_form for c in res.candidates
    )


def test_identify_empty_paragraph():
    res = identify_topics(paragraph("the_AT ._."), make_store(), HALF)
    assert res.candidates == () and res.topic_set == ()


def test_identify_rejects_bad_fraction():
    with pytest.raises(ValueError):
        identify_topics(paragraph("a_NN"), make_store(), HALF, 0.0)


def test_tie_break_frequency_then_position_then_name():
    # no norms at all: every NCS is 0
    res = identify_topics(paragraph("z_NN y_NN x_NN y_NN"), make_store(), HALF)
    assert [c.base_form for c in res.candidates] == ["y", "z", "x"]


def _check_against_oracle(para, store, pn):
    res = identify_topics(para, store, InterpolationWeights(pn), 1.0)
    occs, ncs = brute_scores(para, store.ann, store.anv, pn)
    got = {(o.base_form, o.cardinal): o for c in res.candidates for o in c.occurrences}
    assert len(got) == len(occs)
    for base, pos, csnn, csnv, raw, cs in occs:
        o = got[(base, pos)]
        for a, b in ((o.csnn, csnn), (o.csnv, csnv), (o.cs_raw, raw), (o.cs, cs)):
            assert abs(a - b) <= 1e-9 * max(1.0, abs(b))
    for c in res.candidates:
        assert abs(c.ncs - ncs[c.base_form]) <= 1e-9
    assert sorted(c.rank for c in res.candidates) == list(range(1, len(res.candidates) + 1))


@pytest.mark.parametrize("name", TRAIN_FIXTURES)
def test_scores_match_oracle_on_fixtures(name):
    corpus = load_fixture(name)
    store = train(corpus)
    for para in corpus.paragraphs():
        _check_against_oracle(para, store, 0.675844)


_slot = st.one_of(
    st.tuples(st.sampled_from("abcdef"), st.just("NN")),
    st.tuples(st.sampled_from("uvwx"), st.just("VB")),
    st.tuples(st.just("the"), st.just("AT")),
)


@st.composite
def paragraphs_with_norms(draw):
    sents = draw(st.lists(st.lists(_slot, min_size=1, max_size=5), min_size=1, max_size=3))
    words = [w for s in sents for w in s]
    nouns = [w for w, t in words if t == "NN"]
    verbs = [w for w, t in words if t == "VB"]
    if len(nouns) > 6 or len(verbs) > 4:
        sents = [[("a", "NN")]]
    text = "\n".join(" ".join(f"{w}_{t}" for w, t in s) for s in sents)
    value = st.floats(0.0, 50.0)
    ann = {(a, b): draw(value) for a in "abcdef" for b in "abcdef" if a < b}
    anv = {(n, v): draw(value) for n in "abcdef" for v in "uvwx"}
    return text, ann, anv, draw(st.floats(0.0, 1.0))


@settings(max_examples=150, deadline=None)
@given(paragraphs_with_norms())
def test_scores_match_oracle_on_random_paragraphs(case):
    text, ann, anv, pn = case
    _check_against_oracle(paragraph(text), make_store(ann, anv), pn)


@pytest.mark.parametrize("name", TRAIN_FIXTURES)
def test_ranking_is_scale_invariant(name):
    corpus = load_fixture(name)
    store = train(corpus)
    scaled = store.scaled(7.3)
    w = InterpolationWeights(0.675844)
    for para in corpus.paragraphs():
        a = [c.base_form for c in identify_topics(para, store, w).candidates]
        b = [c.base_form for c in identify_topics(para, scaled, w).candidates]
        assert a == b


def test_shift_identical_paragraphs():
    line = "b_NN a_NN c_NN a_NN v_VB d_NN"
    doc = parse_corpus(f"#DOC d\n{line}\n\n{line}\n").documents[0]
    store = make_store({("a", "b"): 10.0, ("a", "c"): 10.0, ("c", "d"): 1.0}, {("a", "v"): 6.0})
    report = topic_shift(doc, store, HALF, 0.5)
    assert len(report.steps) == 1
    entries = report.steps[0].entries
    assert [e.rank for e in entries] == [1, 2]
    assert not any(e.virtual for e in entries)


def test_shift_absent_topic_sinks_to_bottom():
    doc = parse_corpus("#DOC d\nq_NN\n\na_NN b_NN c_NN\n").documents[0]
    store = make_store({("a", "b"): 1.0})
    report = topic_shift(doc, store, HALF)
    (entry,) = report.steps[0].entries
    assert entry.prev_topic == "q" and entry.virtual
    assert entry.rank == 4


def test_shift_absent_topic_with_evidence_ranks_high():
    doc = parse_corpus("#DOC d\nq_NN\n\na_NN b_NN go_VB c_NN\n").documents[0]
    store = make_store({("q", "a"): 50.0, ("q", "b"): 50.0, ("a", "b"): 1.0}, {("q", "go"): 50.0})
    (entry,) = topic_shift(doc, store, HALF).steps[0].entries
    assert entry.virtual and entry.rank == 1


def test_shift_needs_two_paragraphs():
    doc = parse_corpus("#DOC d\na_NN\n").documents[0]
    with pytest.raises(ValueError, match="nothing to compare"):
        topic_shift(doc, make_store(), HALF)


def test_shift_covers_every_step(fixture_corpus):
    store = train(fixture_corpus)
    for doc in fixture_corpus.documents:
        if len(doc.paragraphs) < 2:
            continue
        report = topic_shift(doc, store, HALF)
        assert [s.paragraph_index for s in report.steps] == list(range(2, len(doc.paragraphs) + 1))


def test_tsv_formats():
    doc = parse_corpus("#DOC d\nb_NN a_NN c_NN a_NN v_VB\n\nq_NN\n").documents[0]
    store = make_store({("a", "b"): 10.0, ("a", "c"): 10.0}, {("a", "v"): 6.0})
    res = identify_topics(doc.paragraphs[0], store, HALF)
    lines = format_topics_tsv([res]).splitlines()
    assert lines[0] == "d\t1\t1\ta\t1.000000000\t2\t1"
    assert lines[2].split("\t")[-1] == "0"
    shift = format_shift_tsv([topic_shift(doc, store, HALF)])
    assert shift == "d\t2\ta\t2\t1\n"


def test_random_lists_closed_form():
    rng = random.Random(1995)
    for _ in range(1000):
        values = [rng.random() for _ in range(rng.randint(1, 100))]
        assert abs(merge_ncs(values) - (1 - math.prod(1 - v for v in values))) <= 1e-12
