import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from biocpmc.errors import MissingTypeInfon
from biocpmc.model import (
    Annotation,
    Collection,
    Document,
    Location,
    Node,
    Passage,
    Relation,
    Sentence,
    passage_type,
    recompute_offsets,
    validate,
    validate_collection,
)

from builders import rand_document


def codepoints(s: str) -> int:
    # independent of len(): UTF-32 uses exactly four bytes per code point
    return len(s.encode("utf-32-le")) // 4


def p(text, offset=0, kind="paragraph", **kw):
    return Passage(offset=offset, text=text, infons={"type": kind}, **kw)


def test_validate_empty_document():
    assert validate(Document(id="PMC1")) == []


def test_validate_offsets_not_increasing():
    doc = Document(id="PMC1", passages=[p("a", 10), p("b", 5)])
    report = validate(doc)
    assert [v.rule for v in report] == ["passage offsets not increasing"]
    assert report[0].path == "document.passages[1]"


def test_validate_annotation_outside_sample_passage(golden_text):
    assert codepoints(golden_text) == 568
    end = 1853 + codepoints(golden_text)
    ann = Annotation(id="A1", locations=[Location(9000, 4)], text="drug")
    doc = Document(id="PMC1790863", passages=[p(golden_text, 1853, annotations=[ann])])
    report = validate(doc)
    assert [v.rule for v in report] == ["annotation outside passage span"]
    assert f"[1853, {end})" in report[0].detail

    # last code point is in bounds, one past is not
    inside = Annotation(id="A1", locations=[Location(end - 1, 1)], text=golden_text[-1])
    doc.passages[0].annotations = [inside]
    assert validate(doc) == []
    inside.locations = [Location(end, 1)]
    assert [v.rule for v in validate(doc)] == ["annotation outside passage span"]


def test_validate_reports_every_violation():
    dangling = Relation(id="R1", nodes=[Node(refid="nope", role="x")])
    doc = Document(id="", passages=[
        Passage(offset=-1, text="abc", infons={}),
        p("xyz", 0, annotations=[Annotation(id="A", locations=[Location(0, 2)], text="xyz"),
                                 Annotation(id="A", locations=[Location(0, 1)], text="x")],
          relations=[dangling, Relation(id="R2")]),
    ])
    rules = sorted(v.rule for v in validate(doc))
    assert rules == sorted([
        "document id empty",
        "passage missing type infon",
        "negative offset",
        "annotation text length mismatch",
        "duplicate annotation id",
        "node refid does not resolve",
        "relation without nodes",
    ])


def test_validate_sentence_rules():
    s = Sentence(offset=2, text="cdefg", annotations=[Annotation(id="S1", locations=[Location(1, 1)], text="b")])
    doc = Document(id="PMC1", passages=[p("abcd", 0, sentences=[s],
                                           relations=[Relation(id="R", nodes=[Node("S1", "r")])])])
    rules = sorted(v.rule for v in validate(doc))
    assert rules == ["annotation outside sentence span", "sentence outside passage span"]


def test_validate_flags_xml_illegal_characters():
    doc = Document(id="PMC1", passages=[p("bell\x07")])
    assert [v.rule for v in validate(doc)] == ["character not representable in XML"]


def test_validate_document_relation_scope():
    ann = Annotation(id="T1", locations=[Location(0, 1)], text="a")
    doc = Document(id="PMC1", passages=[p("ab", 0, annotations=[ann])],
                   relations=[Relation(id="R", nodes=[Node("T1", "arg")])])
    assert validate(doc) == []


def test_validate_collection_duplicate_ids():
    c = Collection(documents=[Document(id="PMC1"), Document(id="PMC1")])
    assert [v.rule for v in validate_collection(c)] == ["duplicate document id"]


def test_recompute_offsets_recurrence():
    # 24 code points, one of them outside the BMP
    first = "\U0001f600" + "x" * 23
    second = "0123456789"
    assert (codepoints(first), codepoints(second)) == (24, 10)
    doc = recompute_offsets(Document(id="PMC1", passages=[p(first, 99), p(second, 7)]), 1)
    assert [q.offset for q in doc.passages] == [0, 25]


def test_recompute_offsets_edge_cases():
    assert recompute_offsets(Document(id="PMC1"), 1) == Document(id="PMC1")
    for sep in (0, 1, 5):
        assert recompute_offsets(Document(id="PMC1", passages=[p("abc", 42)]), sep).passages[0].offset == 0
    with pytest.raises(ValueError):
        recompute_offsets(Document(id="PMC1"), -1)


def test_recompute_offsets_leaves_input_alone():
    doc = Document(id="PMC1", infons={"a": "b"}, passages=[p("abc", 42, kind="title_1")])
    out = recompute_offsets(doc, 1)
    assert doc.passages[0].offset == 42
    assert out.passages[0].infons == {"type": "title_1"}
    assert out.infons == {"a": "b"}


@given(texts=st.lists(st.text(max_size=30), max_size=12), sep=st.integers(0, 4))
def test_recompute_offsets_properties(texts, sep):
    doc = Document(id="PMC1", passages=[p(t, 0) for t in texts])
    once = recompute_offsets(doc, sep)
    assert [q.offset for q in recompute_offsets(once, sep).passages] == [q.offset for q in once.passages]
    pos = 0
    for q in once.passages:
        assert q.offset == pos
        pos += codepoints(q.text) + sep
    if sep >= 1 or all(texts):
        offs = [q.offset for q in once.passages]
        assert all(a < b for a, b in zip(offs, offs[1:]))


@pytest.mark.parametrize("seed", range(50))
def test_generated_documents_are_valid(seed):
    assert validate(rand_document(random.Random(seed), "PMC1")) == []


def test_passage_type():
    assert passage_type(p("x", kind="paragraph")) == "paragraph"
    assert passage_type(p("x", kind="title_2")) == "title_2"
    with pytest.raises(MissingTypeInfon):
        passage_type(Passage(offset=0, text="x"))
