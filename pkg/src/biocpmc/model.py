"""BioC in-memory data model.

A :class:`Collection` holds :class:`Document` objects, each a linear sequence
of typed :class:`Passage` objects. Offsets everywhere are counted in Unicode
code points from the start of the document text, so ``len()`` on a Python
string is the length unit.

Infon maps are plain ``dict[str, str]``; dict insertion order keeps
serialization deterministic.
"""

from __future__ import annotations

import dataclasses
import re
from dataclasses import dataclass, field
from typing import Dict, List

from .errors import MissingTypeInfon

InfonMap = Dict[str, str]

DEFAULT_SEPARATOR = 1

# XML 1.0 Char production; anything outside it cannot be serialized.
_XML_ILLEGAL = re.compile("[^\t\n\r\x20-\ud7ff\ue000-\ufffd\U00010000-\U0010ffff]")


@dataclass
class Location:
    offset: int
    length: int

    @property
    def end(self) -> int:
        return self.offset + self.length


@dataclass
class Node:
    refid: str
    role: str = ""


@dataclass
class Annotation:
    id: str
    infons: InfonMap = field(default_factory=dict)
    locations: List[Location] = field(default_factory=list)
    text: str = ""


@dataclass
class Relation:
    id: str
    infons: InfonMap = field(default_factory=dict)
    nodes: List[Node] = field(default_factory=list)


@dataclass
class Sentence:
    offset: int
    text: str = ""
    infons: InfonMap = field(default_factory=dict)
    annotations: List[Annotation] = field(default_factory=list)
    relations: List[Relation] = field(default_factory=list)


@dataclass
class Passage:
    """One typed unit of text: a title, paragraph, caption, and so on."""

    offset: int
    text: str = ""
    infons: InfonMap = field(default_factory=dict)
    sentences: List[Sentence] = field(default_factory=list)
    annotations: List[Annotation] = field(default_factory=list)
    relations: List[Relation] = field(default_factory=list)

    @property
    def end(self) -> int:
        return self.offset + len(self.text)


@dataclass
class Document:
    id: str
    infons: InfonMap = field(default_factory=dict)
    passages: List[Passage] = field(default_factory=list)
    relations: List[Relation] = field(default_factory=list)


@dataclass
class Collection:
    source: str = ""
    date: str = ""
    key: str = ""
    infons: InfonMap = field(default_factory=dict)
    documents: List[Document] = field(default_factory=list)


def passage_type(passage: Passage) -> str:
    """Return the ``type`` infon of *passage*.

    Raises:
        MissingTypeInfon: the passage carries no ``type`` infon.
    """
    try:
        return passage.infons["type"]
    except KeyError:
        raise MissingTypeInfon(f"passage at offset {passage.offset} has no 'type' infon") from None


def recompute_offsets(document: Document, separator: int = DEFAULT_SEPARATOR) -> Document:
    """Return a copy of *document* with passage offsets laid end to end.

    The first passage starts at 0 and each following passage starts
    ``separator`` code points after the end of the previous one. Nothing but
    the passage offsets changes.
    """
    if separator < 0:
        raise ValueError("separator must be >= 0")
    passages = []
    pos = 0
    for p in document.passages:
        passages.append(dataclasses.replace(p, offset=pos))
        pos += len(p.text) + separator
    return dataclasses.replace(document, passages=passages)


@dataclass(frozen=True)
class Violation:
    path: str
    rule: str
    detail: str = ""

    def __str__(self) -> str:
        s = f"{self.path}: {self.rule}"
        return f"{s} ({self.detail})" if self.detail else s


# Rule names reported by validate().
R_EMPTY_ID = "document id empty"
R_DUP_DOC = "duplicate document id"
R_ORDER = "passage offsets not increasing"
R_NO_TYPE = "passage missing type infon"
R_NEG_OFFSET = "negative offset"
R_EMPTY_KEY = "empty infon key"
R_NON_STR = "non-string value"
R_ANN_OUTSIDE_PASSAGE = "annotation outside passage span"
R_ANN_OUTSIDE_SENTENCE = "annotation outside sentence span"
R_SENT_OUTSIDE = "sentence outside passage span"
R_BAD_LOCATION = "invalid location"
R_NO_LOCATIONS = "annotation without locations"
R_ANN_TEXT_LEN = "annotation text length mismatch"
R_DUP_ANN = "duplicate annotation id"
R_NO_NODES = "relation without nodes"
R_EMPTY_REFID = "empty node refid"
R_DANGLING = "node refid does not resolve"
R_XML_CHAR = "character not representable in XML"


class _Checker:
    def __init__(self):
        self.report: List[Violation] = []

    def add(self, path, rule, detail=""):
        self.report.append(Violation(path, rule, detail))

    def string(self, path, value):
        if not isinstance(value, str):
            self.add(path, R_NON_STR, type(value).__name__)
        elif _XML_ILLEGAL.search(value):
            self.add(path, R_XML_CHAR)

    def infons(self, path, infons):
        for k, v in infons.items():
            if not isinstance(k, str) or not k:
                self.add(f"{path}.infons", R_EMPTY_KEY)
            else:
                self.string(f"{path}.infons[{k}]", k)
            self.string(f"{path}.infons[{k}]", v)

    def annotations(self, path, annotations, lo, hi, outside_rule):
        seen = set()
        for i, a in enumerate(annotations):
            ap = f"{path}.annotations[{i}]"
            self.string(f"{ap}.id", a.id)
            if a.id in seen:
                self.add(ap, R_DUP_ANN, a.id)
            seen.add(a.id)
            self.infons(ap, a.infons)
            self.string(f"{ap}.text", a.text)
            if not a.locations:
                self.add(ap, R_NO_LOCATIONS)
            for j, loc in enumerate(a.locations):
                lp = f"{ap}.locations[{j}]"
                if loc.offset < 0 or loc.length < 1:
                    self.add(lp, R_BAD_LOCATION, f"offset={loc.offset} length={loc.length}")
                elif loc.offset < lo or loc.end > hi:
                    self.add(lp, outside_rule, f"[{loc.offset}, {loc.end}) not in [{lo}, {hi})")
            if len(a.locations) == 1 and len(a.text) != a.locations[0].length:
                self.add(ap, R_ANN_TEXT_LEN, f"{len(a.text)} != {a.locations[0].length}")

    def relations(self, path, relations, visible):
        for i, r in enumerate(relations):
            rp = f"{path}.relations[{i}]"
            self.string(f"{rp}.id", r.id)
            self.infons(rp, r.infons)
            if not r.nodes:
                self.add(rp, R_NO_NODES)
            for j, n in enumerate(r.nodes):
                np_ = f"{rp}.nodes[{j}]"
                self.string(f"{np_}.role", n.role)
                if not n.refid:
                    self.add(np_, R_EMPTY_REFID)
                elif n.refid not in visible:
                    self.add(np_, R_DANGLING, n.refid)


def validate(document: Document, path: str = "document") -> List[Violation]:
    """Check every model invariant on *document*.

    Returns all violations found (empty list when the document is valid);
    violations are data, so this never raises.
    """
    c = _Checker()
    if not document.id:
        c.add(f"{path}.id", R_EMPTY_ID)
    else:
        c.string(f"{path}.id", document.id)
    c.infons(path, document.infons)

    all_ann_ids = set()
    prev = None
    for i, p in enumerate(document.passages):
        pp = f"{path}.passages[{i}]"
        if not p.infons.get("type"):
            c.add(pp, R_NO_TYPE)
        c.infons(pp, p.infons)
        c.string(f"{pp}.text", p.text)
        if p.offset < 0:
            c.add(pp, R_NEG_OFFSET, str(p.offset))
        if prev is not None and p.offset <= prev:
            c.add(pp, R_ORDER, f"{prev} then {p.offset}")
        prev = p.offset

        c.annotations(pp, p.annotations, p.offset, p.end, R_ANN_OUTSIDE_PASSAGE)
        passage_scope = {a.id for a in p.annotations}
        for j, s in enumerate(p.sentences):
            sp = f"{pp}.sentences[{j}]"
            c.infons(sp, s.infons)
            c.string(f"{sp}.text", s.text)
            s_end = s.offset + len(s.text)
            if s.offset < p.offset or s_end > p.end:
                c.add(sp, R_SENT_OUTSIDE, f"[{s.offset}, {s_end}) not in [{p.offset}, {p.end})")
            c.annotations(sp, s.annotations, s.offset, s_end, R_ANN_OUTSIDE_SENTENCE)
            sentence_scope = {a.id for a in s.annotations}
            c.relations(sp, s.relations, sentence_scope)
            passage_scope |= sentence_scope
        c.relations(pp, p.relations, passage_scope)
        all_ann_ids |= passage_scope

    c.relations(path, document.relations, all_ann_ids)
    return c.report


def validate_collection(collection: Collection) -> List[Violation]:
    c = _Checker()
    for name in ("source", "date", "key"):
        c.string(f"collection.{name}", getattr(collection, name))
    c.infons("collection", collection.infons)
    report = c.report
    seen = set()
    for i, d in enumerate(collection.documents):
        if d.id in seen:
            report.append(Violation(f"collection.documents[{i}]", R_DUP_DOC, d.id))
        seen.add(d.id)
        report.extend(validate(d, f"collection.documents[{i}]"))
    return report
