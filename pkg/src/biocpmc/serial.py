"""BioC XML and BioC JSON serialization.

Both writers emit a single canonical form (two-space indentation, fixed
element/key order) so the same collection always serializes to the same
bytes. Both readers are strict: unknown XML elements are rejected, and JSON
values of the wrong type raise :class:`TypeMismatch` with a dotted path.
"""

from __future__ import annotations

import enum
import json
import xml.etree.ElementTree as ET
from typing import List

from .errors import MissingField, ParseError, TypeMismatch, UnknownElement
from .model import (
    Annotation,
    Collection,
    Document,
    Location,
    Node,
    Passage,
    Relation,
    Sentence,
)

BIOC_ELEMENTS = frozenset({
    "collection", "source", "date", "key", "infon", "document", "id",
    "passage", "offset", "text", "sentence", "annotation", "location",
    "relation", "node",
})

XML_HEADER = '<?xml version="1.0" encoding="UTF-8"?>\n<!DOCTYPE collection SYSTEM "BioC.dtd">\n'


class SerializationFormat(enum.Enum):
    XML = "xml"
    JSON = "json"


def dumps(collection: Collection, fmt: SerializationFormat | str) -> str:
    fmt = SerializationFormat(fmt)
    return to_xml(collection) if fmt is SerializationFormat.XML else to_json(collection)


def loads(text, fmt: SerializationFormat | str) -> Collection:
    fmt = SerializationFormat(fmt)
    return from_xml(text) if fmt is SerializationFormat.XML else from_json(text)


# -- XML writer -------------------------------------------------------------

def _esc_text(s: str) -> str:
    # \r must be a character reference or parsers normalize it to \n
    return s.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;").replace("\r", "&#13;")


def _esc_attr(s: str) -> str:
    return (_esc_text(s).replace('"', "&quot;")
            .replace("\n", "&#10;").replace("\t", "&#9;"))


class _XmlWriter:
    def __init__(self):
        self.lines: List[str] = []
        self.depth = 0

    def leaf(self, tag, text, attrs=None):
        self.lines.append(f"{'  ' * self.depth}<{tag}{self._attrs(attrs)}>{_esc_text(text)}</{tag}>")

    def empty(self, tag, attrs):
        self.lines.append(f"{'  ' * self.depth}<{tag}{self._attrs(attrs)}/>")

    def open(self, tag, attrs=None):
        self.lines.append(f"{'  ' * self.depth}<{tag}{self._attrs(attrs)}>")
        self.depth += 1

    def close(self, tag):
        self.depth -= 1
        self.lines.append(f"{'  ' * self.depth}</{tag}>")

    @staticmethod
    def _attrs(attrs):
        if not attrs:
            return ""
        return "".join(f' {k}="{_esc_attr(v)}"' for k, v in attrs)

    def infons(self, infons):
        for k, v in infons.items():
            self.leaf("infon", v, [("key", k)])

    def annotation(self, a: Annotation):
        self.open("annotation", [("id", a.id)])
        self.infons(a.infons)
        for loc in a.locations:
            self.empty("location", [("offset", str(loc.offset)), ("length", str(loc.length))])
        self.leaf("text", a.text)
        self.close("annotation")

    def relation(self, r: Relation):
        self.open("relation", [("id", r.id)])
        self.infons(r.infons)
        for n in r.nodes:
            self.empty("node", [("refid", n.refid), ("role", n.role)])
        self.close("relation")

    def sentence(self, s: Sentence):
        self.open("sentence")
        self.infons(s.infons)
        self.leaf("offset", str(s.offset))
        self.leaf("text", s.text)
        for a in s.annotations:
            self.annotation(a)
        for r in s.relations:
            self.relation(r)
        self.close("sentence")

    def passage(self, p: Passage):
        self.open("passage")
        self.infons(p.infons)
        self.leaf("offset", str(p.offset))
        self.leaf("text", p.text)
        for s in p.sentences:
            self.sentence(s)
        for a in p.annotations:
            self.annotation(a)
        for r in p.relations:
            self.relation(r)
        self.close("passage")

    def document(self, d: Document):
        self.open("document")
        self.leaf("id", d.id)
        self.infons(d.infons)
        for p in d.passages:
            self.passage(p)
        for r in d.relations:
            self.relation(r)
        self.close("document")

    def collection(self, c: Collection):
        self.open("collection")
        self.leaf("source", c.source)
        self.leaf("date", c.date)
        self.leaf("key", c.key)
        self.infons(c.infons)
        for d in c.documents:
            self.document(d)
        self.close("collection")


def to_xml(collection: Collection) -> str:
    """Serialize *collection* as BioC XML using only the 15 BioC element names."""
    w = _XmlWriter()
    w.collection(collection)
    return XML_HEADER + "\n".join(w.lines) + "\n"


# -- XML reader -------------------------------------------------------------

def _local(tag: str) -> str:
    return tag.rsplit("}", 1)[-1]


class _XmlReader:
    def __init__(self):
        self.path: List[str] = []

    def children(self, el, allowed):
        out = []
        for child in el:
            name = _local(child.tag)
            if name not in BIOC_ELEMENTS:
                raise UnknownElement(name, _local(el.tag))
            if name not in allowed:
                raise UnknownElement(name, _local(el.tag))
            out.append((name, child))
        return out

    @staticmethod
    def _text(el) -> str:
        if len(el):
            raise UnknownElement(_local(el[0].tag), _local(el.tag))
        return el.text or ""

    def _int(self, raw, where):
        try:
            if raw is None:
                raise ValueError
            return int(raw.strip())
        except ValueError:
            raise TypeMismatch(where, "integer", raw) from None

    @staticmethod
    def _attr(el, name, where):
        v = el.get(name)
        if v is None:
            raise MissingField(f"{where}@{name}")
        return v

    def infon(self, el, infons, where):
        key = self._attr(el, "key", f"{where}.infon")
        infons[key] = self._text(el)

    def annotation(self, el, where) -> Annotation:
        a = Annotation(id=self._attr(el, "id", where))
        text = None
        for name, child in self.children(el, {"infon", "location", "text"}):
            if name == "infon":
                self.infon(child, a.infons, where)
            elif name == "location":
                lw = f"{where}.locations[{len(a.locations)}]"
                a.locations.append(Location(
                    offset=self._int(self._attr(child, "offset", lw), f"{lw}.offset"),
                    length=self._int(self._attr(child, "length", lw), f"{lw}.length"),
                ))
            else:
                text = self._text(child)
        if not a.locations:
            raise MissingField(f"{where}.location")
        a.text = text or ""
        return a

    def relation(self, el, where) -> Relation:
        r = Relation(id=self._attr(el, "id", where))
        for name, child in self.children(el, {"infon", "node"}):
            if name == "infon":
                self.infon(child, r.infons, where)
            else:
                nw = f"{where}.nodes[{len(r.nodes)}]"
                r.nodes.append(Node(refid=self._attr(child, "refid", nw), role=child.get("role", "")))
        return r

    def _unit(self, el, where, cls, allowed):
        infons, offset, text = {}, None, ""
        sentences, annotations, relations = [], [], []
        for name, child in self.children(el, allowed):
            if name == "infon":
                self.infon(child, infons, where)
            elif name == "offset":
                offset = self._int(self._text(child), f"{where}.offset")
            elif name == "text":
                text = self._text(child)
            elif name == "sentence":
                sentences.append(self.sentence(child, f"{where}.sentences[{len(sentences)}]"))
            elif name == "annotation":
                annotations.append(self.annotation(child, f"{where}.annotations[{len(annotations)}]"))
            elif name == "relation":
                relations.append(self.relation(child, f"{where}.relations[{len(relations)}]"))
        if offset is None:
            raise MissingField(f"{where}.offset")
        kw = dict(offset=offset, text=text, infons=infons, annotations=annotations, relations=relations)
        if cls is Passage:
            kw["sentences"] = sentences
        return cls(**kw)

    def sentence(self, el, where) -> Sentence:
        return self._unit(el, where, Sentence, {"infon", "offset", "text", "annotation", "relation"})

    def passage(self, el, where) -> Passage:
        return self._unit(el, where, Passage,
                          {"infon", "offset", "text", "sentence", "annotation", "relation"})

    def document(self, el, where) -> Document:
        doc_id = None
        d = Document(id="")
        for name, child in self.children(el, {"id", "infon", "passage", "relation"}):
            if name == "id":
                doc_id = self._text(child)
            elif name == "infon":
                self.infon(child, d.infons, where)
            elif name == "passage":
                d.passages.append(self.passage(child, f"{where}.passages[{len(d.passages)}]"))
            else:
                d.relations.append(self.relation(child, f"{where}.relations[{len(d.relations)}]"))
        if doc_id is None:
            raise MissingField(f"{where}.id")
        d.id = doc_id
        return d

    def collection(self, el) -> Collection:
        name = _local(el.tag)
        if name != "collection":
            raise UnknownElement(name)
        c = Collection()
        for name, child in self.children(el, {"source", "date", "key", "infon", "document"}):
            if name in ("source", "date", "key"):
                setattr(c, name, self._text(child))
            elif name == "infon":
                self.infon(child, c.infons, "collection")
            else:
                c.documents.append(self.document(child, f"documents[{len(c.documents)}]"))
        return c


def from_xml(text) -> Collection:
    """Parse BioC XML (``str`` or UTF-8 ``bytes``) into a :class:`Collection`.

    Raises:
        ParseError: input is not well-formed XML.
        UnknownElement: an element outside the BioC vocabulary, or out of place.
        MissingField: a required child such as ``offset`` is absent.
    """
    try:
        root = ET.fromstring(text)
    except ET.ParseError as exc:
        raise ParseError(f"malformed XML: {exc}", getattr(exc, "position", None)) from None
    return _XmlReader().collection(root)


# -- JSON -------------------------------------------------------------------

def _infons_json(infons):
    return dict(infons)


def _ann_json(a: Annotation):
    return {
        "id": a.id,
        "infons": _infons_json(a.infons),
        "text": a.text,
        "locations": [{"offset": loc.offset, "length": loc.length} for loc in a.locations],
    }


def _rel_json(r: Relation):
    return {
        "id": r.id,
        "infons": _infons_json(r.infons),
        "nodes": [{"refid": n.refid, "role": n.role} for n in r.nodes],
    }


def _sentence_json(s: Sentence):
    return {
        "infons": _infons_json(s.infons),
        "offset": s.offset,
        "text": s.text,
        "annotations": [_ann_json(a) for a in s.annotations],
        "relations": [_rel_json(r) for r in s.relations],
    }


def passage_to_dict(p: Passage) -> dict:
    # key order follows the published sample
    return {
        "text": p.text,
        "offset": p.offset,
        "relations": [_rel_json(r) for r in p.relations],
        "infons": _infons_json(p.infons),
        "sentences": [_sentence_json(s) for s in p.sentences],
        "annotations": [_ann_json(a) for a in p.annotations],
    }


def document_to_dict(d: Document) -> dict:
    return {
        "id": d.id,
        "infons": _infons_json(d.infons),
        "passages": [passage_to_dict(p) for p in d.passages],
        "relations": [_rel_json(r) for r in d.relations],
    }


def collection_to_dict(c: Collection) -> dict:
    return {
        "source": c.source,
        "date": c.date,
        "key": c.key,
        "infons": _infons_json(c.infons),
        "documents": [document_to_dict(d) for d in c.documents],
    }


def to_json(collection: Collection) -> str:
    """Serialize *collection* as BioC JSON (UTF-8 text, non-ASCII kept as is)."""
    return json.dumps(collection_to_dict(collection), ensure_ascii=False, indent=2) + "\n"


def _get(obj, key, path, kind, required=False, default=None):
    if key not in obj:
        if required:
            raise MissingField(f"{path}.{key}" if path else key)
        return default
    value = obj[key]
    where = f"{path}.{key}" if path else key
    if kind is int:
        if isinstance(value, bool) or not isinstance(value, int):
            raise TypeMismatch(where, "integer", value)
    elif kind is str:
        if not isinstance(value, str):
            raise TypeMismatch(where, "string", value)
    elif kind is list:
        if not isinstance(value, list):
            raise TypeMismatch(where, "array", value)
    elif kind is dict:
        if not isinstance(value, dict):
            raise TypeMismatch(where, "object", value)
    return value


def _join(path, key):
    return f"{path}.{key}" if path else key


def _obj(value, path):
    if not isinstance(value, dict):
        raise TypeMismatch(path, "object", value)
    return value


def _infons_from(obj, path):
    raw = _get(obj, "infons", path, dict, default={})
    infons = {}
    for k, v in raw.items():
        if not isinstance(v, str):
            raise TypeMismatch(f"{_join(path, 'infons')}.{k}", "string", v)
        infons[k] = v
    return infons


def _ann_from(obj, path) -> Annotation:
    _obj(obj, path)
    locations = []
    for i, lo in enumerate(_get(obj, "locations", path, list, required=True)):
        lp = f"{_join(path, 'locations')}[{i}]"
        _obj(lo, lp)
        locations.append(Location(
            offset=_get(lo, "offset", lp, int, required=True),
            length=_get(lo, "length", lp, int, required=True),
        ))
    return Annotation(
        id=_get(obj, "id", path, str, required=True),
        infons=_infons_from(obj, path),
        locations=locations,
        text=_get(obj, "text", path, str, default=""),
    )


def _rel_from(obj, path) -> Relation:
    _obj(obj, path)
    nodes = []
    for i, n in enumerate(_get(obj, "nodes", path, list, default=[])):
        np_ = f"{_join(path, 'nodes')}[{i}]"
        _obj(n, np_)
        nodes.append(Node(
            refid=_get(n, "refid", np_, str, required=True),
            role=_get(n, "role", np_, str, default=""),
        ))
    return Relation(id=_get(obj, "id", path, str, required=True),
                    infons=_infons_from(obj, path), nodes=nodes)


def _items(obj, key, path, reader):
    base = _join(path, key)
    return [reader(item, f"{base}[{i}]") for i, item in enumerate(_get(obj, key, path, list, default=[]))]


def _sentence_from(obj, path) -> Sentence:
    _obj(obj, path)
    return Sentence(
        offset=_get(obj, "offset", path, int, required=True),
        text=_get(obj, "text", path, str, required=True),
        infons=_infons_from(obj, path),
        annotations=_items(obj, "annotations", path, _ann_from),
        relations=_items(obj, "relations", path, _rel_from),
    )


def passage_from_dict(obj, path="passages[0]") -> Passage:
    _obj(obj, path)
    return Passage(
        offset=_get(obj, "offset", path, int, required=True),
        text=_get(obj, "text", path, str, required=True),
        infons=_infons_from(obj, path),
        sentences=_items(obj, "sentences", path, _sentence_from),
        annotations=_items(obj, "annotations", path, _ann_from),
        relations=_items(obj, "relations", path, _rel_from),
    )


def document_from_dict(obj, path="") -> Document:
    _obj(obj, path or "document")
    return Document(
        id=_get(obj, "id", path, str, required=True),
        infons=_infons_from(obj, path),
        passages=_items(obj, "passages", path, passage_from_dict),
        relations=_items(obj, "relations", path, _rel_from),
    )


def collection_from_dict(obj) -> Collection:
    _obj(obj, "collection")
    return Collection(
        source=_get(obj, "source", "", str, default=""),
        date=_get(obj, "date", "", str, default=""),
        key=_get(obj, "key", "", str, default=""),
        infons=_infons_from(obj, ""),
        documents=_items(obj, "documents", "", document_from_dict),
    )


def from_json(text) -> Collection:
    """Parse BioC JSON into a :class:`Collection`.

    Missing ``sentences``/``annotations``/``relations`` default to empty
    lists; a missing passage ``text`` or ``offset`` raises
    :class:`MissingField`.
    """
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"malformed JSON: {exc.msg}", exc.pos) from None
    return collection_from_dict(obj)
