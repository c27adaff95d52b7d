"""JATS article XML to BioC document conversion.

The article is flattened into a linear passage sequence in source order:

========================  =================
JATS source               passage ``type``
========================  =================
article title             ``front``
abstract ``p``            ``abstract``
body ``sec/title``        ``title_N`` (N = ``sec`` nesting depth, top = 1)
body ``p``                ``paragraph``
``fig/caption``           ``fig_caption``
``table-wrap/caption``    ``table_caption``
========================  =================

Inline markup is unwrapped to plain text except citation cross references,
which are dropped together with their text (and with the ``sup``/``sub`` that
only wraps them). Back matter is not converted.
"""

from __future__ import annotations

import enum
import re
import unicodedata
import xml.etree.ElementTree as ET
from dataclasses import dataclass
from typing import Iterator, List, Optional, Tuple

from .errors import EmptyArticle, ParseError
from .model import DEFAULT_SEPARATOR, Document, Passage, recompute_offsets
from .translit import TranslitTable, to_ascii

PMCID_RE = re.compile(r"PMC[0-9]+")
PMID_RE = re.compile(r"[0-9]+")

FRONT = "front"
ABSTRACT = "abstract"
PARAGRAPH = "paragraph"
FIG_CAPTION = "fig_caption"
TABLE_CAPTION = "table_caption"

_FLOATS = {"fig": FIG_CAPTION, "table-wrap": TABLE_CAPTION}
# Block-level elements that imply a word boundary when flattened inline.
_BLOCKS = frozenset({
    "p", "title", "caption", "list", "list-item", "label", "disp-quote",
    "disp-formula", "def-list", "def-item", "term", "def", "break",
    "table", "tr", "td", "th", "boxed-text", "statement", "verse-group", "verse-line",
})
# Body children that never produce passages.
_SKIP = frozenset({"title", "label", "sec-meta", "table", "supplementary-material",
                   "ref-list", "fn-group", "glossary", "object-id", "alternatives"})
_WS = re.compile(r"[ \t\r\n]+")


class Encoding(str, enum.Enum):
    UNICODE = "unicode"
    ASCII = "ascii"


@dataclass(frozen=True)
class ConversionOptions:
    encoding: Encoding = Encoding.UNICODE
    separator: int = DEFAULT_SEPARATOR
    table: Optional[TranslitTable] = None

    def __post_init__(self):
        object.__setattr__(self, "encoding", Encoding(self.encoding))
        if self.separator < 0:
            raise ValueError("separator must be >= 0")


@dataclass(frozen=True)
class JatsSourceInfo:
    pmcid: str
    pmid: Optional[str] = None
    journal: Optional[str] = None

    def __post_init__(self):
        if not PMCID_RE.fullmatch(self.pmcid or ""):
            raise ValueError(f"pmcid must look like PMC<digits>, got {self.pmcid!r}")
        if self.pmid is not None and not PMID_RE.fullmatch(self.pmid):
            raise ValueError(f"pmid must be digits, got {self.pmid!r}")


def _local(tag) -> str:
    if not isinstance(tag, str):
        return ""
    return tag.rsplit("}", 1)[-1]


def _children(el, name) -> Iterator[ET.Element]:
    return (c for c in el if _local(c.tag) == name)


def _first(el, *path) -> Optional[ET.Element]:
    for name in path:
        if el is None:
            return None
        el = next(_children(el, name), None)
    return el


def parse_article(jats_xml) -> ET.Element:
    """Parse JATS text and return the ``article`` element."""
    if isinstance(jats_xml, ET.Element):
        return jats_xml
    try:
        root = ET.fromstring(jats_xml)
    except ET.ParseError as exc:
        raise ParseError(f"malformed XML: {exc}", getattr(exc, "position", None)) from None
    if _local(root.tag) == "article":
        return root
    for el in root.iter():
        if _local(el.tag) == "article":
            return el
    raise EmptyArticle(f"no <article> element (root is <{_local(root.tag)}>)")


def _is_citation_marker(el) -> bool:
    """True for a sup/sub that holds nothing but xrefs and punctuation."""
    kids = list(el)
    if not kids or any(_local(k.tag) != "xref" for k in kids):
        return False
    loose = (el.text or "") + "".join(k.tail or "" for k in kids)
    return all(ch.isspace() or unicodedata.category(ch).startswith("P") for ch in loose)


def _drop(el) -> bool:
    name = _local(el.tag)
    if name == "xref" or name in _FLOATS:
        return True
    return name in ("sup", "sub") and _is_citation_marker(el)


def _gather(el, out: List[str]) -> None:
    if el.text:
        out.append(el.text)
    for child in el:
        if not _drop(child):
            block = _local(child.tag) in _BLOCKS
            if block:
                out.append(" ")
            _gather(child, out)
            if block:
                out.append(" ")
        if child.tail:
            out.append(child.tail)


def flatten_inline(element) -> str:
    """Plain text of an inline subtree (paragraph, title or caption).

    ``xref`` elements vanish with their text; a ``sup``/``sub`` holding only
    xrefs vanishes too. Other inline formatting is unwrapped. Floats nested in
    the subtree are skipped because they become passages of their own.
    Whitespace runs collapse to one space and the ends are trimmed.
    """
    out: List[str] = []
    _gather(element, out)
    return _WS.sub(" ", "".join(out)).strip(" ")


class _Walker:
    def __init__(self):
        self.rows: List[Tuple[str, str]] = []

    def emit(self, kind, el):
        text = flatten_inline(el)
        if text:
            self.rows.append((kind, text))

    def float_(self, el):
        caption = _first(el, "caption")
        if caption is not None:
            self.emit(_FLOATS[_local(el.tag)], caption)

    def nested_floats(self, el):
        for child in el:
            if _local(child.tag) in _FLOATS:
                self.float_(child)
            else:
                self.nested_floats(child)

    def block(self, el, depth):
        for child in el:
            name = _local(child.tag)
            if name == "sec":
                self.sec(child, depth + 1)
            elif name == "p":
                self.emit(PARAGRAPH, child)
                self.nested_floats(child)
            elif name in _FLOATS:
                self.float_(child)
            elif name in _SKIP:
                continue
            else:
                self.block(child, depth)

    def sec(self, sec, depth):
        title = _first(sec, "title")
        if title is not None:
            self.emit(f"title_{depth}", title)
        self.block(sec, depth)

    def front(self, article):
        meta = _first(article, "front", "article-meta")
        if meta is None:
            return
        title = _first(meta, "title-group", "article-title")
        if title is not None:
            self.emit(FRONT, title)
        for abstract in _children(meta, "abstract"):
            self.abstract(abstract)

    def abstract(self, el):
        for child in el:
            name = _local(child.tag)
            if name == "p":
                self.emit(ABSTRACT, child)
            elif name not in ("title", "label") and name not in _FLOATS:
                self.abstract(child)


def extract_passages(jats_xml) -> List[Tuple[str, str]]:
    """(type, text) rows for an article in reading order, before offsets."""
    article = parse_article(jats_xml)
    w = _Walker()
    w.front(article)
    body = _first(article, "body")
    if body is not None:
        w.block(body, 0)
    # Some archives park figures and tables in a trailing floats-group.
    for group in _children(article, "floats-group"):
        w.block(group, 0)
    return w.rows


def caption_passages(jats_xml) -> List[Tuple[str, str]]:
    """Figure and table captions of an article as (type, text), in source order."""
    return [row for row in extract_passages(jats_xml) if row[0] in (FIG_CAPTION, TABLE_CAPTION)]


def _text_of(el) -> Optional[str]:
    if el is None:
        return None
    text = _WS.sub(" ", "".join(el.itertext())).strip(" ")
    return text or None


def read_source_info(jats_xml, pmcid: Optional[str] = None) -> JatsSourceInfo:
    """Pull pmcid/pmid/journal out of the JATS front matter.

    *pmcid* is the fallback used when the article carries no PMC id (bulk
    archives usually name files after it).
    """
    article = parse_article(jats_xml)
    meta = _first(article, "front", "article-meta")
    found_pmcid = pmid = None
    if meta is not None:
        for aid in _children(meta, "article-id"):
            kind = (aid.get("pub-id-type") or "").lower()
            value = (aid.text or "").strip()
            if kind in ("pmc", "pmcid") and value:
                found_pmcid = value if value.upper().startswith("PMC") else "PMC" + value
                found_pmcid = "PMC" + found_pmcid[3:]
            elif kind == "pmid" and PMID_RE.fullmatch(value):
                pmid = value
    journal_meta = _first(article, "front", "journal-meta")
    journal = None
    if journal_meta is not None:
        journal = (_text_of(_first(journal_meta, "journal-title-group", "journal-title"))
                   or _text_of(_first(journal_meta, "journal-title")))
    return JatsSourceInfo(pmcid=found_pmcid or pmcid or "", pmid=pmid, journal=journal)


def convert(jats_xml, info: Optional[JatsSourceInfo] = None,
            options: Optional[ConversionOptions] = None) -> Document:
    """Convert one JATS article into a BioC :class:`Document`.

    When *info* is omitted it is read from the article's own front matter.
    In ASCII mode texts are transliterated before offsets are assigned, so
    offsets stay consistent with the ASCII text.

    Raises:
        ParseError: the input is not well-formed XML.
        EmptyArticle: nothing convertible was found.
    """
    options = options or ConversionOptions()
    article = parse_article(jats_xml)
    if info is None:
        info = read_source_info(article)
    rows = extract_passages(article)
    if not rows:
        raise EmptyArticle(f"{info.pmcid}: no front matter or body text")

    if options.encoding is Encoding.ASCII:
        rows = [(kind, to_ascii(text, options.table)) for kind, text in rows]

    infons = {"pmcid": info.pmcid}
    if info.pmid:
        infons["pmid"] = info.pmid
    if info.journal:
        infons["journal"] = info.journal
    doc = Document(
        id=info.pmcid,
        infons=infons,
        passages=[Passage(offset=0, text=text, infons={"type": kind}) for kind, text in rows],
    )
    return recompute_offsets(doc, options.separator)
