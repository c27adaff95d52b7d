"""JATS to BioC conversion, BioC XML/JSON serialization and a local BioC API."""

__version__ = "0.1.0"

from .errors import (
    ArchiveUnreadable,
    BioCError,
    EmptyArticle,
    InvalidDocument,
    MalformedId,
    MissingField,
    MissingTypeInfon,
    NotFound,
    ParseError,
    TypeMismatch,
    UnknownElement,
    UnknownId,
)
from .jats import ConversionOptions, Encoding, JatsSourceInfo, caption_passages, convert, flatten_inline
from .model import (
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
)
from .outline import SectionNode, build_outline, flatten_outline
from .serial import SerializationFormat, from_json, from_xml, to_json, to_xml
from .translit import TranslitTable, to_ascii
