"""HTTP retrieval service over a :class:`DocumentStore`.

URL template::

    /BioC_{format}/{id}/{encoding}

``format`` is ``xml`` or ``json``, ``id`` a PMID or PMCID, ``encoding``
``unicode`` or ``ascii``. The public NCBI prefix
(``/research/bionlp/RESTful/pmcoa.cgi``) is accepted in front of the
template so copied URLs work unchanged.
"""

from __future__ import annotations

import dataclasses
import datetime
import logging
import re
from http import HTTPStatus
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from typing import Tuple
from urllib.parse import unquote, urlsplit

from .errors import MalformedId, NotFound, UnknownId
from .jats import Encoding
from .model import DEFAULT_SEPARATOR, Collection, Document, recompute_offsets
from .serial import SerializationFormat, dumps
from .store import DocumentStore
from .translit import to_ascii

log = logging.getLogger(__name__)

_ROUTE = re.compile(r"(?:.*/pmcoa\.cgi)?/BioC_([^/]*)/([^/]+)/([^/]+)/?")

CONTENT_TYPES = {
    SerializationFormat.XML: "application/xml; charset=utf-8",
    SerializationFormat.JSON: "application/json; charset=utf-8",
}
TEXT = "text/plain; charset=utf-8"

Response = Tuple[int, str, bytes]


@dataclasses.dataclass(frozen=True)
class ApiRequest:
    format: SerializationFormat
    id: str
    encoding: Encoding


def parse_path(path: str) -> ApiRequest | None:
    """Split a request path into an :class:`ApiRequest`.

    Returns None when the path does not have the template's shape at all;
    raises ``ValueError`` when it does but a format/encoding value is unknown.
    """
    m = _ROUTE.fullmatch(unquote(urlsplit(path).path))
    if m is None:
        return None
    fmt, raw_id, enc = m.groups()
    try:
        fmt = SerializationFormat(fmt)
    except ValueError:
        raise ValueError(f"unknown format {fmt!r}; expected xml or json") from None
    try:
        enc = Encoding(enc)
    except ValueError:
        raise ValueError(f"unknown encoding {enc!r}; expected unicode or ascii") from None
    return ApiRequest(fmt, raw_id, enc)


def ascii_document(doc: Document) -> Document:
    """Transliterate every passage text and re-lay offsets."""
    passages = [dataclasses.replace(p, text=to_ascii(p.text)) for p in doc.passages]
    return recompute_offsets(dataclasses.replace(doc, passages=passages), DEFAULT_SEPARATOR)


def _text(status: HTTPStatus, message: str) -> Response:
    return int(status), TEXT, (message + "\n").encode("utf-8")


class BioCService:
    """Request handling logic, independent of the HTTP server plumbing."""

    def __init__(self, store: DocumentStore, source: str = "local", key: str = "bioc.key"):
        self.store = store
        self.source = source
        self.key = key

    def envelope(self, doc: Document) -> Collection:
        today = datetime.date.today().strftime("%Y%m%d")
        return Collection(source=self.source, date=today, key=self.key, documents=[doc])

    def handle_get(self, path: str) -> Response:
        """Answer one GET request: returns (status, content type, body)."""
        try:
            if urlsplit(path).path == "/healthz":
                return _text(HTTPStatus.OK, "ok")
            try:
                req = parse_path(path)
            except ValueError as exc:
                return _text(HTTPStatus.BAD_REQUEST, str(exc))
            if req is None:
                return _text(HTTPStatus.NOT_FOUND, f"no such resource: {path}")
            try:
                pmcid = self.store.resolve(req.id)
                doc = self.store.get_document(pmcid)
            except MalformedId as exc:
                return _text(HTTPStatus.BAD_REQUEST, str(exc))
            except (UnknownId, NotFound) as exc:
                return _text(HTTPStatus.NOT_FOUND, str(exc))
            if req.encoding is Encoding.ASCII:
                doc = ascii_document(doc)
            body = dumps(self.envelope(doc), req.format).encode("utf-8")
            return int(HTTPStatus.OK), CONTENT_TYPES[req.format], body
        except Exception:
            log.exception("internal error serving %s", path)
            return _text(HTTPStatus.INTERNAL_SERVER_ERROR, "internal server error")


def handle_get(store: DocumentStore, path: str) -> Response:
    return BioCService(store).handle_get(path)


def make_server(service: BioCService, host: str, port: int) -> ThreadingHTTPServer:
    class Handler(BaseHTTPRequestHandler):
        protocol_version = "HTTP/1.1"
        server_version = "biocpmc"

        def do_GET(self):
            status, ctype, body = service.handle_get(self.path)
            self.send_response(status)
            self.send_header("Content-Type", ctype)
            self.send_header("Content-Length", str(len(body)))
            self.end_headers()
            self.wfile.write(body)

        def log_message(self, fmt, *args):
            log.info("%s - %s", self.address_string(), fmt % args)

    server = ThreadingHTTPServer((host, port), Handler)
    server.daemon_threads = True
    return server
