"""Command line entry point: ``biocpmc <command> ...``.

Exit codes: 0 success, 1 data or user error, 2 usage error.

Settings come from flags, then an optional ``key=value`` config file
(``--config``), then defaults. Recognised config keys: ``store_path``,
``bind_address`` (``host:port``), ``default_encoding`` (``unicode``/``ascii``).
"""

from __future__ import annotations

import argparse
import logging
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, Optional, Sequence, Tuple

from . import __version__
from .errors import ArchiveUnreadable, BioCError
from .jats import ConversionOptions, Encoding, convert, read_source_info, parse_article
from .model import Collection
from .outline import build_outline, render_outline
from .serial import dumps
from .service import BioCService, ascii_document, make_server
from .store import DocumentStore, SourceSet, read_id_map
from .translit import load_table

log = logging.getLogger("biocpmc")

DEFAULT_STORE = "bioc-store"
DEFAULT_BIND = "127.0.0.1:8080"


@dataclass
class CliConfig:
    store_path: Path = Path(DEFAULT_STORE)
    bind_address: str = DEFAULT_BIND
    default_encoding: Encoding = Encoding.UNICODE


def read_config(path) -> Dict[str, str]:
    values = {}
    for lineno, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise ValueError(f"{path}:{lineno}: expected key=value")
        values[key.strip()] = value.strip()
    return values


def resolve_config(args) -> CliConfig:
    cfg = CliConfig()
    if args.config:
        values = read_config(args.config)
        unknown = set(values) - {"store_path", "bind_address", "default_encoding"}
        if unknown:
            raise ValueError(f"unknown config keys: {', '.join(sorted(unknown))}")
        if "store_path" in values:
            cfg.store_path = Path(values["store_path"])
        if "bind_address" in values:
            cfg.bind_address = values["bind_address"]
        if "default_encoding" in values:
            cfg.default_encoding = Encoding(values["default_encoding"])
    if args.store:
        cfg.store_path = Path(args.store)
    if getattr(args, "bind", None):
        cfg.bind_address = args.bind
    return cfg


def parse_bind(bind: str) -> Tuple[str, int]:
    host, sep, port = bind.rpartition(":")
    if not sep or not port.isdigit() or not 0 <= int(port) <= 65535:
        raise ValueError(f"invalid bind address {bind!r}; expected host:port")
    return host.strip("[]") or "0.0.0.0", int(port)


def _encoding(args, cfg) -> Encoding:
    return Encoding(args.encoding) if args.encoding else cfg.default_encoding


def _options(args, cfg) -> ConversionOptions:
    table = load_table(args.translit_table) if getattr(args, "translit_table", None) else None
    return ConversionOptions(encoding=_encoding(args, cfg), table=table)


def _write(text: str, out: Optional[str]) -> None:
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def cmd_convert(args, cfg) -> int:
    try:
        data = Path(args.input).read_bytes()
        article = parse_article(data)
        stem_pmcid = args.pmcid
        if stem_pmcid is None and Path(args.input).stem.upper().startswith("PMC"):
            stem_pmcid = Path(args.input).stem.upper()
        info = read_source_info(article, pmcid=stem_pmcid)
        doc = convert(article, info, _options(args, cfg))
    except (OSError, BioCError, ValueError) as exc:
        print(f"error: {args.input}: {exc}", file=sys.stderr)
        return 1
    _write(dumps(Collection(source="local", documents=[doc]), args.format), args.out)
    return 0


def cmd_ingest(args, cfg) -> int:
    store = DocumentStore(cfg.store_path)
    if args.id_map:
        try:
            store.add_id_mappings(read_id_map(args.id_map))
        except (OSError, ValueError) as exc:
            print(f"error: {exc}", file=sys.stderr)
            return 1
    try:
        report = store.ingest_archive(args.archive, SourceSet(args.set), _options(args, cfg))
    except ArchiveUnreadable as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print(report)
    for name, message in report.errors:
        print(f"  failed {name}: {message}")
    return 0 if report.failed == 0 else 1


def cmd_map_ids(args, cfg) -> int:
    try:
        pairs = read_id_map(args.csv)
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    n = DocumentStore(cfg.store_path).add_id_mappings(pairs)
    print(f"mapped={n}")
    return 0


def cmd_stats(args, cfg) -> int:
    print(DocumentStore(cfg.store_path).stats())
    return 0


def cmd_get(args, cfg) -> int:
    store = DocumentStore(cfg.store_path)
    try:
        doc = store.get_document(store.resolve(args.id))
    except BioCError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    if _encoding(args, cfg) is Encoding.ASCII:
        doc = ascii_document(doc)
    _write(dumps(Collection(source="local", documents=[doc]), args.format), args.out)
    return 0


def cmd_outline(args, cfg) -> int:
    store = DocumentStore(cfg.store_path)
    try:
        doc = store.get_document(store.resolve(args.id))
    except BioCError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print(render_outline(build_outline(doc.passages)))
    return 0


def cmd_serve(args, cfg) -> int:
    try:
        host, port = parse_bind(cfg.bind_address)
        server = make_server(BioCService(DocumentStore(cfg.store_path)), host, port)
    except (OSError, ValueError) as exc:
        print(f"error: cannot serve on {cfg.bind_address}: {exc}", file=sys.stderr)
        return 1
    host, port = server.server_address[:2]
    print(f"serving {cfg.store_path} on http://{host}:{port}/", flush=True)
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        pass
    finally:
        server.server_close()
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="biocpmc", description="JATS to BioC conversion, storage and serving.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    p.add_argument("--store", help=f"store directory (default: {DEFAULT_STORE})")
    p.add_argument("--config", help="key=value config file")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    enc = dict(choices=[e.value for e in Encoding], default=None,
               help="text encoding (default from config, else unicode)")

    c = sub.add_parser("convert", help="convert one JATS file to BioC")
    c.add_argument("input")
    c.add_argument("--format", choices=["xml", "json"], default="xml")
    c.add_argument("--encoding", **enc)
    c.add_argument("--pmcid", help="PMC id to use when the article carries none")
    c.add_argument("--translit-table", help="U+XXXX<TAB>replacement override file")
    c.add_argument("--out", "-o")
    c.set_defaults(func=cmd_convert)

    i = sub.add_parser("ingest", help="ingest a .tar.gz of JATS files into the store")
    i.add_argument("archive")
    i.add_argument("--set", choices=[s.value for s in SourceSet], required=True)
    i.add_argument("--encoding", **enc)
    i.add_argument("--id-map", help="PMID,PMCID CSV to load before ingesting")
    i.add_argument("--translit-table")
    i.set_defaults(func=cmd_ingest)

    m = sub.add_parser("map-ids", help="load a PMID,PMCID CSV into the id index")
    m.add_argument("csv")
    m.set_defaults(func=cmd_map_ids)

    s = sub.add_parser("stats", help="print collection counts")
    s.set_defaults(func=cmd_stats)

    g = sub.add_parser("get", help="print a stored article")
    g.add_argument("id")
    g.add_argument("--format", choices=["xml", "json"], default="xml")
    g.add_argument("--encoding", **enc)
    g.add_argument("--out", "-o")
    g.set_defaults(func=cmd_get)

    o = sub.add_parser("outline", help="print the section outline of a stored article")
    o.add_argument("id")
    o.set_defaults(func=cmd_outline)

    v = sub.add_parser("serve", help="run the HTTP API")
    v.add_argument("--bind", help=f"host:port (default {DEFAULT_BIND})")
    v.set_defaults(func=cmd_serve)
    return p


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = resolve_config(args)
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return args.func(args, cfg)


if __name__ == "__main__":
    sys.exit(main())
