"""On-disk BioC document store with PMID/PMCID resolution and bulk ingestion.

Layout under the store root::

    index.json                  id index, set membership, revision counters
    docs/<NNN>/PMC<digits>.xml  one BioC XML collection per article

``NNN`` is the last three digits of the numeric PMC id, zero padded, which
keeps directories small for multi-million article stores. ``index.json``
looks like::

    {
      "format": 1,
      "pmid_to_pmcid": {"17299597": "PMC1790863"},
      "oa": ["PMC1790863"],
      "au": [],
      "revisions": {"PMC1790863": 1}
    }

Documents are stored in whatever encoding they were converted with (Unicode
by default); the service derives ASCII on read.
"""

from __future__ import annotations

import csv
import enum
import json
import logging
import os
import re
import tarfile
import tempfile
import threading
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, Iterable, List, Optional, Set, Tuple

from .errors import (
    ArchiveUnreadable,
    BioCError,
    InvalidDocument,
    MalformedId,
    NotFound,
    UnknownId,
)
from .jats import ConversionOptions, convert, parse_article, read_source_info
from .model import Collection, Document, validate
from .serial import from_xml, to_xml

log = logging.getLogger(__name__)

PMCID_RE = re.compile(r"PMC[0-9]+")
PMID_RE = re.compile(r"[0-9]+")
_FILENAME_PMCID = re.compile(r"PMC[0-9]+")

INDEX_FORMAT = 1


class SourceSet(str, enum.Enum):
    OA = "oa"  # PMC Open Access subset
    AU = "au"  # Author Manuscript collection


@dataclass
class IdIndex:
    pmid_to_pmcid: Dict[str, str] = field(default_factory=dict)
    pmcid_set: Set[str] = field(default_factory=set)


@dataclass(frozen=True)
class CollectionStats:
    open_access_count: int
    author_manuscript_count: int
    overlap_count: int
    combined_count: int

    def __post_init__(self):
        if self.overlap_count > min(self.open_access_count, self.author_manuscript_count):
            raise ValueError("overlap exceeds the smaller set")
        if self.combined_count != (self.open_access_count + self.author_manuscript_count
                                   - self.overlap_count):
            raise ValueError("combined count violates inclusion-exclusion")

    @classmethod
    def from_counts(cls, oa: int, au: int, overlap: int) -> "CollectionStats":
        return cls(oa, au, overlap, oa + au - overlap)

    @classmethod
    def from_sets(cls, oa: Iterable[str], au: Iterable[str]) -> "CollectionStats":
        oa, au = set(oa), set(au)
        return cls.from_counts(len(oa), len(au), len(oa & au))

    def __str__(self) -> str:
        return (f"oa={self.open_access_count} au={self.author_manuscript_count} "
                f"overlap={self.overlap_count} combined={self.combined_count}")


@dataclass
class IngestReport:
    converted: int = 0
    failed: int = 0
    skipped: int = 0
    errors: List[Tuple[str, str]] = field(default_factory=list)

    @property
    def total(self) -> int:
        return self.converted + self.failed + self.skipped

    def __str__(self) -> str:
        return f"converted={self.converted} failed={self.failed} skipped={self.skipped}"


def resolve_id(raw: str, index: IdIndex) -> str:
    """Map a raw PMID or PMCID to a stored PMCID.

    Raises:
        MalformedId: *raw* is neither ``PMC<digits>`` nor ``<digits>``.
        UnknownId: well formed, but not in the index.
    """
    raw = raw.strip()
    if PMCID_RE.fullmatch(raw):
        if raw in index.pmcid_set:
            return raw
        raise UnknownId(raw)
    if PMID_RE.fullmatch(raw):
        pmcid = index.pmid_to_pmcid.get(raw)
        if pmcid is None or pmcid not in index.pmcid_set:
            raise UnknownId(raw)
        return pmcid
    raise MalformedId(raw)


def read_id_map(path) -> List[Tuple[str, str]]:
    """Read a ``PMID,PMCID`` CSV file into (pmid, pmcid) pairs."""
    pairs = []
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or [h.strip().upper() for h in header] != ["PMID", "PMCID"]:
            raise ValueError(f"{path}: expected header 'PMID,PMCID'")
        for lineno, row in enumerate(reader, 2):
            if not row:
                continue
            if len(row) != 2:
                raise ValueError(f"{path}:{lineno}: expected 2 columns")
            pmid, pmcid = row[0].strip(), row[1].strip()
            if not PMID_RE.fullmatch(pmid) or not PMCID_RE.fullmatch(pmcid):
                raise ValueError(f"{path}:{lineno}: bad id pair {pmid!r},{pmcid!r}")
            pairs.append((pmid, pmcid))
    return pairs


def _atomic_write(path: Path, data: bytes) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=".tmp-")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        try:
            os.unlink(tmp)
        except FileNotFoundError:
            pass
        raise


class DocumentStore:
    """Filesystem-backed store. Safe for many readers and one writer process.

    Writes go through a lock; each document file and the index are replaced
    atomically, so readers never observe a partial record. Readers in another
    process pick up index changes on their next lookup.
    """

    def __init__(self, root):
        self.root = Path(root)
        self.root.mkdir(parents=True, exist_ok=True)
        self.index_path = self.root / "index.json"
        self._lock = threading.RLock()
        self._mtime = None
        self._pmid_to_pmcid: Dict[str, str] = {}
        self._members: Dict[SourceSet, Set[str]] = {SourceSet.OA: set(), SourceSet.AU: set()}
        self._revisions: Dict[str, int] = {}
        self._load()

    # -- index persistence --------------------------------------------------

    def _load(self) -> None:
        if not self.index_path.exists():
            return
        data = json.loads(self.index_path.read_text(encoding="utf-8"))
        if data.get("format") != INDEX_FORMAT:
            raise BioCError(f"{self.index_path}: unsupported index format {data.get('format')!r}")
        self._pmid_to_pmcid = dict(data.get("pmid_to_pmcid", {}))
        self._members = {s: set(data.get(s.value, [])) for s in SourceSet}
        self._revisions = {k: int(v) for k, v in data.get("revisions", {}).items()}
        self._mtime = self.index_path.stat().st_mtime_ns

    def _refresh(self) -> None:
        try:
            mtime = self.index_path.stat().st_mtime_ns
        except FileNotFoundError:
            return
        if mtime != self._mtime:
            with self._lock:
                self._load()

    def flush(self) -> None:
        with self._lock:
            data = {
                "format": INDEX_FORMAT,
                "pmid_to_pmcid": dict(sorted(self._pmid_to_pmcid.items())),
                "oa": sorted(self._members[SourceSet.OA]),
                "au": sorted(self._members[SourceSet.AU]),
                "revisions": dict(sorted(self._revisions.items())),
            }
            _atomic_write(self.index_path, json.dumps(data, indent=1).encode("utf-8"))
            self._mtime = self.index_path.stat().st_mtime_ns

    # -- documents ----------------------------------------------------------

    def path_for(self, pmcid: str) -> Path:
        shard = f"{int(pmcid[3:]) % 1000:03d}"
        return self.root / "docs" / shard / f"{pmcid}.xml"

    def put_document(self, doc: Document, source_set, *, pmid: Optional[str] = None,
                     flush: bool = True) -> None:
        """Store *doc* and record its membership in *source_set*.

        Re-putting an id replaces the stored body and bumps its revision.
        *pmid* (or a ``pmid`` document infon) is added to the id index.

        Raises:
            InvalidDocument: the id is not a PMCID or the document fails validation.
        """
        source_set = SourceSet(source_set)
        if not PMCID_RE.fullmatch(doc.id or ""):
            raise InvalidDocument(f"document id is not a PMCID: {doc.id!r}")
        violations = validate(doc)
        if violations:
            raise InvalidDocument(f"{doc.id}: {violations[0]}", violations)
        pmid = pmid or doc.infons.get("pmid")
        if pmid is not None and not PMID_RE.fullmatch(pmid):
            raise InvalidDocument(f"{doc.id}: bad pmid {pmid!r}")

        payload = to_xml(Collection(source="local", documents=[doc])).encode("utf-8")
        with self._lock:
            _atomic_write(self.path_for(doc.id), payload)
            rev = self._revisions.get(doc.id, 0) + 1
            if rev > 1:
                log.info("updated %s (revision %d)", doc.id, rev)
            self._revisions[doc.id] = rev
            self._members[source_set].add(doc.id)
            if pmid:
                self._pmid_to_pmcid[pmid] = doc.id
            if flush:
                self.flush()

    def get_document(self, pmcid: str) -> Document:
        self._refresh()
        if pmcid not in self._revisions:
            raise NotFound(pmcid)
        try:
            data = self.path_for(pmcid).read_bytes()
        except FileNotFoundError:
            raise NotFound(pmcid) from None
        docs = from_xml(data).documents
        if not docs:
            raise NotFound(pmcid)
        return docs[0]

    def revision(self, pmcid: str) -> int:
        return self._revisions.get(pmcid, 0)

    # -- ids and accounting -------------------------------------------------

    def add_id_mappings(self, pairs: Iterable[Tuple[str, str]], flush: bool = True) -> int:
        n = 0
        with self._lock:
            for pmid, pmcid in pairs:
                self._pmid_to_pmcid[pmid] = pmcid
                n += 1
            if flush:
                self.flush()
        return n

    def index(self) -> IdIndex:
        """Snapshot of the id index (only mappings to stored documents)."""
        self._refresh()
        with self._lock:
            stored = set(self._revisions)
            mapping = {k: v for k, v in self._pmid_to_pmcid.items() if v in stored}
        return IdIndex(pmid_to_pmcid=mapping, pmcid_set=stored)

    def resolve(self, raw: str) -> str:
        return resolve_id(raw, self.index())

    def members(self, source_set) -> Set[str]:
        with self._lock:
            return set(self._members[SourceSet(source_set)])

    def stats(self) -> CollectionStats:
        self._refresh()
        with self._lock:
            return CollectionStats.from_sets(self._members[SourceSet.OA], self._members[SourceSet.AU])

    # -- bulk ingestion -----------------------------------------------------

    def ingest_archive(self, path, source_set, options: Optional[ConversionOptions] = None) -> IngestReport:
        """Convert and store every ``.xml`` member of a gzipped tar archive.

        Members that fail to parse or convert are recorded in the report and
        leave nothing behind; other members carry on. Non-XML members are
        counted as skipped. Directories are not members.

        Raises:
            ArchiveUnreadable: the archive itself cannot be opened or read.
        """
        source_set = SourceSet(source_set)
        options = options or ConversionOptions()
        report = IngestReport()
        try:
            tar = tarfile.open(path, "r:gz")
        except (OSError, tarfile.TarError) as exc:
            raise ArchiveUnreadable(f"archive unreadable: {path}: {exc}") from None
        try:
            with tar:
                for member in tar:
                    if not member.isfile():
                        continue
                    name = member.name
                    if not name.lower().endswith(".xml"):
                        report.skipped += 1
                        continue
                    try:
                        fh = tar.extractfile(member)
                        data = fh.read() if fh is not None else b""
                        self._ingest_one(name, data, source_set, options)
                    except (BioCError, ValueError) as exc:
                        report.failed += 1
                        report.errors.append((name, str(exc)))
                        log.warning("failed %s: %s", name, exc)
                    else:
                        report.converted += 1
        except (OSError, EOFError, tarfile.TarError) as exc:
            raise ArchiveUnreadable(f"archive unreadable: {path}: {exc}") from None
        finally:
            self.flush()
        return report

    def _ingest_one(self, name: str, data: bytes, source_set: SourceSet,
                    options: ConversionOptions) -> None:
        article = parse_article(data)
        m = _FILENAME_PMCID.search(os.path.basename(name))
        info = read_source_info(article, pmcid=m.group(0) if m else None)
        doc = convert(article, info, options)
        self.put_document(doc, source_set, pmid=info.pmid, flush=False)
