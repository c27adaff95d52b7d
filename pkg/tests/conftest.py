import io
import tarfile
from pathlib import Path

import pytest

from biocpmc.store import DocumentStore

FIXTURES = Path(__file__).parent / "fixtures"
ARTICLES = sorted((FIXTURES / "articles").glob("*.xml"))


def synthetic_jats(pmcid: str, pmid: str | None = None, n_sections: int = 2) -> str:
    aid = f'<article-id pub-id-type="pmid">{pmid}</article-id>' if pmid else ""
    secs = "".join(
        f"<sec><title>Section {i}</title><p>Paragraph {i} of {pmcid} with <italic>markup</italic>"
        f"<sup><xref rid='b{i}'>{i}</xref></sup> and café.</p>"
        f"<sec><title>Sub {i}</title><p>Nested text α{i}.</p></sec></sec>"
        for i in range(1, n_sections + 1)
    )
    return (
        f'<?xml version="1.0" encoding="UTF-8"?><article><front><article-meta>{aid}'
        f'<article-id pub-id-type="pmc">{pmcid[3:]}</article-id>'
        f"<title-group><article-title>Article {pmcid}</article-title></title-group>"
        f"<abstract><p>Abstract of {pmcid}.</p></abstract></article-meta></front>"
        f"<body>{secs}</body></article>"
    )


def write_archive(path: Path, members: dict) -> Path:
    """Write a .tar.gz whose members are name -> str/bytes."""
    with tarfile.open(path, "w:gz") as tar:
        for name, data in members.items():
            if isinstance(data, str):
                data = data.encode("utf-8")
            info = tarfile.TarInfo(name)
            info.size = len(data)
            tar.addfile(info, io.BytesIO(data))
    return path


@pytest.fixture
def fixtures_dir():
    return FIXTURES


@pytest.fixture
def golden_text():
    return (FIXTURES / "sample_expected.txt").read_text(encoding="utf-8")


@pytest.fixture
def nested_rows():
    lines = (FIXTURES / "nested_sections.tsv").read_text(encoding="utf-8").splitlines()
    return [tuple(line.split("\t")) for line in lines]


@pytest.fixture
def fixture_store(tmp_path):
    """Store holding the three fixture articles, the first two OA, the last AU."""
    members = {p.name: p.read_bytes() for p in ARTICLES}
    oa = {k: v for k, v in members.items() if k != "PMC3000002.xml"}
    au = {"PMC3000002.xml": members["PMC3000002.xml"]}
    store = DocumentStore(tmp_path / "store")
    r1 = store.ingest_archive(write_archive(tmp_path / "oa.tar.gz", oa), "oa")
    r2 = store.ingest_archive(write_archive(tmp_path / "au.tar.gz", au), "au")
    assert r1.failed == r2.failed == 0, (r1.errors, r2.errors)
    return store
