"""Random BioC collection generators for round-trip property tests."""

import random

from hypothesis import strategies as st

from biocpmc.model import (
    Annotation,
    Collection,
    Document,
    Location,
    Node,
    Passage,
    Relation,
    Sentence,
)

# Characters that stress escaping and normalization: markup characters,
# CR/LF/TAB, non-BMP, combining marks, NBSP, and the CDATA terminator pieces.
SPICY = list("<>&\"'] \t\r\n") + ["]]>", "é", "α", "—", "“", " ",
                                   "́", "中", "\U0001f600", "�", "&amp;"]


def _legal(cp):
    return cp in (9, 10, 13) or 0x20 <= cp <= 0xD7FF or 0xE000 <= cp <= 0xFFFD or cp >= 0x10000


def rand_text(rng: random.Random, max_len=40) -> str:
    out = []
    for _ in range(rng.randint(0, max_len)):
        r = rng.random()
        if r < 0.6:
            out.append(rng.choice("abcdefghij klmnop QRS 0123456789.,;-"))
        elif r < 0.85:
            out.append(rng.choice(SPICY))
        else:
            while True:
                cp = rng.randint(0x20, 0x10FFFF if rng.random() < 0.3 else 0xFFFF)
                if _legal(cp):
                    out.append(chr(cp))
                    break
    return "".join(out)


def rand_infons(rng, max_n=3):
    infons = {}
    for _ in range(rng.randint(0, max_n)):
        key = rand_text(rng, 8) or "k"
        infons[key] = rand_text(rng, 12)
    return infons


def _annotations(rng, start, text, prefix):
    anns = []
    if not text:
        return anns
    for k in range(rng.randint(0, 3)):
        a = rng.randrange(len(text))
        b = rng.randint(a + 1, len(text))
        locs = [Location(start + a, b - a)]
        if rng.random() < 0.2:
            locs.append(Location(start, 1))
        anns.append(Annotation(id=f"{prefix}{k}", infons=rand_infons(rng, 2),
                               locations=locs, text=text[a:b]))
    return anns


def _relations(rng, anns, prefix):
    rels = []
    if not anns:
        return rels
    for k in range(rng.randint(0, 2)):
        nodes = [Node(refid=rng.choice(anns).id, role=rand_text(rng, 6))
                 for _ in range(rng.randint(1, 3))]
        rels.append(Relation(id=f"{prefix}R{k}", infons=rand_infons(rng, 1), nodes=nodes))
    return rels


def rand_document(rng: random.Random, doc_id: str) -> Document:
    passages = []
    pos = rng.randint(0, 50)
    doc_anns = []
    for i in range(rng.randint(0, 5)):
        text = rand_text(rng, 60)
        infons = {"type": rng.choice(["paragraph", "title_1", "title_2", "abstract", "fig_caption"])}
        infons.update(rand_infons(rng, 2))
        infons["type"] = infons["type"] or "paragraph"
        sentences = []
        if text and rng.random() < 0.4:
            cut = rng.randint(0, len(text))
            for j, (a, b) in enumerate([(0, cut), (cut, len(text))]):
                stext = text[a:b]
                s_anns = _annotations(rng, pos + a, stext, f"p{i}s{j}A")
                sentences.append(Sentence(offset=pos + a, text=stext, infons=rand_infons(rng, 1),
                                          annotations=s_anns,
                                          relations=_relations(rng, s_anns, f"p{i}s{j}")))
        anns = _annotations(rng, pos, text, f"p{i}A")
        doc_anns.extend(anns)
        passages.append(Passage(offset=pos, text=text, infons=infons, sentences=sentences,
                                annotations=anns, relations=_relations(rng, anns, f"p{i}")))
        pos += len(text) + rng.randint(1, 3)
    return Document(id=doc_id, infons=rand_infons(rng), passages=passages,
                    relations=_relations(rng, doc_anns, "d"))


def rand_collection(rng: random.Random) -> Collection:
    n = rng.randint(0, 3)
    return Collection(
        source=rand_text(rng, 10),
        date=f"{rng.randint(1990, 2030)}{rng.randint(1, 12):02d}{rng.randint(1, 28):02d}",
        key=rand_text(rng, 10),
        infons=rand_infons(rng),
        documents=[rand_document(rng, f"PMC{rng.randint(1, 10**7)}x{k}") for k in range(n)],
    )


@st.composite
def collections(draw):
    """Hypothesis strategy: shrinks through the generator's seed."""
    return rand_collection(random.Random(draw(st.integers(0, 2**32 - 1))))
