"""Section tree recovery from a flat passage list, and the inverse.

``title_N`` passages open sections at depth N; everything else is leaf
content of the most recently opened section. A title closes every open
section at depth >= N and attaches to the nearest shallower one, so a jump
from ``title_1`` straight to ``title_3`` yields a depth-3 child of the
depth-1 section with no synthetic level in between.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterable, List, Optional, Sequence, Tuple, Union

from .model import Passage

_TITLE_RE = re.compile(r"title_([1-9][0-9]*)")

PARAGRAPH = "paragraph"


@dataclass
class SectionNode:
    """One outline node. The root has depth 0 and no title.

    ``paragraphs`` holds the node's leaf texts; ``paragraph_types`` runs
    parallel to it and remembers the passage type each text came from.
    """

    title: Optional[str] = None
    depth: int = 0
    paragraphs: List[str] = field(default_factory=list)
    children: List["SectionNode"] = field(default_factory=list)
    paragraph_types: List[str] = field(default_factory=list)

    def add_paragraph(self, text: str, kind: str = PARAGRAPH) -> None:
        self.paragraphs.append(text)
        self.paragraph_types.append(kind)

    def walk(self):
        yield self
        for c in self.children:
            yield from c.walk()


def title_depth(kind: str) -> Optional[int]:
    """Depth encoded by a ``title_N`` type, or None for any other type."""
    m = _TITLE_RE.fullmatch(kind)
    return int(m.group(1)) if m else None


Row = Tuple[str, str]


def _rows(passages: Iterable[Union[Passage, Row]]) -> Iterable[Row]:
    for p in passages:
        if isinstance(p, Passage):
            yield p.infons.get("type", ""), p.text
        else:
            yield p


def build_outline(passages: Sequence[Union[Passage, Row]]) -> SectionNode:
    """Rebuild the section tree from passages (or ``(type, text)`` rows)."""
    root = SectionNode()
    stack = [root]
    for kind, text in _rows(passages):
        depth = title_depth(kind)
        if depth is None:
            stack[-1].add_paragraph(text, kind or PARAGRAPH)
            continue
        while stack[-1].depth >= depth:
            stack.pop()
        node = SectionNode(title=text, depth=depth)
        stack[-1].children.append(node)
        stack.append(node)
    return root


def flatten_outline(root: SectionNode) -> List[Row]:
    """Pre-order (type, text) rows: a node's title, its leaves, then its children."""
    rows: List[Row] = []

    def visit(node: SectionNode):
        if node.title is not None and node.depth > 0:
            rows.append((f"title_{node.depth}", node.title))
        types = node.paragraph_types
        for i, text in enumerate(node.paragraphs):
            rows.append((types[i] if i < len(types) else PARAGRAPH, text))
        for child in node.children:
            visit(child)

    visit(root)
    return rows


def render_outline(root: SectionNode, indent: str = "  ") -> str:
    """Indented text listing of section titles, for quick inspection."""
    lines = []
    for node in root.walk():
        if node.depth == 0:
            continue
        lines.append(f"{indent * (node.depth - 1)}{node.title} ({len(node.paragraphs)})")
    return "\n".join(lines)
