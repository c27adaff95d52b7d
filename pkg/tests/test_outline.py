from hypothesis import given
from hypothesis import strategies as st

from biocpmc.model import Passage
from biocpmc.outline import SectionNode, build_outline, flatten_outline, render_outline, title_depth


def test_nested_tree(nested_rows):
    root = build_outline(nested_rows)
    assert root.depth == 0 and root.title is None and root.paragraphs == []
    assert [c.title for c in root.children] == ["Title of first section", "Title of second section"]
    first = root.children[0]
    assert first.paragraphs == ["This is a paragraph in the first section"]
    assert [c.depth for c in first.children] == [2, 2, 2]
    second_sub = first.children[1]
    assert len(second_sub.children) == 1
    sub3 = second_sub.children[0]
    assert (sub3.depth, sub3.title) == (3, "Title of a subsubsection")
    assert sub3.paragraphs == ["This is a paragraph in this subsubsection"]
    assert first.children[0].paragraphs == [
        "This is a paragraph in this subsection",
        "This is another paragraph in the same subsection",
    ]


def test_nested_flatten_round_trip(nested_rows):
    assert flatten_outline(build_outline(nested_rows)) == nested_rows


def test_accepts_passages():
    ps = [Passage(offset=0, text="T", infons={"type": "title_1"}),
          Passage(offset=2, text="x", infons={"type": "paragraph"})]
    assert flatten_outline(build_outline(ps)) == [("title_1", "T"), ("paragraph", "x")]


def test_empty_and_implicit_root():
    root = build_outline([])
    assert root.children == [] and root.paragraphs == []
    assert flatten_outline(SectionNode()) == []
    root = build_outline([("paragraph", "x")])
    assert root.paragraphs == ["x"] and root.children == []
    assert flatten_outline(SectionNode(paragraphs=["a", "b"])) == [("paragraph", "a"), ("paragraph", "b")]


def test_depth_gap_attaches_to_nearest_shallower():
    root = build_outline([("title_1", "A"), ("title_3", "C"), ("title_2", "B")])
    a = root.children[0]
    assert [(c.depth, c.title) for c in a.children] == [(3, "C"), (2, "B")]


def test_captions_are_leaf_content():
    rows = [("title_1", "A"), ("paragraph", "p"), ("fig_caption", "F"), ("title_2", "B"), ("table_caption", "T")]
    root = build_outline(rows)
    assert root.children[0].paragraphs == ["p", "F"]
    assert root.children[0].children[0].paragraphs == ["T"]
    assert flatten_outline(root) == rows


def test_title_depth():
    assert title_depth("title_12") == 12
    assert title_depth("title_0") is None
    assert title_depth("paragraph") is None


def test_render():
    root = build_outline([("title_1", "A"), ("paragraph", "x"), ("title_2", "B")])
    assert render_outline(root) == "A (1)\n  B (0)"


rows_strategy = st.lists(st.tuples(
    st.sampled_from(["title_1", "title_2", "title_3", "title_4", "paragraph", "fig_caption", "abstract"]),
    st.text(max_size=5)), max_size=30)


@given(rows_strategy)
def test_round_trip_and_depths(rows):
    tree = build_outline(rows)
    again = flatten_outline(tree)
    assert flatten_outline(build_outline(again)) == again
    # leaves always join the newest section, so nothing is reordered
    assert again == rows
    for node in tree.walk():
        for child in node.children:
            assert child.depth > node.depth
