import pytest
from hypothesis import given
from hypothesis import strategies as st

from stl_activation import csvio

cell = st.text(alphabet=st.characters(blacklist_categories=("Cs",), blacklist_characters="\r\x00"),
               max_size=8)


def test_render_and_parse():
    text = csvio.render(("a", "b"), [[1, "x,y"], {"a": 2, "b": ""}], {"k": "v"})
    assert text.startswith("# k=v\na,b\n")
    meta, cols, rows = csvio.parse(text)
    assert meta == {"k": "v"} and cols == ["a", "b"]
    assert rows == [{"a": "1", "b": "x,y"}, {"a": "2", "b": ""}]


def test_hash_inside_body_is_data():
    text = "a\n#notmeta\n"
    _, _, rows = csvio.parse(text)
    assert rows == [{"a": "#notmeta"}]


def test_errors():
    with pytest.raises(ValueError, match="header"):
        csvio.parse("# only=meta\n")
    with pytest.raises(ValueError, match="fields"):
        csvio.parse("a,b\n1\n")


@given(st.lists(st.lists(cell, min_size=2, max_size=2), max_size=5))
def test_rerender_is_identity(rows):
    text = csvio.render(("c1", "c2"), rows, {"seed": 3})
    assert csvio.rerender(text) == text
