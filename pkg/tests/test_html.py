import pytest

from privlabel.errors import EmptyDocument
from privlabel.ingest.fetch import RawDocument
from privlabel.ingest.html import TextBlock, extract_blocks, extract_readable


def raw(html):
    return RawDocument("https://example.com/privacy.html", html.encode(), 200)


def texts(html):
    return [b.text for b in extract_readable(raw(html)).paragraphs]


def test_two_paragraphs():
    assert texts("<p>We collect data.</p><p>We share data.</p>") == ["We collect data.", "We share data."]


def test_boilerplate_dropped():
    assert texts("<script>x()</script><p>Hello.</p><nav>Menu</nav>") == ["Hello."]


def test_script_only_is_empty():
    with pytest.raises(EmptyDocument):
        extract_readable(raw("<script>var a = 1;</script>"))


def test_policy_id_from_url():
    assert extract_readable(raw("<p>x</p>")).policy_id == "privacy"


def test_whitespace_and_inline_markup_collapse():
    assert texts("<p>We  <b>collect</b>\n your <a href='#'>email</a>.</p>") == ["We collect your email."]


def test_entities_decoded():
    assert texts("<p>Terms &amp; conditions</p>") == ["Terms & conditions"]


def test_list_items_carry_list_id():
    blocks = extract_blocks("<p>Intro:</p><ul><li>one</li><li>two</li></ul><p>After.</p><ol><li>three</li></ol>")
    assert blocks[0] == TextBlock("Intro:")
    assert blocks[1].list_id == blocks[2].list_id is not None
    assert blocks[3] == TextBlock("After.")
    assert blocks[4].list_id is not None and blocks[4].list_id != blocks[1].list_id


def test_nested_list_folds_into_parent_item():
    blocks = extract_blocks("<ul><li>outer <ul><li>inner a</li><li>inner b</li></ul></li><li>next</li></ul>")
    assert [b.text for b in blocks] == ["outer inner a inner b", "next"]
    assert len({b.list_id for b in blocks}) == 1


def test_unclosed_list_items():
    blocks = extract_blocks("<ul><li>one<li>two</ul><p>x</p>")
    assert [b.text for b in blocks] == ["one", "two", "x"]
    assert blocks[0].is_list_item and blocks[1].is_list_item and not blocks[2].is_list_item


def test_charset_declaration_respected():
    body = '<meta charset="latin-1"><p>caf\xe9</p>'.encode("latin-1")
    doc = extract_readable(RawDocument("https://e.com/p", body, 200))
    assert doc.paragraphs[0].text == "caf\xe9"
