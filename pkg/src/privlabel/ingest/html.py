"""Block-level text extraction from policy HTML.

A stand-in for browser reader-mode: boilerplate containers are dropped and
the text of every block element is kept in document order. List items are
tagged with the list they belong to so segmentation can merge short lists.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from html.parser import HTMLParser
from pathlib import Path

from privlabel.errors import EmptyDocument
from privlabel.ingest.fetch import RawDocument

SKIP_TAGS = frozenset(
    {"script", "style", "nav", "header", "footer", "aside", "noscript",
     "template", "head", "svg", "iframe", "form", "button", "select"}
)
BLOCK_TAGS = frozenset(
    {"p", "div", "section", "article", "main", "body", "blockquote", "pre",
     "h1", "h2", "h3", "h4", "h5", "h6", "td", "th", "tr", "table", "dt", "dd",
     "dl", "caption", "figcaption", "address", "ul", "ol", "li", "hr", "br"}
)
LIST_TAGS = frozenset({"ul", "ol"})
VOID_TAGS = frozenset({"br", "hr", "img", "input", "meta", "link", "wbr", "source"})

_WS = re.compile(r"\s+")


def normalize_ws(text: str) -> str:
    return _WS.sub(" ", text).strip()


@dataclass(frozen=True)
class TextBlock:
    text: str
    # id of the top-level list this block is an item of; None for paragraphs
    list_id: int | None = None

    @property
    def is_list_item(self) -> bool:
        return self.list_id is not None


@dataclass(frozen=True)
class CleanDocument:
    policy_id: str
    paragraphs: tuple[TextBlock, ...]
    source_url: str = ""

    def __post_init__(self):
        if any(not b.text for b in self.paragraphs):
            raise ValueError("paragraphs must be non-empty")


class _BlockCollector(HTMLParser):
    def __init__(self):
        super().__init__(convert_charrefs=True)
        self.blocks: list[TextBlock] = []
        self._buf: list[str] = []
        self._skip = 0
        self._li_depth = 0
        self._inner_lists = 0
        self._list_depth = 0
        self._list_counter = -1
        self._current_list: int | None = None

    def _flush(self, list_id=None):
        text = normalize_ws("".join(self._buf))
        self._buf = []
        if text:
            self.blocks.append(TextBlock(text, list_id))

    def handle_starttag(self, tag, attrs):
        if tag in SKIP_TAGS:
            if tag not in VOID_TAGS:
                self._skip += 1
            return
        if self._skip:
            return
        if tag == "br":
            self._buf.append(" ")
            return
        if self._li_depth:
            if tag == "li" and self._inner_lists == 0:
                # sibling <li> with the previous one left unclosed
                self._flush(self._current_list)
                return
            # nested structure inside a list item stays part of that item
            if tag in LIST_TAGS:
                self._inner_lists += 1
            elif tag == "li":
                self._li_depth += 1
            self._buf.append(" ")
            return
        if tag in LIST_TAGS:
            if self._list_depth == 0:
                self._list_counter += 1
                self._current_list = self._list_counter
            self._list_depth += 1
        if tag == "li":
            self._flush()
            self._li_depth = 1
            return
        if tag in BLOCK_TAGS:
            self._flush()

    def handle_startendtag(self, tag, attrs):
        if tag == "br" and not self._skip:
            self._buf.append(" ")
        elif tag in BLOCK_TAGS and not self._skip and not self._li_depth:
            self._flush()

    def handle_endtag(self, tag):
        if tag in SKIP_TAGS:
            if self._skip:
                self._skip -= 1
            return
        if self._skip:
            return
        if self._li_depth:
            if tag == "li":
                self._li_depth -= 1
                if self._li_depth == 0:
                    self._flush(self._current_list)
                    return
            elif tag in LIST_TAGS:
                if self._inner_lists:
                    self._inner_lists -= 1
                else:
                    # list closed with its last <li> left open
                    self._flush(self._current_list)
                    self._li_depth = 0
                    self._close_list()
                    return
            self._buf.append(" ")
            return
        if tag in LIST_TAGS and self._list_depth:
            self._flush()
            self._close_list()
            return
        if tag in BLOCK_TAGS:
            self._flush()

    def _close_list(self):
        self._list_depth -= 1
        if self._list_depth == 0:
            self._current_list = None

    def handle_data(self, data):
        if not self._skip:
            self._buf.append(data)

    def close(self):
        super().close()
        if self._li_depth:
            self._flush(self._current_list)
        else:
            self._flush()


def decode_body(body: bytes) -> str:
    head = body[:2048].decode("ascii", errors="ignore")
    m = re.search(r"charset=[\"']?([A-Za-z0-9_\-]+)", head)
    if m:
        try:
            return body.decode(m.group(1), errors="replace")
        except LookupError:
            pass
    return body.decode("utf-8", errors="replace")


def extract_blocks(html: str) -> list[TextBlock]:
    parser = _BlockCollector()
    parser.feed(html)
    parser.close()
    return parser.blocks


def extract_readable(raw: RawDocument, policy_id: str | None = None) -> CleanDocument:
    if raw.status != 200:
        raise ValueError(f"cannot extract from HTTP {raw.status}")
    if policy_id is None:
        policy_id = Path(raw.url.rstrip("/")).stem or raw.url
    blocks = extract_blocks(decode_body(raw.body))
    if not blocks:
        raise EmptyDocument(f"no readable text in {raw.url}")
    return CleanDocument(policy_id=policy_id, paragraphs=tuple(blocks), source_url=raw.url)
