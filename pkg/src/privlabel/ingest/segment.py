"""Paragraph segmentation, sentence splitting and tokenization."""
from __future__ import annotations

import re
from dataclasses import dataclass

from privlabel.ingest.html import CleanDocument

_TOKEN = re.compile(r"[^\W_]+")

ABBREVIATIONS = frozenset({"e.g.", "i.e.", "etc.", "inc.", "ltd.", "u.s."})


def tokenize(text: str) -> list[str]:
    """Lowercase and split on runs of non-alphanumeric characters."""
    return _TOKEN.findall(text.lower())


def word_count(text: str) -> int:
    return len(text.split())


@dataclass(frozen=True)
class Segment:
    policy_id: str
    index: int
    text: str
    tokens: tuple[str, ...]

    @classmethod
    def from_text(cls, policy_id, index, text):
        return cls(policy_id, index, text, tuple(tokenize(text)))


@dataclass(frozen=True)
class Sentence:
    policy_id: str
    text: str
    tokens: tuple[str, ...]


def _group_blocks(paragraphs):
    """Yield ``(paragraph_or_None, [list items])`` runs in document order."""
    i, n = 0, len(paragraphs)
    while i < n:
        block = paragraphs[i]
        if not block.is_list_item:
            items = []
            j = i + 1
            following = paragraphs[j].list_id if j < n else None
            while following is not None and j < n and paragraphs[j].list_id == following:
                items.append(paragraphs[j])
                j += 1
            yield block, items
            i = j
        else:
            items = []
            j = i
            while j < n and paragraphs[j].list_id == block.list_id:
                items.append(paragraphs[j])
                j += 1
            yield None, items
            i = j


def segment_document(doc: CleanDocument, short_item_limit: int = 20) -> list[Segment]:
    """One segment per paragraph; a short list right after a paragraph joins it.

    A list counts as short when every item has at most ``short_item_limit``
    whitespace-delimited words. Lists that are not short, or that do not
    follow a paragraph, yield one segment per item.
    """
    texts: list[str] = []
    for para, items in _group_blocks(doc.paragraphs):
        if para is not None and items and all(
            word_count(it.text) <= short_item_limit for it in items
        ):
            texts.append(" ".join([para.text] + [it.text for it in items]))
            continue
        if para is not None:
            texts.append(para.text)
        texts.extend(it.text for it in items)
    return [Segment.from_text(doc.policy_id, i, t) for i, t in enumerate(texts)]


_BOUNDARY = re.compile(r"[.!?]+(?=\s+[\"'(\[]?[A-Z0-9])")


def _ends_with_abbreviation(chunk: str) -> bool:
    last = chunk.rsplit(None, 1)[-1].lower() if chunk.strip() else ""
    return last in ABBREVIATIONS


def split_paragraph(text: str) -> list[str]:
    out, start = [], 0
    for m in _BOUNDARY.finditer(text):
        candidate = text[start:m.end()]
        if _ends_with_abbreviation(candidate):
            continue
        out.append(candidate.strip())
        start = m.end()
    out.append(text[start:].strip())
    return [s for s in out if s]


def split_sentences(doc: CleanDocument) -> list[Sentence]:
    sentences = []
    for block in doc.paragraphs:
        for text in split_paragraph(block.text):
            tokens = tuple(tokenize(text))
            if tokens:
                sentences.append(Sentence(doc.policy_id, text, tokens))
    return sentences
