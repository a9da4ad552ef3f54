"""Parsers for declared labels, app metadata and annotated training corpora."""
from __future__ import annotations

import json
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import NamedTuple, Optional

from privlabel import vocab
from privlabel.errors import ExclusivityViolation, SchemaError


class LabelTriple(NamedTuple):
    privacy_type: str
    purpose: Optional[str] = None
    data_category: Optional[str] = None


def _check(value, allowed, what):
    if value not in allowed:
        raise SchemaError(f"unknown {what}: {value!r}")
    return value


def _canonical(entries):
    """Drop entries subsumed by a more specific entry of the same type/purpose."""
    entries = set(entries)
    out = set()
    for e in entries:
        if e.data_category is None and any(
            o.privacy_type == e.privacy_type and o != e
            and (e.purpose is None or o.purpose == e.purpose)
            for o in entries
        ):
            continue
        out.add(e)
    return frozenset(out)


def validate_entries(entries) -> None:
    types = {e.privacy_type for e in entries}
    if vocab.NOT_COLLECTED in types and len(entries) > 1:
        raise ExclusivityViolation("DataNotCollected is mutually exclusive with other entries")
    for e in entries:
        _check(e.privacy_type, vocab.PRIVACY_TYPES, "privacy type")
        if e.purpose is not None:
            _check(e.purpose, vocab.PURPOSES, "purpose")
            if e.privacy_type not in (vocab.LINKED, vocab.NOT_LINKED):
                raise SchemaError(f"{e.privacy_type} entries carry no purpose")
        if e.data_category is not None:
            _check(e.data_category, vocab.DATA_CATEGORIES, "data category")
            if e.privacy_type == vocab.NOT_COLLECTED:
                raise SchemaError("DataNotCollected carries no data category")


@dataclass(frozen=True)
class DeclaredLabel:
    app_id: str
    entries: frozenset

    def __post_init__(self):
        entries = frozenset(LabelTriple(*e) for e in self.entries)
        validate_entries(entries)
        object.__setattr__(self, "entries", _canonical(entries))

    @property
    def privacy_types(self) -> frozenset:
        return frozenset(e.privacy_type for e in self.entries)

    @property
    def type_purposes(self) -> frozenset:
        return frozenset((e.privacy_type, e.purpose) for e in self.entries if e.purpose)

    @property
    def type_categories(self) -> frozenset:
        return frozenset(
            (e.privacy_type, e.data_category) for e in self.entries if e.data_category
        )


def parse_declared_label(record) -> DeclaredLabel:
    """Parse one app's label record (a dict or its JSON text)."""
    if isinstance(record, (str, bytes)):
        record = json.loads(record)
    try:
        app_id = str(record["app_id"])
        types = record["privacy_types"]
    except (KeyError, TypeError) as exc:
        raise SchemaError(f"malformed label record: {exc}") from exc

    entries = set()
    seen_types = []
    for t in types:
        ptype = _check(t.get("type"), vocab.PRIVACY_TYPES, "privacy type")
        seen_types.append(ptype)
        purposes = t.get("purposes") or []
        categories = t.get("categories") or []
        if ptype == vocab.NOT_COLLECTED:
            if purposes or categories:
                raise SchemaError("DataNotCollected carries no purposes or categories")
            entries.add(LabelTriple(ptype))
        elif ptype == vocab.TRACK:
            if purposes:
                raise SchemaError("DataUsedToTrackYou lists categories, not purposes")
            for c in categories:
                entries.add(LabelTriple(ptype, None, _check(c, vocab.DATA_CATEGORIES, "data category")))
            if not categories:
                entries.add(LabelTriple(ptype))
        else:
            if categories:
                raise SchemaError(f"{ptype} lists categories under purposes")
            for p in purposes:
                purpose = _check(p.get("purpose"), vocab.PURPOSES, "purpose")
                cats = p.get("categories") or []
                for c in cats:
                    entries.add(LabelTriple(ptype, purpose, _check(c, vocab.DATA_CATEGORIES, "data category")))
                if not cats:
                    entries.add(LabelTriple(ptype, purpose))
            if not purposes:
                entries.add(LabelTriple(ptype))
    if vocab.NOT_COLLECTED in seen_types and len(seen_types) > 1:
        raise ExclusivityViolation(f"{app_id}: DataNotCollected combined with {seen_types}")
    return DeclaredLabel(app_id, frozenset(entries))


def serialize_declared_label(label: DeclaredLabel) -> dict:
    out = []
    for ptype in vocab.PRIVACY_TYPES:
        mine = [e for e in label.entries if e.privacy_type == ptype]
        if not mine:
            continue
        if ptype == vocab.TRACK:
            cats = sorted({e.data_category for e in mine if e.data_category})
            out.append({"type": ptype, "categories": cats})
        elif ptype == vocab.NOT_COLLECTED:
            out.append({"type": ptype})
        else:
            purposes = []
            for p in vocab.PURPOSES:
                pe = [e for e in mine if e.purpose == p]
                if pe:
                    cats = sorted({e.data_category for e in pe if e.data_category})
                    purposes.append({"purpose": p, "categories": cats})
            out.append({"type": ptype, "purposes": purposes})
    return {"app_id": label.app_id, "privacy_types": out}


def _json_records(path):
    """Read a JSON array, a single object, or JSON Lines."""
    text = Path(path).read_text(encoding="utf-8")
    stripped = text.lstrip()
    if stripped.startswith("["):
        return json.loads(text)
    try:
        obj = json.loads(text)
    except json.JSONDecodeError:
        return [json.loads(line) for line in text.splitlines() if line.strip()]
    return [obj]


def load_declared_labels(path) -> dict[str, DeclaredLabel]:
    labels = {}
    for rec in _json_records(path):
        label = parse_declared_label(rec)
        labels[label.app_id] = label
    return labels


@dataclass(frozen=True)
class AppMetadata:
    app_id: str
    price_model: str
    content_rating: str
    policy_url: str = ""
    seller: str = ""
    policy_id: str = ""

    def __post_init__(self):
        _check(self.price_model, vocab.PRICE_MODELS, "price model")
        _check(self.content_rating, vocab.CONTENT_RATINGS, "content rating")


def policy_id_for_url(url: str) -> str:
    stem = Path(url.split("?", 1)[0].rstrip("/")).stem
    return stem or url


def parse_app_metadata(record) -> AppMetadata:
    if isinstance(record, (str, bytes)):
        record = json.loads(record)
    try:
        app_id = str(record["app_id"])
        price = float(record["price"])
        has_iap = record["has_iap"]
        rating = record["content_rating"]
    except (KeyError, TypeError, ValueError) as exc:
        raise SchemaError(f"malformed metadata record: {exc}") from exc
    if not isinstance(has_iap, bool):
        raise SchemaError(f"has_iap must be a boolean, got {has_iap!r}")
    if price < 0:
        raise SchemaError(f"negative price {price}")
    if rating not in vocab.RATING_STRINGS:
        raise SchemaError(f"unknown content rating {rating!r}")
    if price == 0:
        model = "FreeWithIAP" if has_iap else "Free"
    else:
        model = "PaidWithIAP" if has_iap else "Paid"
    url = record.get("policy_url", "") or ""
    return AppMetadata(
        app_id=app_id,
        price_model=model,
        content_rating=vocab.RATING_STRINGS[rating],
        policy_url=url,
        seller=record.get("seller", "") or "",
        policy_id=record.get("policy_id") or policy_id_for_url(url),
    )


def load_metadata(path) -> dict[str, AppMetadata]:
    out = {}
    for rec in _json_records(path):
        meta = parse_app_metadata(rec)
        out[meta.app_id] = meta
    return out


@dataclass(frozen=True)
class AnnotatedSegment:
    text: str
    practices: frozenset
    attributes: dict = field(default_factory=dict)

    def labels_for(self, attribute) -> frozenset:
        if attribute == vocab.SEGMENT_PRACTICES:
            return self.practices
        return self.attributes.get(attribute, frozenset())


@dataclass
class AnnotatedCorpus:
    segments: list

    @property
    def practice_counts(self) -> Counter:
        return Counter(p for s in self.segments for p in s.practices)

    @property
    def value_counts(self) -> Counter:
        """Counts keyed by ``(attribute, value)``."""
        return Counter(
            (attr, v) for s in self.segments for attr, vals in s.attributes.items() for v in vals
        )


def parse_annotated_segment(record) -> AnnotatedSegment:
    try:
        text = record["text"]
        practices = record.get("practices", [])
        attrs = record.get("attributes", {})
    except (KeyError, TypeError, AttributeError) as exc:
        raise SchemaError(f"malformed corpus record: {exc}") from exc
    for p in practices:
        _check(p, vocab.PRACTICES, "practice")
    attributes = {}
    for attr, values in attrs.items():
        allowed = vocab.ATTRIBUTE_VALUES.get(attr)
        if allowed is None:
            raise SchemaError(f"unknown attribute {attr!r}")
        for v in values:
            _check(v, allowed, f"{attr} value")
        if values:
            attributes[attr] = frozenset(values)
    return AnnotatedSegment(text, frozenset(practices), attributes)


def load_annotated_corpus(path) -> AnnotatedCorpus:
    segments = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            if not line.strip():
                continue
            try:
                rec = json.loads(line)
            except json.JSONDecodeError as exc:
                raise SchemaError(f"{path}:{lineno}: {exc}") from exc
            segments.append(parse_annotated_segment(rec))
    return AnnotatedCorpus(segments)


def dump_annotated_segment(seg: AnnotatedSegment) -> dict:
    return {
        "text": seg.text,
        "practices": sorted(seg.practices),
        "attributes": {k: sorted(v) for k, v in sorted(seg.attributes.items())},
    }
