"""Segment filtering, per-segment label entries, and per-policy union."""
from __future__ import annotations

from dataclasses import dataclass, field
from decimal import Decimal

from privlabel import vocab
from privlabel.classify import SegmentAnnotation
from privlabel.derive.registry import F1Registry, default_registry
from privlabel.derive.rules import RuleSet, default_rules, entry_uncertainty
from privlabel.errors import ExclusivityViolation

ADMISSIBLE = "Admissible"
DOES_NOT_STATEMENT = "DoesNotStatement"
WEBSITE_ONLY = "WebsiteOnlyCollection"
THIRD_PARTY_SEE_ONLY = "ThirdPartySeeOnly"


@dataclass(frozen=True)
class FilterDecision:
    admissible: bool
    reason: str

    def __post_init__(self):
        if self.admissible != (self.reason == ADMISSIBLE):
            raise ValueError("reason must be Admissible exactly when admissible")


def admissible(annotation: SegmentAnnotation) -> FilterDecision:
    if "DoesNot" in annotation.values(vocab.DOES_DOES_NOT):
        return FilterDecision(False, DOES_NOT_STATEMENT)
    afp = annotation.values(vocab.ACTION_FIRST_PARTY)
    if vocab.FP in annotation.practices and "CollectOnWebsite" in afp and "CollectInMobileApp" not in afp:
        return FilterDecision(False, WEBSITE_ONLY)
    atp = annotation.values(vocab.ACTION_THIRD_PARTY)
    if vocab.TP in annotation.practices and "See" in atp and "CollectOnFirstPartyWebsiteApp" not in atp:
        return FilterDecision(False, THIRD_PARTY_SEE_ONLY)
    return FilterDecision(True, ADMISSIBLE)


@dataclass(frozen=True)
class LabelEntry:
    privacy_type: str
    purpose: str | None = None
    data_category: str | None = None
    uncertainty: Decimal = Decimal("0")
    supporting_segments: frozenset = field(default_factory=frozenset)

    @property
    def key(self):
        return (self.privacy_type, self.purpose, self.data_category)

    def to_dict(self) -> dict:
        return {
            "privacy_type": self.privacy_type,
            "purpose": self.purpose,
            "data_category": self.data_category,
            "uncertainty": float(self.uncertainty),
            "supporting_segments": sorted(self.supporting_segments),
        }

    @classmethod
    def from_dict(cls, d) -> "LabelEntry":
        return cls(
            d["privacy_type"], d.get("purpose"), d.get("data_category"),
            Decimal(str(d.get("uncertainty", 0))), frozenset(d.get("supporting_segments", ())),
        )


@dataclass(frozen=True)
class DerivedLabel:
    app_id: str
    entries: frozenset

    def __post_init__(self):
        types = {e.privacy_type for e in self.entries}
        if vocab.NOT_COLLECTED in types and len(self.entries) != 1:
            raise ExclusivityViolation("DataNotCollected must be the only entry")

    @property
    def privacy_types(self) -> frozenset:
        return frozenset(e.privacy_type for e in self.entries)

    @property
    def type_purposes(self) -> frozenset:
        return frozenset((e.privacy_type, e.purpose) for e in self.entries if e.purpose)

    @property
    def type_categories(self) -> frozenset:
        return frozenset((e.privacy_type, e.data_category) for e in self.entries if e.data_category)

    @property
    def collects(self) -> bool:
        return any(e.privacy_type != vocab.NOT_COLLECTED for e in self.entries)

    def with_app_id(self, app_id) -> "DerivedLabel":
        return DerivedLabel(app_id, self.entries)

    def sorted_entries(self):
        order = {t: i for i, t in enumerate(vocab.PRIVACY_TYPES)}
        return sorted(self.entries, key=lambda e: (order[e.privacy_type], e.purpose or "", e.data_category or ""))

    def to_dict(self) -> dict:
        return {"app_id": self.app_id, "entries": [e.to_dict() for e in self.sorted_entries()]}

    @classmethod
    def from_dict(cls, d) -> "DerivedLabel":
        return cls(d["app_id"], frozenset(LabelEntry.from_dict(e) for e in d["entries"]))


def fired_targets(annotation: SegmentAnnotation, text: str, rules: RuleSet) -> dict:
    """``kind -> [rules that fired]`` for one segment, DataNotCollected excluded."""
    fired = {"privacy_type": [], "purpose": [], "data_category": []}
    for rule in rules.rules:
        if rule.kind == "privacy_type" and rule.target == vocab.NOT_COLLECTED:
            continue
        if rule.fires(annotation.practices, annotation.attributes, text):
            fired[rule.kind].append(rule)
    return fired


def derive_segment_entries(annotation, segment_text, rules: RuleSet | None = None,
                           registry: F1Registry | None = None) -> list[LabelEntry]:
    """Cross fired privacy types with fired purposes and categories.

    DataUsedToTrackYou entries carry categories but never a purpose. An
    entry's uncertainty is the largest among the rules that formed it.
    """
    rules = rules or default_rules()
    registry = registry or default_registry()
    rules.validate(registry)
    fired = fired_targets(annotation, segment_text, rules)
    u = {id(r): entry_uncertainty(r, registry) for rs in fired.values() for r in rs}
    purposes = fired["purpose"] or [None]
    categories = fired["data_category"] or [None]
    support = frozenset({annotation.index})

    entries = {}
    for t in fired["privacy_type"]:
        for p in ([None] if t.target == vocab.TRACK else purposes):
            for c in categories:
                parts = [r for r in (t, p, c) if r is not None]
                entry = LabelEntry(
                    t.target,
                    p.target if p else None,
                    c.target if c else None,
                    max(u[id(r)] for r in parts),
                    support,
                )
                entries[entry.key] = entry
    return [entries[k] for k in sorted(entries, key=lambda k: tuple(x or "" for x in k))]


def disclaims_collection(annotation: SegmentAnnotation, rules: RuleSet) -> bool:
    dnc = rules.rule_for("privacy_type", vocab.NOT_COLLECTED)
    return dnc.fires(annotation.practices, annotation.attributes)


def derive_policy_label(app_id, segment_entries: dict, annotations, rules: RuleSet | None = None,
                        registry: F1Registry | None = None) -> DerivedLabel:
    """Union entries of admissible segments; otherwise fall back to DataNotCollected.

    ``segment_entries`` maps segment index to that segment's entries.
    DataNotCollected is emitted only if no admissible segment yields an entry
    and at least one collection segment states the app does not collect.
    """
    rules = rules or default_rules()
    registry = registry or default_registry()
    merged: dict = {}
    for ann in annotations:
        if not admissible(ann).admissible:
            continue
        for e in segment_entries.get(ann.index, ()):
            prev = merged.get(e.key)
            if prev is None:
                merged[e.key] = e
            else:
                merged[e.key] = LabelEntry(
                    *e.key, max(prev.uncertainty, e.uncertainty),
                    prev.supporting_segments | e.supporting_segments,
                )
    if merged:
        return DerivedLabel(app_id, frozenset(merged.values()))

    disclaimers = frozenset(a.index for a in annotations if disclaims_collection(a, rules))
    if disclaimers:
        u = entry_uncertainty(rules.rule_for("privacy_type", vocab.NOT_COLLECTED), registry)
        return DerivedLabel(app_id, frozenset({LabelEntry(vocab.NOT_COLLECTED, None, None, u, disclaimers)}))
    return DerivedLabel(app_id, frozenset())


def derive_label(app_id, annotations, texts: dict, rules: RuleSet | None = None,
                 registry: F1Registry | None = None) -> DerivedLabel:
    """Run both passes over one policy's annotations.

    ``texts`` maps segment index to its text (needed by keyword rules).
    """
    rules = rules or default_rules()
    registry = registry or default_registry()
    per_segment = {
        ann.index: derive_segment_entries(ann, texts.get(ann.index, ""), rules, registry)
        for ann in annotations
        if admissible(ann).admissible
    }
    return derive_policy_label(app_id, per_segment, annotations, rules, registry)
