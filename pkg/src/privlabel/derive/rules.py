"""Conversion rules mapping segment annotations to privacy-label targets."""
from __future__ import annotations

import json
import re
from dataclasses import dataclass
from decimal import Decimal
from functools import lru_cache
from importlib import resources
from pathlib import Path

from privlabel import vocab
from privlabel.derive.registry import F1Registry, round_half_up
from privlabel.errors import RuleConfigError

KINDS = ("privacy_type", "purpose", "data_category")
TARGETS = {
    "privacy_type": vocab.PRIVACY_TYPES,
    "purpose": vocab.PURPOSES,
    "data_category": vocab.DATA_CATEGORIES,
}


@dataclass(frozen=True)
class Condition:
    attribute: str
    values: tuple
    mode: str = "any"  # "any" | "all"

    def holds(self, predicted: frozenset) -> bool:
        if self.mode == "all":
            return all(v in predicted for v in self.values)
        return any(v in predicted for v in self.values)


@dataclass(frozen=True)
class ConversionRule:
    kind: str
    target: str
    practices: tuple
    conditions: tuple
    keywords: tuple = ()
    table: str = "primary"

    def __post_init__(self):
        if self.kind not in KINDS:
            raise RuleConfigError(f"unknown rule kind {self.kind!r}")
        if self.target not in TARGETS[self.kind]:
            raise RuleConfigError(f"unknown {self.kind} target {self.target!r}")
        if not self.practices:
            raise RuleConfigError(f"{self.target}: at least one practice required")
        if self.keywords and self.table != "inferential":
            raise RuleConfigError(f"{self.target}: keywords only allowed on inferential rules")
        for c in self.conditions:
            if c.mode not in ("any", "all"):
                raise RuleConfigError(f"{self.target}: bad match mode {c.mode!r}")

    def fires(self, practices, attributes, text: str = "") -> bool:
        if not any(p in practices for p in self.practices):
            return False
        for c in self.conditions:
            if not c.holds(attributes.get(c.attribute, frozenset())):
                return False
        if self.keywords and not any(keyword_present(text, k) for k in self.keywords):
            return False
        return True

    def f1_values(self):
        """``(attribute, value)`` pairs whose F1 scores drive uncertainty."""
        practice_keys = [(vocab.SEGMENT_PRACTICES, p) for p in self.practices]
        attr_keys = [(c.attribute, v) for c in self.conditions for v in c.values]
        return practice_keys, attr_keys


@lru_cache(maxsize=512)
def _keyword_pattern(phrase: str):
    phrase = " ".join(phrase.lower().split())
    return re.compile(r"(?<![^\W_])" + re.escape(phrase) + r"(?![^\W_])")


def normalize_text(text: str) -> str:
    return " ".join(text.lower().split())


def keyword_present(text: str, phrase: str) -> bool:
    """Case-insensitive phrase match bounded by non-alphanumerics at both ends."""
    return _keyword_pattern(phrase).search(normalize_text(text)) is not None


def entry_uncertainty(rule: ConversionRule, registry: F1Registry) -> Decimal:
    """``1 - mean(practice F1) * mean(attribute-value F1)``, rounded half-up to 0.01.

    Keyword conditions carry no F1. A rule with no attribute conditions uses
    the practice term alone.
    """
    practice_keys, attr_keys = rule.f1_values()
    p = sum(registry.get(*k) for k in practice_keys) / len(practice_keys)
    a = sum(registry.get(*k) for k in attr_keys) / len(attr_keys) if attr_keys else Decimal(1)
    return round_half_up(Decimal(1) - p * a)


@dataclass(frozen=True)
class RuleSet:
    rules: tuple

    def by_kind(self, kind):
        return [r for r in self.rules if r.kind == kind]

    def rule_for(self, kind, target) -> ConversionRule:
        for r in self.rules:
            if r.kind == kind and r.target == target:
                return r
        raise KeyError((kind, target))

    def validate(self, registry: F1Registry) -> None:
        for r in self.rules:
            practice_keys, attr_keys = r.f1_values()
            for key in practice_keys + attr_keys:
                if key not in registry:
                    raise RuleConfigError(f"rule {r.target} references {key[0]}={key[1]} with no F1")

    def uncertainties(self, registry: F1Registry) -> dict:
        return {(r.kind, r.target): entry_uncertainty(r, registry) for r in self.rules}


def rule_from_dict(d) -> ConversionRule:
    try:
        return ConversionRule(
            kind=d["kind"],
            target=d["target"],
            practices=tuple(d["practices"]),
            conditions=tuple(
                Condition(c["attribute"], tuple(c["values"]), c.get("mode", "any"))
                for c in d.get("conditions", ())
            ),
            keywords=tuple(k.lower() for k in d.get("keywords", ())),
            table=d.get("table", "primary"),
        )
    except KeyError as exc:
        raise RuleConfigError(f"rule missing field {exc}") from exc


def rule_to_dict(r: ConversionRule) -> dict:
    d = {
        "kind": r.kind,
        "target": r.target,
        "table": r.table,
        "practices": list(r.practices),
        "conditions": [
            {"attribute": c.attribute, "values": list(c.values), "mode": c.mode}
            for c in r.conditions
        ],
    }
    if r.keywords:
        d["keywords"] = list(r.keywords)
    return d


def load_rules(path=None) -> RuleSet:
    if path is None:
        text = resources.files("privlabel.data").joinpath("default_rules.json").read_text(encoding="utf-8")
    else:
        text = Path(path).read_text(encoding="utf-8")
    data = json.loads(text)
    return RuleSet(tuple(rule_from_dict(d) for d in data["rules"]))


@lru_cache(maxsize=None)
def default_rules() -> RuleSet:
    return load_rules(None)
