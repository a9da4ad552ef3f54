from privlabel.derive.label import (
    DerivedLabel,
    FilterDecision,
    LabelEntry,
    admissible,
    derive_label,
    derive_policy_label,
    derive_segment_entries,
)
from privlabel.derive.registry import F1Registry, default_registry, load_registry
from privlabel.derive.rules import (
    Condition,
    ConversionRule,
    RuleSet,
    default_rules,
    entry_uncertainty,
    keyword_present,
    load_rules,
)

__all__ = [
    "Condition", "ConversionRule", "DerivedLabel", "F1Registry", "FilterDecision",
    "LabelEntry", "RuleSet", "admissible", "default_registry", "default_rules",
    "derive_label", "derive_policy_label", "derive_segment_entries",
    "entry_uncertainty", "keyword_present", "load_registry", "load_rules",
]
