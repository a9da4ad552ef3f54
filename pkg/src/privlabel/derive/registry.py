"""Per-classifier-value F1 scores used to propagate uncertainty."""
from __future__ import annotations

import json
from dataclasses import dataclass
from decimal import ROUND_HALF_UP, Decimal
from functools import lru_cache
from importlib import resources
from pathlib import Path

from privlabel.errors import RuleConfigError

CENT = Decimal("0.01")


def round_half_up(x, places: Decimal = CENT) -> Decimal:
    return Decimal(x).quantize(places, rounding=ROUND_HALF_UP)


@dataclass(frozen=True)
class F1Registry:
    """Maps ``(attribute, value)`` to an F1 score in (0, 1].

    Segment-classifier practices live under the ``SegmentPractices`` attribute.
    Scores are kept as :class:`~decimal.Decimal` so table arithmetic rounds
    exactly.
    """

    scores: dict

    def __post_init__(self):
        for key, f1 in self.scores.items():
            if not Decimal(0) < f1 <= Decimal(1):
                raise ValueError(f"F1 for {key} outside (0, 1]: {f1}")

    def get(self, attribute, value) -> Decimal:
        try:
            return self.scores[(attribute, value)]
        except KeyError:
            raise RuleConfigError(f"no F1 score for {attribute}={value}") from None

    def __contains__(self, key) -> bool:
        return key in self.scores

    @classmethod
    def from_nested(cls, nested: dict) -> "F1Registry":
        return cls({
            (attr, value): Decimal(str(f1))
            for attr, values in nested.items()
            for value, f1 in values.items()
        })

    def to_nested(self) -> dict:
        out: dict = {}
        for (attr, value), f1 in sorted(self.scores.items()):
            out.setdefault(attr, {})[value] = float(f1)
        return out


def load_registry(path=None) -> F1Registry:
    if path is None:
        text = resources.files("privlabel.data").joinpath("default_f1.json").read_text(encoding="utf-8")
    else:
        text = Path(path).read_text(encoding="utf-8")
    return F1Registry.from_nested(json.loads(text))


@lru_cache(maxsize=None)
def default_registry() -> F1Registry:
    return load_registry(None)
