"""Declared-vs-derived label comparison, corpus aggregates and report output."""
from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from decimal import ROUND_HALF_UP, Decimal
from pathlib import Path

from privlabel import vocab
from privlabel.classify import SegmentAnnotation
from privlabel.derive.label import DerivedLabel
from privlabel.derive.registry import F1Registry, default_registry
from privlabel.derive.rules import RuleSet, default_rules, entry_uncertainty
from privlabel.errors import AppIdMismatch, IOFailure, UnknownFacet
from privlabel.ingest.records import AppMetadata, DeclaredLabel

SCHEMA_VERSION = 1
DIMENSIONS = ("privacy_types", "type_purposes", "type_categories")


def _plain(x):
    """Sets of tuples -> sorted lists of lists, for JSON."""
    if isinstance(x, (set, frozenset)):
        return sorted((_plain(v) for v in x), key=json.dumps)
    if isinstance(x, tuple):
        return [_plain(v) for v in x]
    return x


@dataclass(frozen=True)
class DimensionDiff:
    label_only: frozenset
    policy_only: frozenset
    overlap: frozenset

    @classmethod
    def of(cls, declared, derived) -> "DimensionDiff":
        declared, derived = frozenset(declared), frozenset(derived)
        return cls(declared - derived, derived - declared, declared & derived)

    def to_dict(self):
        return {k: _plain(getattr(self, k)) for k in ("label_only", "policy_only", "overlap")}

    @classmethod
    def from_dict(cls, d) -> "DimensionDiff":
        def items(xs):
            return frozenset(tuple(x) if isinstance(x, list) else x for x in xs)

        return cls(items(d["label_only"]), items(d["policy_only"]), items(d["overlap"]))


@dataclass(frozen=True)
class AppDiscrepancy:
    app_id: str
    privacy_types: DimensionDiff
    type_purposes: DimensionDiff
    type_categories: DimensionDiff
    dnc_contradiction: bool

    @property
    def declared_types(self) -> frozenset:
        return self.privacy_types.label_only | self.privacy_types.overlap

    @property
    def derived_types(self) -> frozenset:
        return self.privacy_types.policy_only | self.privacy_types.overlap

    def to_dict(self):
        d = {"app_id": self.app_id, "dnc_contradiction": self.dnc_contradiction}
        for dim in DIMENSIONS:
            d[dim] = getattr(self, dim).to_dict()
        return d

    @classmethod
    def from_dict(cls, d) -> "AppDiscrepancy":
        return cls(d["app_id"], *(DimensionDiff.from_dict(d[dim]) for dim in DIMENSIONS), bool(d["dnc_contradiction"]))


def compare(declared: DeclaredLabel, derived: DerivedLabel) -> AppDiscrepancy:
    if declared.app_id != derived.app_id:
        raise AppIdMismatch(f"{declared.app_id} != {derived.app_id}")
    return AppDiscrepancy(
        declared.app_id,
        DimensionDiff.of(declared.privacy_types, derived.privacy_types),
        DimensionDiff.of(declared.type_purposes, derived.type_purposes),
        DimensionDiff.of(declared.type_categories, derived.type_categories),
        vocab.NOT_COLLECTED in declared.privacy_types and derived.collects,
    )


def absolute_uncertainty(u, denominator: int) -> int:
    """``u * denominator`` rounded half-up to a whole count."""
    if denominator < 0:
        raise ValueError("denominator must be >= 0")
    u = Decimal(str(u))
    if not Decimal(0) <= u < Decimal(1):
        raise ValueError(f"uncertainty {u} outside [0, 1)")
    return int((u * denominator).quantize(Decimal(1), rounding=ROUND_HALF_UP))


def type_uncertainties(rules: RuleSet | None = None, registry: F1Registry | None = None) -> dict:
    rules = rules or default_rules()
    registry = registry or default_registry()
    return {t: entry_uncertainty(rules.rule_for("privacy_type", t), registry) for t in vocab.PRIVACY_TYPES}


@dataclass(frozen=True)
class OverlapMatrix:
    """``counts[r][c]``: apps with type ``r`` derived and type ``c`` declared.

    ``undeclared[r][c]`` counts the subset of those apps whose label does not
    also declare ``r``.
    """

    types: tuple
    counts: tuple
    undeclared: tuple
    n_apps: int

    def cell(self, derived_type, declared_type) -> int:
        return self.counts[self.types.index(derived_type)][self.types.index(declared_type)]

    def to_dict(self):
        return {
            "schema_version": SCHEMA_VERSION,
            "kind": "overlap_matrix",
            "n_apps": self.n_apps,
            "rows_are": "policy",
            "columns_are": "label",
            "types": list(self.types),
            "counts": [list(r) for r in self.counts],
            "undeclared": [list(r) for r in self.undeclared],
        }

    def csv_rows(self):
        rows = [["policy\\label", *self.types]]
        for t, r in zip(self.types, self.counts):
            rows.append([t, *r])
        return rows


def overlap_matrix(discrepancies) -> OverlapMatrix:
    types = vocab.PRIVACY_TYPES
    k = len(types)
    counts = [[0] * k for _ in range(k)]
    undeclared = [[0] * k for _ in range(k)]
    n = 0
    for d in discrepancies:
        n += 1
        dec, der = d.declared_types, d.derived_types
        for i, r in enumerate(types):
            if r not in der:
                continue
            for j, c in enumerate(types):
                if c in dec:
                    counts[i][j] += 1
                    if r not in dec:
                        undeclared[i][j] += 1
    return OverlapMatrix(types, tuple(map(tuple, counts)), tuple(map(tuple, undeclared)), n)


@dataclass(frozen=True)
class AppRecord:
    """Everything known about one app after derivation."""

    app_id: str
    declared: DeclaredLabel
    derived: DerivedLabel
    annotations: tuple = ()


FACETS = {"PriceModel": ("price_model", vocab.PRICE_MODELS), "ContentRating": ("content_rating", vocab.CONTENT_RATINGS)}


@dataclass(frozen=True)
class FacetCell:
    bucket: str
    privacy_type: str
    bucket_size: int
    label_count: int
    policy_count: int
    overlap_count: int
    policy_uncertainty: int

    @property
    def label_ratio(self) -> float:
        return self.label_count / self.bucket_size if self.bucket_size else 0.0

    @property
    def policy_ratio(self) -> float:
        return self.policy_count / self.bucket_size if self.bucket_size else 0.0


@dataclass(frozen=True)
class FacetReport:
    facet: str
    cells: tuple
    bucket_sizes: dict
    missing_metadata: tuple = ()

    def cell(self, bucket, privacy_type) -> FacetCell:
        for c in self.cells:
            if c.bucket == bucket and c.privacy_type == privacy_type:
                return c
        raise KeyError((bucket, privacy_type))

    def to_dict(self):
        return {
            "schema_version": SCHEMA_VERSION,
            "kind": "facet",
            "facet": self.facet,
            "bucket_sizes": dict(self.bucket_sizes),
            "missing_metadata": list(self.missing_metadata),
            "cells": [
                {"bucket": c.bucket, "privacy_type": c.privacy_type, "bucket_size": c.bucket_size,
                 "label_count": c.label_count, "label_ratio": c.label_ratio,
                 "policy_count": c.policy_count, "policy_ratio": c.policy_ratio,
                 "overlap_count": c.overlap_count, "policy_uncertainty": c.policy_uncertainty}
                for c in self.cells
            ],
        }

    def csv_rows(self):
        rows = [["bucket", "privacy_type", "bucket_size", "label_count", "label_ratio",
                 "policy_count", "policy_ratio", "overlap_count", "policy_uncertainty"]]
        for c in self.cells:
            rows.append([c.bucket, c.privacy_type, c.bucket_size, c.label_count, f"{c.label_ratio:.6f}",
                         c.policy_count, f"{c.policy_ratio:.6f}", c.overlap_count, c.policy_uncertainty])
        return rows


def _split_by_metadata(records, metadata):
    known, missing = [], []
    for rec in sorted(records, key=lambda r: r.app_id):
        (known if rec.app_id in metadata else missing).append(rec)
    return known, tuple(r.app_id for r in missing)


def facet_breakdown(records, metadata: dict, facet: str, rules=None, registry=None) -> FacetReport:
    if facet not in FACETS:
        raise UnknownFacet(f"unknown facet {facet!r}; expected one of {sorted(FACETS)}")
    field_name, buckets = FACETS[facet]
    u = type_uncertainties(rules, registry)
    known, missing = _split_by_metadata(records, metadata)
    sizes = {b: 0 for b in buckets}
    tallies = {(b, t): [0, 0, 0] for b in buckets for t in vocab.PRIVACY_TYPES}
    for rec in known:
        b = getattr(metadata[rec.app_id], field_name)
        sizes[b] += 1
        dec, der = rec.declared.privacy_types, rec.derived.privacy_types
        for t in vocab.PRIVACY_TYPES:
            tally = tallies[(b, t)]
            tally[0] += t in dec
            tally[1] += t in der
            tally[2] += t in dec and t in der
    cells = tuple(
        FacetCell(b, t, sizes[b], *tallies[(b, t)], absolute_uncertainty(u[t], sizes[b]))
        for b in buckets for t in vocab.PRIVACY_TYPES
    )
    return FacetReport(facet, cells, sizes, missing)


def addresses_children(annotation: SegmentAnnotation) -> bool:
    return vocab.ISA in annotation.practices and "Children" in annotation.values(vocab.AUDIENCE_TYPE)


@dataclass(frozen=True)
class ChildrenBucket:
    rating: str
    n_apps: int
    children_overlay: int
    overlay_uncertainty: int
    # privacy type -> (declaring apps, of which address children, uncertainty)
    by_type: dict = field(default_factory=dict)

    @property
    def overlay_ratio(self) -> float:
        return self.children_overlay / self.n_apps if self.n_apps else 0.0


@dataclass(frozen=True)
class ChildrenAuditReport:
    buckets: tuple
    children_uncertainty: Decimal
    missing_metadata: tuple = ()

    def bucket(self, rating) -> ChildrenBucket:
        for b in self.buckets:
            if b.rating == rating:
                return b
        raise KeyError(rating)

    def to_dict(self):
        return {
            "schema_version": SCHEMA_VERSION,
            "kind": "children_audit",
            "children_uncertainty": float(self.children_uncertainty),
            "missing_metadata": list(self.missing_metadata),
            "buckets": [
                {"rating": b.rating, "n_apps": b.n_apps, "children_overlay": b.children_overlay,
                 "overlay_ratio": b.overlay_ratio, "overlay_uncertainty": b.overlay_uncertainty,
                 "by_type": {t: {"declared": v[0], "addresses_children": v[1], "uncertainty": v[2]}
                             for t, v in b.by_type.items()}}
                for b in self.buckets
            ],
        }

    def csv_rows(self):
        rows = [["rating", "n_apps", "children_overlay", "overlay_ratio", "overlay_uncertainty"]]
        for b in self.buckets:
            rows.append([b.rating, b.n_apps, b.children_overlay, f"{b.overlay_ratio:.6f}", b.overlay_uncertainty])
        return rows


def children_audit(records, metadata: dict, rules=None, registry=None) -> ChildrenAuditReport:
    """Per content rating, how many apps have a policy segment addressing children.

    The overlay's uncertainty is ``1 - F1(AudienceType=Children)`` times the
    bucket size. Per declared privacy type, the uncertainty uses that type's
    conversion uncertainty times the number of apps declaring it.
    """
    registry = registry or default_registry()
    u_child = Decimal(1) - registry.get(vocab.AUDIENCE_TYPE, "Children")
    u_type = type_uncertainties(rules, registry)
    known, missing = _split_by_metadata(records, metadata)
    buckets = []
    for rating in vocab.CONTENT_RATINGS:
        mine = [r for r in known if metadata[r.app_id].content_rating == rating]
        kids = {r.app_id for r in mine if any(addresses_children(a) for a in r.annotations)}
        by_type = {}
        for t in vocab.PRIVACY_TYPES:
            declaring = [r for r in mine if t in r.declared.privacy_types]
            by_type[t] = (
                len(declaring),
                sum(r.app_id in kids for r in declaring),
                absolute_uncertainty(u_type[t], len(declaring)),
            )
        buckets.append(ChildrenBucket(rating, len(mine), len(kids), absolute_uncertainty(u_child, len(mine)), by_type))
    return ChildrenAuditReport(tuple(buckets), u_child, missing)


# -- report output ----------------------------------------------------------

def _report_dict(report) -> dict:
    if isinstance(report, dict):
        return report
    return report.to_dict()


def render_report(report, fmt: str) -> str:
    fmt = fmt.lower()
    if fmt == "json":
        return json.dumps(_report_dict(report), indent=2, sort_keys=True) + "\n"
    if fmt == "csv":
        if not hasattr(report, "csv_rows"):
            raise ValueError(f"{type(report).__name__} has no CSV form")
        buf = io.StringIO()
        csv.writer(buf, lineterminator="\n").writerows(report.csv_rows())
        return buf.getvalue()
    raise ValueError(f"unknown format {fmt!r}")


def emit_report(report, fmt: str, path) -> Path:
    text = render_report(report, fmt)
    path = Path(path)
    try:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    except OSError as exc:
        raise IOFailure(f"cannot write {path}: {exc}") from exc
    return path
