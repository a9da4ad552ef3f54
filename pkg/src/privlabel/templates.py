"""Template-reuse detection by sentence-level cosine similarity."""
from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from privlabel import vocab
from privlabel.embed import EmbeddingModel, cosine_matrix, embed_many
from privlabel.errors import EmptyInput
from privlabel.ingest.html import CleanDocument, TextBlock, normalize_ws
from privlabel.ingest.segment import Sentence, split_sentences

SCHEMA_VERSION = 1


@dataclass(frozen=True)
class Template:
    name: str
    sentences: tuple
    embeddings: np.ndarray
    source_url: str | None = None

    def __post_init__(self):
        if not self.sentences:
            raise EmptyInput(f"template {self.name!r} has no sentences")


def build_template(name: str, text: str, model: EmbeddingModel, source_url=None) -> Template:
    sentences = tuple(sentences_from_text(name, text))
    return Template(name, sentences, embed_many(model, (s.tokens for s in sentences)), source_url)


def load_templates(directory, model: EmbeddingModel) -> list[Template]:
    """One plain-text file per template; the file stem is the template name."""
    out = []
    for path in sorted(Path(directory).iterdir()):
        if path.is_file() and not path.name.startswith("."):
            out.append(build_template(path.stem, path.read_text(encoding="utf-8"), model))
    return out


@dataclass(frozen=True)
class TemplateMatch:
    policy_id: str
    template: str
    policy_cover: float
    template_cover: float
    matched: bool


def coverage(sim: np.ndarray, threshold: float) -> tuple[float, float]:
    """Fractions of rows / columns with at least one entry strictly above threshold."""
    hits = sim > threshold
    return float(hits.any(axis=1).mean()), float(hits.any(axis=0).mean())


def match_template(policy_sentences, template: Template, threshold: float = 0.8,
                   model: EmbeddingModel | None = None, two_sided: bool = True,
                   policy_embeddings: np.ndarray | None = None) -> TemplateMatch:
    """Compare every policy sentence with every template sentence.

    A policy matches when more than half of its sentences are similar to some
    template sentence and, with ``two_sided``, more than half of the template
    sentences are similar to some policy sentence.
    """
    policy_sentences = list(policy_sentences)
    if not policy_sentences:
        raise EmptyInput("policy has no sentences")
    if policy_embeddings is None:
        if model is None:
            raise ValueError("need an embedding model or precomputed policy embeddings")
        policy_embeddings = embed_many(model, (s.tokens for s in policy_sentences))
    sim = cosine_matrix(policy_embeddings, template.embeddings)
    pc, tc = coverage(sim, threshold)
    matched = pc > 0.5 and (tc > 0.5 if two_sided else True)
    return TemplateMatch(policy_sentences[0].policy_id, template.name, pc, tc, matched)


@dataclass(frozen=True)
class TemplateScanReport:
    matches: tuple  # every (policy, template) comparison
    templates: tuple
    threshold: float

    def matched_templates(self, policy_id) -> list[str]:
        return [m.template for m in self.matches if m.policy_id == policy_id and m.matched]

    @property
    def policies_per_template(self) -> dict:
        counts = {t: 0 for t in self.templates}
        for m in self.matches:
            if m.matched:
                counts[m.template] += 1
        return counts

    def to_dict(self):
        policies = sorted({m.policy_id for m in self.matches})
        return {
            "schema_version": SCHEMA_VERSION,
            "kind": "template_scan",
            "threshold": self.threshold,
            "policies_per_template": self.policies_per_template,
            "matches": {p: self.matched_templates(p) for p in policies},
            "covers": [
                {"policy_id": m.policy_id, "template": m.template, "policy_cover": m.policy_cover,
                 "template_cover": m.template_cover, "matched": m.matched}
                for m in self.matches
            ],
        }

    def csv_rows(self):
        rows = [["policy_id", "template", "policy_cover", "template_cover", "matched"]]
        for m in self.matches:
            rows.append([m.policy_id, m.template, f"{m.policy_cover:.6f}", f"{m.template_cover:.6f}", int(m.matched)])
        return rows


def scan_corpus(policies: dict, templates, threshold: float = 0.8,
                model: EmbeddingModel | None = None, two_sided: bool = True) -> TemplateScanReport:
    """``policies`` maps policy id to its sentence list."""
    templates = list(templates)
    matches = []
    for pid in sorted(policies):
        sentences = policies[pid]
        if not sentences:
            continue
        emb = embed_many(model, (s.tokens for s in sentences))
        for t in templates:
            matches.append(match_template(sentences, t, threshold, policy_embeddings=emb, two_sided=two_sided))
    return TemplateScanReport(tuple(matches), tuple(t.name for t in templates), threshold)


def template_breakdown(scan: TemplateScanReport, discrepancies: dict, app_policy: dict) -> dict:
    """Per template: matched policies, apps linking them, and per-type
    label-only / policy-only / overlap app counts.

    ``discrepancies`` maps app id to its AppDiscrepancy; ``app_policy`` maps
    app id to policy id.
    """
    out = {}
    for t in scan.templates:
        policies = {m.policy_id for m in scan.matches if m.template == t and m.matched}
        apps = sorted(a for a, p in app_policy.items() if p in policies and a in discrepancies)
        per_type = {pt: {"label_only": 0, "policy_only": 0, "overlap": 0} for pt in vocab.PRIVACY_TYPES}
        for a in apps:
            diff = discrepancies[a].privacy_types
            for pt in vocab.PRIVACY_TYPES:
                if pt in diff.label_only:
                    per_type[pt]["label_only"] += 1
                elif pt in diff.policy_only:
                    per_type[pt]["policy_only"] += 1
                elif pt in diff.overlap:
                    per_type[pt]["overlap"] += 1
        out[t] = {"policies": len(policies), "apps": len(apps), "privacy_types": per_type}
    return {"schema_version": SCHEMA_VERSION, "kind": "template_breakdown", "templates": out}


def sentences_from_text(policy_id: str, text: str) -> list[Sentence]:
    paragraphs = [normalize_ws(p) for p in text.split("\n\n")]
    doc = CleanDocument(policy_id, tuple(TextBlock(p) for p in paragraphs if p))
    return split_sentences(doc)
