"""Staged batch pipeline over a corpus directory.

Corpus layout::

    <corpus_dir>/policies/<policy_id>.html
    <corpus_dir>/labels.json        declared labels (JSON array or JSONL)
    <corpus_dir>/metadata.jsonl     app metadata, one record per app

Every stage reads its inputs from the output directory (or the corpus) and
writes its artifacts back there, so stages can be re-run independently.
"""
from __future__ import annotations

import json
import logging
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from itertools import groupby
from pathlib import Path

from privlabel import vocab
from privlabel.classify import (
    SegmentAnnotation,
    annotate,
    bootstrap_accuracy,
    evaluate,
    load_stack,
    relevant_segments,
    save_model,
    split_train_test,
    train,
)
from privlabel.compare import (
    AppDiscrepancy,
    AppRecord,
    children_audit,
    compare,
    emit_report,
    facet_breakdown,
    overlap_matrix,
)
from privlabel.config import PipelineConfig
from privlabel.derive import DerivedLabel, derive_label, load_registry, load_rules
from privlabel.embed import load_embeddings
from privlabel.errors import ConfigError, EmptyDocument, InsufficientData, MissingDependency, PrivLabelError
from privlabel.ingest import (
    extract_readable,
    load_annotated_corpus,
    load_declared_labels,
    load_metadata,
    load_snapshot,
    parse_declared_label,
    segment_document,
    serialize_declared_label,
    split_sentences,
)
from privlabel.ingest.segment import Segment, Sentence, tokenize
from privlabel.templates import load_templates, scan_corpus, template_breakdown

log = logging.getLogger(__name__)

STAGES = ("ingest", "train", "classify", "derive", "compare", "templates")
POLICY_SUFFIXES = (".html", ".htm")


@dataclass
class RunResult:
    status: int
    summary: dict = field(default_factory=dict)
    error: dict | None = None


# -- small IO helpers -------------------------------------------------------

def _dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, ensure_ascii=False)


def write_json(path: Path, obj) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(obj, indent=2, sort_keys=True, ensure_ascii=False) + "\n", encoding="utf-8")


def write_jsonl(path: Path, rows) -> int:
    path.parent.mkdir(parents=True, exist_ok=True)
    n = 0
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for row in rows:
            fh.write(_dumps(row) + "\n")
            n += 1
    return n


def read_jsonl(path: Path):
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            if line.strip():
                yield json.loads(line)


def _require(path: Path, what: str) -> Path:
    if not path.exists():
        raise MissingDependency(what)
    return path


def _pmap(fn, items, jobs: int, initializer=None, initargs=()):
    """Order-preserving map, in worker processes when ``jobs > 1``."""
    if jobs <= 1:
        if initializer is not None:
            initializer(*initargs)
        return [fn(x) for x in items]
    with ProcessPoolExecutor(max_workers=jobs, initializer=initializer, initargs=initargs) as pool:
        return list(pool.map(fn, items, chunksize=8))


# -- ingest -----------------------------------------------------------------

def policy_files(corpus_dir: Path) -> list[Path]:
    pdir = corpus_dir / "policies"
    if not pdir.is_dir():
        raise ConfigError(f"corpus has no policies/ directory: {corpus_dir}")
    return sorted(p for p in pdir.iterdir() if p.suffix.lower() in POLICY_SUFFIXES)


def _ingest_one(args):
    path, limit = args
    pid = path.stem
    try:
        doc = extract_readable(load_snapshot(path), pid)
    except EmptyDocument as exc:
        return pid, [], [], {"policy_id": pid, "error": "EmptyDocument", "message": str(exc)}
    segments = [{"policy_id": pid, "index": s.index, "text": s.text} for s in segment_document(doc, limit)]
    sentences = [{"policy_id": pid, "text": s.text} for s in split_sentences(doc)]
    return pid, segments, sentences, None


def app_policies(metadata: dict) -> dict:
    return {app_id: m.policy_id for app_id, m in sorted(metadata.items())}


def stage_ingest(cfg: PipelineConfig) -> dict:
    corpus, out = Path(cfg.corpus_dir), Path(cfg.out_dir)
    for name in ("labels.json", "metadata.jsonl"):
        if not (corpus / name).exists():
            raise ConfigError(f"corpus is missing {name}")
    results = _pmap(_ingest_one, [(p, cfg.short_item_limit) for p in policy_files(corpus)], cfg.jobs)

    n_seg = write_jsonl(out / "segments.jsonl", (s for _, segs, _, _ in results for s in segs))
    write_jsonl(out / "sentences.jsonl", (s for _, _, sents, _ in results for s in sents))
    errors = [e for *_, e in results if e is not None]
    write_jsonl(out / "ingest_errors.jsonl", errors)

    declared = load_declared_labels(corpus / "labels.json")
    metadata = load_metadata(corpus / "metadata.jsonl")
    write_jsonl(out / "declared_labels.jsonl", (serialize_declared_label(declared[a]) for a in sorted(declared)))
    links = app_policies(metadata)
    write_jsonl(out / "apps.jsonl", ({"app_id": a, "policy_id": p} for a, p in links.items()))
    return {
        "policies": len(results),
        "policies_failed": len(errors),
        "segments": n_seg,
        "apps_in": len(declared),
        "apps_with_metadata": len(metadata),
    }


# -- train ------------------------------------------------------------------

def stage_train(cfg: PipelineConfig) -> dict:
    out = Path(cfg.out_dir)
    corpus = load_annotated_corpus(cfg.training_corpus)
    embeddings = load_embeddings(cfg.embeddings)
    models_dir = cfg.models_path
    models_dir.mkdir(parents=True, exist_ok=True)
    summary = {}
    for attr in vocab.CLASSIFIER_ATTRIBUTES:
        segments = relevant_segments(corpus, attr)
        try:
            train_set, test_set = split_train_test(segments, attr, cfg.train_ratio, cfg.seed)
        except InsufficientData as exc:
            log.warning("skipping %s: %s", attr, exc)
            summary[attr] = {"skipped": str(exc)}
            continue
        labels = sorted({lab for s in segments for lab in s.labels})
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            model = train(attr, train_set, embeddings, cfg.hyper, labels)
        model = replace(model, threshold=cfg.threshold)
        save_model(model, models_dir / f"{attr}.json")
        report = evaluate(model, test_set, embeddings)
        ci = bootstrap_accuracy(model, test_set, embeddings, cfg.bootstrap_resamples, cfg.seed)
        metrics = report.to_dict()
        metrics.update({"n_train": len(train_set), "n_test": len(test_set), "accuracy_ci": ci.to_dict()})
        write_json(out / "metrics" / f"{attr}.json", metrics)
        summary[attr] = {"n_train": len(train_set), "n_test": len(test_set), "macro_f1": round(report.macro_f1, 6)}
    return {"classifiers": summary}


# -- classify ---------------------------------------------------------------

_WORKER: dict = {}


def _init_classifier(stack, embeddings):
    _WORKER["stack"] = stack
    _WORKER["embeddings"] = embeddings


def _classify_policy(rows):
    stack, emb = _WORKER["stack"], _WORKER["embeddings"]
    return [
        annotate(stack, Segment(r["policy_id"], r["index"], r["text"], tuple(tokenize(r["text"]))), emb).to_dict()
        for r in rows
    ]


def _by_policy(rows):
    return [list(g) for _, g in groupby(rows, key=lambda r: r["policy_id"])]


def stage_classify(cfg: PipelineConfig) -> dict:
    out = Path(cfg.out_dir)
    seg_path = _require(out / "segments.jsonl", "policy segments")
    stack = load_stack(cfg.models_path)
    if vocab.SEGMENT_PRACTICES not in stack:
        raise MissingDependency("classifier models")
    embeddings = load_embeddings(cfg.embeddings)
    groups = _by_policy(read_jsonl(seg_path))
    results = _pmap(_classify_policy, groups, cfg.jobs, _init_classifier, (stack, embeddings))
    n = write_jsonl(out / "annotations.jsonl", (a for policy in results for a in policy))
    with_practice = sum(1 for policy in results for a in policy if a["practices"])
    return {"segments_classified": n, "segments_with_practice": with_practice}


# -- derive -----------------------------------------------------------------

def _rules_and_registry(cfg: PipelineConfig):
    rules = load_rules(cfg.rules_file)
    registry = load_registry(cfg.registry_file)
    rules.validate(registry)
    return rules, registry


def load_policy_annotations(out: Path) -> dict:
    path = _require(out / "annotations.jsonl", "segment annotations")
    anns: dict = {}
    for row in read_jsonl(path):
        ann = SegmentAnnotation.from_dict(row)
        anns.setdefault(ann.policy_id, []).append(ann)
    return anns


def stage_derive(cfg: PipelineConfig) -> dict:
    out = Path(cfg.out_dir)
    anns = load_policy_annotations(out)
    texts: dict = {}
    for row in read_jsonl(_require(out / "segments.jsonl", "policy segments")):
        texts.setdefault(row["policy_id"], {})[row["index"]] = row["text"]
    links = {r["app_id"]: r["policy_id"] for r in read_jsonl(_require(out / "apps.jsonl", "app list"))}
    rules, registry = _rules_and_registry(cfg)

    policy_labels = {
        pid: derive_label(pid, anns[pid], texts.get(pid, {}), rules, registry) for pid in sorted(anns)
    }
    write_jsonl(out / "policy_labels.jsonl", (policy_labels[p].to_dict() for p in sorted(policy_labels)))
    rows, missing = [], []
    for app_id, pid in sorted(links.items()):
        if pid in policy_labels:
            rows.append(policy_labels[pid].with_app_id(app_id).to_dict())
        else:
            missing.append(app_id)
    write_jsonl(out / "derived_labels.jsonl", rows)
    return {
        "policies_labelled": len(policy_labels),
        "apps_labelled": len(rows),
        "apps_without_policy": len(missing),
        "entries_derived": sum(len(r["entries"]) for r in rows),
    }


# -- compare ----------------------------------------------------------------

def load_records(out: Path) -> list[AppRecord]:
    derived = {
        r["app_id"]: DerivedLabel.from_dict(r)
        for r in read_jsonl(_require(out / "derived_labels.jsonl", "derived labels"))
    }
    declared = {
        r["app_id"]: parse_declared_label(r)
        for r in read_jsonl(_require(out / "declared_labels.jsonl", "declared labels"))
    }
    anns = load_policy_annotations(out)
    links = {r["app_id"]: r["policy_id"] for r in read_jsonl(out / "apps.jsonl")}
    return [
        AppRecord(a, declared[a], derived[a], tuple(anns.get(links.get(a), ())))
        for a in sorted(derived)
        if a in declared
    ]


def stage_compare(cfg: PipelineConfig) -> dict:
    out = Path(cfg.out_dir)
    records = load_records(out)
    rules, registry = _rules_and_registry(cfg)
    metadata = load_metadata(Path(cfg.corpus_dir) / "metadata.jsonl")

    diffs = [compare(r.declared, r.derived) for r in records]
    write_jsonl(out / "discrepancies.jsonl", (d.to_dict() for d in diffs))
    matrix = overlap_matrix(diffs)
    emit_report(matrix, "csv", out / "overlap_matrix.csv")
    emit_report(matrix, "json", out / "overlap_matrix.json")
    for facet, stem in (("PriceModel", "facet_price_model"), ("ContentRating", "facet_content_rating")):
        report = facet_breakdown(records, metadata, facet, rules, registry)
        emit_report(report, "json", out / f"{stem}.json")
        emit_report(report, "csv", out / f"{stem}.csv")
    audit = children_audit(records, metadata, rules, registry)
    emit_report(audit, "json", out / "children_audit.json")
    emit_report(audit, "csv", out / "children_audit.csv")
    inconsistent = sum(
        1 for d in diffs if d.privacy_types.label_only or d.privacy_types.policy_only or d.dnc_contradiction
    )
    return {"apps_compared": len(diffs), "discrepancies_found": inconsistent}


# -- templates --------------------------------------------------------------

def stage_templates(cfg: PipelineConfig) -> dict:
    out = Path(cfg.out_dir)
    sent_path = _require(out / "sentences.jsonl", "policy sentences")
    model = load_embeddings(cfg.embeddings)
    templates = load_templates(cfg.templates_dir, model)
    policies: dict = {}
    for row in read_jsonl(sent_path):
        policies.setdefault(row["policy_id"], []).append(
            Sentence(row["policy_id"], row["text"], tuple(tokenize(row["text"])))
        )
    scan = scan_corpus(policies, templates, cfg.template_threshold, model, cfg.template_two_sided)
    emit_report(scan, "json", out / "template_matches.json")
    emit_report(scan, "csv", out / "template_matches.csv")
    summary = {"templates": len(templates), "policies_matched": len({m.policy_id for m in scan.matches if m.matched})}
    if (out / "discrepancies.jsonl").exists():
        diffs = {r["app_id"]: AppDiscrepancy.from_dict(r) for r in read_jsonl(out / "discrepancies.jsonl")}
        links = {r["app_id"]: r["policy_id"] for r in read_jsonl(out / "apps.jsonl")}
        emit_report(template_breakdown(scan, diffs, links), "json", out / "template_breakdown.json")
    return summary


STAGE_FUNCS = {
    "ingest": stage_ingest,
    "train": stage_train,
    "classify": stage_classify,
    "derive": stage_derive,
    "compare": stage_compare,
    "templates": stage_templates,
}


def parse_stages(spec) -> list[str]:
    """``"a,b"`` or an iterable of names, returned in pipeline order."""
    names = [s.strip() for s in spec.split(",")] if isinstance(spec, str) else list(spec)
    names = [n for n in names if n]
    if "run" in names or "all" in names:
        return list(STAGES)
    unknown = sorted(set(names) - set(STAGES))
    if unknown:
        raise ConfigError(f"unknown stage(s): {', '.join(unknown)}")
    return [s for s in STAGES if s in names]


def run_pipeline(cfg: PipelineConfig, stages=STAGES) -> RunResult:
    """Run ``stages`` in pipeline order; never raises for pipeline errors.

    On failure an ``error.json`` record lands in the output directory and the
    result carries a nonzero status.
    """
    out = Path(cfg.out_dir)
    stage = None
    summary: dict = {}
    try:
        stages = parse_stages(stages)
        cfg.check_paths(set(stages))
        out.mkdir(parents=True, exist_ok=True)
        stale = out / "error.json"
        if stale.exists():
            stale.unlink()
        summary_path = out / "summary.json"
        if summary_path.exists():
            summary = json.loads(summary_path.read_text(encoding="utf-8"))
        for stage in stages:
            log.info("stage %s", stage)
            summary[stage] = STAGE_FUNCS[stage](cfg)
            write_json(summary_path, summary)
    except (PrivLabelError, OSError) as exc:
        error = {
            "status": 2 if isinstance(exc, ConfigError) else 1,
            "stage": stage,
            "error": type(exc).__name__,
            "message": str(exc),
        }
        try:
            write_json(out / "error.json", error)
        except OSError:
            pass
        return RunResult(error["status"], summary, error)
    return RunResult(0, summary)
