"""Acceptance criteria 1-9, one test each.

Each test records a ``PASS``/``FAIL`` line that is echoed in the terminal
summary (and printed directly when this file is run as a script).
"""
import itertools
import math
import shutil
import sys
import tempfile
import time
from decimal import Decimal
from pathlib import Path

import numpy as np

sys.path.insert(0, str(Path(__file__).parent))

from oracle import CATEGORY_U, PURPOSE_U, TYPE_U  # noqa: E402
from test_derive import FLAGS, dnc_failures, run_oracle_comparison  # noqa: E402

from privlabel import vocab  # noqa: E402
from privlabel.classify import (  # noqa: E402
    Hyper,
    LabeledSegment,
    bootstrap_accuracy,
    bootstrap_ci,
    evaluate,
    logistic_loss_and_grad,
    split_train_test,
    train,
)
from privlabel.compare import absolute_uncertainty  # noqa: E402
from privlabel.config import PipelineConfig  # noqa: E402
from privlabel.derive import default_registry, default_rules, entry_uncertainty  # noqa: E402
from privlabel.embed import EmbeddingModel  # noqa: E402
from privlabel.ingest.html import CleanDocument, TextBlock  # noqa: E402
from privlabel.ingest.segment import segment_document  # noqa: E402
from privlabel.pipeline import run_pipeline  # noqa: E402
from privlabel.synthetic import separable_corpus, write_fixture_corpus  # noqa: E402
from privlabel.templates import build_template, match_template, sentences_from_text  # noqa: E402

RESULTS: dict = {}


def record(n, title, ok, detail):
    line = f"[{'PASS' if ok else 'FAIL'}] criterion {n}: {title} -- {detail}"
    RESULTS[n] = line
    print(line)
    return ok


# -- 1 ----------------------------------------------------------------------

# component values printed next to each classifier output in the primary table
COMPONENT_U = {
    (vocab.SEGMENT_PRACTICES, vocab.FP): "0.20", (vocab.SEGMENT_PRACTICES, vocab.TP): "0.14",
    (vocab.IDENTIFIABILITY, "Identifiable"): "0.25", (vocab.IDENTIFIABILITY, "Aggregated"): "0.15",
    (vocab.DOES_DOES_NOT, "DoesNot"): "0.16",
    (vocab.PURPOSE, "BasicService"): "0.20", (vocab.PURPOSE, "AdditionalService"): "0.20",
    (vocab.PURPOSE, "ServiceOperationAndSecurity"): "0.17", (vocab.PURPOSE, "AnalyticsResearch"): "0.15",
    (vocab.PURPOSE, "Advertising"): "0.14", (vocab.PURPOSE, "Merger"): "0.07",
    (vocab.PURPOSE, "LegalRequirement"): "0.13", (vocab.PURPOSE, "Unspecified"): "0.24",
    (vocab.PURPOSE, "Personalization"): "0.18",
    (vocab.PERSONAL_INFO_TYPE, "Contact"): "0.09", (vocab.PERSONAL_INFO_TYPE, "Location"): "0.12",
    (vocab.PERSONAL_INFO_TYPE, "Financial"): "0.08",
    (vocab.PERSONAL_INFO_TYPE, "CookiesAndTrackingElements"): "0.09",
    (vocab.PERSONAL_INFO_TYPE, "IPAddressAndDeviceIDs"): "0.08",
    (vocab.PERSONAL_INFO_TYPE, "UserOnlineActivities"): "0.12",
    (vocab.PERSONAL_INFO_TYPE, "UserProfile"): "0.14", (vocab.PERSONAL_INFO_TYPE, "SocialMediaData"): "0.14",
    (vocab.PERSONAL_INFO_TYPE, "Health"): "0.26", (vocab.PERSONAL_INFO_TYPE, "ComputerInformation"): "0.08",
}
INFERENTIAL = {vocab.TRACK, "Diagnostics", "Contacts", "Purchases", "SearchHistory", "SensitiveInfo"}


def check_uncertainty_tables():
    t0 = time.perf_counter()
    rules, registry = default_rules(), default_registry()
    published = [("privacy_type", t, v) for t, v in TYPE_U.items()]
    published += [("purpose", p, v) for p, v in PURPOSE_U.items()]
    published += [("data_category", c, v) for c, v in CATEGORY_U.items()]
    wrong = []
    for kind, target, value in published:
        got = entry_uncertainty(rules.rule_for(kind, target), registry)
        if got != Decimal(value):
            wrong.append(f"{target}: {got} != {value}")
    for (attr, value), u in COMPONENT_U.items():
        got = Decimal(1) - registry.get(attr, value)
        if got != Decimal(u):
            wrong.append(f"{attr}={value}: {got} != {u}")
    elapsed = time.perf_counter() - t0
    n_inf = sum(1 for _, t, _ in published if t in INFERENTIAL)
    n_primary = len(published) - n_inf
    ok = not wrong and n_primary == 17 and n_inf == 6 and elapsed < 1.0
    detail = (f"{n_primary} primary + {n_inf} inferential entry values and {len(COMPONENT_U)} component values "
              f"reproduced in {elapsed * 1000:.1f} ms" if ok else "; ".join(wrong) or f"{elapsed:.2f}s")
    return ok, detail


def test_criterion_1_uncertainty_tables():
    ok, detail = check_uncertainty_tables()
    assert record(1, "uncertainty table reproduction", ok, detail), detail


# -- 2 ----------------------------------------------------------------------

# (u, denominator, printed count)
PUBLISHED_COUNTS = [
    ("0.38", 220191, 83673), ("0.30", 205274, 61582), ("0.38", 515920, 196049),
    ("0.26", 114095, 29664), ("0.01", 16687, 167), ("0.38", 108642, 41284),
    ("0.38", 19979, 7592), ("0.26", 515920, 134139), ("0.38", 205274, 78004),
    ("0.29", 250972, 72782), ("0.33", 103548, 34170), ("0.29", 114974, 33342),
    ("0.29", 19979, 5794), ("0.01", 419762, 4197), ("0.01", 46737, 467),
    ("0.26", 75346, 19590), ("0.38", 154972, 58889),
    ("0.24", 497124, 119309), ("0.27", 497124, 134223),
]


def check_counts():
    t0 = time.perf_counter()
    off = [(u, n, want, absolute_uncertainty(Decimal(u), n)) for u, n, want in PUBLISHED_COUNTS]
    bad = [o for o in off if abs(o[3] - o[2]) > 1]
    exact = sum(1 for o in off if o[3] == o[2])
    required = {("0.38", 220191): 83673, ("0.30", 205274): 61582, ("0.38", 515920): 196050,
                ("0.26", 114095): 29665, ("0.01", 16687): 167, ("0.38", 108642): 41284}
    req_ok = all(absolute_uncertainty(Decimal(u), n) == v for (u, n), v in required.items())
    elapsed = time.perf_counter() - t0
    ok = not bad and req_ok and len(PUBLISHED_COUNTS) >= 10 and elapsed < 1.0
    return ok, f"{len(off)} counts within +-1 ({exact} exact, {len(off) - exact} off by one), {elapsed * 1000:.1f} ms"


def test_criterion_2_count_uncertainty():
    ok, detail = check_counts()
    assert record(2, "count-uncertainty reproduction", ok, detail), detail


def test_misprinted_denominator_is_flagged():
    # the 4+ / not-linked count only works with 183,722 apps, not the printed 184,722
    assert absolute_uncertainty(Decimal("0.29"), 183722) == 53279
    assert absolute_uncertainty(Decimal("0.29"), 184722) != 53279


# -- 3 ----------------------------------------------------------------------

def check_dnc(n_cases=10_000):
    t0 = time.perf_counter()
    failures = dnc_failures(n_cases, seed=2024)
    return failures == 0, f"{n_cases} random policies, {failures} failures ({time.perf_counter() - t0:.1f} s)"


def test_criterion_3_dnc_two_pass():
    ok, detail = check_dnc()
    assert record(3, "two-pass DataNotCollected", ok, detail), detail


# -- 4 ----------------------------------------------------------------------

def check_oracle():
    cases = list(itertools.product((0, 1), repeat=len(FLAGS)))
    mismatches = run_oracle_comparison(cases)
    ok = len(cases) >= 4096 and not mismatches
    return ok, f"{len(cases)} flag combinations, {len(cases) - len(mismatches)} agree"


def test_criterion_4_rule_oracle():
    ok, detail = check_oracle()
    assert record(4, "rule-engine oracle equivalence", ok, detail), detail


# -- 5 ----------------------------------------------------------------------

def gradient_rel_error(seed):
    rng = np.random.default_rng(seed)
    k, d, n = 3, 4, 6
    W, b = rng.normal(size=(k, d)), rng.normal(size=k)
    X, Y = rng.normal(size=(n, d)), (rng.random((n, k)) < 0.5).astype(float)
    _, dW, db = logistic_loss_and_grad(W, b, X, Y, 0.01)
    theta = np.concatenate([W.ravel(), b])

    def loss(t):
        return logistic_loss_and_grad(t[:k * d].reshape(k, d), t[k * d:], X, Y, 0.01)[0]

    h = 1e-6
    num = np.array([(loss(theta + h * e) - loss(theta - h * e)) / (2 * h) for e in np.eye(theta.size)])
    ana = np.concatenate([dW.ravel(), db])
    return float(np.linalg.norm(ana - num) / np.linalg.norm(ana + num) * 2)


def check_classifier():
    t0 = time.perf_counter()
    examples, emb = separable_corpus(n=200, n_labels=4, tokens_per_label=3, dim=32, seed=0)
    data = [LabeledSegment(" ".join(toks), labels, toks) for toks, labels in examples]
    train_set, test_set = split_train_test(data, "Toy", 0.8, seed=0)
    model = train("Toy", train_set, emb, Hyper())
    f1 = evaluate(model, test_set, emb).macro_f1
    grad_err = max(gradient_rel_error(s) for s in range(10))
    again = train("Toy", train_set, emb, Hyper())
    identical = model.weights.tobytes() == again.weights.tobytes() and model.bias.tobytes() == again.bias.tobytes()
    elapsed = time.perf_counter() - t0
    ok = f1 >= 0.95 and grad_err < 1e-5 and identical and elapsed < 30 and len(test_set) == 40
    return ok, (f"held-out macro F1 {f1:.3f} on {len(test_set)} segments, max gradient rel. error {grad_err:.1e}, "
                f"bit-identical retrain {identical}, {elapsed:.1f} s")


def test_criterion_5_classifier_sanity():
    ok, detail = check_classifier()
    assert record(5, "classifier sanity", ok, detail), detail


# -- 6 ----------------------------------------------------------------------

def check_bootstrap():
    eye = np.eye(2)
    emb = EmbeddingModel(2, {"yes": eye[0], "no": eye[1]})
    data = [LabeledSegment("yes", frozenset({"a"})), LabeledSegment("no", frozenset())] * 10
    model = train("Toy", data, emb, Hyper())
    perfect = bootstrap_accuracy(model, data, emb)
    correct = np.random.default_rng(0).random(80) < 0.6
    a, b = bootstrap_ci(correct, seed=11), bootstrap_ci(correct, seed=11)
    default_200 = bootstrap_ci(correct).resamples == 200 == perfect.resamples
    ok = (perfect.lower, perfect.upper) == (1.0, 1.0) and a == b and default_200
    return ok, (f"perfect predictor CI [{perfect.lower}, {perfect.upper}], {perfect.resamples} resamples, "
                f"seeded CI [{a.lower:.4f}, {a.upper:.4f}] reproduced")


def test_criterion_6_bootstrap():
    ok, detail = check_bootstrap()
    assert record(6, "bootstrap protocol", ok, detail), detail


# -- 7 ----------------------------------------------------------------------

def check_segmentation():
    def words(n):
        return " ".join(f"w{i}" for i in range(n))

    def doc(*blocks):
        return CleanDocument("p", tuple(blocks))

    merge20 = len(segment_document(doc(TextBlock("Intro."), TextBlock(words(20), 0)))) == 1
    split21 = len(segment_document(doc(TextBlock("Intro."), TextBlock(words(21), 0)))) == 2
    rng = np.random.default_rng(7)
    lost = 0
    trials = 300
    for _ in range(trials):
        blocks = []
        for list_id in range(int(rng.integers(1, 6))):
            if rng.random() < 0.7:
                blocks.append(TextBlock(words(int(rng.integers(1, 30)))))
            blocks += [TextBlock(words(int(rng.integers(1, 26))), list_id) for _ in range(int(rng.integers(0, 4)))]
        if not blocks:
            continue
        segs = segment_document(doc(*blocks))
        if "".join(s.text.replace(" ", "") for s in segs) != "".join(b.text.replace(" ", "") for b in blocks):
            lost += 1
    ok = merge20 and split21 and lost == 0
    return ok, f"20-word item merges {merge20}, 21-word item splits {split21}, {trials} round trips lost text in {lost}"


def test_criterion_7_segmentation():
    ok, detail = check_segmentation()
    assert record(7, "segmentation", ok, detail), detail


# -- 8 ----------------------------------------------------------------------

def check_templates():
    words = ["alpha", "bravo", "charlie", "delta", "echo", "kilo", "lima", "mike", "november"]
    eye = np.eye(len(words))
    m = EmbeddingModel(len(words), {w: eye[i] for i, w in enumerate(words)})
    tpl = build_template("T", "Alpha bravo. Charlie delta. Echo.", m)

    copy = match_template(sentences_from_text("copy", "Alpha bravo. Charlie delta. Echo."), tpl, model=m)
    disjoint = match_template(sentences_from_text("d", "Kilo lima. Mike november."), tpl, model=m)
    half = match_template(sentences_from_text("h", "Alpha bravo. Charlie delta. Kilo lima. Mike november."),
                          tpl, model=m)
    # graded similarity: "alpha bravo charlie" vs "alpha bravo" has cosine 2/sqrt(6) ~ 0.816
    graded = sentences_from_text("g", "Alpha bravo charlie. Charlie delta echo alpha. Echo kilo. Lima.")
    covers = [match_template(graded, tpl, th, model=m) for th in (0.6, 0.8, 0.95)]
    monotone = all(hi.policy_cover <= lo.policy_cover and hi.template_cover <= lo.template_cover
                   for lo, hi in zip(covers, covers[1:]))
    ok = ((copy.policy_cover, copy.template_cover, copy.matched) == (1.0, 1.0, True)
          and (disjoint.policy_cover, disjoint.template_cover, disjoint.matched) == (0.0, 0.0, False)
          and half.policy_cover == 0.5 and not half.matched and monotone)
    trail = ", ".join(f"{c.policy_cover:.2f}/{c.template_cover:.2f}" for c in covers)
    return ok, (f"copy ({copy.policy_cover}, {copy.template_cover}) matched; disjoint not matched; "
                f"half cover {half.policy_cover} not matched; covers at 0.6/0.8/0.95: {trail}")


def test_criterion_8_templates():
    ok, detail = check_templates()
    assert record(8, "template detection", ok, detail), detail


# -- 9 ----------------------------------------------------------------------

HAND_MATRIX = [
    # rows: derived type; columns: declared type (Track, Linked, NotLinked, DNC)
    [1, 2, 1, 0],
    [1, 2, 2, 0],
    [0, 0, 1, 1],
    [0, 0, 0, 1],
]


def tree(path):
    return {str(p.relative_to(path)): p.read_bytes() for p in sorted(path.rglob("*")) if p.is_file()}


def check_end_to_end():
    import csv

    root = Path(tempfile.mkdtemp())
    try:
        write_fixture_corpus(root / "corpus")
        outs = []
        for name in ("run1", "run2"):
            c = root / "corpus"
            cfg = PipelineConfig(corpus_dir=c, embeddings=c / "embeddings.vec", out_dir=root / name,
                                 training_corpus=c / "training.jsonl", templates_dir=c / "templates")
            result = run_pipeline(cfg)
            if result.status:
                return False, f"pipeline failed: {result.error}"
            outs.append(tree(root / name))
        identical = outs[0] == outs[1]
        with open(root / "run1" / "overlap_matrix.csv") as fh:
            rows = list(csv.reader(fh))
        matrix = [[int(v) for v in r[1:]] for r in rows[1:]]
        ok = identical and matrix == HAND_MATRIX
        return ok, f"{len(outs[0])} artifacts byte-identical across runs: {identical}; matrix {matrix}"
    finally:
        shutil.rmtree(root, ignore_errors=True)


def test_criterion_9_end_to_end():
    ok, detail = check_end_to_end()
    assert record(9, "end-to-end determinism", ok, detail), detail


if __name__ == "__main__":
    checks = [(1, "uncertainty table reproduction", check_uncertainty_tables),
              (2, "count-uncertainty reproduction", check_counts),
              (3, "two-pass DataNotCollected", check_dnc),
              (4, "rule-engine oracle equivalence", check_oracle),
              (5, "classifier sanity", check_classifier),
              (6, "bootstrap protocol", check_bootstrap),
              (7, "segmentation", check_segmentation),
              (8, "template detection", check_templates),
              (9, "end-to-end determinism", check_end_to_end)]
    results = [record(n, title, *fn()) for n, title, fn in checks]
    sys.exit(0 if all(results) else 1)
