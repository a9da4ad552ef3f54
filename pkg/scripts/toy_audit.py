#!/usr/bin/env python3
"""End-to-end audit of the fixture corpus in a scratch directory; prints the
overlap matrix, per-app discrepancies and template matches."""
import argparse
import json
import tempfile
from pathlib import Path

from privlabel.config import PipelineConfig
from privlabel.pipeline import run_pipeline
from privlabel.synthetic import write_fixture_corpus


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", type=Path, help="keep artifacts here instead of a temp dir")
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--jobs", type=int, default=1)
    args = ap.parse_args()

    root = args.out or Path(tempfile.mkdtemp(prefix="toy_audit_"))
    c = root / "corpus"
    write_fixture_corpus(c, seed=args.seed)
    cfg = PipelineConfig(corpus_dir=c, embeddings=c / "embeddings.vec", out_dir=root / "out",
                         training_corpus=c / "training.jsonl", templates_dir=c / "templates",
                         seed=args.seed, jobs=args.jobs)
    result = run_pipeline(cfg)
    if result.status:
        raise SystemExit(f"pipeline failed: {result.error}")
    out = cfg.out_dir

    print("overlap matrix (rows derived, columns declared)")
    print((out / "overlap_matrix.csv").read_text())

    print("discrepancies")
    for line in (out / "discrepancies.jsonl").read_text().splitlines():
        d = json.loads(line)
        types = d["privacy_types"]
        print(f"  {d['app_id']}: label only {types['label_only']}, policy only {types['policy_only']}")

    matches = json.loads((out / "template_matches.json").read_text())["matches"]
    print("\ntemplate matches")
    for pid, names in matches.items():
        print(f"  {pid}: {', '.join(names) or '-'}")
    print(f"\nartifacts in {out}")


if __name__ == "__main__":
    main()
