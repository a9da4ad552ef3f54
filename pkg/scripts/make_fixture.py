#!/usr/bin/env python3
"""Write the synthetic fixture corpus (policies, labels, metadata, training
segments, cue embeddings, templates) plus a ready-to-use pipeline.cfg."""
import argparse
from pathlib import Path

from privlabel.config import PipelineConfig, dump_config
from privlabel.synthetic import write_fixture_corpus


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("root", type=Path)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--training", type=int, default=600, help="number of training segments")
    args = ap.parse_args()

    corpus = args.root / "corpus"
    write_fixture_corpus(corpus, seed=args.seed, n_training=args.training)
    cfg = PipelineConfig(
        corpus_dir=Path("corpus"), embeddings=Path("corpus/embeddings.vec"), out_dir=Path("out"),
        training_corpus=Path("corpus/training.jsonl"), templates_dir=Path("corpus/templates"),
        seed=args.seed,
    )
    (args.root / "pipeline.cfg").write_text(dump_config(cfg))
    print(f"fixture written to {corpus}")
    print(f"run it with: privlabel run --config {args.root / 'pipeline.cfg'}")


if __name__ == "__main__":
    main()
