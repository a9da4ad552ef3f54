#!/usr/bin/env python3
"""Print per-entry uncertainty for every privacy type, purpose and data
category derivable from the default rules, and optionally turn one into an
absolute count for a given number of apps.

    python3 scripts/uncertainty_tables.py
    python3 scripts/uncertainty_tables.py --apps 515920
"""
import argparse

from privlabel import vocab
from privlabel.compare import absolute_uncertainty
from privlabel.derive import default_registry, default_rules, entry_uncertainty


def main():
    ap = argparse.ArgumentParser(description=__doc__.split("\n\n")[0])
    ap.add_argument("--apps", type=int, help="denominator for absolute counts")
    args = ap.parse_args()

    rules, registry = default_rules(), default_registry()
    for kind in ("privacy_type", "purpose", "data_category"):
        print(f"\n{kind}")
        for rule in rules.rules:
            if rule.kind != kind:
                continue
            u = entry_uncertainty(rule, registry)
            count = f"  +-{absolute_uncertainty(u, args.apps)}" if args.apps else ""
            print(f"  {rule.target:<28} +-{u}{count}")

    print("\nclassifier outputs (1 - F1)")
    for attr in vocab.CLASSIFIER_ATTRIBUTES:
        for value in vocab.vocabulary_for(attr):
            if (attr, value) in registry:
                print(f"  {attr + '=' + value:<56} {1 - registry.get(attr, value)}")


if __name__ == "__main__":
    main()
