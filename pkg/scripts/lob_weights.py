#!/usr/bin/env python3
"""Estimate PN/PV on a LOB-format corpus and compare with reference values.

The corpus must already be in the package's ``#DOC`` + ``word_TAG`` format.
Prints the EM trace and exits non-zero if the six-decimal values differ.
"""
import argparse
import sys
from fractions import Fraction

from topicid.corpus import corpus_stats, load_lemma_map, parse_corpus
from topicid.norms import train
from topicid.weights import WeightTrainConfig, estimate_weights, parse_ratio, split_corpus

REFERENCE_PN = 0.675844
REFERENCE_PV = 0.324156


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("corpus")
    ap.add_argument("--lemmas")
    ap.add_argument("--split", type=parse_ratio, default=Fraction(3))
    ap.add_argument("--tolerance", type=float, default=1e-6)
    ap.add_argument("--threads", type=int, default=4)
    args = ap.parse_args()

    lemmas = None
    if args.lemmas:
        with open(args.lemmas, encoding="utf-8") as f:
            lemmas = load_lemma_map(f)
    with open(args.corpus, encoding="utf-8") as f:
        corpus = parse_corpus(f, lemmas=lemmas, threads=args.threads)
    print(corpus_stats(corpus).format_table())

    part, held = split_corpus(corpus, args.split)
    store = train(part, threads=args.threads)
    est = estimate_weights(store, held, WeightTrainConfig(tolerance=args.tolerance))
    for i, pn in enumerate(est.trace, 1):
        print(f"iter {i:3d}  PN {pn:.6f}")

    pn, pv = f"{est.weights.pn:.6f}", f"{est.weights.pv:.6f}"
    ok = pn == f"{REFERENCE_PN:.6f}" and pv == f"{REFERENCE_PV:.6f}"
    print(f"PN {pn} (reference {REFERENCE_PN:.6f})  PV {pv} (reference {REFERENCE_PV:.6f})  "
          f"converged={est.converged}  {'MATCH' if ok else 'DIFFER'}")
    return 0 if ok else 1


if __name__ == "__main__":
    sys.exit(main())
