#!/usr/bin/env python3
"""Train on a tagged corpus and report the correct rate as the topic-set fraction varies.

    python3 scripts/fraction_sweep.py tests/fixtures/synthetic5.txt tests/fixtures/synthetic5.gold \
        --lemmas tests/fixtures/lemmas.tsv
"""
import argparse
import logging
from dataclasses import dataclass, field

from topicid.corpus import load_lemma_map, parse_corpus
from topicid.evaluation import evaluate_corpus, format_rate, load_gold
from topicid.norms import train
from topicid.weights import InterpolationWeights, estimate_weights, split_corpus

log = logging.getLogger("fraction_sweep")


@dataclass
class SweepConfig:
    fractions: list[float] = field(default_factory=lambda: [0.1, 0.2, 0.3, 0.5, 1.0])
    threads: int = 1


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("corpus")
    ap.add_argument("gold")
    ap.add_argument("--lemmas")
    ap.add_argument("--fractions", type=float, nargs="+")
    ap.add_argument("--threads", type=int, default=1)
    args = ap.parse_args()
    logging.basicConfig(level=logging.INFO, format="%(message)s")

    cfg = SweepConfig(threads=args.threads)
    if args.fractions:
        cfg.fractions = args.fractions

    lemmas = None
    if args.lemmas:
        with open(args.lemmas, encoding="utf-8") as f:
            lemmas = load_lemma_map(f)
    with open(args.corpus, encoding="utf-8") as f:
        corpus = parse_corpus(f, lemmas=lemmas, threads=cfg.threads)
    with open(args.gold, encoding="utf-8") as f:
        golds = load_gold(f)

    store = train(corpus, threads=cfg.threads)
    try:
        part, held = split_corpus(corpus)
        est = estimate_weights(train(part, threads=cfg.threads), held)
        weights = est.weights
        log.info("PN %.6f  PV %.6f  (%d iterations)", weights.pn, weights.pv, est.iterations)
    except ValueError as err:
        log.warning("weight estimation skipped: %s", err)
        weights = InterpolationWeights()

    print("fraction\tcorrect\terror\tundecidable\trate")
    for frac in cfg.fractions:
        report, _ = evaluate_corpus(corpus, store, weights, golds, fraction=frac, threads=cfg.threads)
        t = report.totals
        print(f"{frac:g}\t{t.correct}\t{t.error}\t{t.undecidable}\t{format_rate(report)}")


if __name__ == "__main__":
    main()
