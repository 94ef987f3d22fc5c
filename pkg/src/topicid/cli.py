"""``topicid`` command line: train, identify, shift, evaluate, stats.

Exit status is 0 on success, 2 for invalid input and 3 for I/O failures.
"""
from __future__ import annotations

import argparse
import logging
import sys
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

from .corpus import Corpus, ParseError, corpus_stats, load_lemma_map, parse_corpus
from .evaluation import evaluate_corpus, figure1_csv, figure2_csv, format_report, load_gold
from .norms import DEFAULT_C_NOUN, DEFAULT_C_VERB, NormStore, load_store, save_store, train
from .topics import DEFAULT_FRACTION, format_shift_tsv, format_topics_tsv, identify_topics, topic_shift
from .weights import (
    InterpolationWeights,
    WeightTrainConfig,
    estimate_weights,
    load_weights,
    parse_ratio,
    save_weights,
    split_corpus,
)

log = logging.getLogger("topicid")

EXIT_INPUT = 2
EXIT_IO = 3


@dataclass
class RunConfig:
    c_noun: float = DEFAULT_C_NOUN
    c_verb: float = DEFAULT_C_VERB
    fraction: float = DEFAULT_FRACTION
    split_ratio: Fraction = Fraction(3)
    tolerance: float = 1e-6
    lemma_map_path: Path | None = None
    thread_count: int = 1

    @classmethod
    def from_args(cls, args: argparse.Namespace) -> RunConfig:
        return cls(
            c_noun=args.cnoun,
            c_verb=args.cverb,
            fraction=args.fraction,
            split_ratio=parse_ratio(args.split),
            tolerance=args.tolerance,
            lemma_map_path=args.lemmas,
            thread_count=args.threads,
        )


def _read_corpus(path: Path, cfg: RunConfig) -> Corpus:
    lemmas = None
    if cfg.lemma_map_path is not None:
        with open(cfg.lemma_map_path, encoding="utf-8") as f:
            lemmas = load_lemma_map(f)
    with open(path, encoding="utf-8") as f:
        return parse_corpus(f, lemmas=lemmas, threads=cfg.thread_count)


def _read_store(path: Path) -> NormStore:
    with open(path, encoding="utf-8") as f:
        return load_store(f)


def _read_weights(path: Path) -> InterpolationWeights:
    with open(path, encoding="utf-8") as f:
        return load_weights(f)


def _emit(text: str, out: Path | None) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        out.write_text(text, encoding="utf-8")


def cmd_train(args: argparse.Namespace, cfg: RunConfig) -> int:
    corpus = _read_corpus(args.corpus, cfg)
    sys.stdout.write(corpus_stats(corpus).format_table())

    store = train(corpus, cfg.c_noun, cfg.c_verb, threads=cfg.thread_count)
    with open(args.store, "w", encoding="utf-8", newline="\n") as f:
        save_store(store, f)

    weight_cfg = WeightTrainConfig(split_ratio=cfg.split_ratio, tolerance=cfg.tolerance)
    weights = InterpolationWeights(weight_cfg.init_pn)
    try:
        train_part, heldout = split_corpus(corpus, cfg.split_ratio)
        partial = train(train_part, cfg.c_noun, cfg.c_verb, threads=cfg.thread_count)
        est = estimate_weights(partial, heldout, weight_cfg)
        weights = est.weights
        state = "converged" if est.converged else "did not converge"
        log.info("PN/PV %s after %d iterations", state, est.iterations)
    except ValueError as exc:
        log.warning("weights left at PN=%.2f: %s", weights.pn, exc)

    weights_path = args.weights or Path(str(args.store) + ".weights")
    with open(weights_path, "w", encoding="utf-8", newline="\n") as f:
        save_weights(weights, f)
    return 0


def cmd_identify(args: argparse.Namespace, cfg: RunConfig) -> int:
    corpus = _read_corpus(args.corpus, cfg)
    store = _read_store(args.store)
    weights = _read_weights(args.weights)
    results = [identify_topics(p, store, weights, cfg.fraction) for p in corpus.paragraphs()]
    _emit(format_topics_tsv(results), args.out)
    return 0


def cmd_shift(args: argparse.Namespace, cfg: RunConfig) -> int:
    corpus = _read_corpus(args.corpus, cfg)
    store = _read_store(args.store)
    weights = _read_weights(args.weights)
    reports = [
        topic_shift(doc, store, weights, cfg.fraction)
        for doc in corpus.documents
        if len(doc.paragraphs) > 1
    ]
    _emit(format_shift_tsv(reports), args.out)
    return 0


def cmd_evaluate(args: argparse.Namespace, cfg: RunConfig) -> int:
    corpus = _read_corpus(args.corpus, cfg)
    store = _read_store(args.store)
    weights = _read_weights(args.weights)
    with open(args.gold, encoding="utf-8") as f:
        golds = load_gold(f)
    report, _ = evaluate_corpus(corpus, store, weights, golds, cfg.fraction, cfg.thread_count)
    sys.stdout.write(format_report(report))
    if args.out is None:
        sys.stdout.write("\n# figure1.csv\n" + figure1_csv(report))
        sys.stdout.write("\n# figure2.csv\n" + figure2_csv(report))
    else:
        args.out.mkdir(parents=True, exist_ok=True)
        (args.out / "figure1.csv").write_text(figure1_csv(report), encoding="utf-8")
        (args.out / "figure2.csv").write_text(figure2_csv(report), encoding="utf-8")
    return 0


def cmd_stats(args: argparse.Namespace, cfg: RunConfig) -> int:
    corpus = _read_corpus(args.corpus, cfg)
    _emit(corpus_stats(corpus).format_table(), args.out)
    return 0


def _positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError("must be a positive integer")
    return value


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--cnoun", type=float, default=DEFAULT_C_NOUN, help="noun IDF threshold c")
    common.add_argument("--cverb", type=float, default=DEFAULT_C_VERB, help="verb IDF threshold c")
    common.add_argument("--fraction", type=float, default=DEFAULT_FRACTION,
                        help="share of ranked candidates kept as the topic set")
    common.add_argument("--split", default="3:1", help="train:held-out document ratio for PN/PV")
    common.add_argument("--tolerance", type=float, default=1e-6, help="PN convergence tolerance")
    common.add_argument("--lemmas", type=Path, help="TSV lemma map (surface, N|V, lemma)")
    common.add_argument("--threads", type=_positive_int, default=1)
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="topicid", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("train", parents=[common], help="train norms and PN/PV weights")
    p.add_argument("corpus", type=Path)
    p.add_argument("store", type=Path, help="norm store to write")
    p.add_argument("--weights", type=Path, help="weights file to write (default: STORE.weights)")
    p.set_defaults(func=cmd_train)

    for name, func, helptext in (
        ("identify", cmd_identify, "rank topic candidates per paragraph"),
        ("shift", cmd_shift, "re-rank previous topics in the following paragraph"),
    ):
        p = sub.add_parser(name, parents=[common], help=helptext)
        p.add_argument("corpus", type=Path)
        p.add_argument("store", type=Path)
        p.add_argument("weights", type=Path)
        p.add_argument("--out", type=Path, help="write TSV here instead of stdout")
        p.set_defaults(func=func)

    p = sub.add_parser("evaluate", parents=[common], help="compare with gold topics")
    p.add_argument("corpus", type=Path)
    p.add_argument("store", type=Path)
    p.add_argument("weights", type=Path)
    p.add_argument("gold", type=Path)
    p.add_argument("--out", type=Path, help="directory for figure1.csv and figure2.csv")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("stats", parents=[common], help="corpus statistics")
    p.add_argument("corpus", type=Path)
    p.add_argument("--out", type=Path)
    p.set_defaults(func=cmd_stats)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(name)s: %(message)s",
        stream=sys.stderr,
    )
    try:
        cfg = RunConfig.from_args(args)
        if not 0 < cfg.fraction <= 1:
            raise ValueError("--fraction must lie in (0, 1]")
        return args.func(args, cfg)
    except (ParseError, ValueError) as exc:
        print(f"topicid: error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except OSError as exc:
        print(f"topicid: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
