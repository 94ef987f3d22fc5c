"""Topic identification from distance-weighted noun-noun and noun-verb association norms."""
from .corpus import (
    Corpus,
    Document,
    Kind,
    Paragraph,
    ParseError,
    Sentence,
    TagPolicy,
    Token,
    base_form,
    classify_token,
    corpus_stats,
    parse_corpus,
)
from .norms import NormStore, load_store, lookup_ann, lookup_anv, save_store, train
from .topics import identify_topics, merge_ncs, topic_shift
from .weights import InterpolationWeights, WeightTrainConfig, estimate_weights, split_corpus

__version__ = "0.1.0"
