"""Extractive summarization and ROUGE evaluation for Welsh text."""

from .corpus import Article, Corpus, ReferenceSummary, corpus_stats, load_corpus, parse_tagged
from .errors import (
    BadHeader,
    ConfigError,
    CysumError,
    EmptyCorpus,
    EmptyDocument,
    MalformedFile,
    NoReferences,
)
from .graphrank import RankConfig, build_graph, pagerank
from .harness import EvalConfig, EvalReport, emit_report, evaluate_pair, parse_report, run_all
from .rouge import RougeScore, rouge, rouge_l, rouge_n, rouge_su4
from .summarizers import SummaryRequest, SystemSummary, select, summarize
from .text_core import Sentence, Token, TokenizerConfig, count_tokens, split_sentences, tokenize
from .vectorspace import EmbeddingTable, TfidfModel, cosine, fit_tfidf, load_embeddings

__version__ = "0.1.0"

__all__ = [
    "Article", "BadHeader", "ConfigError", "Corpus", "CysumError", "EmbeddingTable",
    "EmptyCorpus", "EmptyDocument", "EvalConfig", "EvalReport", "MalformedFile",
    "NoReferences", "RankConfig", "ReferenceSummary", "RougeScore", "Sentence",
    "SummaryRequest", "SystemSummary", "TfidfModel", "Token", "TokenizerConfig",
    "build_graph", "corpus_stats", "cosine", "count_tokens", "emit_report", "parse_report",
    "evaluate_pair", "fit_tfidf", "load_corpus", "load_embeddings", "pagerank",
    "parse_tagged", "rouge", "rouge_l", "rouge_n", "rouge_su4", "run_all", "select",
    "split_sentences", "summarize", "tokenize",
]
