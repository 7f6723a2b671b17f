"""The five extractive systems: lead sentence, TextRank, LexRank, TFIDF and
TFIDF with word embeddings.

Every scorer returns one float per sentence; :func:`select` turns scores
into a summary that keeps the original sentence order.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal, Sequence

import numpy as np

from .corpus import Article
from .errors import ConfigError, EmptyDocument
from .graphrank import RankConfig, build_graph, pagerank
from .vectorspace import (
    EmbeddingTable,
    TfidfModel,
    cosine,
    fit_tfidf_documents,
    sentence_embedding,
    sentence_tfidf,
    stack,
)

SystemName = Literal["first_sentence", "textrank", "lexrank", "tfidf", "tfidf_embedding"]
SYSTEMS: tuple[str, ...] = ("first_sentence", "textrank", "lexrank", "tfidf", "tfidf_embedding")


@dataclass(frozen=True)
class SummaryRequest:
    system: SystemName = "textrank"
    ratio: float = 0.5

    def __post_init__(self) -> None:
        if not 0 < self.ratio <= 1:
            raise ValueError(f"ratio must lie in (0, 1], got {self.ratio}")
        if self.system not in SYSTEMS:
            raise ValueError(f"unknown system {self.system!r}")


@dataclass(frozen=True)
class SystemSummary:
    doc_id: str
    system: str
    selected: tuple[int, ...]
    text: str
    tokens: tuple[str, ...]


def _require_sentences(doc: Article) -> None:
    if not doc.sentences:
        raise EmptyDocument(f"article {doc.id!r} has no sentences")


def _local_model(doc: Article) -> TfidfModel:
    return fit_tfidf_documents([[w for s in doc.sentences for w in s.words]])


def make_summary(doc: Article, selected: Sequence[int], system: str) -> SystemSummary:
    chosen = sorted(set(selected))
    if any(i < 0 or i >= len(doc.sentences) for i in chosen):
        raise IndexError("selected sentence index out of range")
    sents = [doc.sentences[i] for i in chosen]
    return SystemSummary(
        doc.id,
        system,
        tuple(chosen),
        " ".join(s.text for s in sents),
        tuple(w for s in sents for w in s.words),
    )


def first_sentence(doc: Article) -> SystemSummary:
    _require_sentences(doc)
    return make_summary(doc, [0], "first_sentence")


def _graph_scores(doc: Article, config: RankConfig, model: TfidfModel | None, mode: str) -> np.ndarray:
    _require_sentences(doc)
    model = model if model is not None else _local_model(doc)
    vectors = [sentence_tfidf(s, model) for s in doc.sentences]
    graph = build_graph(vectors, mode, config.edge_threshold)
    return pagerank(graph, config).scores


def score_textrank(doc: Article, config: RankConfig = RankConfig(), model: TfidfModel | None = None) -> np.ndarray:
    """PageRank over a unit-weight graph of sentences linked by TFIDF cosine.

    Without ``model`` the term weights come from the document alone, which
    makes every idf equal and the graph a plain term-overlap graph.
    """
    return _graph_scores(doc, config, model, "unit")


def score_lexrank(doc: Article, config: RankConfig = RankConfig(), model: TfidfModel | None = None) -> np.ndarray:
    """PageRank over the cosine-weighted sentence graph."""
    return _graph_scores(doc, config, model, "weighted")


def _centroid_scores(matrix: np.ndarray) -> np.ndarray:
    centroid = matrix.mean(axis=0)
    return np.array([cosine(row, centroid) for row in matrix])


def score_tfidf(doc: Article, model: TfidfModel | None = None) -> np.ndarray:
    """Cosine of each sentence's TFIDF vector with the document centroid."""
    _require_sentences(doc)
    model = model if model is not None else _local_model(doc)
    return _centroid_scores(stack([sentence_tfidf(s, model) for s in doc.sentences]))


def score_embedding(doc: Article, model: TfidfModel, table: EmbeddingTable) -> np.ndarray:
    """Like :func:`score_tfidf` but over TFIDF-weighted mean word vectors."""
    _require_sentences(doc)
    return _centroid_scores(np.array([sentence_embedding(s, model, table) for s in doc.sentences]))


def summary_size(n: int, ratio: float) -> int:
    # rounding first keeps e.g. 0.1 * 30 from ceiling to 4
    return max(1, math.ceil(round(ratio * n, 9)))


def select(scores: Sequence[float], request: SummaryRequest, doc: Article) -> SystemSummary:
    """Keep the top ``max(1, ceil(ratio * n))`` sentences in document order.

    Equal scores favour the earlier sentence.
    """
    n = len(doc.sentences)
    if len(scores) != n or n == 0:
        raise ValueError(f"got {len(scores)} scores for {n} sentences")
    k = summary_size(n, request.ratio)
    ranked = sorted(range(n), key=lambda i: (-float(scores[i]), i))
    return make_summary(doc, ranked[:k], request.system)


def summarize(
    doc: Article,
    request: SummaryRequest = SummaryRequest(),
    *,
    model: TfidfModel | None = None,
    embeddings: EmbeddingTable | None = None,
    rank: RankConfig = RankConfig(),
) -> SystemSummary:
    """Run one system on one document.

    The lead-sentence system ignores ``request.ratio``. The embedding system
    needs both a fitted ``model`` and an ``embeddings`` table.
    """
    system = request.system
    if system == "first_sentence":
        return first_sentence(doc)
    if system == "textrank":
        scores = score_textrank(doc, rank, model)
    elif system == "lexrank":
        scores = score_lexrank(doc, rank, model)
    elif system == "tfidf":
        scores = score_tfidf(doc, model)
    else:
        if embeddings is None:
            raise ConfigError("tfidf_embedding needs an embedding table")
        if model is None:
            raise ConfigError("tfidf_embedding needs a fitted TFIDF model")
        scores = score_embedding(doc, model, embeddings)
    return select(scores, request, doc)
