"""Sentence similarity graphs and PageRank by power iteration."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Literal, Sequence

import numpy as np

from .vectorspace import Vector, cosine_matrix, stack

GraphMode = Literal["unit", "weighted"]


@dataclass(frozen=True, eq=False)
class SimilarityGraph:
    """Symmetric, non-negative edge weights with an empty diagonal."""

    weights: np.ndarray

    def __post_init__(self) -> None:
        w = np.asarray(self.weights, dtype=float)
        if w.ndim != 2 or w.shape[0] != w.shape[1]:
            raise ValueError("weights must be a square matrix")
        if np.any(w < 0) or not np.all(np.isfinite(w)):
            raise ValueError("weights must be finite and non-negative")
        if np.any(np.diag(w) != 0):
            raise ValueError("self-loops are not allowed")
        if not np.array_equal(w, w.T):
            raise ValueError("weights must be symmetric")
        w.setflags(write=False)
        object.__setattr__(self, "weights", w)

    @property
    def n(self) -> int:
        return self.weights.shape[0]


@dataclass(frozen=True)
class RankConfig:
    damping: float = 0.85
    tolerance: float = 1e-6
    max_iterations: int = 100
    edge_threshold: float = 0.1

    def __post_init__(self) -> None:
        if not 0 < self.damping < 1:
            raise ValueError("damping must lie in (0, 1)")
        if self.tolerance <= 0:
            raise ValueError("tolerance must be positive")
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be at least 1")
        if self.edge_threshold < 0:
            raise ValueError("edge_threshold must be non-negative")


@dataclass(frozen=True, eq=False)
class RankResult:
    scores: np.ndarray
    converged: bool
    iterations: int


def build_graph(vectors: Sequence[Vector], mode: GraphMode = "weighted", threshold: float = 0.1) -> SimilarityGraph:
    """Connect sentence pairs whose cosine similarity reaches ``threshold``.

    In ``weighted`` mode the edge carries the cosine; in ``unit`` mode every
    surviving edge weighs 1.
    """
    if mode not in ("unit", "weighted"):
        raise ValueError(f"unknown graph mode {mode!r}")
    if len(vectors) == 0:
        raise ValueError("need at least one vector")
    sims = cosine_matrix(stack(vectors))
    # symmetrize away rounding noise from the matrix product
    sims = np.triu(sims, 1)
    sims = sims + sims.T
    keep = sims >= threshold
    np.fill_diagonal(keep, False)
    weights = np.where(keep, 1.0 if mode == "unit" else sims, 0.0)
    weights[weights < 0] = 0.0
    return SimilarityGraph(weights)


def pagerank(graph: SimilarityGraph, config: RankConfig = RankConfig()) -> RankResult:
    """Stationary scores of the damped random walk on ``graph``.

    Rows are normalized to transition probabilities; nodes without edges
    jump uniformly. Iterates from the uniform vector until the L1 change
    drops below ``config.tolerance``.
    """
    n = graph.n
    if n == 0:
        raise ValueError("graph has no nodes")
    w = graph.weights
    out = w.sum(axis=1)
    dangling = out == 0
    transition = np.divide(w, out[:, None], out=np.zeros_like(w), where=~dangling[:, None])
    d = config.damping
    p = np.full(n, 1.0 / n)
    converged = False
    iterations = 0
    for iterations in range(1, config.max_iterations + 1):
        nxt = d * (transition.T @ p + p[dangling].sum() / n) + (1.0 - d) / n
        nxt /= nxt.sum()
        delta = np.abs(nxt - p).sum()
        p = nxt
        if delta < config.tolerance:
            converged = True
            break
    return RankResult(p, converged, iterations)
