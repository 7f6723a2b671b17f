"""TFIDF weighting, sentence vectors and cosine similarity."""
from __future__ import annotations

import logging
import math
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import Collection, Iterable, Mapping, Sequence, Union

import numpy as np

from .errors import BadHeader, EmptyCorpus
from .text_core import Sentence

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class TfidfModel:
    vocabulary: Mapping[str, int]
    doc_count: int
    doc_freq: Mapping[str, int]
    idf: Mapping[str, float]

    def weight(self, term: str) -> float:
        """idf of ``term``; 0 for terms outside the vocabulary."""
        return self.idf.get(term, 0.0)

    def __contains__(self, term: str) -> bool:
        return term in self.vocabulary

    def __len__(self) -> int:
        return len(self.vocabulary)


def smoothed_idf(doc_count: int, doc_freq: int) -> float:
    return math.log((1 + doc_count) / (1 + doc_freq)) + 1.0


def fit_tfidf_documents(documents: Iterable[Iterable[str]]) -> TfidfModel:
    """Fit document frequencies where each item is one document's tokens."""
    df: Counter[str] = Counter()
    n = 0
    for doc in documents:
        n += 1
        df.update(set(doc))
    if n == 0:
        raise EmptyCorpus("cannot fit TFIDF on zero documents")
    terms = sorted(df)
    return TfidfModel(
        vocabulary={t: i for i, t in enumerate(terms)},
        doc_count=n,
        doc_freq=dict(df),
        idf={t: smoothed_idf(n, df[t]) for t in terms},
    )


def fit_tfidf(corpus) -> TfidfModel:
    """Fit on the accepted article bodies of ``corpus``; one article is one document."""
    return fit_tfidf_documents(
        [w for s in a.sentences for w in s.words] for a in corpus.accepted
    )


@dataclass(frozen=True)
class SparseVector:
    """Sorted ``(index, weight)`` pairs."""

    indices: tuple[int, ...] = ()
    weights: tuple[float, ...] = ()

    def __post_init__(self) -> None:
        if len(self.indices) != len(self.weights):
            raise ValueError("indices and weights differ in length")
        if any(b <= a for a, b in zip(self.indices, self.indices[1:])):
            raise ValueError("indices must be strictly increasing")
        if not all(math.isfinite(w) for w in self.weights):
            raise ValueError("weights must be finite")

    @classmethod
    def from_dict(cls, d: Mapping[int, float]) -> SparseVector:
        items = sorted((i, w) for i, w in d.items() if w != 0)
        return cls(tuple(i for i, _ in items), tuple(float(w) for _, w in items))

    def pairs(self) -> list[tuple[int, float]]:
        return list(zip(self.indices, self.weights))

    def __len__(self) -> int:
        return len(self.indices)

    def to_dense(self, dim: int) -> np.ndarray:
        out = np.zeros(dim)
        out[list(self.indices)] = self.weights
        return out

    def dot(self, other: SparseVector) -> float:
        mine = dict(zip(self.indices, self.weights))
        return math.fsum(w * mine[i] for i, w in zip(other.indices, other.weights) if i in mine)

    def norm(self) -> float:
        return math.sqrt(math.fsum(w * w for w in self.weights))


Vector = Union[SparseVector, Sequence[float], np.ndarray]


def term_counts(tokens: Iterable[str]) -> Counter[str]:
    return Counter(tokens)


def sentence_tfidf(sentence: Sentence | Sequence[str], model: TfidfModel) -> SparseVector:
    """Raw term count times idf, over in-vocabulary terms only."""
    tokens = sentence.words if isinstance(sentence, Sentence) else sentence
    weights = {}
    for term, tf in Counter(tokens).items():
        idx = model.vocabulary.get(term)
        if idx is not None:
            weights[idx] = tf * model.idf[term]
    return SparseVector.from_dict(weights)


def cosine(u: Vector, v: Vector) -> float:
    """Cosine similarity, defined as 0 when either vector has zero norm."""
    if isinstance(u, SparseVector) and isinstance(v, SparseVector):
        dot, nu, nv = u.dot(v), u.norm(), v.norm()
    else:
        if isinstance(u, SparseVector) or isinstance(v, SparseVector):
            dim = 1 + max(
                max(x.indices, default=-1) if isinstance(x, SparseVector) else len(x) - 1
                for x in (u, v)
            )
            u = u.to_dense(dim) if isinstance(u, SparseVector) else u
            v = v.to_dense(dim) if isinstance(v, SparseVector) else v
        a = np.asarray(u, dtype=float)
        b = np.asarray(v, dtype=float)
        dot, nu, nv = float(a @ b), float(np.linalg.norm(a)), float(np.linalg.norm(b))
    if nu == 0 or nv == 0:
        return 0.0
    return max(-1.0, min(1.0, dot / (nu * nv)))


def stack(vectors: Sequence[Vector]) -> np.ndarray:
    """Dense ``len(vectors) x d`` matrix; sparse inputs share one compact column space."""
    if vectors and all(isinstance(v, SparseVector) for v in vectors):
        columns = sorted({i for v in vectors for i in v.indices})
        local = {c: j for j, c in enumerate(columns)}
        out = np.zeros((len(vectors), len(columns)))
        for row, v in enumerate(vectors):
            for i, w in zip(v.indices, v.weights):
                out[row, local[i]] = w
        return out
    return np.array([np.asarray(v, dtype=float) for v in vectors], dtype=float).reshape(len(vectors), -1)


def cosine_matrix(matrix: np.ndarray) -> np.ndarray:
    """Pairwise cosine of the rows of ``matrix``; zero rows give 0 everywhere."""
    norms = np.linalg.norm(matrix, axis=1)
    safe = np.where(norms > 0, norms, 1.0)
    unit = matrix / safe[:, None]
    sims = unit @ unit.T
    sims[norms == 0, :] = 0.0
    sims[:, norms == 0] = 0.0
    return np.clip(sims, -1.0, 1.0)


@dataclass(frozen=True)
class EmbeddingTable:
    dim: int
    vectors: Mapping[str, np.ndarray]
    source_name: str = ""
    skipped: int = field(default=0, compare=False)

    def __post_init__(self) -> None:
        if self.dim <= 0:
            raise ValueError("embedding dimension must be positive")
        for word, vec in self.vectors.items():
            if len(vec) != self.dim:
                raise ValueError(f"vector for {word!r} has length {len(vec)}, expected {self.dim}")

    def __contains__(self, word: str) -> bool:
        return word in self.vectors

    def __getitem__(self, word: str) -> np.ndarray:
        return self.vectors[word]

    def __len__(self) -> int:
        return len(self.vectors)


def _parse_header(line: str) -> tuple[int, int]:
    parts = line.split()
    try:
        count, dim = (int(p) for p in parts)
    except ValueError:
        raise BadHeader(f"expected '<count> <dim>' header, got {line.strip()[:60]!r}") from None
    if count < 0 or dim <= 0:
        raise BadHeader(f"header values must be a count and a positive dimension: {line.strip()!r}")
    return count, dim


def load_embeddings(
    path: str | Path,
    *,
    header: bool = True,
    source_name: str | None = None,
    restrict_to: Collection[str] | None = None,
    dtype: np.dtype | type = np.float32,
) -> EmbeddingTable:
    """Read word vectors in the plain-text ``.vec`` format.

    With ``header=False`` the dimension is taken from the first row. Rows
    with the wrong number of values or non-numeric values are skipped and
    counted in ``table.skipped``; a repeated word keeps its first vector.
    ``restrict_to`` keeps only the listed words, which bounds memory when
    only a corpus vocabulary is needed.
    """
    path = Path(path)
    vectors: dict[str, np.ndarray] = {}
    skipped = 0
    dim = None
    with path.open(encoding="utf-8", errors="replace") as fh:
        if header:
            first = fh.readline()
            if not first:
                raise BadHeader("empty embedding file")
            _, dim = _parse_header(first)
        for lineno, line in enumerate(fh, 2 if header else 1):
            parts = line.rstrip("\r\n").split(" ")
            while parts and parts[-1] == "":
                parts.pop()
            if not parts or parts == [""]:
                continue
            word, values = parts[0], parts[1:]
            if dim is None:
                dim = len(values)
                if dim == 0:
                    raise BadHeader(f"first row of {path} has no vector values")
            if len(values) != dim or not word:
                skipped += 1
                log.debug("%s:%d: expected %d values, got %d", path, lineno, dim, len(values))
                continue
            if word in vectors or (restrict_to is not None and word not in restrict_to):
                continue
            try:
                vec = np.array([float(x) for x in values], dtype=dtype)
            except ValueError:
                skipped += 1
                continue
            if not np.all(np.isfinite(vec)):
                skipped += 1
                continue
            vectors[word] = vec
    if dim is None:
        raise BadHeader(f"{path} holds no header and no rows")
    if skipped:
        log.warning("%s: skipped %d malformed rows", path, skipped)
    return EmbeddingTable(dim, vectors, source_name or path.stem, skipped)


def sentence_embedding(
    sentence: Sentence | Sequence[str], model: TfidfModel, table: EmbeddingTable
) -> np.ndarray:
    """TFIDF-weighted mean of word vectors; the zero vector when nothing is covered."""
    tokens = sentence.words if isinstance(sentence, Sentence) else sentence
    covered = [
        (term, tf * model.idf[term])
        for term, tf in sorted(Counter(tokens).items())
        if term in model.vocabulary and term in table.vectors
    ]
    total = np.zeros(table.dim)
    weight_sum = math.fsum(w for _, w in covered)
    if weight_sum == 0:
        return total
    for term, w in covered:
        total += (w / weight_sum) * np.asarray(table.vectors[term], dtype=float)
    return total
