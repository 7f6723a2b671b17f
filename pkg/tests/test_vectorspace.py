import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from cysum.corpus import Article, Corpus
from cysum.errors import BadHeader, EmptyCorpus
from cysum.text_core import split_sentences
from cysum.vectorspace import (
    EmbeddingTable,
    SparseVector,
    TfidfModel,
    cosine,
    cosine_matrix,
    fit_tfidf,
    fit_tfidf_documents,
    load_embeddings,
    sentence_embedding,
    sentence_tfidf,
    stack,
)


def corpus_of(*bodies, min_tokens=1):
    arts = [Article.from_text(f"d{i}", "t", b) for i, b in enumerate(bodies)]
    return Corpus.build(arts, min_tokens=min_tokens)


def hand_model(idf: dict) -> TfidfModel:
    terms = sorted(idf)
    return TfidfModel({t: i for i, t in enumerate(terms)}, 1, {t: 1 for t in terms}, dict(idf))


def test_fit_single_article():
    m = fit_tfidf(corpus_of("Cymru am byth."))
    assert m.doc_freq["cymru"] == 1
    assert m.idf["cymru"] == 1.0  # ln(2/2) + 1


def test_term_in_every_article_has_minimum_idf():
    m = fit_tfidf(corpus_of("Cymru a Lloegr.", "Cymru yn unig.", "Cymru eto."))
    assert m.idf["cymru"] == pytest.approx(1.0)
    assert m.idf["lloegr"] == pytest.approx(math.log(4 / 2) + 1)
    assert all(v >= 1.0 for v in m.idf.values())


def test_absent_term_weighs_nothing():
    m = fit_tfidf(corpus_of("Cymru am byth."))
    assert "lloegr" not in m
    assert m.weight("lloegr") == 0.0


def test_fit_only_uses_accepted_articles():
    c = corpus_of("Byr iawn.", " ".join(["gair"] * 10) + ".", min_tokens=5)
    m = fit_tfidf(c)
    assert m.doc_count == 1
    assert "byr" not in m


def test_fit_empty_corpus():
    with pytest.raises(EmptyCorpus):
        fit_tfidf(Corpus.build([]))


@given(st.lists(st.lists(st.sampled_from("abcdef"), min_size=1, max_size=8), min_size=1, max_size=8))
def test_idf_invariants(docs):
    m = fit_tfidf_documents(docs)
    for t in m.vocabulary:
        assert 1 <= m.doc_freq[t] <= m.doc_count
        assert m.idf[t] > 0
    for t1 in m.vocabulary:
        for t2 in m.vocabulary:
            if m.doc_freq[t1] < m.doc_freq[t2]:
                assert m.idf[t1] > m.idf[t2]


def test_sentence_tfidf_examples():
    m = hand_model({"cymru": 1.0, "lloegr": 2.0})
    assert len(sentence_tfidf(["ffrainc"], m)) == 0
    v = sentence_tfidf(["cymru", "cymru"], m)
    assert v.pairs() == [(m.vocabulary["cymru"], 2.0)]
    u = sentence_tfidf(["lloegr"], m)
    assert set(u.indices).isdisjoint(v.indices)
    assert cosine(u, v) == 0.0


def test_sentence_tfidf_accepts_sentences():
    m = fit_tfidf(corpus_of("Mae'r gath yma. Mae'r ci yno."))
    s = split_sentences("Mae'r gath yma.")[0]
    assert sentence_tfidf(s, m) == sentence_tfidf(["mae", "'r", "gath", "yma"], m)


def test_sparse_vector_invariants():
    with pytest.raises(ValueError):
        SparseVector((2, 1), (1.0, 1.0))
    with pytest.raises(ValueError):
        SparseVector((1,), (float("nan"),))


def test_cosine_examples():
    x = np.array([0.3, -1.2, 4.0])
    assert cosine(x, x) == pytest.approx(1.0)
    assert cosine([1, 0], [0, 1]) == 0.0
    assert cosine([1, 1], [1, 0]) == pytest.approx(1 / math.sqrt(2), abs=1e-9)
    assert cosine([0, 0], [1, 0]) == 0.0


vec = st.lists(st.floats(-10, 10, allow_nan=False), min_size=3, max_size=3)


@given(vec, vec, st.floats(0.01, 100), st.floats(0.01, 100))
def test_cosine_scale_invariant(u, v, a, b):
    u, v = np.array(u), np.array(v)
    if np.linalg.norm(u) < 1e-3 or np.linalg.norm(v) < 1e-3:
        return
    assert cosine(a * u, b * v) == pytest.approx(cosine(u, v), abs=1e-9)


@given(st.dictionaries(st.integers(0, 9), st.floats(0.1, 5)), st.dictionaries(st.integers(0, 9), st.floats(0.1, 5)))
def test_sparse_and_dense_cosine_agree(a, b):
    u, v = SparseVector.from_dict(a), SparseVector.from_dict(b)
    dense = cosine(u.to_dense(10), v.to_dense(10))
    assert cosine(u, v) == pytest.approx(dense, abs=1e-9)
    assert cosine(u, v.to_dense(10)) == pytest.approx(dense, abs=1e-9)


def test_cosine_matrix_matches_pairwise():
    rng = np.random.default_rng(0)
    m = rng.standard_normal((5, 4))
    m[2] = 0
    sims = cosine_matrix(m)
    for i in range(5):
        for j in range(5):
            assert sims[i, j] == pytest.approx(cosine(m[i], m[j]), abs=1e-12)


def test_stack_sparse_keeps_pairwise_geometry():
    vs = [SparseVector((3, 900), (1.0, 2.0)), SparseVector((900,), (1.0,))]
    dense = stack(vs)
    assert dense.shape == (2, 2)
    assert cosine(dense[0], dense[1]) == pytest.approx(cosine(vs[0], vs[1]))


def test_load_embeddings_basic(tmp_path):
    p = tmp_path / "v.vec"
    p.write_text("2 3\na 1 0 0\nb 0 1 0\n", encoding="utf-8")
    t = load_embeddings(p)
    assert t.dim == 3 and len(t) == 2
    assert list(t["b"]) == [0, 1, 0]
    assert t.source_name == "v"


def test_load_embeddings_empty_table(tmp_path):
    p = tmp_path / "v.vec"
    p.write_text("0 300\n", encoding="utf-8")
    t = load_embeddings(p)
    assert t.dim == 300 and len(t) == 0


def test_load_embeddings_skips_bad_rows_and_duplicates(tmp_path):
    p = tmp_path / "v.vec"
    p.write_text("4 3\na 1 0 0 \nshort 1 0\nb 0 x 0\na 9 9 9\nŵyr 0 0 1\n", encoding="utf-8")
    t = load_embeddings(p)
    assert sorted(t.vectors) == ["a", "ŵyr"]
    assert list(t["a"]) == [1, 0, 0]
    assert t.skipped == 2


@pytest.mark.parametrize("header", ["", "abc 3\n", "2\n", "2 0\n", "-1 3\n"])
def test_load_embeddings_bad_header(tmp_path, header):
    p = tmp_path / "v.vec"
    p.write_text(header + "a 1 0 0\n", encoding="utf-8")
    with pytest.raises(BadHeader):
        load_embeddings(p)


def test_load_embeddings_headerless_and_restricted(tmp_path):
    p = tmp_path / "v.txt"
    p.write_text("a 1 0\nb 0 1\nc 1 1\n", encoding="utf-8")
    t = load_embeddings(p, header=False, restrict_to={"a", "c"}, source_name="wnlt")
    assert t.dim == 2 and sorted(t.vectors) == ["a", "c"]
    assert t.source_name == "wnlt"


def test_load_embeddings_missing_file(tmp_path):
    with pytest.raises(OSError):
        load_embeddings(tmp_path / "missing.vec")


def test_embedding_table_rejects_wrong_lengths():
    with pytest.raises(ValueError):
        EmbeddingTable(2, {"a": np.zeros(3)})


def test_sentence_embedding_examples():
    table = EmbeddingTable(2, {"a": np.array([1.0, 0.0]), "b": np.array([0.0, 1.0]), "z": np.array([3.0, 3.0])})
    m = hand_model({"a": 1.5, "b": 1.5, "c": 2.0})
    assert list(sentence_embedding(["q", "z"], m, table)) == [0.0, 0.0]  # z is outside the model
    w = sentence_embedding(["a"], m, table)
    assert list(w) == [1.0, 0.0]
    assert list(sentence_embedding(["a", "b", "c"], m, table)) == [0.5, 0.5]


def test_sentence_embedding_weighted_by_tfidf():
    table = EmbeddingTable(2, {"a": np.array([1.0, 0.0]), "b": np.array([0.0, 1.0])})
    m = hand_model({"a": 1.0, "b": 3.0})
    # weights: a -> 2 * 1.0, b -> 1 * 3.0
    assert sentence_embedding(["a", "b", "a"], m, table) == pytest.approx([2 / 5, 3 / 5])


@given(st.permutations(["a", "b", "a", "c", "b", "a"]))
def test_sentence_embedding_ignores_token_order(tokens):
    table = EmbeddingTable(2, {"a": np.array([1.0, 0.2]), "b": np.array([0.1, 1.0]), "c": np.array([-1.0, 0.5])})
    m = hand_model({"a": 1.2, "b": 1.7, "c": 2.9})
    expected = sentence_embedding(["a", "a", "a", "b", "b", "c"], m, table)
    assert np.array_equal(sentence_embedding(tokens, m, table), expected)
