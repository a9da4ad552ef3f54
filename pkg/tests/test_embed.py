import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from privlabel.embed import (
    EmbeddingModel,
    char_ngrams,
    cosine_matrix,
    cosine_similarity,
    embed_tokens,
    load_embeddings,
    save_embeddings,
)
from privlabel.errors import DimensionMismatch, EmptyModel


def write(tmp_path, text):
    p = tmp_path / "v.vec"
    p.write_text(text)
    return p


def test_three_rows_dim_four(tmp_path):
    m = load_embeddings(write(tmp_path, "3 4\na 1 0 0 0\nb 0 1 0 0\nc 0 0 1 0\n"))
    assert m.dimension == 4 and set(m.vocab) == {"a", "b", "c"}


def test_short_row_is_dimension_mismatch(tmp_path):
    with pytest.raises(DimensionMismatch):
        load_embeddings(write(tmp_path, "1 4\na 1 0 0\n"))


def test_ngram_rows_routed(tmp_path):
    m = load_embeddings(write(tmp_path, "2 2\ndata 1 0\n<ng>dat 0 1\n"))
    assert set(m.vocab) == {"data"} and set(m.subgram_vocab) == {"dat"}


def test_header_only_is_empty(tmp_path):
    with pytest.raises(EmptyModel):
        load_embeddings(write(tmp_path, "0 3\n"))


def toy():
    return EmbeddingModel(2, {"a": np.array([1.0, 0.0]), "b": np.array([0.0, 1.0])},
                          {"<da": np.array([2.0, 0.0]), "ta>": np.array([0.0, 2.0])})


def test_mean_of_two():
    np.testing.assert_array_equal(embed_tokens(toy(), ["a", "b"]), [0.5, 0.5])


def test_empty_is_zero():
    np.testing.assert_array_equal(embed_tokens(toy(), []), [0.0, 0.0])


def test_oov_without_ngrams_is_zero():
    np.testing.assert_array_equal(embed_tokens(toy(), ["zzz"]), [0.0, 0.0])


def test_oov_uses_subword_mean():
    # "<data>" has 3-grams "<da" and "ta>" among others; both are in the table
    assert "<da" in char_ngrams("data") and "ta>" in char_ngrams("data")
    np.testing.assert_array_equal(toy().vector("data"), [1.0, 1.0])


@pytest.mark.parametrize("a,b,expected", [((1, 0), (1, 0), 1.0), ((1, 0), (0, 1), 0.0), ((0, 0), (1, 1), 0.0)])
def test_cosine_examples(a, b, expected):
    assert cosine_similarity(a, b) == expected


def test_cosine_shape_mismatch():
    with pytest.raises(DimensionMismatch):
        cosine_similarity([1, 0], [1, 0, 0])


vec = arrays(np.float64, 5, elements=st.floats(-100, 100, allow_nan=False, width=64))


@settings(max_examples=200, deadline=None)
@given(vec, vec, st.floats(0.01, 100))
def test_cosine_properties(a, b, k):
    if np.linalg.norm(a) > 1e-6:
        assert cosine_similarity(a, a) == pytest.approx(1.0)
        if np.linalg.norm(b) > 1e-6:
            assert cosine_similarity(a * k, b) == pytest.approx(cosine_similarity(a, b), abs=1e-9)
    assert cosine_similarity(a, b) == cosine_similarity(b, a)


@settings(max_examples=100, deadline=None)
@given(st.lists(st.sampled_from(["a", "b", "zz"]), min_size=1, max_size=8), st.randoms())
def test_embedding_permutation_invariant(tokens, rnd):
    shuffled = list(tokens)
    rnd.shuffle(shuffled)
    np.testing.assert_allclose(embed_tokens(toy(), tokens), embed_tokens(toy(), shuffled), atol=1e-12)


@given(st.integers(1, 10))
def test_copies_of_one_token(k):
    np.testing.assert_array_equal(embed_tokens(toy(), ["a"] * k), [1.0, 0.0])


@settings(max_examples=50, deadline=None)
@given(arrays(np.float64, (4, 3), elements=st.floats(-1e6, 1e6, allow_nan=False, width=64)))
def test_save_load_bit_exact(tmp_path_factory, rows):
    model = EmbeddingModel(3, {f"t{i}": rows[i].copy() for i in range(3)}, {"abc": rows[3].copy()})
    path = tmp_path_factory.mktemp("emb") / "m.vec"
    save_embeddings(model, path)
    back = load_embeddings(path)
    for tok, v in model.vocab.items():
        assert back.vocab[tok].tobytes() == v.tobytes()
    assert back.subgram_vocab["abc"].tobytes() == model.subgram_vocab["abc"].tobytes()


def test_cosine_matrix_matches_pairwise():
    rng = np.random.default_rng(1)
    A, B = rng.normal(size=(3, 4)), rng.normal(size=(2, 4))
    A[1] = 0
    M = cosine_matrix(A, B)
    for i in range(3):
        for j in range(2):
            assert M[i, j] == pytest.approx(cosine_similarity(A[i], B[j]), abs=1e-12)
