"""Word vectors loaded from a text file, mean text embeddings, cosine similarity.

Rows whose token starts with ``<ng>`` hold character n-gram vectors; they
back out-of-vocabulary words the way subword-aware embeddings do.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from privlabel.errors import DimensionMismatch, EmptyModel

NGRAM_PREFIX = "<ng>"
MIN_N, MAX_N = 3, 5


@dataclass(frozen=True)
class EmbeddingModel:
    dimension: int
    vocab: dict = field(repr=False)
    subgram_vocab: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        if self.dimension <= 0:
            raise ValueError("dimension must be positive")
        for table in (self.vocab, self.subgram_vocab):
            for key, vec in table.items():
                if vec.shape != (self.dimension,):
                    raise DimensionMismatch(f"{key!r} has shape {vec.shape}")
                vec.setflags(write=False)

    def vector(self, token: str) -> np.ndarray:
        vec = self.vocab.get(token)
        if vec is not None:
            return vec
        grams = [self.subgram_vocab[g] for g in char_ngrams(token) if g in self.subgram_vocab]
        if not grams:
            return np.zeros(self.dimension)
        return np.mean(grams, axis=0)


def char_ngrams(token: str, min_n: int = MIN_N, max_n: int = MAX_N) -> list[str]:
    """Character n-grams of ``<token>`` with word-boundary markers."""
    word = f"<{token}>"
    return [word[i:i + n] for n in range(min_n, max_n + 1) for i in range(len(word) - n + 1)]


def load_embeddings(path) -> EmbeddingModel:
    with open(path, encoding="utf-8") as fh:
        header = fh.readline().split()
        if len(header) != 2:
            raise ValueError(f"{path}: header must be '<vocab_size> <dimension>'")
        dim = int(header[1])
        vocab, subgrams = {}, {}
        for lineno, line in enumerate(fh, 2):
            parts = line.rstrip("\n").split(" ")
            if not parts or not parts[0]:
                continue
            token, values = parts[0], parts[1:]
            if len(values) != dim:
                raise DimensionMismatch(
                    f"{path}:{lineno}: {len(values)} values under a {dim}-d header"
                )
            vec = np.array([float(v) for v in values], dtype=np.float64)
            if token.startswith(NGRAM_PREFIX):
                subgrams[token[len(NGRAM_PREFIX):]] = vec
            else:
                vocab[token] = vec
    if not vocab and not subgrams:
        raise EmptyModel(f"{path}: no vectors")
    return EmbeddingModel(dim, vocab, subgrams)


def save_embeddings(model: EmbeddingModel, path) -> None:
    rows = [(tok, vec) for tok, vec in model.vocab.items()]
    rows += [(NGRAM_PREFIX + g, vec) for g, vec in model.subgram_vocab.items()]
    with open(Path(path), "w", encoding="utf-8") as fh:
        fh.write(f"{len(rows)} {model.dimension}\n")
        for tok, vec in rows:
            fh.write(tok + " " + " ".join(repr(float(v)) for v in vec) + "\n")


def embed_tokens(model: EmbeddingModel, tokens) -> np.ndarray:
    """Arithmetic mean of token vectors; zero vector for an empty list."""
    tokens = list(tokens)
    if not tokens:
        return np.zeros(model.dimension)
    return np.mean([model.vector(t) for t in tokens], axis=0)


def embed_many(model: EmbeddingModel, token_lists) -> np.ndarray:
    token_lists = list(token_lists)
    if not token_lists:
        return np.zeros((0, model.dimension))
    return np.vstack([embed_tokens(model, toks) for toks in token_lists])


def cosine_similarity(a, b) -> float:
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape:
        raise DimensionMismatch(f"{a.shape} vs {b.shape}")
    na, nb = np.linalg.norm(a), np.linalg.norm(b)
    if na == 0 or nb == 0:
        return 0.0
    return float(np.clip(np.dot(a, b) / (na * nb), -1.0, 1.0))


def cosine_matrix(A: np.ndarray, B: np.ndarray) -> np.ndarray:
    """Pairwise cosine between rows of ``A`` and ``B``; zero rows give 0."""
    if A.shape[1] != B.shape[1]:
        raise DimensionMismatch(f"{A.shape} vs {B.shape}")

    def unit(M):
        norms = np.linalg.norm(M, axis=1, keepdims=True)
        return np.divide(M, norms, out=np.zeros_like(M), where=norms > 0)

    return np.clip(unit(A) @ unit(B).T, -1.0, 1.0)
