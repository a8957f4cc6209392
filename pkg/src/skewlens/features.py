"""Sentence encoders: hashed n-grams, imported embeddings, concatenation.

An encoder is any callable ``Sentence -> FeatureVector`` with a ``dim``
attribute. The classifier only ever sees the resulting vectors.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Protocol, Sequence

import numpy as np

from .corpus_io import CorpusFormatError, LabeledDataset, Sentence, tokenize

FNV_OFFSET = 0xCBF29CE484222325
FNV_PRIME = 0x100000001B3
_MASK64 = (1 << 64) - 1


def fnv1a_64(data: str | bytes) -> int:
    if isinstance(data, str):
        data = data.encode("utf-8")
    h = FNV_OFFSET
    for byte in data:
        h = ((h ^ byte) * FNV_PRIME) & _MASK64
    return h


class FeatureVector:
    """Fixed-dimension vector, stored sparse unless at least half filled."""

    __slots__ = ("dim", "_dense", "_indices", "_values")

    def __init__(self, dim: int, dense: np.ndarray | None = None, indices=None, values=None):
        if dim < 0:
            raise ValueError(f"dim must be non-negative, got {dim}")
        self.dim = int(dim)
        self._dense = None
        self._indices = None
        self._values = None
        if dense is not None:
            dense = np.asarray(dense, dtype=np.float64)
            if dense.shape != (dim,):
                raise ValueError(f"dense vector has shape {dense.shape}, expected ({dim},)")
            if not np.all(np.isfinite(dense)):
                raise ValueError("feature values must be finite")
            nz = np.flatnonzero(dense)
            if dim and len(nz) * 2 >= dim:
                self._dense = dense
            else:
                self._indices, self._values = nz.astype(np.int64), dense[nz]
        else:
            idx = np.asarray(indices if indices is not None else [], dtype=np.int64)
            val = np.asarray(values if values is not None else [], dtype=np.float64)
            if idx.shape != val.shape:
                raise ValueError("indices and values must have equal length")
            if len(idx) and (idx.min() < 0 or idx.max() >= dim):
                raise ValueError("feature index out of range")
            if len(np.unique(idx)) != len(idx):
                raise ValueError("duplicate feature index")
            if not np.all(np.isfinite(val)):
                raise ValueError("feature values must be finite")
            order = np.argsort(idx)
            idx, val = idx[order], val[order]
            if dim and len(idx) * 2 >= dim:
                self._dense = np.zeros(dim)
                self._dense[idx] = val
            else:
                self._indices, self._values = idx, val

    @classmethod
    def zeros(cls, dim: int) -> "FeatureVector":
        return cls(dim, indices=[], values=[])

    @property
    def is_dense(self) -> bool:
        return self._dense is not None

    def to_dense(self) -> np.ndarray:
        if self._dense is not None:
            return self._dense.copy()
        out = np.zeros(self.dim)
        out[self._indices] = self._values
        return out

    def items(self) -> tuple[np.ndarray, np.ndarray]:
        if self._dense is not None:
            nz = np.flatnonzero(self._dense)
            return nz, self._dense[nz]
        return self._indices.copy(), self._values.copy()

    def norm(self) -> float:
        return float(np.linalg.norm(self._dense if self._dense is not None else self._values))

    def __eq__(self, other) -> bool:
        if not isinstance(other, FeatureVector):
            return NotImplemented
        return self.dim == other.dim and np.array_equal(self.to_dense(), other.to_dense())

    def __repr__(self) -> str:
        kind = "dense" if self.is_dense else f"sparse nnz={len(self._indices)}"
        return f"FeatureVector(dim={self.dim}, {kind})"


def hash_ngram_counts(tokens: Sequence[str], dim: int, n_max: int) -> dict[int, float]:
    if dim < 2 or dim & (dim - 1):
        raise ValueError(f"dim must be a power of two >= 2, got {dim}")
    if n_max not in (1, 2, 3):
        raise ValueError(f"n_max must be 1, 2 or 3, got {n_max}")
    mask = dim - 1
    counts: dict[int, float] = {}
    for n in range(1, n_max + 1):
        for i in range(len(tokens) - n + 1):
            j = fnv1a_64(" ".join(tokens[i : i + n])) & mask
            counts[j] = counts.get(j, 0.0) + 1.0
    return counts


def hash_ngrams(tokens: Sequence[str], dim: int, n_max: int = 2) -> FeatureVector:
    """L2-normalised counts of all 1..n_max-grams, bucketed by FNV-1a-64 mod dim."""
    counts = hash_ngram_counts(tokens, dim, n_max)
    if not counts:
        return FeatureVector.zeros(dim)
    idx = np.fromiter(counts.keys(), dtype=np.int64, count=len(counts))
    val = np.fromiter(counts.values(), dtype=np.float64, count=len(counts))
    return FeatureVector(dim, indices=idx, values=val / np.linalg.norm(val))


def concat(a: FeatureVector, b: FeatureVector) -> FeatureVector:
    ia, va = a.items()
    ib, vb = b.items()
    return FeatureVector(a.dim + b.dim, indices=np.concatenate([ia, ib + a.dim]), values=np.concatenate([va, vb]))


@dataclass
class EmbeddingStore:
    dim: int | None = None
    vectors: dict[tuple[str, int], np.ndarray] = field(default_factory=dict)

    def add(self, article_id: str, index: int, vector) -> None:
        v = np.asarray(vector, dtype=np.float64)
        if v.ndim != 1:
            raise ValueError("embedding must be one-dimensional")
        if self.dim is None:
            self.dim = len(v)
        elif len(v) != self.dim:
            raise ValueError(f"embedding for {article_id}:{index} has {len(v)} values, expected {self.dim}")
        if not np.all(np.isfinite(v)):
            raise ValueError(f"embedding for {article_id}:{index} has non-finite values")
        self.vectors[(article_id, index)] = v

    def __len__(self) -> int:
        return len(self.vectors)

    def __contains__(self, key) -> bool:
        return key in self.vectors


def load_embeddings(path: str | Path) -> EmbeddingStore:
    """Read ``article_id<TAB>sentence_index<TAB>v1,v2,...`` rows.

    Also the format for precomputed one-hot (POS / NER) vectors.
    """
    path = Path(path)
    store = EmbeddingStore()
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.rstrip("\n")
            if not line.strip():
                continue
            fields = line.split("\t")
            if len(fields) != 3:
                raise CorpusFormatError(f"{path}:{lineno}: expected 3 tab-separated fields, got {len(fields)}")
            article_id, idx_s, vec_s = fields
            try:
                index = int(idx_s)
                values = [float(x) for x in vec_s.split(",")]
            except ValueError as exc:
                raise CorpusFormatError(f"{path}:{lineno}: {exc}") from None
            if not all(math.isfinite(x) for x in values):
                raise CorpusFormatError(f"{path}:{lineno}: non-finite value in embedding")
            if store.dim is not None and len(values) != store.dim:
                raise CorpusFormatError(
                    f"{path}:{lineno}: row has {len(values)} values, earlier rows have {store.dim}"
                )
            store.add(article_id, index, values)
    return store


class Encoder(Protocol):
    dim: int

    def __call__(self, sentence: Sentence) -> FeatureVector: ...


@dataclass(frozen=True)
class HashingEncoder:
    dim: int = 4096
    n_max: int = 2
    stopwords: frozenset[str] = frozenset()

    def __call__(self, sentence: Sentence) -> FeatureVector:
        return hash_ngrams(tokenize(sentence.text, self.stopwords), self.dim, self.n_max)


@dataclass(frozen=True)
class EmbeddingEncoder:
    """Looks sentences up by (article_id, index); the text itself is ignored."""

    store: EmbeddingStore

    @property
    def dim(self) -> int:
        if self.store.dim is None:
            raise ValueError("embedding store is empty")
        return self.store.dim

    def __call__(self, sentence: Sentence) -> FeatureVector:
        try:
            v = self.store.vectors[sentence.key]
        except KeyError:
            raise KeyError(f"no embedding for sentence {sentence.article_id}:{sentence.index}") from None
        return FeatureVector(len(v), dense=v)


@dataclass(frozen=True)
class ConcatEncoder:
    parts: tuple

    @property
    def dim(self) -> int:
        return sum(p.dim for p in self.parts)

    def __call__(self, sentence: Sentence) -> FeatureVector:
        out = self.parts[0](sentence)
        for p in self.parts[1:]:
            out = concat(out, p(sentence))
        return out


def encode_dataset(ds: LabeledDataset | Iterable[Sentence], encoder) -> np.ndarray:
    """Dense ``(n, dim)`` float64 design matrix."""
    sentences = ds.sentences if isinstance(ds, LabeledDataset) else tuple(ds)
    X = np.zeros((len(sentences), encoder.dim))
    for row, s in enumerate(sentences):
        v = encoder(s)
        if v.dim != encoder.dim:
            raise ValueError(f"encoder produced dim {v.dim}, declared {encoder.dim}")
        idx, val = v.items()
        X[row, idx] = val
    return X
