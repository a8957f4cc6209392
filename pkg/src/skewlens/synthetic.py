"""Generated fixtures for protocol checks where the real corpus is unavailable."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._seeding import rng
from .corpus_io import LabeledDataset, Sentence
from .features import EmbeddingStore


def zipf_weights(n_types: int, exponent: float = 1.1) -> np.ndarray:
    w = 1.0 / np.arange(1, n_types + 1, dtype=np.float64) ** exponent
    return w / w.sum()


@dataclass(frozen=True)
class TopicMix:
    """Token source: a shared general vocabulary plus one topic vocabulary.

    Each token comes from the topic vocabulary with probability ``topic_share``.
    """

    topic_prefix: str
    topic_types: int
    topic_share: float = 0.5
    general_types: int = 2000
    exponent: float = 1.1


def generate_corpus(
    mix: TopicMix,
    n_sentences: int = 2000,
    words_per_sentence: int = 12,
    minority_rate: float = 0.28,
    seed: int = 0,
    name: str = "synthetic",
    article_size: int = 20,
) -> LabeledDataset:
    """Sentences of Zipf-distributed tokens, grouped into articles of ``article_size``."""
    gen = rng(seed)
    general = zipf_weights(mix.general_types, mix.exponent)
    topic = zipf_weights(mix.topic_types, mix.exponent)
    sentences = []
    for i in range(n_sentences):
        from_topic = gen.random(words_per_sentence) < mix.topic_share
        g = gen.choice(mix.general_types, size=words_per_sentence, p=general)
        t = gen.choice(mix.topic_types, size=words_per_sentence, p=topic)
        words = [f"{mix.topic_prefix}{t[k]}" if from_topic[k] else f"w{g[k]}" for k in range(words_per_sentence)]
        label = int(gen.random() < minority_rate)
        sentences.append(Sentence(f"{i // article_size + 1}", i % article_size + 1, " ".join(words), label))
    return LabeledDataset(tuple(sentences), name)


def disjoint_topic_pair(seed: int = 0, n_sentences: int = 2000) -> tuple[LabeledDataset, LabeledDataset]:
    """Two corpora sharing general words but with disjoint topic vocabularies of unequal breadth.

    Breadth must differ: if the two topic vocabularies were mirror images
    of each other the signed differences would be symmetric around zero
    and no signed-rank test could tell the corpora apart.
    """
    a = generate_corpus(TopicMix("alpha", 2000), n_sentences, seed=seed, name="topic-a")
    b = generate_corpus(TopicMix("beta", 200), n_sentences, seed=seed + 1, name="topic-b")
    return a, b


@dataclass(frozen=True)
class GaussianFixture:
    train: LabeledDataset
    in_domain: LabeledDataset
    shifted: LabeledDataset
    store: EmbeddingStore


def _gaussian_set(gen, n: int, minority_rate: float, means, scale: float, prefix: str, store: EmbeddingStore):
    labels = (gen.random(n) < minority_rate).astype(int)
    sentences = []
    for i, y in enumerate(labels):
        x = np.asarray(means[y]) + scale * gen.standard_normal(2)
        s = Sentence(f"{prefix}{i // 50}", i % 50 + 1, f"point {prefix}{i}", int(y))
        store.add(s.article_id, s.index, x)
        sentences.append(s)
    return LabeledDataset(tuple(sentences), prefix)


def gaussian_shift_fixture(
    seed: int,
    n_train: int = 1000,
    n_eval: int = 1000,
    minority_rate: float = 0.1,
    train_means=((-1.0, -1.0), (1.0, 1.0)),
    shifted_means=((-1.0, -1.0), (0.3, 0.3)),
    scale: float = 1.0,
) -> GaussianFixture:
    """Two 2-D Gaussian classes; the shifted set moves the class means.

    ``means[k]`` is the mean of class ``k``; class 1 is the minority.
    """
    gen = rng(seed)
    store = EmbeddingStore()
    return GaussianFixture(
        train=_gaussian_set(gen, n_train, minority_rate, train_means, scale, "tr", store),
        in_domain=_gaussian_set(gen, n_eval, minority_rate, train_means, scale, "in", store),
        shifted=_gaussian_set(gen, n_eval, minority_rate, shifted_means, scale, "sh", store),
        store=store,
    )
