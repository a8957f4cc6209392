"""Minority-class treatments: random oversampling, synonym replacement, word deletion.

Sentence-level transforms operate on whitespace tokens; a token's
punctuation prefix/suffix survives synonym replacement (``"flake,"`` keeps
its comma).
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field, replace
from importlib import resources
from pathlib import Path
from typing import Iterable

import numpy as np

from ._seeding import derive_seeds, rng
from .corpus_io import CorpusFormatError, LabeledDataset, Sentence

TECHNIQUES = ("none", "synonym", "delete", "oversample")
_CORE = re.compile(r"^([\W_]*)(.*?)([\W_]*)$", re.DOTALL)


@dataclass(frozen=True)
class SynonymLexicon:
    entries: dict[str, tuple[str, ...]] = field(default_factory=dict)

    def __post_init__(self) -> None:
        clean = {}
        for word, syns in self.entries.items():
            syns = tuple(syns)
            if word != word.lower() or any(s != s.lower() for s in syns):
                raise ValueError(f"lexicon entries must be lowercase: {word!r}")
            if not syns:
                raise ValueError(f"no synonyms listed for {word!r}")
            if word in syns:
                raise ValueError(f"{word!r} lists itself as a synonym")
            if any(not s or any(ch.isspace() for ch in s) for s in (word, *syns)):
                raise ValueError(f"lexicon entries must be single words: {word!r}")
            clean[word] = syns
        object.__setattr__(self, "entries", clean)

    def __contains__(self, word: str) -> bool:
        return word in self.entries

    def get(self, word: str) -> tuple[str, ...]:
        return self.entries.get(word, ())


def _parse_lexicon(text: str, source: str) -> SynonymLexicon:
    entries: dict[str, tuple[str, ...]] = {}
    for lineno, line in enumerate(text.split("\n"), start=1):
        if not line.strip():
            continue
        parts = line.split("\t")
        if len(parts) != 2:
            raise CorpusFormatError(f"{source}:{lineno}: expected 'word<TAB>syn1,syn2,...'")
        word = parts[0].strip()
        syns = tuple(s.strip() for s in parts[1].split(",") if s.strip())
        try:
            SynonymLexicon({word: syns})
        except ValueError as exc:
            raise CorpusFormatError(f"{source}:{lineno}: {exc}") from None
        entries[word] = syns
    return SynonymLexicon(entries)


def load_lexicon(path: str | Path | None = None) -> SynonymLexicon:
    """Read ``word<TAB>syn1,syn2,...`` lines; with no path, the small bundled lexicon."""
    if path is None:
        return _parse_lexicon(
            resources.files("skewlens").joinpath("data/lexicon_en.tsv").read_text(encoding="utf-8"),
            "bundled lexicon",
        )
    return _parse_lexicon(Path(path).read_text(encoding="utf-8"), str(path))


@dataclass(frozen=True)
class AugmentationConfig:
    technique: str = "none"
    deletion_prob: float = 0.1
    synonyms_per_sentence: int = 1
    oversample_ratio: float = 1.0
    seed: int = 0

    def __post_init__(self) -> None:
        if self.technique not in TECHNIQUES:
            raise ValueError(f"technique must be one of {TECHNIQUES}, got {self.technique!r}")
        if self.technique != "none" and not self.oversample_ratio > 0:
            raise ValueError(f"oversample_ratio must be > 0, got {self.oversample_ratio}")
        if self.technique == "delete" and not 0.0 <= self.deletion_prob < 1.0:
            raise ValueError(f"deletion_prob must lie in [0, 1), got {self.deletion_prob}")
        if self.technique == "synonym" and self.synonyms_per_sentence < 1:
            raise ValueError(f"synonyms_per_sentence must be >= 1, got {self.synonyms_per_sentence}")


def minority_class(ds: LabeledDataset) -> int:
    """Class with fewer sentences; a tie resolves to class 1."""
    counts = ds.class_counts()
    if np.count_nonzero(counts) < 2:
        raise ValueError(f"dataset {ds.name!r} needs both classes present, counts={counts.tolist()}")
    return 0 if counts[0] < counts[1] else 1


def _grow_class(ds: LabeledDataset, cls: int, ratio: float, seed: int) -> LabeledDataset:
    counts = ds.class_counts()
    target = int(np.floor(ratio * counts[1 - cls] + 0.5))
    extra = target - int(counts[cls])
    if extra <= 0:
        return ds
    pool = [s for s in ds.sentences if s.label == cls]
    picks = rng(seed).integers(0, len(pool), size=extra)
    return ds.with_sentences(ds.sentences + tuple(pool[i] for i in picks))


def oversample(ds: LabeledDataset, ratio: float = 1.0, seed: int = 0) -> LabeledDataset:
    """Append random minority copies until minority = round(ratio * majority)."""
    if not ratio > 0:
        raise ValueError(f"ratio must be > 0, got {ratio}")
    ds.require_labels()
    return _grow_class(ds, minority_class(ds), ratio, seed)


def _core(token: str) -> tuple[str, str, str]:
    m = _CORE.match(token)
    return m.group(1), m.group(2), m.group(3)


def synonym_replace(
    sentence: Sentence, lexicon: SynonymLexicon, n: int = 1, stopwords: Iterable[str] = frozenset(), seed: int = 0
) -> Sentence:
    """Replace up to ``n`` distinct lexicon-covered, non-stopword token positions."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    stop = frozenset(stopwords)
    tokens = sentence.text.split()
    candidates = []
    for pos, tok in enumerate(tokens):
        core = _core(tok)[1].lower()
        if core and core not in stop and core in lexicon:
            candidates.append(pos)
    if not candidates:
        return sentence
    gen = rng(seed)
    chosen = gen.choice(len(candidates), size=min(n, len(candidates)), replace=False)
    for c in sorted(int(i) for i in chosen):
        pos = candidates[c]
        pre, core, post = _core(tokens[pos])
        syns = lexicon.get(core.lower())
        tokens[pos] = pre + syns[int(gen.integers(len(syns)))] + post
    return replace(sentence, text=" ".join(tokens))


def random_delete(sentence: Sentence, p: float = 0.1, seed: int = 0) -> Sentence:
    """Drop each token with probability ``p``; if none survive keep one at random."""
    if not 0.0 <= p < 1.0:
        raise ValueError(f"p must lie in [0, 1), got {p}")
    if p == 0.0:
        return sentence
    tokens = sentence.text.split()
    gen = rng(seed)
    keep = gen.random(len(tokens)) >= p
    if not keep.any():
        keep[int(gen.integers(len(tokens)))] = True
    return replace(sentence, text=" ".join(t for t, k in zip(tokens, keep) if k))


def augment_dataset(
    ds: LabeledDataset,
    cfg: AugmentationConfig,
    lexicon: SynonymLexicon | None = None,
    stopwords: Iterable[str] = frozenset(),
) -> LabeledDataset:
    """Apply one treatment to a training set.

    ``synonym`` and ``delete`` append one perturbed copy of every minority
    sentence and then oversample up to ``cfg.oversample_ratio``, so every
    treatment ends at the same class balance.
    """
    if cfg.technique == "none":
        return ds
    if cfg.technique == "oversample":
        return oversample(ds, cfg.oversample_ratio, cfg.seed)
    ds.require_labels()
    minority = minority_class(ds)
    pool = [s for s in ds.sentences if s.label == minority]
    transform_seed, balance_seed = derive_seeds(cfg.seed, 2)
    seeds = derive_seeds(transform_seed, len(pool))
    if cfg.technique == "synonym":
        if lexicon is None:
            raise ValueError("synonym augmentation needs a lexicon")
        copies = [synonym_replace(s, lexicon, cfg.synonyms_per_sentence, stopwords, sd) for s, sd in zip(pool, seeds)]
    else:
        copies = [random_delete(s, cfg.deletion_prob, sd) for s, sd in zip(pool, seeds)]
    grown = ds.with_sentences(ds.sentences + tuple(copies))
    return _grow_class(grown, minority, cfg.oversample_ratio, balance_seed)
