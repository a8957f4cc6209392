"""Reading and writing the sentence/span corpus, tokenisation and splits.

On-disk layout (all UTF-8, LF line endings, no headers):

* ``article<ID>.txt`` -- one sentence per line; line *k* is sentence *k*.
* SLC labels TSV -- ``article_id<TAB>sentence_index<TAB>label`` with
  ``label`` in ``{propaganda, non-propaganda}``.
* FLC spans TSV -- ``article_id<TAB>technique<TAB>start<TAB>end``; offsets
  are UTF-8 byte offsets into the article file, half-open.
* stopword file -- one lowercase word per line.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from ._seeding import rng

NON_PROPAGANDA = 0
PROPAGANDA = 1
CLASS_NAMES = ("non-propaganda", "propaganda")
_LABEL_TOKENS = {name: idx for idx, name in enumerate(CLASS_NAMES)}

TECHNIQUES = frozenset(
    {
        "Appeal_to_Authority",
        "Appeal_to_fear-prejudice",
        "Bandwagon",
        "Black-and-White_Fallacy",
        "Causal_Oversimplification",
        "Doubt",
        "Exaggeration,Minimisation",
        "Flag-Waving",
        "Loaded_Language",
        "Name_Calling,Labeling",
        "Obfuscation,Intentional_Vagueness,Confusion",
        "Red_Herring",
        "Reductio_ad_hitlerum",
        "Repetition",
        "Slogans",
        "Straw_Men",
        "Thought-terminating_Cliches",
        "Whataboutism",
    }
)

_ARTICLE_FILE = re.compile(r"^article(.+)\.txt$")
_NON_ALNUM = re.compile(r"[\W_]+")


class CorpusFormatError(ValueError):
    """Malformed corpus input (bad TSV row, missing article, bad offsets)."""


@dataclass(frozen=True)
class Sentence:
    article_id: str
    index: int
    text: str
    label: int | None = None

    def __post_init__(self) -> None:
        if self.index < 1:
            raise ValueError(f"sentence index must be >= 1, got {self.index}")
        if not self.text.strip():
            raise ValueError(f"empty sentence text at {self.article_id}:{self.index}")
        if self.label not in (None, NON_PROPAGANDA, PROPAGANDA):
            raise ValueError(f"label must be 0, 1 or None, got {self.label!r}")

    @property
    def key(self) -> tuple[str, int]:
        return (self.article_id, self.index)


@dataclass(frozen=True)
class LabeledDataset:
    """An ordered collection of sentences.

    Loaded datasets have unique ``(article_id, index)`` keys. Augmented
    training sets may repeat keys: an oversampled copy is the same
    instance seen twice.
    """

    sentences: tuple[Sentence, ...]
    name: str = "custom"

    def __post_init__(self) -> None:
        object.__setattr__(self, "sentences", tuple(self.sentences))

    def __len__(self) -> int:
        return len(self.sentences)

    def __iter__(self):
        return iter(self.sentences)

    @property
    def labels(self) -> np.ndarray:
        self.require_labels()
        return np.array([s.label for s in self.sentences], dtype=np.int64)

    def class_counts(self) -> np.ndarray:
        """Counts indexed by class id; unlabeled sentences are not counted."""
        counts = np.zeros(len(CLASS_NAMES), dtype=np.int64)
        for s in self.sentences:
            if s.label is not None:
                counts[s.label] += 1
        return counts

    def is_fully_labeled(self) -> bool:
        return all(s.label is not None for s in self.sentences)

    def require_labels(self) -> None:
        for s in self.sentences:
            if s.label is None:
                raise ValueError(
                    f"dataset {self.name!r} has unlabeled sentence {s.article_id}:{s.index}"
                )

    def article_ids(self) -> list[str]:
        return list(dict.fromkeys(s.article_id for s in self.sentences))

    def with_sentences(self, sentences: Iterable[Sentence], name: str | None = None) -> "LabeledDataset":
        return LabeledDataset(tuple(sentences), self.name if name is None else name)


@dataclass(frozen=True)
class SpanAnnotation:
    article_id: str
    technique: str
    start_char: int
    end_char: int

    def __post_init__(self) -> None:
        if self.technique not in TECHNIQUES:
            raise ValueError(f"unknown propaganda technique {self.technique!r}")
        if not 0 <= self.start_char < self.end_char:
            raise ValueError(
                f"span must satisfy 0 <= start < end, got [{self.start_char}, {self.end_char})"
            )


@dataclass(frozen=True)
class ArticleLayout:
    """Byte length of an article file and the byte range of each sentence line."""

    length: int
    ranges: dict[int, tuple[int, int]] = field(default_factory=dict)

    @classmethod
    def from_text(cls, text: str) -> "ArticleLayout":
        ranges: dict[int, tuple[int, int]] = {}
        pos = 0
        for i, line in enumerate(text.split("\n"), start=1):
            n = len(line.encode("utf-8"))
            if line.strip():
                ranges[i] = (pos, pos + n)
            pos += n + 1
        return cls(length=len(text.encode("utf-8")), ranges=ranges)


StopwordSet = frozenset


def _natural_key(article_id: str):
    return (0, int(article_id), "") if article_id.isdigit() else (1, 0, article_id)


def _article_files(articles_dir: Path) -> dict[str, Path]:
    if not articles_dir.is_dir():
        raise CorpusFormatError(f"articles directory not found: {articles_dir}")
    found = {}
    for p in articles_dir.iterdir():
        m = _ARTICLE_FILE.match(p.name)
        if m and p.is_file():
            found[m.group(1)] = p
    return dict(sorted(found.items(), key=lambda kv: _natural_key(kv[0])))


def _read_lines(path: Path) -> list[str]:
    return path.read_text(encoding="utf-8").split("\n")


def _tsv_rows(path: Path, n_fields: int):
    with open(path, encoding="utf-8", newline="\n") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.rstrip("\n")
            if not line.strip():
                continue
            fields = line.split("\t")
            if len(fields) != n_fields:
                raise CorpusFormatError(
                    f"{path}:{lineno}: expected {n_fields} tab-separated fields, got {len(fields)}"
                )
            yield lineno, fields


def _parse_int(value: str, path: Path, lineno: int, what: str) -> int:
    try:
        return int(value)
    except ValueError:
        raise CorpusFormatError(f"{path}:{lineno}: {what} is not an integer: {value!r}") from None


def load_slc_dataset(
    articles_dir: str | Path, labels_path: str | Path | None = None, name: str = "custom"
) -> LabeledDataset:
    """Load every article under ``articles_dir`` and attach sentence labels.

    Sentences are ordered by article id (numeric ids numerically) then line
    number. Blank lines are not sentences. Sentences without a label row are
    kept with ``label=None``.
    """
    articles_dir = Path(articles_dir)
    files = _article_files(articles_dir)
    labels: dict[tuple[str, int], int] = {}
    if labels_path is not None:
        labels_path = Path(labels_path)
        for lineno, (article_id, idx_s, token) in _tsv_rows(labels_path, 3):
            idx = _parse_int(idx_s, labels_path, lineno, "sentence index")
            if token not in _LABEL_TOKENS:
                raise CorpusFormatError(
                    f"{labels_path}:{lineno}: label must be one of {sorted(_LABEL_TOKENS)}, got {token!r}"
                )
            if article_id not in files:
                raise CorpusFormatError(
                    f"{labels_path}:{lineno}: no file article{article_id}.txt in {articles_dir}"
                )
            if (article_id, idx) in labels:
                raise CorpusFormatError(f"{labels_path}:{lineno}: duplicate label for {article_id}:{idx}")
            labels[(article_id, idx)] = _LABEL_TOKENS[token]

    sentences = []
    line_cache: dict[str, list[str]] = {}
    for article_id, path in files.items():
        lines = line_cache.setdefault(article_id, _read_lines(path))
        for i, line in enumerate(lines, start=1):
            if line.strip():
                sentences.append(Sentence(article_id, i, line, labels.get((article_id, i))))

    present = {s.key for s in sentences}
    for (article_id, idx) in labels:
        if (article_id, idx) not in present:
            n_lines = len(line_cache[article_id])
            if idx > n_lines or idx < 1:
                raise CorpusFormatError(
                    f"label for {article_id}:{idx} is beyond the {n_lines} lines of article{article_id}.txt"
                )
            raise CorpusFormatError(f"label for {article_id}:{idx} points at a blank line")
    return LabeledDataset(tuple(sentences), name)


def save_slc_dataset(ds: LabeledDataset, articles_dir: str | Path, labels_path: str | Path) -> None:
    """Write ``ds`` in the canonical layout; :func:`load_slc_dataset` reads it back unchanged."""
    articles_dir = Path(articles_dir)
    articles_dir.mkdir(parents=True, exist_ok=True)
    by_article: dict[str, dict[int, str]] = {}
    for s in ds.sentences:
        if "\n" in s.text:
            raise ValueError(f"sentence {s.article_id}:{s.index} contains a newline")
        lines = by_article.setdefault(s.article_id, {})
        if s.index in lines:
            raise ValueError(f"duplicate sentence key {s.article_id}:{s.index}")
        lines[s.index] = s.text
    for article_id, lines in by_article.items():
        body = [lines.get(i, "") for i in range(1, max(lines) + 1)]
        (articles_dir / f"article{article_id}.txt").write_text("\n".join(body) + "\n", encoding="utf-8")
    with open(labels_path, "w", encoding="utf-8", newline="\n") as fh:
        for s in ds.sentences:
            if s.label is not None:
                fh.write(f"{s.article_id}\t{s.index}\t{CLASS_NAMES[s.label]}\n")


def load_flc_annotations(
    path: str | Path, article_lengths: dict[str, int] | None = None
) -> list[SpanAnnotation]:
    """Parse a spans TSV. If ``article_lengths`` is given, ends are checked against it."""
    path = Path(path)
    spans = []
    for lineno, (article_id, technique, start_s, end_s) in _tsv_rows(path, 4):
        start = _parse_int(start_s, path, lineno, "start offset")
        end = _parse_int(end_s, path, lineno, "end offset")
        if technique not in TECHNIQUES:
            raise CorpusFormatError(f"{path}:{lineno}: unknown technique {technique!r}")
        if not 0 <= start < end:
            raise CorpusFormatError(f"{path}:{lineno}: span [{start}, {end}) is empty or negative")
        if article_lengths is not None:
            length = article_lengths.get(article_id)
            if length is not None and end > length:
                raise CorpusFormatError(
                    f"{path}:{lineno}: span end {end} exceeds article length {length}"
                )
        spans.append(SpanAnnotation(article_id, technique, start, end))
    return spans


def resolve_overlapping_spans(spans: Sequence[SpanAnnotation], seed: int) -> list[SpanAnnotation]:
    """Keep one span, chosen uniformly at random, per identical (start, end) range.

    Partial overlaps are left alone. Survivors stay at the position of the
    first member of their group.
    """
    groups: dict[tuple[str, int, int], list[int]] = {}
    for i, s in enumerate(spans):
        groups.setdefault((s.article_id, s.start_char, s.end_char), []).append(i)
    gen = rng(seed)
    out = []
    for members in groups.values():
        pick = members[int(gen.integers(len(members)))] if len(members) > 1 else members[0]
        out.append(spans[pick])
    return out


def article_layouts(articles_dir: str | Path) -> dict[str, ArticleLayout]:
    return {
        article_id: ArticleLayout.from_text(path.read_text(encoding="utf-8"))
        for article_id, path in _article_files(Path(articles_dir)).items()
    }


def filter_fragment_sentences(
    ds: LabeledDataset, spans: Sequence[SpanAnnotation], article_offsets: dict[str, ArticleLayout]
) -> LabeledDataset:
    """Sentences whose byte range intersects at least one span of the same article."""
    by_article: dict[str, list[tuple[int, int]]] = {}
    for sp in spans:
        by_article.setdefault(sp.article_id, []).append((sp.start_char, sp.end_char))
    kept = []
    for s in ds.sentences:
        layout = article_offsets.get(s.article_id)
        if layout is None or s.index not in layout.ranges:
            raise CorpusFormatError(f"no byte range known for sentence {s.article_id}:{s.index}")
        lo, hi = layout.ranges[s.index]
        if not 0 <= lo <= hi <= layout.length:
            raise CorpusFormatError(
                f"sentence {s.article_id}:{s.index} range [{lo}, {hi}) lies outside article length {layout.length}"
            )
        if any(a < hi and lo < b for a, b in by_article.get(s.article_id, ())):
            kept.append(s)
    return ds.with_sentences(kept)


def load_stopwords(path: str | Path | None = None) -> frozenset[str]:
    """Read a stopword file; with no path, the bundled English list."""
    if path is None:
        text = resources.files("skewlens").joinpath("data/stopwords_en.txt").read_text(encoding="utf-8")
        source = "bundled stopwords"
    else:
        text = Path(path).read_text(encoding="utf-8")
        source = str(path)
    words = set()
    for lineno, line in enumerate(text.split("\n"), start=1):
        w = line.strip()
        if not w:
            continue
        if w != w.lower() or any(ch.isspace() for ch in w):
            raise CorpusFormatError(f"{source}:{lineno}: stopwords must be lowercase single words, got {w!r}")
        words.add(w)
    return frozenset(words)


def tokenize(text: str, stopwords: Iterable[str] = frozenset()) -> list[str]:
    """Lowercase, split on runs of non-alphanumerics, drop stopwords. Repeats kept."""
    stop = stopwords if isinstance(stopwords, (set, frozenset)) else frozenset(stopwords)
    return [t for t in _NON_ALNUM.split(text.lower()) if t and t not in stop]


def split_dataset(
    ds: LabeledDataset, train_fraction: float, seed: int, granularity: str = "sentence"
) -> tuple[LabeledDataset, LabeledDataset]:
    """Shuffle sentences (or whole articles) and cut at floor(fraction * units)."""
    if not 0.0 < train_fraction < 1.0:
        raise ValueError(f"train_fraction must lie in (0, 1), got {train_fraction}")
    if granularity == "sentence":
        units = [[s] for s in ds.sentences]
    elif granularity == "article":
        grouped: dict[str, list[Sentence]] = {}
        for s in ds.sentences:
            grouped.setdefault(s.article_id, []).append(s)
        units = list(grouped.values())
    else:
        raise ValueError(f"granularity must be 'sentence' or 'article', got {granularity!r}")
    # round() guards against products like 0.29 * 100 = 28.999999999999996
    cut = math.floor(round(train_fraction * len(units), 9))
    if cut == 0 or cut == len(units):
        raise ValueError(
            f"train_fraction {train_fraction} on {len(units)} {granularity} units leaves one side empty"
        )
    order = rng(seed).permutation(len(units))
    first = [s for i in order[:cut] for s in units[i]]
    second = [s for i in order[cut:] for s in units[i]]
    return (
        ds.with_sentences(first, f"{ds.name}[:{train_fraction:g}]"),
        ds.with_sentences(second, f"{ds.name}[{train_fraction:g}:]"),
    )


def label_summary(ds: LabeledDataset) -> str:
    counts = ds.class_counts()
    total = int(counts.sum())
    parts = [
        f"{CLASS_NAMES[k]}={counts[k]} ({100.0 * counts[k] / total:.1f}%)" if total else f"{CLASS_NAMES[k]}=0"
        for k in range(len(CLASS_NAMES))
    ]
    unlabeled = len(ds) - total
    return f"{ds.name}: {len(ds)} sentences, " + ", ".join(parts) + (f", unlabeled={unlabeled}" if unlabeled else "")
