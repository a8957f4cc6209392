"""Corpus similarity by paired word frequencies and the Wilcoxon signed-rank test.

The protocol: pool the word tokens of two corpora, draw ``n`` tokens with
replacement from the pool, look up each drawn word's relative frequency
(per million tokens) in each corpus, and test whether the paired
differences are centred on zero. Repeating with fresh seeds gives a
min/max p-value range and the fraction of runs that do not reject
similarity at level ``alpha``.
"""

from __future__ import annotations

import math
import sys
from collections import Counter
from dataclasses import dataclass, field, replace
from typing import Iterable, Sequence

import numpy as np

from ._seeding import derive_seeds, rng
from .corpus_io import LabeledDataset, tokenize

PER_MILLION = 1e6
EXACT_AUTO_MAX_N = 25
EXACT_MAX_N = 1000
_P_FLOOR = sys.float_info.min


@dataclass(frozen=True)
class FrequencyTable:
    counts: dict[str, int]
    total_tokens: int

    def __post_init__(self) -> None:
        if any(c <= 0 for c in self.counts.values()):
            raise ValueError("frequency table entries must be positive")
        if sum(self.counts.values()) != self.total_tokens:
            raise ValueError("total_tokens must equal the sum of counts")

    @classmethod
    def from_tokens(cls, tokens: Iterable[str]) -> "FrequencyTable":
        counts = Counter(tokens)
        return cls(dict(counts), sum(counts.values()))

    def per_million(self, word: str) -> float:
        return self.counts.get(word, 0) / self.total_tokens * PER_MILLION


@dataclass(frozen=True)
class WilcoxonResult:
    w_plus: float
    w_minus: float
    n_effective: int
    z: float | None
    p_two_sided: float
    mode: str
    degenerate: bool = False


@dataclass(frozen=True)
class SimilarityReport:
    p_min: float
    p_max: float
    runs: int
    fraction_similar: float
    alpha: float
    n_samples: int
    p_values: tuple[float, ...] = field(default=())
    set_a: str = ""
    set_b: str = ""

    @property
    def pct_similar(self) -> float:
        return 100.0 * self.fraction_similar


def word_multiset(ds: LabeledDataset, stopwords: Iterable[str] = frozenset()) -> FrequencyTable:
    stop = frozenset(stopwords)
    return FrequencyTable.from_tokens(t for s in ds.sentences for t in tokenize(s.text, stop))


def sample_words(a: FrequencyTable, b: FrequencyTable, n: int, seed: int) -> list[str]:
    """Draw ``n`` word tokens with replacement from the pooled multiset a + b."""
    if a.total_tokens <= 0 or b.total_tokens <= 0:
        raise ValueError("both frequency tables must contain at least one token")
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    vocab = sorted(set(a.counts) | set(b.counts))
    pooled = np.array([a.counts.get(w, 0) + b.counts.get(w, 0) for w in vocab], dtype=np.int64)
    cumulative = np.cumsum(pooled)
    draws = rng(seed).integers(0, cumulative[-1], size=n)
    return [vocab[i] for i in np.searchsorted(cumulative, draws, side="right")]


def sample_paired_frequencies(a: FrequencyTable, b: FrequencyTable, n: int, seed: int) -> np.ndarray:
    """``(n, 2)`` array of per-million frequencies (in a, in b), one row per drawn token."""
    words = sample_words(a, b, n, seed)
    return np.array([(a.per_million(w), b.per_million(w)) for w in words], dtype=np.float64).reshape(-1, 2)


def midranks(values: np.ndarray) -> np.ndarray:
    """Ascending ranks starting at 1, tied values share the mean of their ranks."""
    values = np.asarray(values)
    order = np.argsort(values, kind="mergesort")
    sorted_vals = values[order]
    ranks = np.empty(len(values), dtype=np.float64)
    i = 0
    while i < len(values):
        j = i
        while j + 1 < len(values) and sorted_vals[j + 1] == sorted_vals[i]:
            j += 1
        ranks[order[i : j + 1]] = (i + j + 2) / 2.0
        i = j + 1
    return ranks


def normal_cdf(z: float) -> float:
    return 0.5 * math.erfc(-z / math.sqrt(2.0))


def _exact_null_distribution(doubled_ranks: np.ndarray) -> np.ndarray:
    """P(2 W+ = s) for s = 0..sum, under independent fair signs on each rank."""
    total = int(doubled_ranks.sum())
    dist = np.zeros(total + 1, dtype=np.float64)
    dist[0] = 1.0
    reach = 0
    for r in doubled_ranks:
        r = int(r)
        shifted = np.zeros_like(dist)
        shifted[r : reach + r + 1] = dist[: reach + 1]
        dist = 0.5 * (dist + shifted)
        reach += r
    return dist


def wilcoxon_signed_rank(pairs, mode: str = "auto") -> WilcoxonResult:
    """Two-sided Wilcoxon signed-rank test on paired observations ``(x, y)``.

    Zero differences are dropped. ``auto`` uses the exact null distribution
    (all 2**n sign flips of the observed mid-ranks) for n <= 25 and the
    tie-corrected normal approximation with 0.5 continuity correction
    otherwise.
    """
    if mode not in ("auto", "exact", "normal"):
        raise ValueError(f"mode must be auto, exact or normal, got {mode!r}")
    arr = np.asarray(pairs, dtype=np.float64)
    if arr.size == 0:
        raise ValueError("pairs must be non-empty")
    arr = arr.reshape(-1, 2)
    if not np.all(np.isfinite(arr)):
        raise ValueError("pairs must be finite")
    d = arr[:, 0] - arr[:, 1]
    d = d[d != 0]
    n = len(d)
    if mode == "auto":
        mode = "exact" if n <= EXACT_AUTO_MAX_N else "normal"
    if n == 0:
        return WilcoxonResult(0.0, 0.0, 0, None, 1.0, mode, degenerate=True)

    ranks = midranks(np.abs(d))
    w_plus = float(ranks[d > 0].sum())
    w_minus = float(ranks[d < 0].sum())

    if mode == "exact":
        if n > EXACT_MAX_N:
            raise ValueError(f"exact mode supports at most {EXACT_MAX_N} nonzero differences, got {n}")
        doubled = np.rint(2.0 * ranks).astype(np.int64)
        dist = _exact_null_distribution(doubled)
        k = int(round(2.0 * w_plus))
        lower = float(dist[: k + 1].sum())
        upper = float(dist[k:].sum())
        p = min(1.0, 2.0 * min(lower, upper))
        return WilcoxonResult(w_plus, w_minus, n, None, p, "exact")

    mu = n * (n + 1) / 4.0
    _, tie_sizes = np.unique(np.abs(d), return_counts=True)
    tie_term = float(np.sum(tie_sizes.astype(np.float64) ** 3 - tie_sizes)) / 48.0
    sigma = math.sqrt(n * (n + 1) * (2 * n + 1) / 24.0 - tie_term)
    dev = w_plus - mu
    # continuity correction moves toward the mean and never past it
    corrected = math.copysign(max(abs(dev) - 0.5, 0.0), dev)
    z = corrected / sigma
    p = min(1.0, max(math.erfc(abs(z) / math.sqrt(2.0)), _P_FLOOR))
    return WilcoxonResult(w_plus, w_minus, n, z, p, "normal")


def paired_frequencies(
    a: FrequencyTable, b: FrequencyTable, n: int, seed: int, pairing: str = "type"
) -> np.ndarray:
    """Pairs fed to the signed-rank test.

    ``token`` keeps one pair per drawn token. ``type`` keeps one pair per
    distinct drawn word: repeated draws of the same word carry no new
    information, and counting them again makes the test reject random
    halves of a single corpus.
    """
    if pairing == "token":
        return sample_paired_frequencies(a, b, n, seed)
    if pairing != "type":
        raise ValueError(f"pairing must be 'type' or 'token', got {pairing!r}")
    words = dict.fromkeys(sample_words(a, b, n, seed))
    return np.array([(a.per_million(w), b.per_million(w)) for w in words], dtype=np.float64).reshape(-1, 2)


def compare_tables(
    a: FrequencyTable,
    b: FrequencyTable,
    n_samples: int = 10_000,
    runs: int = 10,
    alpha: float = 0.05,
    seed: int = 0,
    pairing: str = "type",
    mode: str = "auto",
) -> SimilarityReport:
    if runs < 1:
        raise ValueError(f"runs must be >= 1, got {runs}")
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"alpha must lie in (0, 1), got {alpha}")
    p_values = tuple(
        wilcoxon_signed_rank(paired_frequencies(a, b, n_samples, run_seed, pairing), mode).p_two_sided
        for run_seed in derive_seeds(seed, runs)
    )
    similar = sum(p >= alpha for p in p_values)
    return SimilarityReport(
        p_min=min(p_values),
        p_max=max(p_values),
        runs=runs,
        fraction_similar=similar / runs,
        alpha=alpha,
        n_samples=n_samples,
        p_values=p_values,
    )


def corpus_similarity(
    a: LabeledDataset,
    b: LabeledDataset,
    stopwords: Iterable[str] = frozenset(),
    n_samples: int = 10_000,
    runs: int = 10,
    alpha: float = 0.05,
    seed: int = 0,
    pairing: str = "type",
) -> SimilarityReport:
    """Run the sample-then-test cycle ``runs`` times with seeds derived from ``seed``."""
    report = compare_tables(
        word_multiset(a, stopwords), word_multiset(b, stopwords), n_samples, runs, alpha, seed, pairing
    )
    return replace(report, set_a=a.name, set_b=b.name)


CSV_HEADER = "set_a,set_b,p_min,p_max,pct_similar"


def report_csv_line(r: SimilarityReport) -> str:
    return f"{r.set_a},{r.set_b},{r.p_min:.6E},{r.p_max:.6E},{r.pct_similar:g}"


def format_similarity_table(reports: Sequence[SimilarityReport]) -> str:
    header = f"{'Set 1':<16}{'Set 2':<16}{'p-value (min)':>15}{'p-value (max)':>15}{'% similar':>11}"
    lines = [header, "-" * len(header)]
    for r in reports:
        lines.append(
            f"{r.set_a:<16}{r.set_b:<16}{r.p_min:>15.2E}{r.p_max:>15.2E}{r.pct_similar:>11g}"
        )
    return "\n".join(lines) + "\n"
