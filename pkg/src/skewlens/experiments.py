"""End-to-end protocols: minority-weight sweep, augmentation comparison, similarity table.

Every protocol derives all randomness from ``cfg.seed`` (splits, augmentation,
similarity sampling) and ``cfg.seeds`` (one training run per seed), so a
config snapshot reproduces a run exactly.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

from ._seeding import derive_seeds
from .augmentation import TECHNIQUES, AugmentationConfig, augment_dataset, load_lexicon
from .classifier import ClassWeights, ModelParams, RepeatedResult, TrainConfig, run_repeated_multi, save_model
from .config import ConfigError, ExperimentConfig
from .corpus_io import LabeledDataset, load_slc_dataset, load_stopwords, split_dataset
from .divergence import CSV_HEADER as SIMILARITY_CSV_HEADER
from .divergence import SimilarityReport, corpus_similarity, report_csv_line
from .features import EmbeddingEncoder, HashingEncoder, load_embeddings
from .metrics import EvalReport, report_csv

SWEEP_CSV_HEADER = "weight,set,precision,recall,f1"
AUGMENT_CSV_HEADER = "technique,in_domain_f1,shifted_f1"


_STREAMS = ("split", "augment", "similarity_pairs", "similarity_tests")


def stream_seed(cfg: ExperimentConfig, name: str) -> int:
    """Child seed of ``cfg.seed`` reserved for one purpose."""
    return derive_seeds(cfg.seed, len(_STREAMS))[_STREAMS.index(name)]


class RunIOError(OSError):
    """Failure writing run artifacts; the message names the offending path."""


@dataclass(frozen=True)
class SweepRow:
    minority_weight: float
    in_domain: EvalReport
    shifted: EvalReport
    in_domain_runs: tuple[EvalReport, ...] = ()
    shifted_runs: tuple[EvalReport, ...] = ()


@dataclass(frozen=True)
class SweepResult:
    rows: tuple[SweepRow, ...]
    best_weight: float
    selection_metric: str = "positive_f1"
    eval_digests: tuple[str, str] = ("", "")


@dataclass(frozen=True)
class AugmentationRow:
    technique: str
    in_domain_f1: float
    shifted_f1: float
    train_size: int
    in_domain_digest: str
    shifted_digest: str


def dataset_digest(ds: LabeledDataset) -> str:
    h = hashlib.sha256()
    for s in ds.sentences:
        h.update(f"{s.article_id}\t{s.index}\t{s.label}\t{s.text}\n".encode("utf-8"))
    return h.hexdigest()


def selection_score(report: EvalReport, metric: str) -> float:
    if metric == "positive_f1":
        return report.positive_f1
    if metric == "macro_f1":
        return report.macro_f1
    raise ValueError(f"unknown selection metric {metric!r}")


def _prf(report: EvalReport, metric: str) -> tuple[float, float, float]:
    """Precision/recall/F1 under the averaging that ``metric`` selects."""
    if metric == "macro_f1":
        return report.macro_precision, report.macro_recall, report.macro_f1
    pos = report.per_class[report.positive]
    return pos.precision, pos.recall, report.positive_f1


def load_named(articles: Path | None, labels: Path | None, name: str) -> LabeledDataset | None:
    if articles is None:
        return None
    return load_slc_dataset(articles, labels, name=name)


def build_encoder(cfg: ExperimentConfig):
    if cfg.encoder == "embeddings":
        return EmbeddingEncoder(load_embeddings(cfg.embeddings))
    return HashingEncoder(cfg.hash_dim, cfg.ngram_max)


def train_config(cfg: ExperimentConfig, minority_weight: float) -> TrainConfig:
    return TrainConfig(
        learning_rate=cfg.learning_rate,
        epochs=cfg.epochs,
        batch_size=cfg.batch_size,
        seed=cfg.seeds[0],
        class_weights=ClassWeights.minority(minority_weight),
        l2=cfg.l2,
    )


@dataclass(frozen=True)
class Splits:
    train: LabeledDataset
    in_domain: LabeledDataset
    shifted: LabeledDataset | None


def prepare_splits(cfg: ExperimentConfig, need_shifted: bool = False) -> Splits:
    """Split the labeled training set once; the same cut is reused by every protocol."""
    if cfg.train_articles is None or cfg.train_labels is None:
        raise ConfigError("train_articles and train_labels are required")
    full = load_slc_dataset(cfg.train_articles, cfg.train_labels, name="train")
    if not full.is_fully_labeled():
        full = full.with_sentences([s for s in full.sentences if s.label is not None])
    if len(full) == 0:
        raise ConfigError("training set has no labeled sentences")
    train, held_out = split_dataset(full, cfg.split_fraction, stream_seed(cfg, "split"), cfg.split_granularity)
    shifted = load_named(cfg.eval_articles, cfg.eval_labels, "eval")
    if shifted is not None:
        shifted.require_labels()
    elif need_shifted:
        raise ConfigError("this protocol needs eval_articles and eval_labels (the shifted evaluation set)")
    return Splits(train.with_sentences(train.sentences, "train-split"), held_out.with_sentences(held_out.sentences, "in-domain"), shifted)


def _augmentation(cfg: ExperimentConfig, technique: str) -> AugmentationConfig:
    return AugmentationConfig(
        technique=technique,
        deletion_prob=cfg.deletion_prob,
        synonyms_per_sentence=cfg.synonyms_per_sentence,
        oversample_ratio=cfg.oversample_ratio,
        seed=stream_seed(cfg, "augment"),
    )


def augmented_train(cfg: ExperimentConfig, train: LabeledDataset, technique: str | None = None) -> LabeledDataset:
    technique = cfg.augmentation if technique is None else technique
    lexicon = load_lexicon(cfg.lexicon) if technique == "synonym" else None
    stopwords = load_stopwords(cfg.stopwords) if technique == "synonym" else frozenset()
    return augment_dataset(train, _augmentation(cfg, technique), lexicon, stopwords)


def _evals(splits: Splits) -> dict[str, LabeledDataset]:
    evals = {"in_domain": splits.in_domain}
    if splits.shifted is not None:
        evals["shifted"] = splits.shifted
    return evals


def train_and_evaluate(cfg: ExperimentConfig) -> tuple[dict[str, RepeatedResult], ModelParams]:
    """Train with ``cfg.minority_weight`` and ``cfg.augmentation`` once per seed.

    Returns results keyed by evaluation set and the model of the first seed.
    """
    splits = prepare_splits(cfg)
    train = augmented_train(cfg, splits.train)
    results = run_repeated_multi(train, _evals(splits), build_encoder(cfg), train_config(cfg, cfg.minority_weight), cfg.seeds)
    return results, results["in_domain"].params[0]


def run_weight_sweep(cfg: ExperimentConfig) -> SweepResult:
    """Train with class weights ``[1, w]`` for each configured ``w``.

    ``best_weight`` maximises the selection metric on the shifted set; ties
    go to the smaller weight.
    """
    splits = prepare_splits(cfg, need_shifted=True)
    train = augmented_train(cfg, splits.train)
    encoder = build_encoder(cfg)
    rows = []
    for w in cfg.weights:
        res = run_repeated_multi(train, _evals(splits), encoder, train_config(cfg, w), cfg.seeds)
        rows.append(SweepRow(w, res["in_domain"].mean, res["shifted"].mean, res["in_domain"].per_seed, res["shifted"].per_seed))
    # compare at the precision written to sweep.csv so the choice is re-derivable from it
    best = max(rows, key=lambda r: (round(selection_score(r.shifted, cfg.selection_metric), 6), -r.minority_weight))
    return SweepResult(
        tuple(rows), best.minority_weight, cfg.selection_metric, (dataset_digest(splits.in_domain), dataset_digest(splits.shifted))
    )


def run_augmentation_comparison(cfg: ExperimentConfig) -> list[AugmentationRow]:
    """One row per treatment, in the order none, synonym, delete, oversample."""
    splits = prepare_splits(cfg, need_shifted=True)
    encoder = build_encoder(cfg)
    tcfg = train_config(cfg, cfg.minority_weight)
    digests = (dataset_digest(splits.in_domain), dataset_digest(splits.shifted))
    rows = []
    for technique in TECHNIQUES:
        train = augmented_train(cfg, splits.train, technique)
        res = run_repeated_multi(train, _evals(splits), encoder, tcfg, cfg.seeds)
        rows.append(
            AugmentationRow(
                technique,
                selection_score(res["in_domain"].mean, cfg.selection_metric),
                selection_score(res["shifted"].mean, cfg.selection_metric),
                len(train),
                *digests,
            )
        )
    return rows


def _configured_sets(cfg: ExperimentConfig) -> list[LabeledDataset]:
    named = [
        load_named(cfg.train_articles, cfg.train_labels, "train"),
        load_named(cfg.eval_articles, cfg.eval_labels, "dev"),
        load_named(cfg.test_articles, cfg.test_labels, "test"),
    ]
    return [d for d in named if d is not None]


def similarity_pairs(datasets: Sequence[LabeledDataset], seed: int) -> list[tuple[LabeledDataset, LabeledDataset]]:
    """Self-similarity splits (50/50 then 25/75 per set) followed by every cross-set pair."""
    split_seeds = iter(derive_seeds(seed, 2 * len(datasets)))
    pairs = []
    for frac, (na, nb) in ((0.5, ("50%", "50%")), (0.25, ("25%", "75%"))):
        for ds in datasets:
            a, b = split_dataset(ds, frac, next(split_seeds), "sentence")
            pairs.append((a.with_sentences(a.sentences, f"{na} {ds.name}"), b.with_sentences(b.sentences, f"{nb} {ds.name}")))
    for i, a in enumerate(datasets):
        for b in datasets[i + 1 :]:
            pairs.append((a, b))
    return pairs


def run_similarity_report(cfg: ExperimentConfig) -> list[SimilarityReport]:
    datasets = _configured_sets(cfg)
    if len(datasets) < 2:
        raise ConfigError("the similarity report needs at least two datasets (train plus eval and/or test)")
    stopwords = load_stopwords(cfg.stopwords)
    pairs = similarity_pairs(datasets, stream_seed(cfg, "similarity_pairs"))
    return [
        corpus_similarity(a, b, stopwords, cfg.similarity_samples, cfg.similarity_runs, cfg.alpha, s, cfg.similarity_pairing)
        for (a, b), s in zip(pairs, derive_seeds(stream_seed(cfg, "similarity_tests"), len(pairs)))
    ]


def sweep_csv(result: SweepResult) -> str:
    lines = [SWEEP_CSV_HEADER]
    for row in result.rows:
        for name, rep in (("in_domain", row.in_domain), ("shifted", row.shifted)):
            p, r, f = _prf(rep, result.selection_metric)
            lines.append(f"{row.minority_weight:g},{name},{p:.6f},{r:.6f},{f:.6f}")
    return "\n".join(lines) + "\n"


def format_sweep(result: SweepResult) -> str:
    head = f"{'weight':>8}  {'in-domain P':>11} {'R':>7} {'F1':>7}   {'shifted P':>9} {'R':>7} {'F1':>7}"
    lines = [f"minority-weight sweep (scores: {result.selection_metric})", head]
    for row in result.rows:
        a = _prf(row.in_domain, result.selection_metric)
        b = _prf(row.shifted, result.selection_metric)
        mark = "  <- best" if row.minority_weight == result.best_weight else ""
        lines.append(f"{row.minority_weight:>8g}  {a[0]:>11.4f} {a[1]:>7.4f} {a[2]:>7.4f}   {b[0]:>9.4f} {b[1]:>7.4f} {b[2]:>7.4f}{mark}")
    lines.append(f"best weight: {result.best_weight:g}")
    return "\n".join(lines) + "\n"


def augmentation_csv(rows: Sequence[AugmentationRow]) -> str:
    return "\n".join([AUGMENT_CSV_HEADER] + [f"{r.technique},{r.in_domain_f1:.6f},{r.shifted_f1:.6f}" for r in rows]) + "\n"


def format_augmentation(rows: Sequence[AugmentationRow]) -> str:
    lines = [f"{'technique':<12}{'train size':>11}{'F1 in-domain':>14}{'F1 shifted':>12}"]
    lines += [f"{r.technique:<12}{r.train_size:>11}{r.in_domain_f1:>14.4f}{r.shifted_f1:>12.4f}" for r in rows]
    return "\n".join(lines) + "\n"


def similarity_csv(reports: Sequence[SimilarityReport]) -> str:
    return "\n".join([SIMILARITY_CSV_HEADER] + [report_csv_line(r) for r in reports]) + "\n"


@dataclass
class RunArtifacts:
    config: ExperimentConfig | None = None
    reports: dict[str, EvalReport] = field(default_factory=dict)
    sweep: SweepResult | None = None
    model: ModelParams | None = None
    tables: dict[str, str] = field(default_factory=dict)


def save_run(path: str | Path, artifacts: RunArtifacts) -> list[Path]:
    """Write config snapshot, per-run report CSVs, sweep CSV, tables and model under ``path``."""
    root = Path(path)
    written: list[Path] = []

    def put(rel: str, text: str) -> None:
        target = root / rel
        try:
            target.parent.mkdir(parents=True, exist_ok=True)
            with open(target, "w", encoding="utf-8", newline="\n") as fh:
                fh.write(text)
        except OSError as exc:
            raise RunIOError(f"cannot write {target}: {exc.strerror or exc}") from exc
        written.append(target)

    if artifacts.config is not None:
        put("config.txt", artifacts.config.snapshot())
    for name, rep in artifacts.reports.items():
        put(f"reports/{name}.csv", report_csv(rep))
    if artifacts.sweep is not None:
        put("sweep.csv", sweep_csv(artifacts.sweep))
        for row in artifacts.sweep.rows:
            for set_name, runs in (("in_domain", row.in_domain_runs), ("shifted", row.shifted_runs)):
                for k, rep in enumerate(runs):
                    put(f"reports/sweep_w{row.minority_weight:g}_{set_name}_run{k}.csv", report_csv(rep))
    for name, text in artifacts.tables.items():
        put(name, text)
    if artifacts.model is not None:
        target = root / "model.txt"
        try:
            root.mkdir(parents=True, exist_ok=True)
            save_model(artifacts.model, target)
        except OSError as exc:
            raise RunIOError(f"cannot write {target}: {exc.strerror or exc}") from exc
        written.append(target)
    return written
