"""Imbalanced sentence classification under train/test distribution shift."""

from .augmentation import AugmentationConfig, augment_dataset, load_lexicon, oversample, random_delete, synonym_replace
from .classifier import ClassWeights, ModelParams, TrainConfig, fit, predict, run_repeated, train
from .config import ConfigError, ExperimentConfig, load_config
from .corpus_io import LabeledDataset, Sentence, load_slc_dataset, load_stopwords, split_dataset, tokenize
from .divergence import SimilarityReport, corpus_similarity, wilcoxon_signed_rank
from .features import EmbeddingEncoder, HashingEncoder, hash_ngrams
from .metrics import EvalReport, evaluate, format_report

__all__ = [
    "AugmentationConfig", "augment_dataset", "load_lexicon", "oversample", "random_delete", "synonym_replace",
    "ClassWeights", "ModelParams", "TrainConfig", "fit", "predict", "run_repeated", "train",
    "ConfigError", "ExperimentConfig", "load_config",
    "LabeledDataset", "Sentence", "load_slc_dataset", "load_stopwords", "split_dataset", "tokenize",
    "SimilarityReport", "corpus_similarity", "wilcoxon_signed_rank",
    "EmbeddingEncoder", "HashingEncoder", "hash_ngrams",
    "EvalReport", "evaluate", "format_report",
]
