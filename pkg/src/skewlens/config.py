"""Flat ``key = value`` experiment configuration.

One assignment per line, ``#`` starts a comment, lists are comma-separated.
Relative paths resolve against the directory of the config file.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, fields
from pathlib import Path
from typing import Any

SELECTION_METRICS = ("positive_f1", "macro_f1")
ENCODERS = ("hash", "embeddings")
_PATH_KEYS = {
    "train_articles", "train_labels", "eval_articles", "eval_labels",
    "test_articles", "test_labels", "embeddings", "lexicon", "stopwords", "output_dir",
}
_OPTIONAL_PATHS = _PATH_KEYS - {"train_articles", "output_dir"}


class ConfigError(ValueError):
    """Invalid or inconsistent configuration (CLI exit code 2)."""


@dataclass(frozen=True)
class ExperimentConfig:
    train_articles: Path | None = None
    train_labels: Path | None = None
    eval_articles: Path | None = None
    eval_labels: Path | None = None
    test_articles: Path | None = None
    test_labels: Path | None = None
    embeddings: Path | None = None
    lexicon: Path | None = None
    stopwords: Path | None = None
    output_dir: Path = Path("runs/default")

    split_fraction: float = 0.75
    split_granularity: str = "sentence"
    seed: int = 0
    seeds: tuple[int, ...] = (0, 1, 2)

    encoder: str = "hash"
    hash_dim: int = 4096
    ngram_max: int = 2

    learning_rate: float = 0.1
    epochs: int = 50
    batch_size: int = 32
    l2: float = 0.0
    minority_weight: float = 1.0

    weights: tuple[float, ...] = (1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 8.0)
    selection_metric: str = "positive_f1"

    augmentation: str = "none"
    deletion_prob: float = 0.1
    synonyms_per_sentence: int = 1
    oversample_ratio: float = 1.0

    similarity_samples: int = 10_000
    similarity_runs: int = 10
    alpha: float = 0.05
    similarity_pairing: str = "type"

    def validate(self, require_files: bool = True) -> "ExperimentConfig":
        if not 0 < self.split_fraction < 1:
            raise ConfigError(f"split_fraction must lie in (0, 1), got {self.split_fraction}")
        if self.split_granularity not in ("sentence", "article"):
            raise ConfigError(f"split_granularity must be sentence or article, got {self.split_granularity!r}")
        if not self.seeds:
            raise ConfigError("seeds must list at least one seed")
        if any(s < 0 for s in (self.seed, *self.seeds)):
            raise ConfigError("seeds must be non-negative")
        if self.encoder not in ENCODERS:
            raise ConfigError(f"encoder must be one of {ENCODERS}, got {self.encoder!r}")
        if self.encoder == "embeddings" and self.embeddings is None:
            raise ConfigError("encoder = embeddings requires an embeddings file")
        if self.hash_dim < 2 or self.hash_dim & (self.hash_dim - 1):
            raise ConfigError(f"hash_dim must be a power of two >= 2, got {self.hash_dim}")
        if self.ngram_max not in (1, 2, 3):
            raise ConfigError(f"ngram_max must be 1, 2 or 3, got {self.ngram_max}")
        if not self.weights or any(w <= 0 for w in self.weights):
            raise ConfigError("weights must be a non-empty list of positive numbers")
        if list(self.weights) != sorted(set(self.weights)):
            raise ConfigError("weights must be strictly increasing")
        if self.selection_metric not in SELECTION_METRICS:
            raise ConfigError(f"selection_metric must be one of {SELECTION_METRICS}, got {self.selection_metric!r}")
        if self.similarity_pairing not in ("type", "token"):
            raise ConfigError(f"similarity_pairing must be type or token, got {self.similarity_pairing!r}")
        if not 0 < self.alpha < 1:
            raise ConfigError(f"alpha must lie in (0, 1), got {self.alpha}")
        if self.minority_weight <= 0:
            raise ConfigError("minority_weight must be positive")
        for name in ("epochs", "batch_size", "similarity_samples", "similarity_runs"):
            if getattr(self, name) < 1:
                raise ConfigError(f"{name} must be >= 1")
        if self.learning_rate <= 0 or self.l2 < 0:
            raise ConfigError("learning_rate must be > 0 and l2 >= 0")
        try:
            from .augmentation import AugmentationConfig

            AugmentationConfig(self.augmentation, self.deletion_prob, self.synonyms_per_sentence, self.oversample_ratio)
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
        if require_files:
            for key in sorted(_PATH_KEYS - {"output_dir"}):
                p = getattr(self, key)
                if p is not None and not p.exists():
                    raise ConfigError(f"{key}: {p} does not exist")
        return self

    def snapshot(self) -> str:
        """Config text that parses back to an equal config; paths are absolute."""
        lines = []
        for f in fields(self):
            value = getattr(self, f.name)
            if value is None:
                continue
            lines.append(f"{f.name} = {_render(value)}")
        return "\n".join(lines) + "\n"


def _render(value: Any) -> str:
    if isinstance(value, Path):
        return str(value.resolve())
    if isinstance(value, tuple):
        return ",".join(_render(v) for v in value)
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _coerce(key: str, raw: str, base: Path) -> Any:
    template = _FIELD_TYPES[key]
    try:
        if key in _PATH_KEYS:
            if raw == "" and key in _OPTIONAL_PATHS:
                return None
            p = Path(raw).expanduser()
            return (p if p.is_absolute() else base / p).resolve()
        if key == "seeds":
            return tuple(int(x) for x in raw.split(",") if x.strip())
        if key == "weights":
            return tuple(float(x) for x in raw.split(",") if x.strip())
        if isinstance(template, int):
            return int(raw)
        if isinstance(template, float):
            return float(raw)
        return raw
    except ValueError:
        raise ConfigError(f"{key}: cannot parse {raw!r}") from None


_FIELD_TYPES = {
    f.name: (f.default if f.default is not dataclasses.MISSING else None) for f in fields(ExperimentConfig)
}


def parse_assignments(lines, base: Path, source: str = "<config>") -> dict[str, Any]:
    values: dict[str, Any] = {}
    for lineno, raw in enumerate(lines, start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{source}:{lineno}: expected 'key = value', got {raw.strip()!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        if key not in _FIELD_TYPES:
            raise ConfigError(f"{source}:{lineno}: unknown key {key!r}")
        values[key] = _coerce(key, value, base)
    return values


def load_config(path: str | Path | None = None, overrides: dict[str, str] | None = None) -> ExperimentConfig:
    """Read ``path`` (if any), apply string ``overrides`` (relative to cwd), return an unvalidated config."""
    values: dict[str, Any] = {}
    if path is not None:
        path = Path(path)
        if not path.is_file():
            raise ConfigError(f"config file not found: {path}")
        values.update(parse_assignments(path.read_text(encoding="utf-8").split("\n"), path.parent.resolve(), str(path)))
    for key, raw in (overrides or {}).items():
        if key not in _FIELD_TYPES:
            raise ConfigError(f"unknown key {key!r}")
        values[key] = _coerce(key, raw, Path.cwd())
    return ExperimentConfig(**values)
