"""Command line entry point: ``skewlens <subcommand> --config FILE [overrides]``.

Exit codes: 0 success, 2 configuration or usage error, 1 runtime failure.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import experiments as ex
from .classifier import evaluate_model, load_model
from .config import ConfigError, ExperimentConfig, load_config
from .corpus_io import CLASS_NAMES, CorpusFormatError, load_slc_dataset, load_stopwords
from .divergence import corpus_similarity, format_similarity_table
from .metrics import format_report, report_csv


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(f"{self.prog}: {message}")


def _overrides(args) -> dict[str, str]:
    out: dict[str, str] = {}
    for item in args.set or ():
        if "=" not in item:
            raise ConfigError(f"--set expects key=value, got {item!r}")
        key, value = item.split("=", 1)
        out[key.strip()] = value.strip()
    for key in ("seed", "output_dir"):
        if getattr(args, key, None) is not None:
            out[key] = str(getattr(args, key))
    return out


def _config(args, extra: dict[str, str] | None = None) -> ExperimentConfig:
    overrides = _overrides(args)
    overrides.update(extra or {})
    return load_config(args.config, overrides).validate()


def _emit(cfg: ExperimentConfig, artifacts: ex.RunArtifacts, text: str) -> None:
    print(text, end="")
    written = ex.save_run(cfg.output_dir, artifacts)
    print(f"wrote {len(written)} files under {cfg.output_dir}")


def _set_name(articles: Path) -> str:
    articles = articles.resolve()
    return articles.parent.name if articles.name == "articles" else articles.name


def cmd_similarity(args) -> None:
    extra = {k: str(v) for k, v in (("similarity_samples", args.samples), ("similarity_runs", args.runs), ("alpha", args.alpha)) if v is not None}
    if args.a is None and args.b is None:
        cfg = _config(args, extra)
        reports = ex.run_similarity_report(cfg)
    elif args.a is None or args.b is None:
        raise ConfigError("--a and --b must be given together")
    else:
        cfg = _config(args, extra)
        a = load_slc_dataset(args.a, args.a_labels, name=_set_name(args.a))
        b = load_slc_dataset(args.b, args.b_labels, name=_set_name(args.b))
        reports = [
            corpus_similarity(
                a, b, load_stopwords(cfg.stopwords), cfg.similarity_samples, cfg.similarity_runs, cfg.alpha,
                ex.stream_seed(cfg, "similarity_tests"), cfg.similarity_pairing,
            )
        ]
    table = format_similarity_table(reports)
    csv = ex.similarity_csv(reports)
    _emit(cfg, ex.RunArtifacts(config=cfg, tables={"similarity.txt": table, "similarity.csv": csv}), table + csv)


def cmd_train(args) -> None:
    cfg = _config(args)
    results, model = ex.train_and_evaluate(cfg)
    reports, text = {}, []
    for name, res in results.items():
        reports[f"{name}_mean"] = res.mean
        for seed, rep in zip(res.seeds, res.per_seed):
            reports[f"{name}_seed{seed}"] = rep
        text.append(f"{name} (mean over seeds {','.join(map(str, res.seeds))})\n{format_report(res.mean, CLASS_NAMES)}")
    _emit(cfg, ex.RunArtifacts(config=cfg, reports=reports, model=model), "\n".join(text))


def cmd_sweep(args) -> None:
    cfg = _config(args)
    result = ex.run_weight_sweep(cfg)
    table = ex.format_sweep(result)
    _emit(cfg, ex.RunArtifacts(config=cfg, sweep=result, tables={"sweep.txt": table}), table)


def cmd_augment_compare(args) -> None:
    cfg = _config(args)
    rows = ex.run_augmentation_comparison(cfg)
    table = ex.format_augmentation(rows)
    tables = {"augmentation.txt": table, "augmentation.csv": ex.augmentation_csv(rows)}
    _emit(cfg, ex.RunArtifacts(config=cfg, tables=tables), table)


def cmd_eval(args) -> None:
    cfg = _config(args)
    params = load_model(args.model)
    articles = args.articles or cfg.eval_articles
    labels = args.labels or cfg.eval_labels
    if articles is None or labels is None:
        raise ConfigError("eval needs --articles/--labels or eval_articles/eval_labels in the config")
    ds = load_slc_dataset(articles, labels, name="eval")
    rep = evaluate_model(params, ds, ex.build_encoder(cfg))
    table = format_report(rep, CLASS_NAMES)
    _emit(cfg, ex.RunArtifacts(tables={"eval.txt": table, "eval.csv": report_csv(rep)}), table)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="skewlens", description="Imbalanced sentence classification under dataset shift.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def add(name, func, help_text):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", type=Path, help="flat key = value config file")
        p.add_argument("--set", action="append", metavar="KEY=VALUE", help="override a config key (repeatable)")
        p.add_argument("--seed", type=int, help="master seed")
        p.add_argument("--output-dir", dest="output_dir", type=Path, help="run directory")
        p.set_defaults(func=func)
        return p

    p = add("similarity", cmd_similarity, "corpus similarity table")
    p.add_argument("--a", type=Path, help="articles directory of the first set")
    p.add_argument("--a-labels", type=Path, help="labels file of the first set")
    p.add_argument("--b", type=Path, help="articles directory of the second set")
    p.add_argument("--b-labels", type=Path, help="labels file of the second set")
    p.add_argument("--samples", type=int)
    p.add_argument("--runs", type=int)
    p.add_argument("--alpha", type=float)
    add("train", cmd_train, "train once per seed and report")
    add("sweep", cmd_sweep, "minority-weight sweep")
    add("augment-compare", cmd_augment_compare, "compare augmentation treatments")
    p = add("eval", cmd_eval, "evaluate a saved model")
    p.add_argument("--model", type=Path, required=True)
    p.add_argument("--articles", type=Path)
    p.add_argument("--labels", type=Path)
    return parser


def main(argv: list[str] | None = None) -> int:
    try:
        args = build_parser().parse_args(argv)
        args.func(args)
    except (_UsageError, ConfigError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except SystemExit as exc:  # --help
        return int(exc.code or 0)
    except (OSError, ValueError, CorpusFormatError, FloatingPointError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
