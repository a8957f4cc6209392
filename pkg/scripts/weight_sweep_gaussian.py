"""Minority-weight sweep on a 2-D Gaussian fixture with a shifted test set.

Prints minority precision, recall and F1 on the in-domain and shifted sets
for each weight, averaged over the seeds.

    python scripts/weight_sweep_gaussian.py [--seed 0] [--weights 1,2,4,8] [--csv out.csv]
"""

from __future__ import annotations

import argparse
from pathlib import Path

from skewlens.classifier import ClassWeights, TrainConfig, run_repeated_multi
from skewlens.features import EmbeddingEncoder
from skewlens.synthetic import gaussian_shift_fixture


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--seeds", default="0,1,2", help="training seeds")
    ap.add_argument("--weights", default="1,2,3,4,6,8")
    ap.add_argument("--epochs", type=int, default=30)
    ap.add_argument("--csv", type=Path)
    args = ap.parse_args()

    fx = gaussian_shift_fixture(args.seed)
    seeds = tuple(int(s) for s in args.seeds.split(","))
    evals = {"in_domain": fx.in_domain, "shifted": fx.shifted}
    rows = []
    for w in (float(s) for s in args.weights.split(",")):
        cfg = TrainConfig(learning_rate=0.5, epochs=args.epochs, batch_size=32, class_weights=ClassWeights.minority(w))
        res = run_repeated_multi(fx.train, evals, EmbeddingEncoder(fx.store), cfg, seeds)
        for name, r in res.items():
            m = r.mean.per_class[1]
            rows.append((w, name, m.precision, m.recall, m.f1))

    print(f"{'weight':>6}  {'set':<10}{'precision':>10}{'recall':>8}{'f1':>8}")
    for w, name, p, r, f in rows:
        print(f"{w:>6g}  {name:<10}{p:>10.4f}{r:>8.4f}{f:>8.4f}")
    if args.csv:
        lines = ["weight,set,precision,recall,f1"] + [f"{w:g},{n},{p:.6f},{r:.6f},{f:.6f}" for w, n, p, r, f in rows]
        args.csv.write_text("\n".join(lines) + "\n")


if __name__ == "__main__":
    main()
