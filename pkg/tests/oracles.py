"""Reference implementations used as test oracles.

Deliberately naive and independent of the package: no shared helpers, plain
loops, exact rational arithmetic where it is cheap.
"""

from __future__ import annotations

import itertools
import math
from decimal import Decimal, localcontext
from fractions import Fraction


def wilcoxon_bruteforce(diffs) -> tuple[Fraction, float]:
    """(W+, two-sided p) by enumerating every sign assignment of the mid-ranks."""
    d = [x for x in diffs if x != 0]
    n = len(d)
    if n == 0:
        return Fraction(0), 1.0
    mags = sorted(abs(x) for x in d)
    rank_of = {}
    for value in set(mags):
        positions = [i + 1 for i, m in enumerate(mags) if m == value]
        rank_of[value] = Fraction(sum(positions), len(positions))
    ranks = [rank_of[abs(x)] for x in d]
    observed = sum((r for r, x in zip(ranks, d) if x > 0), Fraction(0))
    below = above = 0
    for signs in itertools.product((0, 1), repeat=n):
        w = sum((r for r, s in zip(ranks, signs) if s), Fraction(0))
        below += w <= observed
        above += w >= observed
    total = 2**n
    p = min(Fraction(1), 2 * min(Fraction(below, total), Fraction(above, total)))
    return observed, float(p)


def fnv1a_64_reference(data: bytes) -> int:
    h = 0xCBF29CE484222325
    for byte in data:
        h ^= byte
        h = (h * 0x100000001B3) % (1 << 64)
    return h


def logits_loop(W, b, x) -> list[float]:
    out = []
    for c in range(len(W)):
        acc = float(b[c])
        for j in range(len(x)):
            acc += float(W[c][j]) * float(x[j])
        out.append(acc)
    return out


def weighted_ce_loop(W, b, batch, weights) -> float:
    """Mean over the batch of weight[y] * (logsumexp(logits) - logits[y])."""
    total = 0.0
    for x, y in batch:
        z = logits_loop(W, b, x)
        m = max(z)
        lse = m + math.log(sum(math.exp(v - m) for v in z))
        total += weights[y] * (lse - z[y])
    return total / len(batch)


def confusion_scores(y_true, y_pred, n_classes):
    """Per-class (precision, recall, f1, support) by counting, 0/0 taken as 0."""
    rows = []
    for k in range(n_classes):
        tp = sum(1 for t, p in zip(y_true, y_pred) if t == k and p == k)
        fp = sum(1 for t, p in zip(y_true, y_pred) if t != k and p == k)
        fn = sum(1 for t, p in zip(y_true, y_pred) if t == k and p != k)
        prec = tp / (tp + fp) if tp + fp else 0.0
        rec = tp / (tp + fn) if tp + fn else 0.0
        f1 = 2 * prec * rec / (prec + rec) if prec + rec else 0.0
        rows.append((prec, rec, f1, tp + fn))
    return rows


def _ce_decimal(Wd, bd, batch, weights) -> Decimal:
    total = Decimal(0)
    for x, y in batch:
        xd = [Decimal(float(v)) for v in x]
        z = [bd[c] + sum(Wd[c][j] * xd[j] for j in range(len(xd))) for c in range(len(Wd))]
        m = max(z)
        lse = m + sum((v - m).exp() for v in z).ln()
        total += Decimal(float(weights[y])) * (lse - z[y])
    return total / len(batch)


def numeric_gradient_decimal(W, b, batch, weights, h: str = "1e-5", digits: int = 40):
    """Central differences of the :func:`weighted_ce_loop` loss in ``digits``-digit decimals.

    Float inputs convert to Decimal exactly, so the differences carry no
    float64 cancellation even where the gradient is tiny.
    """
    step = Decimal(h)
    Wd = [[Decimal(float(v)) for v in row] for row in W]
    bd = [Decimal(float(v)) for v in b]
    with localcontext() as ctx:
        ctx.prec = digits
        dW = [[0.0] * len(Wd[0]) for _ in Wd]
        for c in range(len(Wd)):
            for j in range(len(Wd[0])):
                up = [row[:] for row in Wd]
                dn = [row[:] for row in Wd]
                up[c][j] += step
                dn[c][j] -= step
                dW[c][j] = float((_ce_decimal(up, bd, batch, weights) - _ce_decimal(dn, bd, batch, weights)) / (2 * step))
        db = []
        for c in range(len(bd)):
            up, dn = bd[:], bd[:]
            up[c] += step
            dn[c] -= step
            db.append(float((_ce_decimal(Wd, up, batch, weights) - _ce_decimal(Wd, dn, batch, weights)) / (2 * step)))
    return dW, db
