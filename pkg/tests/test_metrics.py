from pathlib import Path

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from oracles import confusion_scores

from skewlens.metrics import (
    CSV_HEADER,
    ClassScores,
    EvalReport,
    evaluate,
    format_report,
    mean_report,
    report_csv,
)

GOLDEN = Path(__file__).parent / "golden"
P, N = 1, 0


def hand_case() -> EvalReport:
    return evaluate([P, P, N, N], [P, N, N, N])


def test_hand_computed_case():
    r = hand_case()
    assert r.confusion.tolist() == [[2, 0], [1, 1]]
    pos, neg = r.per_class[P], r.per_class[N]
    assert (pos.precision, pos.recall) == (1.0, 0.5)
    assert pos.f1 == 2 / 3
    assert (neg.precision, neg.recall) == (2 / 3, 1.0)
    assert neg.f1 == pytest.approx(0.8, abs=1e-15)
    assert r.macro_f1 == pytest.approx((0.8 + 2 / 3) / 2, abs=1e-15)
    assert round(r.macro_f1, 4) == 0.7333
    assert r.positive_f1 == pos.f1


def test_perfect_predictions():
    r = evaluate([0, 1, 1, 0, 1], [0, 1, 1, 0, 1])
    assert all(c.precision == c.recall == c.f1 == 1.0 for c in r.per_class)
    assert r.macro_f1 == r.weighted_f1 == r.positive_f1 == 1.0


def test_never_predicting_positive():
    r = evaluate([1, 0, 0], [0, 0, 0])
    assert r.per_class[P].precision == 0.0 and r.per_class[P].recall == 0.0 and r.per_class[P].f1 == 0.0


@given(
    st.integers(1, 60).flatmap(
        lambda n: st.tuples(st.lists(st.integers(0, 2), min_size=n, max_size=n), st.lists(st.integers(0, 2), min_size=n, max_size=n))
    )
)
def test_matches_counting_oracle(pair):
    y_true, y_pred = pair
    r = evaluate(y_true, y_pred, n_classes=3)
    ref = confusion_scores(y_true, y_pred, 3)
    for got, (p, rec, f1, sup) in zip(r.per_class, ref):
        assert abs(got.precision - p) <= 1e-12 and abs(got.recall - rec) <= 1e-12 and abs(got.f1 - f1) <= 1e-12
        assert got.support == sup
    assert abs(r.macro_f1 - sum(x[2] for x in ref) / 3) <= 1e-12
    assert abs(r.weighted_f1 - sum(x[2] * x[3] for x in ref) / len(y_true)) <= 1e-12


@pytest.mark.parametrize("y_true, y_pred", [([], []), ([0, 1], [0]), ([-1], [0])])
def test_evaluate_preconditions(y_true, y_pred):
    with pytest.raises(ValueError):
        evaluate(y_true, y_pred)


def test_mean_report_averages_scalars():
    a = evaluate([1, 1, 0, 0], [1, 0, 0, 0])
    b = evaluate([1, 1, 0, 0], [1, 1, 0, 1])
    m = mean_report([a, b])
    assert m.macro_f1 == (a.macro_f1 + b.macro_f1) / 2
    assert m.per_class[1].recall == (a.per_class[1].recall + b.per_class[1].recall) / 2
    assert m.confusion.tolist() == [[1.5, 0.5], [0.5, 1.5]]
    with pytest.raises(ValueError):
        mean_report([])


def test_format_report_golden_hand_case():
    assert format_report(hand_case()) == (GOLDEN / "report_hand_case.txt").read_text(encoding="utf-8")


def averaged_report() -> EvalReport:
    neg = ClassScores(0.83, 0.8801, 0.8541, 612.0)
    pos = ClassScores(0.66, 0.5533, 0.6033, 238.5)
    return EvalReport(
        confusion=np.array([[540.0, 72.0], [106.5, 132.0]]),
        per_class=(neg, pos),
        macro_f1=(neg.f1 + pos.f1) / 2,
        weighted_f1=0.7837,
        positive_f1=pos.f1,
    )


def test_format_report_golden_averaged_runs():
    text = format_report(averaged_report())
    assert text == (GOLDEN / "report_averaged_runs.txt").read_text(encoding="utf-8")
    assert "propaganda                 0.6600    0.5533    0.6033" in text


def test_format_report_is_deterministic():
    assert format_report(hand_case()) == format_report(hand_case())


def test_report_csv():
    lines = report_csv(hand_case()).splitlines()
    assert lines[0] == CSV_HEADER
    assert lines[2] == "propaganda,1.000000,0.500000,0.666667,2"
    assert lines[-1] == "positive,1.000000,0.500000,0.666667,2"
