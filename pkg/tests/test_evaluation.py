import csv
import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mscf.core import BoundingBox, InvalidArgument
from mscf.evaluation import (
    SequenceResult, cle, fps, iou, precision_curve, success_auc, summarize, write_report,
)

A = BoundingBox(10, 10, 20, 20)


def shifted(box, dx, dy=0.0):
    return BoundingBox(box.x + dx, box.y + dy, box.w, box.h)


def test_cle_examples():
    assert cle(A, A) == 0.0
    assert cle(A, shifted(A, 3, 4)) == 5.0
    b = BoundingBox(1, 2, 5, 7)
    assert cle(A, b) == cle(b, A)


def test_iou_examples():
    assert iou(A, A) == 1.0
    assert iou(A, shifted(A, 100)) == 0.0
    assert iou(BoundingBox(0, 0, 2, 2), BoundingBox(1, 0, 2, 2)) == pytest.approx(1 / 3, abs=1e-15)
    assert iou(A, shifted(A, 20)) == 0.0


def test_precision_examples():
    exact = SequenceResult([A] * 5, [A] * 5)
    curve = precision_curve(exact)
    assert curve.values == [1.0] * 51 and curve.at(20) == 1.0

    far = SequenceResult([shifted(A, 15, 20)] * 4, [A] * 4)
    curve = precision_curve(far)
    assert curve.at(20) == 0.0 and curve.at(25) == 1.0 and curve.at(24) == 0.0

    mixed = SequenceResult([A, shifted(A, 10), shifted(A, 30)], [A] * 3)
    assert precision_curve(mixed).at(20) == pytest.approx(2 / 3)


def test_success_examples():
    perfect = SequenceResult([A] * 6, [A] * 6)
    curve, auc = success_auc(perfect)
    assert auc == 50 / 51
    assert curve.values[-1] == 0.0 and curve.values[0] == 1.0
    assert len(curve.thresholds) == 51 and curve.thresholds[1] == pytest.approx(0.02)

    _, zero = success_auc(SequenceResult([shifted(A, 100)] * 3, [A] * 3))
    assert zero == 0.0

    half = SequenceResult([A, shifted(A, 100)] * 3, [A] * 6)
    assert success_auc(half)[1] == pytest.approx(auc / 2, abs=1e-15)


boxes = st.builds(
    BoundingBox,
    st.floats(-50, 50), st.floats(-50, 50), st.floats(1, 40), st.floats(1, 40),
)


@settings(max_examples=50, deadline=None)
@given(pairs=st.lists(st.tuples(boxes, boxes), min_size=1, max_size=12), seed=st.integers(0, 1000))
def test_curve_monotonicity_and_order_invariance(pairs, seed):
    pred, truth = [p for p, _ in pairs], [t for _, t in pairs]
    res = SequenceResult(pred, truth)
    prec = np.array(precision_curve(res).values)
    succ, auc = success_auc(res)
    assert np.all(np.diff(prec) >= 0) and np.all(np.diff(succ.values) <= 0)
    assert 0.0 <= auc <= 1.0
    order = np.random.default_rng(seed).permutation(len(pairs))
    shuffled = SequenceResult([pred[i] for i in order], [truth[i] for i in order])
    assert success_auc(shuffled)[1] == pytest.approx(auc, abs=1e-15)
    for p, t in pairs:
        assert 0.0 <= iou(p, t) <= 1.0 + 1e-12
        assert iou(p, t) == pytest.approx(iou(t, p), abs=1e-15)


def test_absent_truth_is_excluded():
    res = SequenceResult([A, shifted(A, 100), A], [A, None, A])
    assert res.excluded == 1
    assert precision_curve(res).at(20) == 1.0
    assert summarize(res)["excluded"] == 1


def test_fps_and_summary():
    res = SequenceResult([A] * 4, [A] * 4, [0.1, 0.1, 0.2, 0.1])
    assert fps(res) == pytest.approx(4 / 0.5)
    assert fps(SequenceResult([A], [A], [0.0])) is None
    summary = summarize(res)
    assert summary["precision20"] == 1.0 and summary["auc"] == 50 / 51 and summary["frames"] == 4


def test_length_mismatch():
    with pytest.raises(InvalidArgument):
        SequenceResult([A], [A, A])
    with pytest.raises(InvalidArgument):
        SequenceResult([A], [A], [0.1, 0.2])


def test_report_files(tmp_path):
    res = SequenceResult([A, shifted(A, 3, 4)], [A, A], [0.01, 0.01])
    summary = write_report(res, tmp_path / "run")
    with open(tmp_path / "run_precision.csv") as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == ["threshold", "value"] and len(rows) == 52
    assert float(rows[1 + 5][1]) == 1.0 and float(rows[1 + 4][1]) == 0.5
    with open(tmp_path / "run_success.csv") as fh:
        assert len(list(csv.reader(fh))) == 52
    assert json.loads((tmp_path / "run_summary.json").read_text()) == summary
    assert set(summary) >= {"precision20", "auc", "fps"}
