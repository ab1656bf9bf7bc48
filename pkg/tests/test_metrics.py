import numpy as np
import pytest

from redpoctor import mae, mre
from redpoctor.errors import ShapeMismatch
from redpoctor.metrics import UtilityReport, relative_errors, utility_report


def test_mae_identity_and_unit_offset():
    t = np.arange(12.0).reshape(3, 4)
    assert mae(t, t) == 0.0
    assert mae(np.ones((2, 5)), np.zeros((2, 5))) == 1.0


def test_mae_two_by_two():
    assert mae([[1, 2], [3, 4]], [[2, 2], [3, 2]]) == 0.75


def test_mae_empty_and_shape_mismatch():
    assert mae(np.zeros((0, 0)), np.zeros((0, 0))) == 0.0
    with pytest.raises(ShapeMismatch):
        mae(np.zeros((2, 3)), np.zeros((3, 2)))


def test_mre_identity():
    t = np.full((2, 4), 50.0)
    assert mre(t, t) == 0.0


def test_mre_gamma_floor():
    # day total 20000 with gamma fraction 0.0005 -> floor 10; a zero bin released as 5 -> 0.5
    truth = np.array([[0.0, 20000.0]])
    rel = relative_errors(np.array([[5.0, 20000.0]]), truth, 0.0005)
    assert rel[0, 0] == pytest.approx(0.5)
    assert rel[0, 1] == 0.0


def test_mre_uniform_ten_percent():
    assert mre(np.full((3, 144), 110.0), np.full((3, 144), 100.0)) == pytest.approx(0.1)


def test_mre_all_zero_day_uses_absolute_error():
    assert mre(np.array([[2.0, 0.0]]), np.zeros((1, 2))) == 1.0
    with pytest.raises(ValueError):
        mre(np.ones((1, 1)), np.ones((1, 1)), gamma_fraction=0.0)


def test_empty_report():
    r = utility_report([], np.zeros((0, 0)))
    assert r == UtilityReport()
    assert r.to_dict()["days"] == 0
