import json
import math

import numpy as np
import pytest

from orbitlap.data import WeightedMatrixData, WeightedVectorData
from orbitlap.formats import ParseError, dumps, read_dataset, read_elements, write_dataset


def test_round_trip_vector(tmp_path):
    rng = np.random.default_rng(0)
    data = WeightedVectorData(rng.standard_normal((4, 3)), rng.exponential(size=4))
    path = tmp_path / "d.csv"
    write_dataset(path, data)
    back = read_dataset(path)
    assert np.array_equal(back.samples, data.samples)
    assert np.array_equal(back.weights, data.weights)
    assert path.read_text().splitlines()[:2] == ["vector,3,1,4", "y_1,y_2,y_3,w"]


def test_round_trip_matrix_row_major(tmp_path):
    x = np.arange(6.0).reshape(1, 2, 3) + 1
    path = tmp_path / "m.csv"
    write_dataset(path, WeightedMatrixData(x, [0.5]))
    lines = path.read_text().splitlines()
    assert lines[1] == "x_1_1,x_1_2,x_1_3,x_2_1,x_2_2,x_2_3,w"
    assert lines[2] == "1,2,3,4,5,6,0.5"
    assert np.array_equal(read_dataset(path).samples, x)


@pytest.mark.parametrize(
    "text, line, column",
    [
        ("scalar,1,1,1\ny_1,w\n1,1\n", 1, 1),
        ("vector,2,1,1\ny_1,w\n1,1\n", 2, None),
        ("vector,2,1,1\ny_1,y_2,w\n1,abc,1\n", 3, 2),
        ("vector,2,1,1\ny_1,y_2,w\n1,2,0\n", 3, 3),
        ("vector,2,1,2\ny_1,y_2,w\n1,2,1\n", 4, None),
        ("vector,2,1,1\ny_1,y_2,w\n1,2\n", 3, None),
        ("vector,2,1,1\ny_1,y_2,w\n1,nan,1\n", 3, 2),
        ("vector,x,1,1\n", 1, 2),
    ],
)
def test_parse_errors(tmp_path, text, line, column):
    path = tmp_path / "bad.csv"
    path.write_text(text)
    with pytest.raises(ParseError) as info:
        read_dataset(path)
    assert (info.value.line, info.value.column) == (line, column)


def test_missing_file(tmp_path):
    with pytest.raises(ParseError):
        read_dataset(tmp_path / "nope.csv")


def test_read_elements(tmp_path):
    path = tmp_path / "e.json"
    path.write_text("[[[1,0],[0,1]],[[0,1],[-1,0]]]")
    mats = read_elements(path)
    assert len(mats) == 2 and mats[1][0, 1] == 1.0
    path.write_text("[[1,2,3]]")
    with pytest.raises(ParseError):
        read_elements(path)
    path.write_text("[[[1,0],[0,1]")
    with pytest.raises(ParseError):
        read_elements(path)


def test_dumps_17_digits():
    text = dumps({"a": 0.1, "b": [1.0 / 3.0], "c": math.inf, "d": np.float64(2.5), "e": np.eye(2)})
    assert '"a": 0.10000000000000001' in text
    assert "0.33333333333333331" in text
    back = json.loads(text)
    assert back["c"] is None and back["e"] == [[1, 0], [0, 1]] and back["b"][0] == 1.0 / 3.0
