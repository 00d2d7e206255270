import json

import numpy as np
import pytest

from entropic_ot.io import InputError, dump_json, read_grid, read_points, write_csv


def test_read_points_with_and_without_header(tmp_path):
    p = tmp_path / "a.csv"
    p.write_text("x1,x2\n0.5,1\n2,3\n")
    np.testing.assert_array_equal(read_points(p), [[0.5, 1], [2, 3]])
    p.write_text("0.5,1\n2,3\n")
    np.testing.assert_array_equal(read_points(p), [[0.5, 1], [2, 3]])


@pytest.mark.parametrize("text", ["", "x\n", "1,2\n3\n", "1,a\n", "1,nan\n"])
def test_read_points_errors(tmp_path, text):
    p = tmp_path / "bad.csv"
    p.write_text(text)
    with pytest.raises(InputError):
        read_points(p)


def test_missing_file(tmp_path):
    with pytest.raises(InputError):
        read_points(tmp_path / "nope.csv")


def test_write_csv_roundtrip(tmp_path):
    p = tmp_path / "out.csv"
    write_csv(p, ["a", "b"], [[0.1, np.int64(2)], [1 / 3, 4]])
    lines = p.read_text().splitlines()
    assert lines[0] == "a,b"
    assert float(lines[2].split(",")[0]) == 1 / 3


def test_read_grid_forms(tmp_path):
    g = read_grid('{"lower": [0, 0], "upper": [1, 1], "resolution": 3}')
    assert g.shape == (9, 2)
    np.testing.assert_array_equal(read_grid("[0.1, 0.2]"), [[0.1], [0.2]])
    f = tmp_path / "g.json"
    f.write_text(json.dumps([[0, 1], [2, 3]]))
    np.testing.assert_array_equal(read_grid(f), [[0, 1], [2, 3]])
    with pytest.raises(InputError):
        read_grid("{not json")
    with pytest.raises(InputError):
        read_grid('{"lower": [0]}')
    with pytest.raises(InputError):
        read_grid("[]")


def test_dump_json_sorted(tmp_path):
    p = tmp_path / "o.json"
    text = dump_json({"b": 1, "a": 2}, p)
    assert text.index('"a"') < text.index('"b"')
    assert json.loads(p.read_text()) == {"a": 2, "b": 1}
