import json
from pathlib import Path
from tempfile import mkdtemp

import numpy as np
import pandas as pd
import pytest

from birational_dynamics_tools.utils import (
    atomic_write_bytes,
    calculate_geometric_ratio,
    is_cauchy,
    write_csv,
    write_json,
)


def test_check_geometric_series():
    assert calculate_geometric_ratio(series=[1.0, 0.5, 0.25, 0.125]) == pytest.approx(0.5)
    assert calculate_geometric_ratio(series=[-3.0, 1.0, -1 / 3]) == pytest.approx(1 / 3)


def test_finitely_supported_series():
    assert calculate_geometric_ratio(series=[0.0, 0.0, 0.0]) == 0.0
    assert calculate_geometric_ratio(series=[2.0, 0.0, 0.0]) == 0.0


def test_is_cauchy():
    terms = 0.5 ** np.arange(20)
    assert is_cauchy(np.cumsum(terms), 0.5)
    assert is_cauchy(np.zeros(5), 0.0)
    assert not is_cauchy(np.arange(10, dtype=float), 1.0)


def test_atomic_write_leaves_no_temporary_files():
    test_dir = Path(mkdtemp())
    file_path = atomic_write_bytes(test_dir / "nested" / "grid.bin", np.arange(4, dtype="<f8").tobytes())
    assert np.fromfile(file_path, dtype="<f8").tolist() == [0.0, 1.0, 2.0, 3.0]
    assert [path.name for path in file_path.parent.iterdir()] == ["grid.bin"]


def test_write_json_and_csv():
    test_dir = Path(mkdtemp())
    write_json(test_dir / "report.json", dict(values=np.array([1.5, 2.5])))
    assert json.loads((test_dir / "report.json").read_text()) == dict(values=[1.5, 2.5])

    write_csv(test_dir / "table.csv", pd.DataFrame(dict(n=[1, 2], term=[1 / 3, 0.25])))
    assert (test_dir / "table.csv").read_text() == "n,term\n1,0.333333333333\n2,0.25\n"
