import json
from enum import Enum
from fractions import Fraction
from pathlib import Path
from tempfile import mkdtemp

import numpy as np
import pytest

from birational_dynamics_tools.utils import (
    DynamicsJSONEncoder,
    SpecificationError,
    dict_deep_update,
    load_dict_from_file,
    validate_with_diagnostics,
)


def compare_dicts(a: dict, b: dict):
    assert json.dumps(a, indent=2, sort_keys=True) == json.dumps(b, indent=2, sort_keys=True)


def test_dict_deep_update_1():
    # 1. test the updating of two dicts with all keys and values as immutable elements
    a1 = dict(a=1, b="hello", c=23)
    b1 = dict(a=3, b="goodbye", d="compare")
    result1 = dict_deep_update(a1, b1)
    correct_result = dict(a=3, b="goodbye", c=23, d="compare")
    compare_dicts(result1, correct_result)


def test_dict_deep_update_2():
    # 2. test dict update with values as dictionaries themselves
    a1 = dict(a=1, b="hello", c=23)
    b1 = dict(a=3, b="goodbye", d="compare")

    a2 = dict(a=1, c=a1)
    b2 = dict(a=3, b="compare", c=b1)
    result2 = dict_deep_update(a2, b2)
    correct_result = dict(a=3, b="compare", c=dict_deep_update(a1, b1))
    compare_dicts(result2, correct_result)


def test_dict_deep_update_lists_are_replaced():
    defaults = dict(box=[[-3.0, 3.0]] * 4, resolution=40)
    options = dict(box=[[-1.0, 1.0]] * 4)
    result = dict_deep_update(defaults, options)
    compare_dicts(result, dict(box=[[-1.0, 1.0]] * 4, resolution=40))
    assert defaults["box"] == [[-3.0, 3.0]] * 4


def test_dict_deep_update_skips_unset_options():
    result = dict_deep_update(dict(damping=0.5, starts=100), dict(starts=None, tol=1e-10))
    compare_dicts(result, dict(damping=0.5, starts=100, tol=1e-10))


def test_load_dict_from_file():
    test_dir = Path(mkdtemp())
    specification = dict(family="henon", a="1/2", b="3", twist=dict(side="left", A_inverse=[[1, 0, 0]] * 3))

    json_file_path = test_dir / "henon.json"
    json_file_path.write_text(json.dumps(specification))
    yaml_file_path = test_dir / "henon.yml"
    yaml_file_path.write_text(
        "family: henon\n"
        "a: 1/2\n"
        "b: '3'\n"
        "twist:\n"
        "  side: left\n"
        "  A_inverse: [[1, 0, 0], [1, 0, 0], [1, 0, 0]]\n"
    )
    compare_dicts(load_dict_from_file(file_path=json_file_path), specification)
    compare_dicts(load_dict_from_file(file_path=yaml_file_path), specification)


def test_load_dict_from_file_keeps_dates_as_strings():
    file_path = Path(mkdtemp()) / "run.yaml"
    file_path.write_text("started: 2021-03-04\n")
    assert load_dict_from_file(file_path=file_path) == dict(started="2021-03-04")


@pytest.mark.parametrize(
    "name,text,message",
    [
        ("broken.json", '{"family": "henon",\n "a": }', "line 2"),
        ("broken.yml", "family: henon\na: [1, 2\n", "line 3"),
        ("list.json", "[1, 2, 3]", "top level must be an object"),
        ("spec.txt", "family: henon", "not a valid .yml, .yaml or .json file"),
    ],
)
def test_load_dict_from_file_errors(name, text, message):
    file_path = Path(mkdtemp()) / name
    file_path.write_text(text)
    with pytest.raises(SpecificationError, match=message):
        load_dict_from_file(file_path=file_path)


def test_validate_with_diagnostics_lists_every_field():
    schema = {
        "$schema": "http://json-schema.org/draft-07/schema#",
        "type": "object",
        "required": ["k", "s"],
        "properties": dict(k=dict(type="integer", minimum=1), s=dict(type="integer")),
    }
    validate_with_diagnostics(instance=dict(k=2, s=1), schema=schema)
    with pytest.raises(SpecificationError) as error:
        validate_with_diagnostics(instance=dict(k=0, s="one"), schema=schema, source="map.json")
    lines = str(error.value).splitlines()
    assert len(lines) == 2
    assert lines[0].startswith("map.json: field 'k':")
    assert lines[1].startswith("map.json: field 's':")


def test_missing_field_is_reported_at_root():
    schema = dict(type="object", required=["k"], properties=dict(k=dict(type="integer")))
    with pytest.raises(SpecificationError, match="field '<root>'"):
        validate_with_diagnostics(instance=dict(), schema=schema)


class Side(Enum):
    LEFT = "left"


def test_json_encoder():
    content = dict(
        ratio=Fraction(5, 8),
        value=np.float64(0.25),
        count=np.int64(3),
        array=np.arange(3),
        multiplier=1 + 2j,
        side=Side.LEFT,
        path=Path("out") / "degrees.csv",
    )
    decoded = json.loads(json.dumps(content, cls=DynamicsJSONEncoder))
    assert decoded == dict(
        ratio="5/8",
        value=0.25,
        count=3,
        array=[0, 1, 2],
        multiplier=["1.0", "2.0"],
        side="left",
        path=str(Path("out") / "degrees.csv"),
    )
