from pathlib import Path

import pytest
from jsonschema import Draft7Validator

from birational_dynamics_tools.projcore import cremona_pair, henon_pair, pair_to_dict, regular_pair_p3
from birational_dynamics_tools.utils import load_dict_from_file, load_schema

SPECIFICATIONS = Path(__file__).parent / "map_specifications"


@pytest.mark.parametrize("schema_name", ["map_specification_schema.json", "certification_sweep_schema.json"])
def test_packaged_schemas(schema_name):
    schema = load_dict_from_file(
        file_path=Path(__file__).parent.parent.parent / "src" / "birational_dynamics_tools" / "schemas" / schema_name
    )
    Draft7Validator.check_schema(schema=schema)


@pytest.mark.parametrize("factory", [henon_pair, cremona_pair, regular_pair_p3])
def test_exported_pairs_match_schema(factory):
    validator = Draft7Validator(schema=load_schema("map_specification_schema.json"))
    assert not list(validator.iter_errors(pair_to_dict(factory())))


@pytest.mark.parametrize("file_name", ["henon.yml", "twisted_henon.yml", "zariski_henon.json"])
def test_specification_files_match_schema(file_name):
    validator = Draft7Validator(schema=load_schema("map_specification_schema.json"))
    assert not list(validator.iter_errors(load_dict_from_file(file_path=SPECIFICATIONS / file_name)))


def test_sweep_file_matches_schema():
    validator = Draft7Validator(schema=load_schema("certification_sweep_schema.json"))
    assert not list(validator.iter_errors(load_dict_from_file(file_path=SPECIFICATIONS / "sweep.yml")))
