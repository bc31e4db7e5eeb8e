"""JSON schema helpers and the JSON encoder used by every export."""
import dataclasses
import json
from enum import Enum
from fractions import Fraction
from pathlib import Path

import numpy as np
from jsonschema import Draft7Validator

from .dict import load_dict_from_file
from .errors import SpecificationError

SCHEMA_FOLDER = Path(__file__).parent.parent / "schemas"


class DynamicsJSONEncoder(json.JSONEncoder):
    def default(self, o):
        # Fractions and big integers are serialized as decimal strings to keep them bit-exact
        if isinstance(o, Fraction):
            return str(o)
        if isinstance(o, complex):
            return [repr(o.real), repr(o.imag)]

        # This should transforms numpy generic integers and floats to python floats
        if isinstance(o, np.generic):
            return o.item()
        if isinstance(o, np.ndarray):
            return o.tolist()
        if isinstance(o, Enum):
            return o.value
        if isinstance(o, Path):
            return str(o)
        if dataclasses.is_dataclass(o):
            return dataclasses.asdict(o)

        # The base-class handles it
        return super().default(o)


def load_schema(schema_name: str) -> dict:
    """Load one of the packaged schemas by file name."""
    return load_dict_from_file(file_path=SCHEMA_FOLDER / schema_name)


def validate_with_diagnostics(instance: dict, schema: dict, source: str = "input"):
    """
    Validate an instance and raise a single SpecificationError listing every violation with its field path.

    Parameters
    ----------
    instance : dict
    schema : dict
    source : str
        Label (usually a file path) prefixed to every diagnostic line.
    """
    validator = Draft7Validator(schema=schema)
    errors = sorted(validator.iter_errors(instance), key=lambda error: list(error.absolute_path))
    if errors:
        lines = []
        for error in errors:
            field = ".".join(str(part) for part in error.absolute_path) or "<root>"
            lines.append(f"{source}: field '{field}': {error.message}")
        raise SpecificationError("\n".join(lines))
