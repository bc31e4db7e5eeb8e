"""Atomic writers for every artifact the package produces."""
import json
import os
import tempfile
from pathlib import Path
from typing import Union

import pandas as pd

from .json_schema import DynamicsJSONEncoder
from .types import FilePathType

CSV_FLOAT_FORMAT = "%.12g"


def atomic_write_bytes(file_path: FilePathType, payload: Union[bytes, str]) -> Path:
    """Write payload to a temporary file in the destination folder, then move it into place with os.replace."""
    file_path = Path(file_path)
    file_path.parent.mkdir(parents=True, exist_ok=True)
    if isinstance(payload, str):
        payload = payload.encode("utf-8")
    descriptor, temporary_path = tempfile.mkstemp(dir=file_path.parent, prefix=f".{file_path.name}.", suffix=".tmp")
    try:
        with os.fdopen(descriptor, "wb") as stream:
            stream.write(payload)
            stream.flush()
            os.fsync(stream.fileno())
        os.replace(temporary_path, file_path)
    except BaseException:
        Path(temporary_path).unlink(missing_ok=True)
        raise
    return file_path


def write_json(file_path: FilePathType, content) -> Path:
    text = json.dumps(content, cls=DynamicsJSONEncoder, indent=2, sort_keys=False)
    return atomic_write_bytes(file_path, text + "\n")


def write_csv(file_path: FilePathType, table: pd.DataFrame) -> Path:
    """Write a data frame without index, floats with 12 significant digits."""
    return atomic_write_bytes(file_path, table.to_csv(index=False, float_format=CSV_FLOAT_FORMAT, lineterminator="\n"))
