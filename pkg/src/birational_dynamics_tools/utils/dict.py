"""Loading and merging of the plain-dictionary configuration used by the command line."""
import collections.abc
import json
import warnings
from copy import deepcopy
from pathlib import Path

import yaml

from .errors import SpecificationError
from .types import FilePathType


class NoDatesSafeLoader(yaml.SafeLoader):
    """Custom override of yaml Loader class so timestamps stay strings in run manifests."""

    @classmethod
    def remove_implicit_resolver(cls, tag_to_remove):
        """Remove implicit resolvers for a particular tag without modifying resolvers in super classes."""
        if "yaml_implicit_resolvers" not in cls.__dict__:
            cls.yaml_implicit_resolvers = cls.yaml_implicit_resolvers.copy()
        for first_letter, mappings in cls.yaml_implicit_resolvers.items():
            cls.yaml_implicit_resolvers[first_letter] = [
                (tag, regexp) for tag, regexp in mappings if tag != tag_to_remove
            ]


NoDatesSafeLoader.remove_implicit_resolver("tag:yaml.org,2002:timestamp")


def load_dict_from_file(file_path: FilePathType) -> dict:
    """
    Safely load a map specification or sweep from a .json, .yml or .yaml file.

    Malformed files raise SpecificationError carrying the line and column of the problem.
    """
    file_path = Path(file_path)
    if not file_path.is_file():
        raise SpecificationError(f"{file_path} is not a file.")
    if file_path.suffix not in (".json", ".yml", ".yaml"):
        raise SpecificationError(f"{file_path} is not a valid .yml, .yaml or .json file.")

    with open(file=file_path, mode="r", encoding="utf-8") as stream:
        if file_path.suffix in (".yml", ".yaml"):
            try:
                dictionary = yaml.load(stream=stream, Loader=NoDatesSafeLoader)
            except yaml.YAMLError as error:
                mark = getattr(error, "problem_mark", None)
                location = f" (line {mark.line + 1}, column {mark.column + 1})" if mark is not None else ""
                raise SpecificationError(f"{file_path}{location}: {getattr(error, 'problem', error)}") from error
        else:
            try:
                dictionary = json.load(fp=stream)
            except json.JSONDecodeError as error:
                raise SpecificationError(
                    f"{file_path} (line {error.lineno}, column {error.colno}): {error.msg}"
                ) from error
    if not isinstance(dictionary, dict):
        raise SpecificationError(f"{file_path}: top level must be an object, found {type(dictionary).__name__}.")
    return dictionary


def dict_deep_update(d: collections.abc.Mapping, u: collections.abc.Mapping, copy: bool = True) -> dict:
    """
    Perform an update to all nested keys of dictionary d (input) from dictionary u (updating dict).

    Lists are replaced rather than appended, since parameter echoes hold ordered values (box bounds, matrices).

    Parameters
    ----------
    d: dict
        dictionary to update
    u: dict
        dictionary to update from
    copy: bool
        whether to deepcopy the input dict d

    Returns
    -------
    d: dict
        return the updated dictionary
    """
    dict_to_update, dict_with_update_values = d, u
    if not isinstance(dict_to_update, collections.abc.Mapping):
        warnings.warn("input to update should be a dict, returning output")
        return dict_with_update_values

    if copy:
        dict_to_update = deepcopy(dict_to_update)

    for key_to_update, update_values in dict_with_update_values.items():
        if isinstance(update_values, collections.abc.Mapping):
            sub_dict_to_update = dict_to_update.get(key_to_update, dict())
            dict_to_update[key_to_update] = dict_deep_update(sub_dict_to_update, update_values, copy=False)
        elif update_values is not None:
            dict_to_update[key_to_update] = update_values
    return dict_to_update
