from .types import FilePathType, RationalType, MatrixType, BoxType
from .dict import dict_deep_update, load_dict_from_file
from .json_schema import DynamicsJSONEncoder, load_schema, validate_with_diagnostics
from .checks import calculate_geometric_ratio, is_cauchy
from .errors import *
from .writers import atomic_write_bytes, write_csv, write_json
