"""Reading and writing map specification files."""
from dataclasses import replace
from fractions import Fraction
from typing import Optional

from .birational import BirationalPair, LocusDescription, LocusKind
from .families import cremona_pair, henon_pair, regular_pair_p3, twisted_pair
from .points import normalize
from .polymaps import HomogeneousMap
from ..utils.dict import load_dict_from_file
from ..utils.errors import BirationalDynamicsError, SpecificationError
from ..utils.json_schema import load_schema, validate_with_diagnostics
from ..utils.types import FilePathType
from ..utils.writers import write_json

MAP_SPECIFICATION_SCHEMA = "map_specification_schema.json"


def is_complex_specification(specification: dict) -> bool:
    """True when some coefficient or locus coordinate is given as a (real, imaginary) pair."""
    if "family" in specification:
        return False
    polys = specification.get("forward", []) + specification.get("backward", [])
    if any(isinstance(term.get("c"), list) for poly in polys for term in poly):
        return True
    loci = [specification.get("ind_forward", {}), specification.get("ind_backward", {})]
    return any(isinstance(value, list) for locus in loci for point in locus.get("generators", []) for value in point)


def _polys_from_list(polys: list, label: str) -> HomogeneousMap:
    try:
        return HomogeneousMap.from_rational_terms(
            [[(Fraction(str(term["c"]).strip()), term["e"]) for term in poly] for poly in polys]
        )
    except (ValueError, ZeroDivisionError) as error:
        raise SpecificationError(f"field '{label}': {error}") from error


def _locus_from_dict(locus: dict, label: str) -> LocusDescription:
    try:
        return LocusDescription(
            kind=LocusKind(locus["kind"]),
            generators=tuple(
                normalize(Fraction(str(value).strip()) for value in point) for point in locus["generators"]
            ),
            declared_dimension=locus["dim"],
        )
    except (ValueError, ZeroDivisionError) as error:
        raise SpecificationError(f"field '{label}': {error}") from error


def pair_from_dict(specification: dict, source: str = "input") -> BirationalPair:
    """
    Validate a map specification against the packaged schema and build the pair it describes.

    Family entries ({"family": "henon", "a": ..., "b": ..., "twist": {...}}) are expanded into polynomial form.

    Raises
    ------
    SpecificationError
        With one line per offending field if the specification is malformed or inconsistent.
    """
    validate_with_diagnostics(instance=specification, schema=load_schema(MAP_SPECIFICATION_SCHEMA), source=source)
    if is_complex_specification(specification):
        raise SpecificationError(
            f"{source}: complex coefficients are only accepted by the numerical commands (green, energy, mugrid, "
            "periodic, equidist)."
        )
    try:
        if "family" in specification:
            return _pair_from_family(specification)
        pair = BirationalPair(
            forward=_polys_from_list(specification["forward"], "forward"),
            backward=_polys_from_list(specification["backward"], "backward"),
            s=specification["s"],
            ind_forward=_locus_from_dict(specification["ind_forward"], "ind_forward"),
            ind_backward=_locus_from_dict(specification["ind_backward"], "ind_backward"),
            name=specification.get("name"),
        )
    except SpecificationError as error:
        raise SpecificationError(f"{source}: {error}") from error
    except BirationalDynamicsError as error:
        raise SpecificationError(f"{source}: {type(error).__name__}: {error}") from error
    declared = dict(k=pair.k, degree_forward=pair.d, degree_backward=pair.delta)
    mismatches = [
        f"{source}: field '{key}': declared {specification[key]}, found {value}"
        for key, value in declared.items()
        if specification[key] != value
    ]
    if mismatches:
        raise SpecificationError("\n".join(mismatches))
    return pair


def _pair_from_family(specification: dict) -> BirationalPair:
    family = specification["family"]
    if family == "henon":
        pair = henon_pair(a=Fraction(str(specification.get("a", 1))), b=Fraction(str(specification.get("b", 1))))
    elif family == "cremona":
        pair = cremona_pair()
    else:
        pair = regular_pair_p3()
    twist = specification.get("twist")
    if twist is not None:
        A_inverse = [[Fraction(str(entry)) for entry in row] for row in twist["A_inverse"]]
        pair = twisted_pair(pair, A_inverse=A_inverse, side=twist.get("side", "right"))
    if specification.get("name"):
        pair = replace(pair, name=specification["name"])
    return pair


def load_pair(file_path: FilePathType) -> BirationalPair:
    """Load a map specification from a .json, .yml or .yaml file."""
    return pair_from_dict(load_dict_from_file(file_path=file_path), source=str(file_path))


def _poly_to_list(F: HomogeneousMap) -> list:
    return [[dict(c=str(coefficient), e=list(exponents)) for coefficient, exponents in poly] for poly in F.polys]


def _locus_to_dict(locus: LocusDescription) -> dict:
    return dict(
        kind=locus.kind.value,
        generators=[point.to_strings() for point in locus.generators],
        dim=locus.declared_dimension,
    )


def pair_to_dict(pair: BirationalPair, name: Optional[str] = None) -> dict:
    """Polynomial form of a pair, with coefficients and coordinates as decimal strings."""
    specification = dict(
        k=pair.k,
        degree_forward=pair.d,
        degree_backward=pair.delta,
        s=pair.s,
        forward=_poly_to_list(pair.forward),
        backward=_poly_to_list(pair.backward),
        ind_forward=_locus_to_dict(pair.ind_forward),
        ind_backward=_locus_to_dict(pair.ind_backward),
    )
    name = name or pair.name
    if name:
        specification = dict(name=name, **specification)
    return specification


def dump_pair(pair: BirationalPair, file_path: FilePathType):
    write_json(file_path, pair_to_dict(pair))
