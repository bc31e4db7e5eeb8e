"""The `bdt` command-line interface: one subcommand per operation, every run leaving a manifest next to its outputs."""
import hashlib
import json
import sys
import time
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from importlib.metadata import PackageNotFoundError, version
from pathlib import Path
from typing import Dict, List, Optional, Sequence

import click
import pandas as pd

from ...greenc import (
    CProjPoint,
    energy_partial_sum,
    export_grid,
    green_partial,
    load_complex_pair,
    mu_grid_k2,
)
from ...greenc.energy import DEFAULT_MONTE_CARLO_SAMPLES
from ...greenc.grid import MAX_GRID_CELLS
from ...heights import (
    canonical_height,
    hprime_batch,
    lee_admissible,
    lee_scan,
    naive_height,
    sample_points,
    total_c1_constant,
)
from ...padic import (
    DEFAULT_PRECISION,
    DEFAULT_SANITY_N,
    certificate_to_dict,
    certify_stability_henon_A,
    load_sweep,
    sweep_certify,
    zariski_density_check,
)
from ...periodic import (
    equidist_report,
    fixed_points_exact_henon,
    line_mass,
    periodic_points_numeric,
    require_points,
)
from ...periodic.numeric import (
    DAMPING_FACTOR,
    DEFAULT_START_RADIUS,
    DEFAULT_TOLERANCE,
    MAX_HALVINGS,
    MAX_NEWTON_STEPS,
)
from ...projcore import (
    DEFAULT_MONOMIAL_BUDGET,
    degree_sequence,
    dynamical_degree_estimate,
    load_pair,
    normalize,
    stability_evidence,
    validate_pair,
)
from ...projcore.birational import LocusKind
from ...utils import (
    BirationalDynamicsError,
    NoConvergence,
    ResourceLimit,
    SpecificationError,
    dict_deep_update,
    load_dict_from_file,
    write_csv,
    write_json,
)

PACKAGE_NAME = "birational-dynamics-tools"
MANIFEST_SUFFIX = "_manifest.json"
EXIT_OK = 0
EXIT_USAGE = 1
EXIT_VALIDATION = 2
EXIT_RESOURCE = 3
EXIT_NO_CONVERGENCE = 4
LINE_AT_INFINITY = ("1,0,0", "0,1,0")


def tool_version() -> str:
    try:
        return version(PACKAGE_NAME)
    except PackageNotFoundError:
        return "unknown"


def file_digest(file_path) -> str:
    return "sha256:" + hashlib.sha256(Path(file_path).read_bytes()).hexdigest()


@dataclass
class RunManifest:
    """
    Record of one command-line run.

    `argv` replays the run; the input digests let a replay check that it reads byte-identical files.
    """

    subcommand: str
    argv: List[str]
    inputs: Dict[str, str]
    seed: int
    workers: int
    version: str
    wall_time: float
    outputs: Dict[str, str] = field(default_factory=dict)
    parameters: dict = field(default_factory=dict)
    summary: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, content: dict) -> "RunManifest":
        return cls(**content)

    def inputs_unchanged(self) -> bool:
        return all(Path(path).is_file() and file_digest(path) == digest for path, digest in self.inputs.items())


def load_run_manifest(file_path) -> RunManifest:
    return RunManifest.from_dict(load_dict_from_file(file_path=file_path))


class RunContext:
    """Collects the outputs and summary of a subcommand and writes its manifest."""

    def __init__(self, subcommand: str, out: str, seed: int, workers: int, inputs: Sequence[Optional[str]] = ()):
        self.subcommand = subcommand
        self.out = Path(out)
        self.seed = seed
        self.workers = workers
        self.inputs = {str(path): file_digest(path) for path in inputs if path is not None}
        self.outputs: Dict[str, str] = dict()
        self.summary: dict = dict()
        self.started = time.perf_counter()

    def path(self, name: str) -> Path:
        return self.out / name

    def json(self, label: str, name: str, content) -> Path:
        self.outputs[label] = str(write_json(self.path(name), content))
        return self.path(name)

    def csv(self, label: str, name: str, table: pd.DataFrame) -> Path:
        self.outputs[label] = str(write_csv(self.path(name), table))
        return self.path(name)

    def finish(self, **defaults) -> RunManifest:
        """Write <subcommand>_manifest.json; option values override the echoed module defaults."""
        parameters = dict_deep_update(defaults, click.get_current_context().params)
        manifest = RunManifest(
            subcommand=self.subcommand,
            argv=list(click.get_current_context().find_root().obj["argv"]),
            inputs=self.inputs,
            seed=self.seed,
            workers=self.workers,
            version=tool_version(),
            wall_time=time.perf_counter() - self.started,
            outputs=dict(self.outputs),
            parameters=parameters,
            summary=self.summary,
        )
        write_json(self.path(self.subcommand + MANIFEST_SUFFIX), manifest.to_dict())
        return manifest


def parse_rational_point(text: str):
    """'1,-2,1/3' -> the normalized rational point [3 : -6 : 1]."""
    try:
        return normalize(Fraction(value.strip()) for value in text.split(","))
    except (ValueError, ZeroDivisionError) as error:
        raise click.BadParameter(f"'{text}' is not a comma-separated list of rationals ({error}).")


def parse_complex_point(text: str) -> CProjPoint:
    """'1+2j,0,1' -> a point of P^k(C); entries use Python complex literal syntax."""
    try:
        return CProjPoint.from_coords([complex(value.strip().replace(" ", "")) for value in text.split(",")])
    except ValueError as error:
        raise click.BadParameter(f"'{text}' is not a comma-separated list of complex numbers ({error}).")


def _common_options(function):
    """--map, --seed, --workers and --out, shared by every subcommand."""
    options = [
        click.option(
            "--map",
            "map_path",
            default=None,
            help="Map specification file (.json, .yml or .yaml).",
            type=click.Path(exists=True, dir_okay=False),
        ),
        click.option("--seed", default=0, show_default=True, type=int, help="Seed for every random choice."),
        click.option(
            "--workers", default=1, show_default=True, type=click.IntRange(min=1), help="Worker process budget."
        ),
        click.option(
            "--out",
            default=".",
            show_default=True,
            help="Folder receiving outputs and the run manifest.",
            type=click.Path(file_okay=False, writable=True),
        ),
    ]
    for option in reversed(options):
        function = option(function)
    return function


def _require_map(map_path: Optional[str]) -> str:
    if map_path is None:
        raise click.UsageError("Missing option '--map'.")
    return map_path


@click.group()
@click.version_option(version=tool_version(), prog_name="bdt")
def bdt():
    """Exact and numerical tools for the dynamics of birational maps of projective space."""


@bdt.command()
@_common_options
@click.option("--witnesses", default=20, show_default=True, type=click.IntRange(min=1))
@click.option("--stability-n", default=0, show_default=True, type=click.IntRange(min=0))
def validate(map_path, seed, workers, out, witnesses, stability_n):
    """Check a map specification: degrees, loci, dimensions and f^-1 o f = id on random witnesses."""
    record = RunContext("validate", out, seed, workers, inputs=[_require_map(map_path)])
    pair = load_pair(map_path)
    report = validate_pair(pair, witnesses=witnesses, seed=seed)
    content = dict(asdict(report), passed=report.passed)
    point_loci = all(locus.kind is LocusKind.POINT_LIST for locus in (pair.ind_forward, pair.ind_backward))
    if stability_n and point_loci:
        content["stability_evidence"] = stability_evidence(pair, N=stability_n)
    record.json("report", "validation.json", content)
    record.summary = dict(passed=report.passed)
    record.finish()
    if not report.passed:
        raise SpecificationError(f"{map_path}: " + "; ".join(report.messages or ["validation failed"]))


@bdt.command()
@_common_options
@click.option("--max-n", default=6, show_default=True, type=click.IntRange(min=1))
@click.option("--direction", default="forward", type=click.Choice(["forward", "backward"]), show_default=True)
@click.option("--monomial-budget", default=DEFAULT_MONOMIAL_BUDGET, show_default=True, type=click.IntRange(min=1))
def degrees(map_path, seed, workers, out, max_n, direction, monomial_budget):
    """Effective degrees of the first iterates, written as n,degree CSV."""
    record = RunContext("degrees", out, seed, workers, inputs=[_require_map(map_path)])
    pair = load_pair(map_path)
    sequence = degree_sequence(pair, direction=direction, N=max_n, monomial_budget=monomial_budget, seed=seed)
    record.csv("degrees", "degrees.csv", pd.DataFrame(dict(n=range(1, max_n + 1), degree=sequence)))
    record.summary = dict(degrees=sequence, dynamical_degree_estimate=dynamical_degree_estimate(sequence))
    record.finish(common_factor_trials=3)


def _twist_from_specification(map_path: str):
    """(a, b) and A^-1 of a Henon family specification carrying a twist."""
    specification = load_dict_from_file(file_path=map_path)
    load_pair(map_path)
    if specification.get("family") != "henon" or "twist" not in specification:
        raise SpecificationError(f"{map_path}: certification needs a 'henon' family specification with a 'twist'.")
    if specification["twist"].get("side", "right") != "right":
        raise SpecificationError(f"{map_path}: field 'twist.side': certification applies to f o A (side 'right').")
    return (specification.get("a", 1), specification.get("b", 1)), specification["twist"]["A_inverse"]


@bdt.command()
@_common_options
@click.option("--sweep", default=None, type=click.Path(exists=True, dir_okay=False), help="Certification sweep file.")
@click.option("--prime", default=None, type=int, help="Prime p; required with --map.")
@click.option("--sanity-n", default=DEFAULT_SANITY_N, show_default=True, type=click.IntRange(min=0))
@click.option("--precision", default=DEFAULT_PRECISION, show_default=True, type=click.IntRange(min=1))
def certify(map_path, seed, workers, out, sweep, prime, sanity_n, precision):
    """Certify algebraic stability of a twisted Henon map f o A (or of every configuration in a sweep)."""
    if (map_path is None) == (sweep is None):
        raise click.UsageError("Give exactly one of '--map' and '--sweep'.")
    if sweep is not None:
        record = RunContext("certify", out, seed, workers, inputs=[sweep])
        content = load_sweep(sweep)
        configurations = content["configurations"]
        certificates = sweep_certify(configurations, sanity_N=content.get("sanity_N", sanity_n))
        labels = [configuration.get("label", str(index)) for index, configuration in enumerate(configurations)]
        record.json(
            "certificates",
            "certificates.json",
            [dict(label=label, **certificate_to_dict(cert)) for label, cert in zip(labels, certificates)],
        )
        record.summary = dict(verdicts={label: cert.verdict.value for label, cert in zip(labels, certificates)})
    else:
        if prime is None:
            raise click.UsageError("Missing option '--prime'.")
        record = RunContext("certify", out, seed, workers, inputs=[map_path])
        henon_params, A_inverse = _twist_from_specification(map_path)
        certificate = certify_stability_henon_A(
            henon_params, A_inverse, p=prime, sanity_N=sanity_n, precision=precision
        )
        record.json("certificate", "certificate.json", certificate_to_dict(certificate))
        record.summary = dict(verdict=certificate.verdict.value, proof_kind=certificate.proof_kind.value)
    record.finish()


@bdt.command()
@_common_options
@click.option("--prime", required=True, type=int)
@click.option("--n", "N", default=8, show_default=True, type=click.IntRange(min=0))
@click.option(
    "--polynomial",
    default=None,
    help='Homogeneous polynomial P as JSON terms, e.g. \'[["1", [1, 0, 1]], ["-1", [0, 2, 0]]]\'.',
)
@click.option("--precision", default=DEFAULT_PRECISION, show_default=True, type=click.IntRange(min=1))
def density(map_path, seed, workers, out, prime, N, polynomial, precision):
    """Check the p-adic growth inequalities along the backward orbit of a twisted Henon map."""
    record = RunContext("density", out, seed, workers, inputs=[_require_map(map_path)])
    henon_params, A_inverse = _twist_from_specification(map_path)
    P = None
    if polynomial is not None:
        try:
            P = [(Fraction(str(coefficient)), tuple(exponents)) for coefficient, exponents in json.loads(polynomial)]
        except (ValueError, TypeError) as error:
            raise click.BadParameter(f"--polynomial: {error}")
    report = zariski_density_check(henon_params, A_inverse, p=prime, N=N, P=P, precision=precision)
    record.json("report", "density.json", dict(asdict(report), all_hold=report.all_hold))
    record.summary = dict(all_hold=report.all_hold, first_failure=report.first_failure, escape_step=report.escape_step)
    record.finish()


@bdt.command()
@_common_options
@click.option("--point", required=True, help="Homogeneous rational coordinates, comma separated.")
def height(map_path, seed, workers, out, point):
    """Naive height of a rational point, and the lift constants C_1 of the map when one is given."""
    record = RunContext("height", out, seed, workers, inputs=[map_path])
    x = parse_rational_point(point)
    content = dict(point=x.to_strings(), height=naive_height(x))
    if map_path is not None:
        pair = load_pair(map_path)
        content.update(c1_forward=total_c1_constant(pair.forward), c1_backward=total_c1_constant(pair.backward))
    record.json("height", "height.json", content)
    record.summary = dict(height=content["height"])
    record.finish()


@bdt.command()
@_common_options
@click.option("--point", required=True, help="Homogeneous rational coordinates, comma separated.")
@click.option("--direction", default="plus", type=click.Choice(["plus", "minus"]), show_default=True)
@click.option("--cutoff", "cutoff_N", default=12, show_default=True, type=click.IntRange(min=0))
def hcanonical(map_path, seed, workers, out, point, direction, cutoff_N):
    """Canonical height estimate d^-N h(f^N x) with its tail bound."""
    record = RunContext("hcanonical", out, seed, workers, inputs=[_require_map(map_path)])
    x = parse_rational_point(point)
    estimate = canonical_height(load_pair(map_path), x, direction=direction, cutoff_N=cutoff_N)
    record.json("estimate", "hcanonical.json", estimate.to_dict())
    record.summary = dict(value=estimate.value, tail_bound=estimate.tail_bound)
    record.finish()


@bdt.command()
@_common_options
@click.option("--count", default=1000, show_default=True, type=click.IntRange(min=1))
@click.option("--bound", default=100, show_default=True, type=click.IntRange(min=1))
@click.option("--progress", is_flag=True, help="Show a progress bar.")
def lee(map_path, seed, workers, out, count, bound, progress):
    """Scan the Lee defect over random rational points and estimate the constant C."""
    record = RunContext("lee", out, seed, workers, inputs=[_require_map(map_path)])
    report = lee_scan(load_pair(map_path), count=count, bound=bound, seed=seed, display_progress=progress)
    record.csv("scan", "lee_scan.csv", report.to_table())
    record.json("report", "lee.json", report.to_dict())
    record.summary = dict(estimated_C=report.estimated_C, min_defect=report.min_defect)
    record.finish()


@bdt.command()
@_common_options
@click.option("--point", default=None, help="Single point to check; random points are drawn when omitted.")
@click.option("--count", default=100, show_default=True, type=click.IntRange(min=1))
@click.option("--bound", default=100, show_default=True, type=click.IntRange(min=1))
@click.option("--n", "N", default=6, show_default=True, type=click.IntRange(min=1))
@click.option("--lee-constant", default=None, type=click.FloatRange(min=0), help="Defaults to a lee scan estimate.")
@click.option("--lee-count", default=1000, show_default=True, type=click.IntRange(min=1))
def hprime(map_path, seed, workers, out, point, count, bound, N, lee_constant, lee_count):
    """Check the shifted-height recursion h'_n >= (c_n / c_(n-1)) h'_(n-1) along orbits of rational points."""
    record = RunContext("hprime", out, seed, workers, inputs=[_require_map(map_path)])
    pair = load_pair(map_path)
    if lee_constant is None:
        lee_constant = lee_scan(pair, count=lee_count, bound=bound, seed=seed).estimated_C
    if point is not None:
        points = [parse_rational_point(point)]
    else:
        points = sample_points(
            k=pair.k, count=count, bound=bound, seed=seed + 1, exclude=lambda x: not lee_admissible(pair, x)
        )
    reports = hprime_batch(pair, points, N=N, C=lee_constant, workers=workers)
    content = dict(lee_constant=lee_constant, reports=[report.to_dict() for report in reports])
    record.json("reports", "hprime.json", content)
    record.summary = dict(lee_constant=lee_constant, checked=len(reports), passed=sum(r.passed for r in reports))
    record.finish()


@bdt.command()
@_common_options
@click.option("--point", required=True, help="Homogeneous complex coordinates, e.g. '1+2j,0,1'.")
@click.option("--n", "N", default=20, show_default=True, type=click.IntRange(min=0))
def green(map_path, seed, workers, out, point, N):
    """Partial sums of the Green function series at a point."""
    record = RunContext("green", out, seed, workers, inputs=[_require_map(map_path)])
    partial_sums = green_partial(load_complex_pair(map_path).forward, parse_complex_point(point), N)
    record.csv("partial_sums", "green.csv", pd.DataFrame(dict(n=range(N + 1), partial_sum=partial_sums)))
    record.summary = dict(last_partial_sum=partial_sums[-1])
    record.finish()


@bdt.command()
@_common_options
@click.option("--n", "N", default=20, show_default=True, type=click.IntRange(min=1))
@click.option("--side", default="forward", type=click.Choice(["forward", "backward"]), show_default=True)
@click.option(
    "--method",
    default="point-orbit-exact",
    show_default=True,
    type=click.Choice(["point-orbit-exact", "distance-proxy", "monte-carlo"]),
)
@click.option("--samples", default=DEFAULT_MONTE_CARLO_SAMPLES, show_default=True, type=click.IntRange(min=1))
@click.option("--progress", is_flag=True, help="Show a progress bar.")
def energy(map_path, seed, workers, out, N, side, method, samples, progress):
    """Terms and partial sums of one half of the finite energy condition."""
    record = RunContext("energy", out, seed, workers, inputs=[_require_map(map_path)])
    series = energy_partial_sum(
        load_complex_pair(map_path),
        N=N,
        side=side,
        method=method,
        samples=samples,
        seed=seed,
        display_progress=progress,
    )
    record.csv("series", f"energy_{side}.csv", series.to_table())
    record.json("report", f"energy_{side}.json", series.to_dict())
    record.summary = dict(decay_fit=series.decay_fit, is_cauchy=series.is_cauchy, approximate=series.approximate)
    record.finish()


@bdt.command()
@_common_options
@click.option("--n", default=3, show_default=True, type=click.IntRange(min=0))
@click.option("--radius", default=3.0, show_default=True, type=float, help="The box is [-radius, radius]^4.")
@click.option("--resolution", default=40, show_default=True, type=click.IntRange(min=2))
@click.option("--max-cells", default=MAX_GRID_CELLS, show_default=True, type=click.IntRange(min=1))
@click.option("--progress", is_flag=True, help="Show a progress bar.")
def mugrid(map_path, seed, workers, out, n, radius, resolution, max_cells, progress):
    """Grid approximation of the mixed measure mu_n on a box of the affine chart of P^2."""
    record = RunContext("mugrid", out, seed, workers, inputs=[_require_map(map_path)])
    box = ((-radius, radius),) * 4
    grid = mu_grid_k2(
        load_complex_pair(map_path),
        n=n,
        box=box,
        resolution=resolution,
        max_cells=max_cells,
        display_progress=progress,
    )
    paths = export_grid(grid, record.path(f"mu_grid_{n}.bin"))
    record.outputs.update({label: str(path) for label, path in paths.items()})
    record.summary = dict(total_mass=grid.total_mass, clamped_mass_fraction=grid.clamped_mass_fraction)
    record.finish()


def _exact_fixed_points(map_path: str, period: int) -> Optional[list]:
    """Exact fixed points for an untwisted Henon family specification."""
    specification = load_dict_from_file(file_path=map_path)
    if period != 1 or specification.get("family") != "henon" or "twist" in specification:
        return None
    a, b = (Fraction(str(specification.get(key, 1))) for key in ("a", "b"))
    exact = fixed_points_exact_henon(a=a, b=b)
    return exact.to_dict()["points"]


@bdt.command()
@_common_options
@click.option("--n", default=1, show_default=True, type=click.IntRange(min=1))
@click.option("--starts", default=None, type=click.IntRange(min=0), help="Random starts; defaults to 50 d^n.")
@click.option("--tol", default=DEFAULT_TOLERANCE, show_default=True, type=click.FloatRange(min=0, min_open=True))
@click.option("--radius", default=DEFAULT_START_RADIUS, show_default=True, type=float)
@click.option("--progress", is_flag=True, help="Show a progress bar.")
def periodic(map_path, seed, workers, out, n, starts, tol, radius, progress):
    """Periodic points of period n found by multistart damped Newton."""
    record = RunContext("periodic", out, seed, workers, inputs=[_require_map(map_path)])
    point_set = periodic_points_numeric(
        load_complex_pair(map_path), n=n, starts=starts, seed=seed, tol=tol, radius=radius, display_progress=progress
    )
    point_set.exact_points = _exact_fixed_points(map_path, n)
    record.json("points", f"periodic_{n}.json", point_set.to_dict())
    record.summary = dict(count=len(point_set), saddles=sum(point_set.saddle), starts=point_set.starts)
    record.finish(
        damping=DAMPING_FACTOR,
        max_newton_steps=MAX_NEWTON_STEPS,
        max_halvings=MAX_HALVINGS,
        dedup_tol=point_set.dedup_tol,
    )
    require_points(point_set)


@bdt.command()
@_common_options
@click.option("--periods", default="1,2,3,4,5", show_default=True, help="Comma-separated periods, in order.")
@click.option("--grid-n", default=None, type=click.IntRange(min=0), help="Also compare with the grid measure mu_n.")
@click.option("--resolution", default=20, show_default=True, type=click.IntRange(min=2))
@click.option("--eps", default=1e-2, show_default=True, type=click.FloatRange(min=0, min_open=True))
@click.option(
    "--line",
    nargs=2,
    default=LINE_AT_INFINITY,
    show_default=True,
    help="Two complex points spanning the line for line_mass.",
)
@click.option("--tol", default=DEFAULT_TOLERANCE, show_default=True, type=click.FloatRange(min=0, min_open=True))
def equidist(map_path, seed, workers, out, periods, grid_n, resolution, eps, line, tol):
    """Compare the empirical measures of periodic points of several periods with each other and with mu_n."""
    record = RunContext("equidist", out, seed, workers, inputs=[_require_map(map_path)])
    try:
        period_list = [int(value) for value in periods.split(",")]
    except ValueError as error:
        raise click.BadParameter(f"--periods: {error}")
    pair = load_complex_pair(map_path)
    sets = [periodic_points_numeric(pair, n=period, seed=seed, tol=tol) for period in period_list]
    for point_set in sets:
        require_points(point_set)
    grid = None
    if grid_n is not None:
        grid = mu_grid_k2(pair, n=grid_n, resolution=resolution)
    report = equidist_report(sets, grid=grid)
    spanning = tuple(parse_complex_point(point) for point in line)
    masses = {point_set.period: line_mass(point_set, spanning, eps=eps) for point_set in sets}
    record.csv("integrals", "equidist.csv", report.to_table())
    record.json("report", "equidist.json", dict(report.to_dict(), line_mass=masses, eps=eps))
    record.summary = dict(trend_non_increasing=report.trend_non_increasing, line_mass=masses)
    record.finish()


def run(argv: Optional[Sequence[str]] = None) -> int:
    """
    Run a subcommand and return its exit code.

    0 on success, 1 on usage or file errors, 2 on validation failures, 3 when a resource limit is hit and 4 when the
    numerical search does not converge. Failures print a one-line diagnostic (per offending field) on stderr.
    """
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        result = bdt.main(args=argv, prog_name="bdt", standalone_mode=False, obj=dict(argv=argv))
    except click.exceptions.Abort:
        click.echo("Aborted.", err=True)
        return EXIT_USAGE
    except click.ClickException as error:
        error.show()
        return EXIT_USAGE
    except NoConvergence as error:
        click.echo(f"NoConvergence: {error}", err=True)
        return EXIT_NO_CONVERGENCE
    except ResourceLimit as error:
        click.echo(f"ResourceLimit: {error}", err=True)
        return EXIT_RESOURCE
    except BirationalDynamicsError as error:
        click.echo(f"{type(error).__name__}: {error}", err=True)
        return EXIT_VALIDATION
    # --help and --version return their own exit code in non-standalone mode
    return result if isinstance(result, int) else EXIT_OK


def main():
    """Console-script entry point."""
    sys.exit(run())
