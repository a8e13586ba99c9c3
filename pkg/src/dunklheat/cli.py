"""Batch verification front-end.

Each subcommand sweeps one claim suite over a configurable grid and emits one
row per checked point, as JSON lines (canonical) or CSV (a fixed-column
projection of the same rows).  Every row carries claim_id, grid_point, lhs,
rhs, deficit, tol, pass, extra; the rows are sorted by claim and grid point,
so output is deterministic for a fixed configuration and seed.

Exit status: 0 when every row passes, 1 on any violation, 2 for
configuration errors, 3 when quadrature fails to converge (the offending
grid point is named on stderr).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import dataclass
from datetime import datetime, timezone

import numpy as np

from .inequalities import (
    VerificationReport,
    gradient_form_check,
    harnack_check,
    liyau_functional,
    log_convexity_check,
    log_convexity_midpoint_check,
    f_of_a,
    h_of_a,
)
from .kernel import log_gaussian_mass, log_kernel_derivatives
from .operators import (
    PSI_CUBE,
    PSI_EXP,
    PSI_LOG,
    PSI_SQUARE,
    MultiplicityZ2,
    ScalarField,
    chain_rule_residual,
    pi_psi,
)
from .quadrature import ConvergenceError, DomainError
from .semigroup import (
    InitialDatum,
    MeasureConvention,
    bump_profile,
    chapman_kolmogorov_check,
    heat_residual,
    liyau_for_solution,
    normalization_check,
    semigroup_solution,
    two_bump_profile,
)

__all__ = ["RunConfig", "main", "run"]

_COLUMNS = ("claim_id", "grid_point", "lhs", "rhs", "deficit", "tol", "pass", "extra")
_COMMANDS = (
    "kernel-eval",
    "liyau-scan",
    "solution-scan",
    "harnack-scan",
    "semigroup-check",
    "claims-verify",
    "report",
)
_DEFAULT_KAPPA = (0.5, 1.5)
_DEFAULT_T = (0.01, 0.1, 1.0, 10.0)
_DEFAULT_COORDS = (-3.0, -1.0, 0.0, 1.0, 3.0)
_EQUALITY_FLAG = 1e-8


@dataclass(frozen=True)
class RunConfig:
    """One validated CLI invocation."""

    command: str
    kappa: tuple[float, ...]
    t_grid: tuple[float, ...]
    coord_grid: tuple[float, ...]
    tol: float
    max_nodes: int
    seed: int
    augment: int
    output_format: str
    output_path: str | None
    reproducible: bool
    c_scale: float

    def __post_init__(self):
        if self.command not in _COMMANDS:
            raise DomainError(f"unknown command {self.command!r}")
        MultiplicityZ2.of(self.kappa)  # validates length and values
        if not self.t_grid or not self.coord_grid:
            raise DomainError("time and coordinate grids must be nonempty")
        for t in self.t_grid:
            if not (math.isfinite(t) and t > 0.0):
                raise DomainError(f"times must be finite and positive, got {t!r}")
        for c in self.coord_grid:
            if not math.isfinite(c):
                raise DomainError(f"coordinates must be finite, got {c!r}")
        if not (math.isfinite(self.tol) and self.tol > 0.0):
            raise DomainError(f"tol must be positive, got {self.tol!r}")
        if self.max_nodes < 64:
            raise DomainError(f"max-nodes below 64 cannot converge, got {self.max_nodes}")
        if self.augment < 0:
            raise DomainError(f"augment must be nonnegative, got {self.augment}")
        if self.output_format not in ("json-lines", "csv"):
            raise DomainError(f"unknown format {self.output_format!r}")
        if not (math.isfinite(self.c_scale) and self.c_scale > 0.0):
            raise DomainError(f"normalizer scale must be positive, got {self.c_scale!r}")

    @property
    def dimension(self) -> int:
        return len(self.kappa)

    @property
    def points(self) -> list[tuple[float, ...]]:
        """The coordinate grid tensored to dimension d."""
        grids = np.meshgrid(*([np.asarray(self.coord_grid)] * self.dimension), indexing="ij")
        return [tuple(float(g.flat[i]) for g in grids) for i in range(grids[0].size)]

    @property
    def convention(self) -> MeasureConvention | None:
        """None for the built-in convention; a scaled normalizer otherwise
        (the deliberate-failure hook for negative-control tests)."""
        if self.c_scale == 1.0:
            return None
        shift = math.log(self.c_scale)
        return MeasureConvention(
            weight_exponent=lambda k: 2.0 * k,
            log_normalizer=lambda k: log_gaussian_mass(k) + shift,
        )


# ---------------------------------------------------------------------------
# row assembly


def _row(report: VerificationReport, extra: dict | None = None) -> dict:
    return {
        "claim_id": report.claim_id,
        "grid_point": _plain(report.grid_point),
        "lhs": report.lhs,
        "rhs": report.rhs,
        "deficit": report.deficit,
        "tol": report.tolerance,
        "pass": report.passed,
        "extra": extra or {},
    }


def _plain(value):
    """Tuples to lists, numpy scalars to floats: JSON-ready grid points."""
    if isinstance(value, (tuple, list, np.ndarray)):
        return [_plain(v) for v in value]
    if isinstance(value, (np.floating, np.integer)):
        return float(value)
    return value


def _sort_key(row: dict):
    def flatten(value):
        if isinstance(value, list):
            out = []
            for v in value:
                out.extend(flatten(v))
            return out
        if isinstance(value, (int, float)):
            return [(0, float(value))]
        return [(1, str(value))]

    return (row["claim_id"], flatten(row["grid_point"]))


def _at_point(point, fn):
    try:
        return fn()
    except ConvergenceError as e:
        raise ConvergenceError(f"{e} [grid point {_plain(point)}]") from e


# ---------------------------------------------------------------------------
# suites


def _kernel_eval(cfg: RunConfig) -> list[dict]:
    rows = []
    for t in cfg.t_grid:
        for x in cfg.points:
            for y in cfg.points:
                point = (t, x, y)
                kp = _at_point(point, lambda: log_kernel_derivatives(t, x, y, cfg.kappa))
                p = kp.p if math.isfinite(kp.p) else None
                report = VerificationReport.build(
                    "kernel_point", point, lhs=kp.log_p, rhs=kp.log_p, tolerance=cfg.tol
                )
                rows.append(
                    _row(
                        report,
                        extra={
                            "p": p,
                            "grad_x_log_p": _plain(kp.grad_x_log_p),
                            "hess_diag_x_log_p": _plain(kp.hess_diag_x_log_p),
                            "dt_log_p": kp.dt_log_p,
                        },
                    )
                )
    return rows


def _liyau_points(cfg: RunConfig):
    for t in cfg.t_grid:
        for x in cfg.points:
            for y in cfg.points:
                yield t, x, y
    if cfg.augment:
        rng = np.random.default_rng(cfg.seed)
        for _ in range(cfg.augment):
            t = float(10.0 ** rng.uniform(-2.0, 2.0))
            x = tuple(float(v) for v in rng.uniform(-10.0, 10.0, cfg.dimension))
            y = tuple(float(v) for v in rng.uniform(-10.0, 10.0, cfg.dimension))
            yield t, x, y


def _liyau_scan(cfg: RunConfig) -> list[dict]:
    rows = []
    for t, x, y in _liyau_points(cfg):
        point = (t, x, y)
        dec = _at_point(point, lambda: liyau_functional(t, x, y, cfg.kappa))
        report = dec.report(cfg.tol)
        rows.append(
            _row(
                report,
                extra={
                    "equality": bool(report.deficit <= _EQUALITY_FLAG),
                    "a": [c.a for c in dec.coordinates],
                    "variance_term": [c.variance_term for c in dec.coordinates],
                    "f_value": [c.f_value for c in dec.coordinates],
                    "i_value": [c.i_value for c in dec.coordinates],
                },
            )
        )
    return rows


def _initial_data(d: int) -> dict[str, InitialDatum]:
    tail = [bump_profile(0.5, 1.0, power=3) for _ in range(d - 1)]
    return {
        "bump": InitialDatum.bumps([0.0] * d, [1.5], power=3),
        "offset_bump": InitialDatum.bumps([0.8 * (-1.0) ** i for i in range(d)], [1.2], power=3),
        "two_bump": InitialDatum((two_bump_profile(-2.0, 2.0, 0.8, power=3), *tail)),
    }


def _solution_scan(cfg: RunConfig) -> list[dict]:
    rows = []
    lam = sum(cfg.kappa)
    for name, datum in _initial_data(cfg.dimension).items():
        field = semigroup_solution(datum, cfg.kappa, max_nodes=cfg.max_nodes)
        for t in cfg.t_grid:
            beta = (cfg.dimension + 2.0 * lam) / (2.0 * t)
            for x in cfg.points:
                point = (t, x)
                report = _at_point(
                    point,
                    lambda: liyau_for_solution(
                        datum, t, x, cfg.kappa, tol=cfg.tol, max_nodes=cfg.max_nodes
                    ),
                )
                rows.append(_row(report, extra={"datum": name}))
                report = _at_point(
                    point, lambda: gradient_form_check(field, t, x, beta, tol=cfg.tol)
                )
                rows.append(_row(report, extra={"datum": name, "beta": beta}))
    return rows


def _harnack_scan(cfg: RunConfig) -> list[dict]:
    rows = []
    count = cfg.augment if cfg.augment else 200
    datum = _initial_data(cfg.dimension)["bump"]
    field = semigroup_solution(datum, cfg.kappa, max_nodes=cfg.max_nodes)
    lam = sum(cfg.kappa)
    rng = np.random.default_rng(cfg.seed)
    for _ in range(count):
        s = float(10.0 ** rng.uniform(-1.0, 0.3))
        t = s * float(rng.uniform(1.05, 8.0))
        x = tuple(float(v) for v in rng.uniform(-2.5, 2.5, cfg.dimension))
        y = tuple(float(v) for v in rng.uniform(-2.5, 2.5, cfg.dimension))
        point = (s, x, t, y)
        report = _at_point(
            point,
            lambda: harnack_check(
                field, s, x, t, y, lambda_kappa=lam, d=cfg.dimension, tol=cfg.tol
            ),
        )
        rows.append(_row(report, extra={"datum": "bump"}))
    return rows


def _time_pairs(t_grid):
    pairs = [(t, t) for t in t_grid]
    pairs.extend(zip(t_grid[:-1], t_grid[1:]))
    return pairs


def _normalization_rows(cfg: RunConfig) -> list[dict]:
    rows = []
    kwargs = {} if cfg.convention is None else {"convention": cfg.convention}
    for t in cfg.t_grid:
        for x in cfg.points:
            point = (t, x)
            report = _at_point(
                point,
                lambda: normalization_check(t, x, cfg.kappa, max_nodes=cfg.max_nodes, **kwargs),
            )
            rows.append(_row(report))
    return rows


def _semigroup_check(cfg: RunConfig) -> list[dict]:
    rows = _normalization_rows(cfg)
    for s, t in _time_pairs(cfg.t_grid):
        for x in cfg.points:
            for y in (x, tuple(-v for v in x)):
                point = (s, t, x, y)
                report = _at_point(
                    point,
                    lambda: chapman_kolmogorov_check(
                        s, t, x, y, cfg.kappa, max_nodes=cfg.max_nodes
                    ),
                )
                rows.append(_row(report))
    reversed_points = list(reversed(cfg.points))
    for t in cfg.t_grid:
        for x, y in zip(cfg.points, reversed_points):
            point = (t, x, y)
            residual = _at_point(point, lambda: heat_residual(t, x, y, cfg.kappa))
            on_hyperplane = any(v == 0.0 for v in x)
            bound = 1e-6 if on_hyperplane else 1e-7
            report = VerificationReport.build(
                "heat_equation", point, lhs=residual, rhs=bound, tolerance=0.0
            )
            rows.append(_row(report, extra={"hyperplane": on_hyperplane}))
    return rows


def _claim_fields(d: int):
    """Built-in scalar fields for the chain-rule and reflection-term rows:
    positive everywhere so every psi in the corpus applies, and two of the
    three are not reflection-invariant."""
    c = np.array([0.3 * (-1.0) ** i for i in range(d)])

    def exponential():
        return ScalarField(
            value=lambda x: math.exp(float(c @ x)),
            gradient=lambda x: math.exp(float(c @ x)) * c,
            hessian_diag=lambda x: math.exp(float(c @ x)) * c * c,
        )

    shift = 0.2

    def shifted_square():
        return ScalarField(
            value=lambda x: 5.0 + float(((np.asarray(x) - shift) ** 2).sum()),
            gradient=lambda x: 2.0 * (np.asarray(x, dtype=float) - shift),
            hessian_diag=lambda x: np.full(d, 2.0),
        )

    def gaussian():
        return ScalarField(
            value=lambda x: math.exp(-0.5 * float(np.asarray(x) @ np.asarray(x))),
            gradient=lambda x: -math.exp(-0.5 * float(np.asarray(x) @ np.asarray(x)))
            * np.asarray(x, dtype=float),
            hessian_diag=lambda x: math.exp(-0.5 * float(np.asarray(x) @ np.asarray(x)))
            * (np.asarray(x, dtype=float) ** 2 - 1.0),
        )

    return {"exponential": exponential(), "shifted_square": shifted_square(), "gaussian": gaussian()}


def _claims_verify(cfg: RunConfig) -> list[dict]:
    rows = []
    kappa_values = sorted(set(cfg.kappa) - {0.0}) or [0.5]

    for k in kappa_values:
        for a in np.linspace(-200.0, 200.0, 41):
            value = f_of_a(float(a), k)
            report = VerificationReport.build(
                "f_nonneg", (float(a), k), lhs=0.0, rhs=value, tolerance=1e-10
            )
            rows.append(_row(report))
        grid = np.linspace(-5.0, 5.0, 101)
        h = [h_of_a(float(a), k) for a in grid]
        for a in grid[grid >= 0.0]:
            gap = abs(h_of_a(float(a), k) + h_of_a(-float(a), k))
            report = VerificationReport.build(
                "h_antisymmetric", (float(a), k), lhs=gap, rhs=0.0, tolerance=1e-10, deficit=-gap
            )
            rows.append(_row(report))
        for i in range(len(grid) - 1):
            report = VerificationReport.build(
                "h_monotone",
                (float(grid[i]), float(grid[i + 1]), k),
                lhs=h[i],
                rhs=h[i + 1],
                tolerance=1e-12,
            )
            rows.append(_row(report))

    fields = _claim_fields(cfg.dimension)
    eval_points = [
        tuple(0.7 * (-1.0) ** i for i in range(cfg.dimension)),
        (0.0,) + tuple(1.1 for _ in range(cfg.dimension - 1)),
    ]
    for name, field in fields.items():
        for x in eval_points:
            value = pi_psi(field, PSI_LOG, x, cfg.kappa)
            report = VerificationReport.build(
                "pi_log_sign", (name, x), lhs=value, rhs=0.0, tolerance=1e-12
            )
            rows.append(_row(report))
            for psi in (PSI_LOG, PSI_EXP, PSI_SQUARE, PSI_CUBE):
                res = chain_rule_residual(field, psi, x, cfg.kappa)
                normalized = abs(res.lhs - res.rhs) / res.scale
                report = VerificationReport.build(
                    "chain_rule", (name, psi.name, x), lhs=normalized, rhs=1e-8, tolerance=0.0
                )
                rows.append(_row(report, extra={"scale": res.scale}))

    rng = np.random.default_rng(cfg.seed)
    count = cfg.augment if cfg.augment else 50
    for _ in range(count):
        t = float(10.0 ** rng.uniform(-1.0, 1.0))
        x = tuple(float(v) for v in rng.uniform(-5.0, 5.0, cfg.dimension))
        y = tuple(float(v) for v in rng.uniform(-5.0, 5.0, cfg.dimension))
        rows.append(_row(log_convexity_check(t, x, y, cfg.kappa, tol=cfg.tol)))
        z1 = tuple(float(v) for v in rng.uniform(-5.0, 5.0, cfg.dimension))
        z2 = tuple(float(v) for v in rng.uniform(-5.0, 5.0, cfg.dimension))
        rows.append(_row(log_convexity_midpoint_check(t, z1, z2, y, cfg.kappa, tol=cfg.tol)))

    rows.extend(_normalization_rows(cfg))
    return rows


_SUITES = {
    "kernel-eval": _kernel_eval,
    "liyau-scan": _liyau_scan,
    "solution-scan": _solution_scan,
    "harnack-scan": _harnack_scan,
    "semigroup-check": _semigroup_check,
    "claims-verify": _claims_verify,
}


def _report(cfg: RunConfig) -> list[dict]:
    """Aggregate every claim suite into one summary row per claim."""
    collected: dict[str, list[dict]] = {}
    for command in ("liyau-scan", "solution-scan", "harnack-scan", "semigroup-check", "claims-verify"):
        for row in _SUITES[command](cfg):
            collected.setdefault(row["claim_id"], []).append(row)
    rows = []
    for claim_id, claim_rows in collected.items():
        failures = sum(not r["pass"] for r in claim_rows)
        worst = min(r["deficit"] for r in claim_rows)
        rows.append(
            {
                "claim_id": claim_id,
                "grid_point": ["summary"],
                "lhs": float(failures),
                "rhs": 0.0,
                "deficit": worst,
                "tol": 0.0,
                "pass": failures == 0,
                "extra": {"rows": len(claim_rows), "failures": failures, "worst_deficit": worst},
            }
        )
    return rows


def run(config: RunConfig) -> list[dict]:
    """Execute the configured suite and return its rows, sorted."""
    suite = _report if config.command == "report" else _SUITES[config.command]
    rows = suite(config)
    rows.sort(key=_sort_key)
    return rows


# ---------------------------------------------------------------------------
# output


def _meta_line(cfg: RunConfig) -> dict:
    meta = {
        "command": cfg.command,
        "kappa": list(cfg.kappa),
        "t_grid": list(cfg.t_grid),
        "coord_grid": list(cfg.coord_grid),
        "tol": cfg.tol,
        "seed": cfg.seed,
        "columns": list(_COLUMNS),
    }
    if not cfg.reproducible:
        meta["generated"] = datetime.now(timezone.utc).isoformat()
    return meta


def _render(rows: list[dict], cfg: RunConfig) -> str:
    if cfg.output_format == "json-lines":
        lines = [json.dumps({"meta": _meta_line(cfg)}, separators=(",", ":"))]
        lines.extend(json.dumps(row, separators=(",", ":")) for row in rows)
        return "\n".join(lines) + "\n"
    buffer = io.StringIO()
    meta = _meta_line(cfg)
    buffer.write("# " + json.dumps(meta, separators=(",", ":")) + "\n")
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(_COLUMNS)
    for row in rows:
        writer.writerow(
            [
                row["claim_id"],
                json.dumps(row["grid_point"], separators=(",", ":")),
                repr(row["lhs"]),
                repr(row["rhs"]),
                repr(row["deficit"]),
                repr(row["tol"]),
                "pass" if row["pass"] else "fail",
                json.dumps(row["extra"], separators=(",", ":")),
            ]
        )
    return buffer.getvalue()


def _emit(text: str, cfg: RunConfig) -> None:
    if cfg.output_path is None:
        sys.stdout.write(text)
    else:
        with open(cfg.output_path, "w", encoding="utf-8") as handle:
            handle.write(text)


# ---------------------------------------------------------------------------
# argument parsing


_LIST_FLAGS = ("--kappa", "--t", "--coords")


def _join_list_flags(argv: list[str]) -> list[str]:
    """argparse reads a leading dash as a new option, so value lists that
    start with a negative number (--coords -3,-1,0) only parse in the
    --flag=value form; splice the = in so both spellings work."""
    out = []
    queue = list(argv)
    while queue:
        token = queue.pop(0)
        if token in _LIST_FLAGS and queue:
            out.append(f"{token}={queue.pop(0)}")
        else:
            out.append(token)
    return out


def _float_list(text: str) -> tuple[float, ...]:
    try:
        values = tuple(float(part) for part in text.split(",") if part.strip() != "")
    except ValueError as e:
        raise argparse.ArgumentTypeError(f"expected comma-separated reals, got {text!r}") from e
    if not values:
        raise argparse.ArgumentTypeError(f"expected at least one value, got {text!r}")
    return values


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dunklheat",
        description="Verify heat-kernel inequalities for the reflection group Z_2^d over grids.",
    )
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument(
        "--kappa",
        type=_float_list,
        default=_DEFAULT_KAPPA,
        help="comma-separated multiplicities, one per coordinate (default 0.5,1.5)",
    )
    common.add_argument(
        "--t",
        dest="t_grid",
        type=_float_list,
        default=_DEFAULT_T,
        help="comma-separated times (default 0.01,0.1,1,10)",
    )
    common.add_argument(
        "--coords",
        dest="coord_grid",
        type=_float_list,
        default=_DEFAULT_COORDS,
        help="comma-separated coordinate values, tensored to dimension d (default -3,-1,0,1,3)",
    )
    common.add_argument("--tol", type=float, default=1e-9, help="pass tolerance (default 1e-9)")
    common.add_argument(
        "--max-nodes",
        type=int,
        default=512,
        help="node cap per quadrature panel for semigroup integrals (default 512)",
    )
    common.add_argument(
        "--seed", type=int, default=7, help="seed for randomized grid augmentation (default 7)"
    )
    common.add_argument(
        "--augment",
        type=int,
        default=0,
        help="number of random grid points to add (0 keeps suite defaults)",
    )
    common.add_argument(
        "--format",
        dest="output_format",
        choices=("json-lines", "csv"),
        default="json-lines",
        help="output format (default json-lines)",
    )
    common.add_argument("--out", dest="output_path", default=None, help="output file (default stdout)")
    common.add_argument(
        "--reproducible",
        action="store_true",
        help="suppress the generated-at timestamp so output is byte-stable",
    )
    common.add_argument("--c-scale", type=float, default=1.0, help=argparse.SUPPRESS)
    descriptions = {
        "kernel-eval": "print the kernel, its log, and all derivatives at grid points",
        "liyau-scan": "sweep the log-kernel bound and emit per-coordinate decompositions",
        "solution-scan": "verify the bound and gradient form for semigroup solutions",
        "harnack-scan": "verify the two-point Harnack comparison on random tuples",
        "semigroup-check": "verify normalization, the semigroup law, and the heat equation",
        "claims-verify": "verify the scalar ingredient claims behind the main bound",
        "report": "run every claim suite and aggregate pass/fail counts",
    }
    subparsers = parser.add_subparsers(dest="command", required=True)
    for name in _COMMANDS:
        subparsers.add_parser(name, parents=[common], help=descriptions[name])
    return parser


def main(argv=None) -> int:
    if argv is None:
        argv = sys.argv[1:]
    args = _build_parser().parse_args(_join_list_flags(list(argv)))
    try:
        config = RunConfig(
            command=args.command,
            kappa=tuple(args.kappa),
            t_grid=tuple(args.t_grid),
            coord_grid=tuple(args.coord_grid),
            tol=args.tol,
            max_nodes=args.max_nodes,
            seed=args.seed,
            augment=args.augment,
            output_format=args.output_format,
            output_path=args.output_path,
            reproducible=args.reproducible,
            c_scale=args.c_scale,
        )
        rows = run(config)
    except DomainError as e:
        print(f"configuration error: {e}", file=sys.stderr)
        return 2
    except ConvergenceError as e:
        print(f"convergence failure: {e}", file=sys.stderr)
        return 3
    _emit(_render(rows, config), config)
    return 0 if all(row["pass"] for row in rows) else 1
