"""Command-line entry point: ``qitineq verify | eval | demo``.

Exit codes: 0 when everything passes, 1 when a verification campaign
records a violation, 2 for usage, parse or precondition errors.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
import time
from pathlib import Path

import numpy as np

from . import linalg
from .algebra import MAP_KINDS, BlockDiagonalElement, DensityElement, TracialMap, make_map, parse_shape
from .campaign import (
    CHECK_IDS,
    DEFAULT_FAMILIES,
    DEFAULT_SHAPES,
    CampaignConfig,
    CampaignResult,
    run_campaign,
)
from .errors import QitIneqError
from .functions import FunctionPair, classical_pair, parse_function
from .instances import PAIR_FAMILIES
from .measures import (
    MeasureContext,
    alpha_context,
    gen_correlation,
    gen_covariance,
    gen_variance,
    skew_information,
    sym_correlation,
)
from .report import DEFAULT_TOLERANCE, margin

EXIT_OK, EXIT_VIOLATION, EXIT_USAGE = 0, 1, 2
SEED_ENV = "QITINEQ_SEED"
DEFAULT_OUT = "qitineq-report.json"
MEASURES = ("cov", "var", "corr", "skew", "sym_corr")
DEMOS = ("heisenberg", "schrodinger", "alpha_chain")
TABLE_WIDTH = 14

SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)


class UsageError(Exception):
    pass


def _fmt(x) -> str:
    if isinstance(x, (float, np.floating)):
        return f"{x:.6g}"
    return str(x)


def format_table(header: list[str], rows: list[list]) -> str:
    widths = [max(TABLE_WIDTH, len(h)) for h in header]
    widths[0] = max([len(header[0])] + [len(_fmt(r[0])) for r in rows])
    lines = ["  ".join(h.rjust(w) if i else h.ljust(w) for i, (h, w) in enumerate(zip(header, widths)))]
    for r in rows:
        cells = [_fmt(v) for v in r]
        lines.append("  ".join(c.rjust(w) if i else c.ljust(w) for i, (c, w) in enumerate(zip(cells, widths))))
    return "\n".join(lines)


def dump_json(obj) -> str:
    # Python's float repr is the shortest string that round-trips exactly
    return json.dumps(obj, indent=2)


# verify

def _split(text: str) -> list[str]:
    return [t.strip() for t in text.split(",") if t.strip()]


def parse_checks(text: str) -> tuple[str, ...]:
    if text.strip() == "all":
        return CHECK_IDS
    ids = _split(text)
    unknown = [c for c in ids if c not in CHECK_IDS]
    if unknown or not ids:
        raise argparse.ArgumentTypeError(
            f"unknown check id(s): {', '.join(unknown) or '(none)'}; choose from {', '.join(CHECK_IDS)} or 'all'"
        )
    return tuple(ids)


def parse_shapes(text: str) -> tuple[tuple[int, ...], ...]:
    try:
        return tuple(parse_shape(s) for s in text.split(";") if s.strip())
    except (ValueError, QitIneqError) as exc:
        raise argparse.ArgumentTypeError(f"bad shape list {text!r}: {exc}") from None


def parse_map_kinds(text: str) -> tuple[str, ...]:
    kinds = tuple(_split(text))
    for k in kinds:
        try:
            make_map(k, (1,))
        except QitIneqError:
            raise argparse.ArgumentTypeError(f"unknown map kind {k!r}; choose from {', '.join(MAP_KINDS)}") from None
    return kinds


def parse_families(text: str) -> tuple[str, ...]:
    fams = tuple(_split(text))
    bad = [f for f in fams if f not in PAIR_FAMILIES]
    if bad or not fams:
        raise argparse.ArgumentTypeError(
            f"unknown pair family: {', '.join(bad) or '(none)'}; choose from {', '.join(PAIR_FAMILIES)}"
        )
    return fams


def config_from_args(args: argparse.Namespace) -> CampaignConfig:
    seed = args.seed
    env = os.environ.get(SEED_ENV)
    if env:
        try:
            seed = int(env, 0)
        except ValueError:
            raise UsageError(f"{SEED_ENV}={env!r} is not an integer") from None
    try:
        return CampaignConfig(
            checks=args.checks,
            instances_per_check=args.instances,
            seed=seed,
            shapes=args.shapes,
            map_kinds=args.map_kinds,
            pair_families=args.pair_families,
            tolerance=args.tolerance,
            output_path=args.out,
        )
    except (ValueError, QitIneqError) as exc:
        raise UsageError(str(exc)) from None


def summary_table(result: CampaignResult) -> str:
    rows = []
    for s in result.summaries.values():
        if s.skipped:
            status = "skipped"
        elif s.violations:
            status = "FAIL"
        elif s.boundary:
            status = "pass (boundary)"
        else:
            status = "pass"
        rows.append(
            [
                s.check_id,
                s.instances,
                s.violations,
                s.boundary,
                s.regenerated,
                float(s.min_margin) if s.instances else "-",
                status,
            ]
        )
    header = ["check_id", "instances", "violations", "boundary", "regenerated", "min_margin", "status"]
    return format_table(header, rows)


def cmd_verify(config: CampaignConfig, fmt: str = "table", stream=None) -> int:
    stream = stream or sys.stdout
    start = time.perf_counter()
    result = run_campaign(config)
    elapsed = time.perf_counter() - start
    doc = result.to_json()
    if config.output_path:
        Path(config.output_path).write_text(dump_json(doc) + "\n")
    if fmt == "json":
        print(dump_json({"summary": doc["summary"], "total_violations": doc["total_violations"]}), file=stream)
    else:
        print(summary_table(result), file=stream)
        print(f"total violations: {result.violations}", file=stream)
    print(f"elapsed: {elapsed:.2f} s", file=sys.stderr)
    return EXIT_VIOLATION if result.violations else EXIT_OK


# eval

def _load_json(source: str, what: str):
    try:
        text = source if source.lstrip().startswith(("{", "[")) else Path(source).read_text()
        return json.loads(text)
    except OSError as exc:
        raise UsageError(f"cannot read {what} from {source!r}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise UsageError(f"{what} is not valid JSON: {exc}") from None


def load_element(source: str, what: str) -> BlockDiagonalElement:
    obj = _load_json(source, what)
    try:
        return BlockDiagonalElement.from_json(obj)
    except (KeyError, TypeError, ValueError) as exc:
        raise UsageError(f"{what} is not matrix or block JSON: {exc}") from None


def load_map(source: str | None, rho: BlockDiagonalElement) -> TracialMap:
    if source is None:
        return make_map("scalar_trace", rho.shape)
    stripped = source.strip()
    if stripped.partition(":")[0] in MAP_KINDS:
        shape = rho.shape
        if stripped.startswith("doubling"):
            if any(n % 2 for n in shape):
                raise UsageError(f"doubling needs even block sizes, rho has shape {shape}")
            shape = tuple(n // 2 for n in shape)
        return make_map(stripped, shape)
    obj = _load_json(source, "map")
    try:
        return TracialMap.from_json(obj)
    except (KeyError, TypeError) as exc:
        raise UsageError(f"map JSON is missing a field: {exc}") from None


def evaluate(measure: str, phi: TracialMap, rho, a, b, pair: FunctionPair) -> BlockDiagonalElement:
    ctx = MeasureContext(phi, rho, pair)
    if measure in ("cov", "corr", "sym_corr") and b is None:
        raise UsageError(f"{measure} needs a second operand (--b)")
    if measure == "cov":
        return gen_covariance(ctx, a, b)
    if measure == "var":
        return gen_variance(ctx, a)
    if measure == "corr":
        return gen_correlation(ctx, a, b)
    if measure == "skew":
        return skew_information(ctx, a)
    return sym_correlation(ctx, a, b)


def cmd_eval(args: argparse.Namespace, stream=None) -> int:
    stream = stream or sys.stdout
    rho = load_element(args.rho, "rho")
    a = load_element(args.a, "A")
    b = load_element(args.b, "B") if args.b else None
    try:
        pair = FunctionPair(parse_function(args.f), parse_function(args.g))
    except ValueError as exc:
        raise UsageError(f"bad function spec: {exc}") from None
    phi = load_map(args.map, rho)
    value = evaluate(args.measure, phi, rho, a, b, pair)
    print(dump_json(linalg.matrix_to_json(value.to_dense())), file=stream)
    return EXIT_OK


# demo

def _qubit(p: float) -> DensityElement:
    phi = make_map("scalar_trace", (2,))
    return DensityElement(BlockDiagonalElement.from_blocks(np.diag([p, 1.0 - p])), phi)


def _real(x: BlockDiagonalElement) -> float:
    return float(x.blocks[0][0, 0].real)


def demo_rows(name: str) -> tuple[list[str], list[list]]:
    """Rows of a qubit demo table; see :func:`cmd_demo`."""
    sx = BlockDiagonalElement.from_blocks(SIGMA_X)
    sy = BlockDiagonalElement.from_blocks(SIGMA_Y)
    rows: list[list] = []
    if name == "alpha_chain":
        density = _qubit(0.75)
        ctx_var = MeasureContext(density.map, density.rho, classical_pair())
        var = _real(gen_variance(ctx_var, sx))
        i_half = _real(skew_information(alpha_context(density.map, density.rho, 0.5), sx))
        for k in range(1, 10):
            alpha = k / 10
            i_alpha = _real(skew_information(alpha_context(density.map, density.rho, alpha), sx))
            rows.append([alpha, i_alpha, i_half, var, i_half - i_alpha, var - i_half])
        return ["alpha", "I_alpha", "I_half", "Var", "half-alpha", "var-half"], rows
    for k in range(1, 20):
        p = k / 20
        density = _qubit(p)
        ctx = MeasureContext(density.map, density.rho, classical_pair())
        var_a, var_b = _real(gen_variance(ctx, sx)), _real(gen_variance(ctx, sy))
        cov = complex(gen_covariance(ctx, sx, sy).blocks[0][0, 0])
        comm = complex(ctx.phi(density.rho @ (sx @ sy - sy @ sx)).blocks[0][0, 0])
        product = var_a * var_b
        bound = abs(comm) ** 2 / 4
        heis = margin([[product - bound]])[0]
        if name == "heisenberg":
            rows.append([p, var_a, var_b, product, bound, heis])
        else:
            schr = margin([[product - cov.real**2 - bound]])[0]
            rows.append([p, product, cov.real**2, bound, schr, heis])
    if name == "heisenberg":
        return ["p", "Var(A)", "Var(B)", "product", "bound", "margin"], rows
    return ["p", "product", "ReCov^2", "bound", "schrodinger", "heisenberg"], rows


def cmd_demo(name: str, stream=None) -> int:
    stream = stream or sys.stdout
    if name not in DEMOS:
        raise UsageError(f"unknown demo {name!r}; choose from {', '.join(DEMOS)}")
    header, rows = demo_rows(name)
    print(format_table(header, rows), file=stream)
    return EXIT_OK


# argument parsing

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qitineq", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="count", default=0, help="log regenerations and progress")
    sub = parser.add_subparsers(dest="command", required=True)

    v = sub.add_parser("verify", help="run margin checkers over seeded random instances")
    v.add_argument("--checks", type=parse_checks, default=CHECK_IDS, help="comma-separated check ids or 'all'")
    v.add_argument("--instances", type=int, default=100, help="instances per check")
    v.add_argument("--seed", type=int, default=42, help=f"master seed ({SEED_ENV} overrides)")
    v.add_argument("--shapes", type=parse_shapes, default=DEFAULT_SHAPES, help='block shapes, e.g. "2,2;3"')
    v.add_argument("--map-kinds", type=parse_map_kinds, default=MAP_KINDS, help="comma-separated map kinds")
    v.add_argument("--pair-families", type=parse_families, default=DEFAULT_FAMILIES, help="comma-separated families")
    v.add_argument("--tolerance", type=float, default=DEFAULT_TOLERANCE, help="allowed negative margin")
    v.add_argument("--out", default=DEFAULT_OUT, help="report file ('' to skip writing)")
    v.add_argument("--format", choices=("json", "table"), default="table", help="stdout summary format")

    e = sub.add_parser("eval", help="evaluate one measure on matrices given as JSON")
    e.add_argument("measure", choices=MEASURES)
    e.add_argument("--rho", required=True, help="density: path or inline matrix/block JSON")
    e.add_argument("--a", required=True, help="first operand")
    e.add_argument("--b", help="second operand (cov, corr, sym_corr)")
    e.add_argument("--f", required=True, help='function spec, e.g. "pow:0.5"')
    e.add_argument("--g", required=True, help='function spec, e.g. "const:1"')
    e.add_argument("--map", help="map JSON (inline or path) or a kind token; default scalar trace")

    d = sub.add_parser("demo", help="print a qubit sweep table")
    d.add_argument("name", help=f"one of {', '.join(DEMOS)}")
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    level = logging.WARNING - 10 * min(args.verbose, 2)
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s")
    try:
        if args.command == "verify":
            return cmd_verify(config_from_args(args), args.format)
        if args.command == "eval":
            return cmd_eval(args)
        return cmd_demo(args.name)
    except UsageError as exc:
        print(f"qitineq: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except QitIneqError as exc:
        print(f"qitineq: error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
