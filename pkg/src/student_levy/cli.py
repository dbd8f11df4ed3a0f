"""Command-line interface: ``student-levy {mixture,density,tailcheck,sample,verify}``.

Exit codes: 0 success, 1 invalid input, 2 a checked statement or criterion
failed, 3 numerical non-convergence.  Every run writes a JSON manifest next
to its outputs; ``--replay MANIFEST`` re-executes the recorded command line.
"""
from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import math
import os
import sys
import time
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import __version__, _kernels
from .config import QuadratureConfig
from .densities import MixtureDensity, StudentParams, mixture_pdf
from .exactpoly import ProductSpec, expand_product, parse_rational
from .sampling import (
    WalkSpec,
    ks_test,
    mixture_cdf,
    sample_student,
    sample_walk,
    student_cdf,
)
from .transforms import (
    ConvergenceError,
    ConvolutionSpec,
    fourier_invert_density,
    subordinated_density,
    tail_ratio_scan,
)
from .verify import SUITES, run_suite

CONFIG_ENV = "STUDENT_LEVY_CONFIG"

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_FAILED = 2
EXIT_NONCONVERGENCE = 3


class InvalidInput(ValueError):
    pass


@dataclass
class RunManifest:
    """Record of one CLI run."""

    command: str
    parameters: dict
    config_hash: str
    seed: int | None
    outputs: list = field(default_factory=list)
    duration_seconds: float = 0.0
    exit_code: int = 0
    argv: list = field(default_factory=list)
    backend: str = _kernels.BACKEND
    version: str = __version__
    summary: dict = field(default_factory=dict)

    def to_json(self) -> str:
        return json.dumps(self.__dict__, sort_keys=True, indent=2)


# --------------------------------------------------------------------------
# parsing helpers
# --------------------------------------------------------------------------

def _fmt(v) -> str:
    return repr(float(v))


def _parse_number(text) -> float:
    """Accept ``1.5`` or ``3/2``."""
    try:
        return float(Fraction(str(text).strip()))
    except (ValueError, ZeroDivisionError):
        raise InvalidInput(f"not a number: {text!r}") from None


def _parse_int_list(text) -> list:
    try:
        return [int(v) for v in str(text).split(",") if v.strip()]
    except ValueError:
        raise InvalidInput(f"expected comma-separated integers, got {text!r}") from None


def _parse_rational_list(text) -> list:
    try:
        return [parse_rational(v.strip()) for v in str(text).split(",") if v.strip()]
    except (ValueError, TypeError, ZeroDivisionError) as exc:
        raise InvalidInput(str(exc)) from None


def _parse_grid(text) -> np.ndarray:
    """``start:stop:num`` (inclusive linspace) or a comma-separated list."""
    text = str(text).strip()
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise InvalidInput("grid must be start:stop:num")
        start, stop = _parse_number(parts[0]), _parse_number(parts[1])
        try:
            num = int(parts[2])
        except ValueError:
            raise InvalidInput("grid point count must be an integer") from None
        if num < 1:
            raise InvalidInput("grid point count must be positive")
        return np.linspace(start, stop, num)
    vals = [_parse_number(v) for v in text.split(",") if v.strip()]
    if not vals:
        raise InvalidInput("empty grid")
    return np.array(vals)


def _half_integer_degree(nu: float):
    twice = 2.0 * nu
    if twice == math.floor(twice) and int(twice) % 2 == 1:
        return (int(twice) - 1) // 2
    return None


def _write_text(path: Path, text: str):
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def _csv_text(header, rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buf.getvalue()


def _load_config(args) -> QuadratureConfig:
    path = args.config or os.environ.get(CONFIG_ENV)
    cfg = QuadratureConfig()
    if path:
        try:
            cfg = QuadratureConfig.from_json(path)
        except (OSError, json.JSONDecodeError, ValueError, TypeError) as exc:
            raise InvalidInput(f"cannot load config {path}: {exc}") from None
    overrides = {}
    for name in ("fourier_truncation", "fourier_nodes", "laplace_order", "tail_band"):
        value = getattr(args, name, None)
        if value is not None:
            overrides[name] = value
    if overrides:
        try:
            cfg = cfg.replace(**overrides)
        except ValueError as exc:
            raise InvalidInput(str(exc)) from None
    return cfg


# --------------------------------------------------------------------------
# commands
# --------------------------------------------------------------------------

def cmd_mixture(args, cfg, manifest):
    degrees = _parse_int_list(args.degrees)
    weights = _parse_rational_list(args.weights)
    try:
        spec = ProductSpec(tuple(degrees), tuple(weights))
    except ValueError as exc:
        raise InvalidInput(str(exc)) from None
    mix = expand_product(spec)
    out = Path(args.out)
    csv_path, json_path = out / "mixture.csv", out / "mixture.json"
    _write_text(csv_path, mix.to_csv())
    _write_text(json_path, mix.to_json() + "\n")
    manifest.outputs += [str(csv_path), str(json_path)]
    manifest.parameters.update(degrees=degrees, weights=[f"{w.numerator}/{w.denominator}" for w in weights])
    nonneg = all(w >= 0 for w in mix.weights.values())
    total = sum(mix.weights.values(), Fraction(0))
    for j in sorted(mix.weights):
        w = mix.weights[j]
        print(f"beta_{j} = {w.numerator}/{w.denominator}")
    print(f"sum = {total}, all nonnegative = {nonneg}")
    manifest.summary.update(nonnegative=nonneg, total=str(total))
    return EXIT_OK if nonneg and total == 1 else EXIT_FAILED


def _density_values(method, nu, c, d, xs, cfg):
    if method == "fourier":
        if d != 1:
            raise InvalidInput("method fourier requires d = 1")
        return fourier_invert_density(ConvolutionSpec(StudentParams(nu, 1), c), xs, cfg)
    if method == "subordinated":
        spec = ConvolutionSpec(StudentParams(nu, d), c)
        pts = xs if d == 1 else np.column_stack([xs] + [np.zeros_like(xs)] * (d - 1))
        return np.atleast_1d(subordinated_density(spec, pts, cfg))
    if method == "mixture":
        n = _half_integer_degree(nu)
        if n is None or c != math.floor(c):
            raise InvalidInput("method mixture requires half-integer nu and integer c")
        N = int(c)
        mix = expand_product(ProductSpec.equal(n, N))
        pts = xs if d == 1 else np.column_stack([xs] + [np.zeros_like(xs)] * (d - 1))
        return np.atleast_1d(mixture_pdf(MixtureDensity(mix, scale=float(N), d=d), pts))
    raise InvalidInput(f"unknown method {method!r}")


def cmd_density(args, cfg, manifest):
    nu, c = _parse_number(args.nu), _parse_number(args.c)
    if not nu > 0 or not c > 0:
        raise InvalidInput("nu and c must be positive")
    if args.d < 1:
        raise InvalidInput("d must be a positive integer")
    xs = _parse_grid(args.x)
    values = _density_values(args.method, nu, c, args.d, xs, cfg)
    out = Path(args.out)
    path = out / f"density_{args.method}.csv"
    _write_text(path, _csv_text(["x", "pdf"], [[_fmt(x), _fmt(v)] for x, v in zip(xs, values)]))
    manifest.outputs.append(str(path))
    manifest.parameters.update(nu=nu, c=c, d=args.d, x=[float(v) for v in xs], method=args.method)
    print(f"wrote {len(xs)} density values to {path}")
    if args.compare:
        other = _density_values(args.compare, nu, c, args.d, xs, cfg)
        diff = float(np.max(np.abs(np.asarray(values) - np.asarray(other))))
        manifest.summary["compare_method"] = args.compare
        manifest.summary["max_abs_difference"] = diff
        print(f"max |{args.method} - {args.compare}| = {diff:.3e}")
    return EXIT_OK


def cmd_tailcheck(args, cfg, manifest):
    nu, c = _parse_number(args.nu), _parse_number(args.c)
    if not nu > 0 or not c > 0:
        raise InvalidInput("nu and c must be positive")
    if args.d < 1:
        raise InvalidInput("d must be a positive integer")
    xs = _parse_grid(args.x)
    try:
        report = tail_ratio_scan(ConvolutionSpec(StudentParams(nu, args.d), c), xs, cfg)
    except ValueError as exc:
        raise InvalidInput(str(exc)) from None
    out = Path(args.out)
    csv_path, json_path = out / "tailcheck.csv", out / "tailcheck.json"
    _write_text(csv_path, report.to_csv())
    _write_text(json_path, report.to_json() + "\n")
    manifest.outputs += [str(csv_path), str(json_path)]
    manifest.parameters.update(nu=nu, c=c, d=args.d, x=[float(v) for v in xs])
    for x, r in zip(report.abscissas, report.ratios):
        print(f"x = {x:g}  ratio = {r:.8f}")
    print(f"method = {report.method}, final deviation = {report.final_deviation:.3e}, "
          f"converged = {report.converged}")
    manifest.summary.update(converged=report.converged, final_deviation=report.final_deviation)
    return EXIT_OK if report.converged else EXIT_FAILED


def cmd_sample(args, cfg, manifest):
    if args.n < 1:
        raise InvalidInput("n must be at least 1")
    try:
        if args.kind == "student":
            nu = _parse_number(args.nu)
            params = StudentParams(nu, args.d)
            batch = sample_student(params, args.n, args.seed)
        else:
            w = WalkSpec(tuple(_parse_int_list(args.degrees)),
                         tuple(float(v) for v in _parse_rational_list(args.weights)), args.d)
            batch = sample_walk(w, args.n, args.seed)
    except ValueError as exc:
        raise InvalidInput(str(exc)) from None
    out = Path(args.out)
    csv_path = out / f"sample_{args.kind}.csv"
    out.mkdir(parents=True, exist_ok=True)
    json_path = batch.save(csv_path, out / f"sample_{args.kind}.json")
    manifest.outputs += [str(csv_path), str(json_path)]
    manifest.parameters.update(kind=args.kind, n=args.n, spec=batch.spec, oracle=args.oracle)
    digest = hashlib.sha256(Path(csv_path).read_bytes()).hexdigest()
    manifest.summary["sha256"] = digest
    print(f"wrote {batch.n} draws to {csv_path} (sha256 {digest[:16]})")
    if args.oracle != "none":
        if batch.d != 1:
            raise InvalidInput("KS oracles need d = 1")
        if args.oracle == "cauchy":
            cdf = lambda x: student_cdf(0.5, x)  # noqa: E731
        elif args.oracle == "student":
            if args.kind != "student":
                raise InvalidInput("oracle student applies to kind student")
            cdf = lambda x: student_cdf(nu, x)  # noqa: E731
        else:
            if args.kind != "walk":
                raise InvalidInput("oracle mixture applies to kind walk")
            mix = expand_product(ProductSpec(w.degrees, tuple(Fraction(v) for v in _parse_rational_list(args.weights))))
            cdf = lambda x: mixture_cdf(mix, x)  # noqa: E731
        stat, p = ks_test(batch, cdf)
        manifest.summary.update(ks_statistic=stat, ks_pvalue=p)
        print(f"KS statistic = {stat:.6f}, p-value = {p:.4f}")
    return EXIT_OK


def cmd_verify(args, cfg, manifest):
    results = run_suite(args.suite, cfg, echo=print)
    out = Path(args.out)
    path = out / f"verify_{args.suite}.json"
    _write_text(path, json.dumps([r.to_dict() for r in results], sort_keys=True, indent=2) + "\n")
    manifest.outputs.append(str(path))
    manifest.parameters["suite"] = args.suite
    passed = all(r.passed for r in results)
    manifest.summary.update(passed=passed, failed=[r.number for r in results if not r.passed])
    print("all checks passed" if passed else "some checks FAILED")
    return EXIT_OK if passed else EXIT_FAILED


COMMANDS = {
    "mixture": cmd_mixture,
    "density": cmd_density,
    "tailcheck": cmd_tailcheck,
    "sample": cmd_sample,
    "verify": cmd_verify,
}
STOCHASTIC = {"sample"}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0, help="random seed (stochastic commands)")
    common.add_argument("--out", default=".", help="output directory")
    common.add_argument("--config", default=None,
                        help=f"JSON quadrature config (default: ${CONFIG_ENV})")
    common.add_argument("--fourier-truncation", type=float, default=None)
    common.add_argument("--fourier-nodes", type=int, default=None)
    common.add_argument("--laplace-order", type=int, default=None)
    common.add_argument("--tail-band", type=float, default=None)

    parser = argparse.ArgumentParser(prog="student-levy", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("--replay", metavar="MANIFEST", help="re-run the command recorded in a manifest")
    sub = parser.add_subparsers(dest="command")

    p = sub.add_parser("mixture", parents=[common], help="exact Bessel-mixture weights")
    p.add_argument("--degrees", required=True, help="comma-separated n_1,...,n_N")
    p.add_argument("--weights", required=True, help="comma-separated rationals a_1,...,a_N")

    p = sub.add_parser("density", parents=[common], help="density of the c-fold convolution")
    p.add_argument("--nu", required=True)
    p.add_argument("--c", required=True)
    p.add_argument("--d", type=int, default=1)
    p.add_argument("--x", required=True, help="start:stop:num or comma list")
    p.add_argument("--method", choices=("fourier", "subordinated", "mixture"), default="fourier")
    p.add_argument("--compare", choices=("fourier", "subordinated", "mixture"), default=None)

    p = sub.add_parser("tailcheck", parents=[common], help="tail ratio scan")
    p.add_argument("--nu", required=True)
    p.add_argument("--c", required=True)
    p.add_argument("--d", type=int, default=1)
    p.add_argument("--x", default="5,10,20,50")

    p = sub.add_parser("sample", parents=[common], help="Monte Carlo draws")
    p.add_argument("--kind", choices=("student", "walk"), default="student")
    p.add_argument("--nu", default="1/2")
    p.add_argument("--d", type=int, default=1)
    p.add_argument("--degrees", default="1,1")
    p.add_argument("--weights", default="1/2,1/2")
    p.add_argument("--n", type=lambda s: int(float(s)), default=100_000)
    p.add_argument("--oracle", choices=("none", "cauchy", "student", "mixture"), default="none")

    p = sub.add_parser("verify", parents=[common], help="run acceptance suites")
    p.add_argument("--suite", choices=sorted(SUITES), default="all")
    return parser


def _run(argv) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.replay:
        try:
            recorded = json.loads(Path(args.replay).read_text(encoding="utf-8"))["argv"]
        except (OSError, KeyError, json.JSONDecodeError) as exc:
            print(f"error: cannot replay {args.replay}: {exc}", file=sys.stderr)
            return EXIT_INVALID
        return _run(recorded)
    if args.command is None:
        parser.print_help()
        return EXIT_INVALID
    t0 = time.perf_counter()
    manifest = RunManifest(
        command=args.command,
        parameters={},
        config_hash="",
        seed=args.seed if args.command in STOCHASTIC else None,
        argv=list(argv),
    )
    try:
        cfg = _load_config(args)
        manifest.config_hash = cfg.digest()
        manifest.parameters["config"] = cfg.to_dict()
        code = COMMANDS[args.command](args, cfg, manifest)
    except InvalidInput as exc:
        print(f"error: {exc}", file=sys.stderr)
        code = EXIT_INVALID
    except ConvergenceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        code = EXIT_NONCONVERGENCE
    manifest.exit_code = code
    manifest.duration_seconds = time.perf_counter() - t0
    path = Path(args.out) / f"{args.command}_manifest.json"
    try:
        _write_text(path, manifest.to_json() + "\n")
    except OSError as exc:
        print(f"error: cannot write manifest: {exc}", file=sys.stderr)
        return EXIT_INVALID
    return code


def main(argv=None) -> int:
    if argv is None:
        argv = sys.argv[1:]
    return _run(list(argv))


if __name__ == "__main__":
    sys.exit(main())
