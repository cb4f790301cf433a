"""Command-line front door; a thin client of the service layer.

Every subcommand builds the same request models the HTTP API accepts and
either calls the service handlers in-process (default) or POSTs them to a
running server (--server).  Data goes to files, progress to stderr, and
stdout carries a single machine-readable summary line.

Exit codes: 0 success, 1 domain failure (tolerance breach, evaluator
failure), 2 usage or config error.
"""

from __future__ import annotations

import argparse
import os
import sys

from . import __version__
from .benchmark import check_design
from .field import CornerSingularity, EvalPoint, FieldSample
from .nsga2 import EvaluatorFailure, ParetoArchive
from .runio import (
    IoFailure,
    ParseFailure,
    default_nsga_config,
    format_float,
    make_run_record,
    read_config,
    write_pareto_csv,
    write_profile_csv,
    write_run_record,
)
from .service import app as service_app
from .service.app import (
    compute_field,
    compute_profile,
    run_optimization,
    run_validation,
)
from .service.schemas import (
    BenchmarkConfigModel,
    FieldRequest,
    NsgaConfigModel,
    OptimizeRequest,
    ProfileRequest,
    ValidateRequest,
)


class UsageError(Exception):
    """Bad flags, bad config, or out-of-range inputs; exits with code 2."""


class DomainFailure(Exception):
    """The computation ran but failed its contract; exits with code 1."""


class ServiceClient:
    """Dispatches requests either in-process or to a remote server."""

    def __init__(self, server=None):
        self.server = server.rstrip("/") if server else None

    def _post(self, path, request, response_model):
        import httpx

        resp = httpx.post(
            f"{self.server}{path}", json=request.model_dump(mode="json"), timeout=None
        )
        if resp.status_code == 400 or resp.status_code == 422:
            raise UsageError(f"server rejected request: {resp.text}")
        if resp.status_code != 200:
            raise DomainFailure(f"server error {resp.status_code}: {resp.text}")
        return response_model.model_validate(resp.json())

    def field(self, request):
        if self.server:
            from .service.schemas import FieldResponse

            return self._post("/field", request, FieldResponse)
        return compute_field(request)

    def profile(self, request):
        if self.server:
            from .service.schemas import ProfileResponse

            return self._post("/profile", request, ProfileResponse)
        return compute_profile(request)

    def validate(self, request):
        if self.server:
            from .service.schemas import ValidateResponse

            return self._post("/validate", request, ValidateResponse)
        return run_validation(request)

    def optimize(self, request):
        if self.server:
            from .service.schemas import OptimizeResponse

            return self._post("/optimize", request, OptimizeResponse)
        return run_optimization(request)


def _load_config_models(path):
    """Config file -> request-model pair; defaults when no file is given."""
    if path is None:
        return BenchmarkConfigModel(), NsgaConfigModel.from_core(default_nsga_config())
    try:
        bench, nsga = read_config(path)
    except (ParseFailure, IoFailure) as exc:
        raise UsageError(f"config error: {exc}") from exc
    return BenchmarkConfigModel.from_core(bench), NsgaConfigModel.from_core(nsga)


def _read_radii_file(path):
    try:
        with open(path, "r", encoding="utf-8") as fh:
            tokens = fh.read().replace(",", " ").split()
        radii = [float(t) for t in tokens]
    except OSError as exc:
        raise UsageError(f"cannot read layout file {path}: {exc}") from exc
    except ValueError as exc:
        raise UsageError(f"layout file {path} contains non-numeric data") from exc
    if len(radii) != 10:
        raise UsageError(f"layout file must hold exactly 10 radii, got {len(radii)}")
    return radii


def _checked_radii(radii):
    try:
        check_design(radii)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    return list(radii)


def cmd_field(args) -> int:
    bench, _ = _load_config_models(args.config)
    radii = _read_radii_file(args.layout_csv) if args.layout_csv else None
    if radii is not None:
        radii = _checked_radii(radii)
    try:
        request = FieldRequest(r=args.r, z=args.z, radii=radii, config=bench)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    try:
        resp = ServiceClient(args.server).field(request)
    except (CornerSingularity, ValueError) as exc:
        raise UsageError(str(exc)) from exc
    print(f"Br={format_float(resp.br_tesla)} T, Bz={format_float(resp.bz_tesla)} T")
    return 0


def cmd_validate(args) -> int:
    bench, _ = _load_config_models(args.config)
    if args.samples < 1:
        raise UsageError("--samples must be >= 1")
    try:
        request = ValidateRequest(
            samples=args.samples, seed=args.seed, tolerance=args.tolerance, config=bench
        )
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    resp = ServiceClient(args.server).validate(request)
    for case in resp.cases:
        print(
            f"case r={case.point_r:.6g} z={case.point_z:.6g} "
            f"rel_deviation={case.rel_deviation:.3e}",
            file=sys.stderr,
        )
    print(
        f"validate: samples={resp.samples} "
        f"max_rel_deviation={format_float(resp.max_rel_deviation)} "
        f"tolerance={format_float(resp.tolerance)} "
        f"result={'PASS' if resp.passed else 'FAIL'}"
    )
    if not resp.passed:
        raise DomainFailure(
            f"max relative deviation {resp.max_rel_deviation:.3e} "
            f"not below tolerance {resp.tolerance:.3e}"
        )
    return 0


def cmd_profile(args) -> int:
    bench, _ = _load_config_models(args.config)
    radii = _checked_radii(args.radii) if args.radii else None
    try:
        request = ProfileRequest(radii=radii, r_line=args.r_line, n=args.n, config=bench)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    resp = ServiceClient(args.server).profile(request)
    samples = [
        FieldSample(point=EvalPoint(r=s.r_m, z=s.z_m), b_r=s.br_tesla, b_z=s.bz_tesla)
        for s in resp.samples
    ]
    try:
        write_profile_csv(samples, args.out)
    except IoFailure as exc:
        raise UsageError(str(exc)) from exc
    print(f"profile: wrote {args.out} points={len(resp.samples)}")
    return 0


def cmd_optimize(args) -> int:
    bench, nsga = _load_config_models(args.config)
    request = OptimizeRequest(benchmark=bench, nsga=nsga, seed=args.seed)
    os.makedirs(args.out, exist_ok=True)
    try:
        resp = ServiceClient(args.server).optimize(request)
    except EvaluatorFailure as exc:
        _flush_partial(args.out, bench, nsga, exc)
        raise DomainFailure(f"evaluator failure: {exc}") from exc

    record = resp.record.to_core()
    record_path = os.path.join(args.out, "run_record.json")
    pareto_path = os.path.join(args.out, "pareto.csv")
    lastgen_path = os.path.join(args.out, "last_generation.csv")

    write_run_record(record, record_path)
    archive = ParetoArchive()
    for genes, objectives in zip(record.archive_genes, record.archive_objectives):
        archive.add(genes, objectives)
    write_pareto_csv(archive, pareto_path)

    front = ParetoArchive()
    for member in resp.last_generation:
        front.add(member.genes, member.objectives)
    write_pareto_csv(front, lastgen_path)

    last = record.history[-1]
    print(
        f"optimize: wrote {args.out} evaluations={last.evaluations} "
        f"archive={last.archive_size} best_f1={format_float(last.best_f1)} "
        f"best_f2={format_float(last.best_f2)}"
    )
    return 0


def _flush_partial(out_dir, bench, nsga, failure):
    """Write whatever the aborted run produced before exiting with code 1."""
    if failure.archive is None:
        return
    record = make_run_record(
        bench.to_core(), nsga.to_core(), failure.history, failure.archive
    )
    write_run_record(record, os.path.join(out_dir, "run_record.partial.json"))
    archive = ParetoArchive()
    for genes, objectives in zip(record.archive_genes, record.archive_objectives):
        archive.add(genes, objectives)
    write_pareto_csv(archive, os.path.join(out_dir, "pareto.partial.csv"))


def cmd_serve(args) -> int:
    import uvicorn

    uvicorn.run(service_app, host=args.host, port=args.port)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="coilbench",
        description="Uniform-field coil benchmark: field evaluation, "
        "oracle validation, profiles, NSGA-II optimization.",
    )
    parser.add_argument("--version", action="version", version=f"coilbench {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("field", help="evaluate Br/Bz of a layout at one point")
    p.add_argument("--config", help="key=value config file")
    p.add_argument("--r", type=float, required=True, help="radial coordinate, m")
    p.add_argument("--z", type=float, required=True, help="axial coordinate, m")
    p.add_argument("--layout-csv", help="file with 10 inner radii (default: reference layout)")
    p.add_argument("--server", help="base URL of a running coilbench server")
    p.set_defaults(func=cmd_field)

    p = sub.add_parser("validate", help="compare the solver against the brute-force oracle")
    p.add_argument("--config", help="key=value config file")
    p.add_argument("--samples", type=int, default=20, help="number of random cases")
    p.add_argument("--seed", type=int, default=7)
    p.add_argument("--tolerance", type=float, default=1e-6)
    p.add_argument("--server")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("profile", help="write field samples along a vertical line")
    p.add_argument("--config", help="key=value config file")
    p.add_argument("--radii", type=float, nargs=10, metavar="R",
                   help="10 inner radii, m (default: reference layout)")
    p.add_argument("--r-line", type=float, default=0.003, help="radius of the line, m")
    p.add_argument("--n", type=int, default=20, help="number of samples")
    p.add_argument("--out", default="profile.csv", help="output CSV path")
    p.add_argument("--server")
    p.set_defaults(func=cmd_profile)

    p = sub.add_parser("optimize", help="run the NSGA-II layout optimization")
    p.add_argument("--config", help="key=value config file")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--seed", type=int, help="override the config seed")
    p.add_argument("--server")
    p.set_defaults(func=cmd_optimize)

    p = sub.add_parser("serve", help="run the HTTP service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    p.set_defaults(func=cmd_serve)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except DomainFailure as exc:
        print(f"failure: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
