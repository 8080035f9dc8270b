"""Command line front end: a thin client of the benchmark service.

``bench run`` builds an experiment request, submits it to the service
(in process by default, or over HTTP with ``--server``), and writes the
returned rows and optional performance profile to local files.  ``bench
serve`` starts the service.  Exit codes: 0 when every run converged, 1
when some runs failed, 2 on usage or IO errors.
"""

from __future__ import annotations

import argparse
import math
import sys

from .bench import SOLVER_TAGS, ResultRow, emit

USAGE_ERROR = 2


def _parse_overrides(pairs) -> dict[str, float]:
    overrides = {}
    for pair in pairs:
        key, sep, value = pair.partition("=")
        if not sep or not key:
            raise ValueError(f"--set expects KEY=VALUE, got {pair!r}")
        try:
            overrides[key] = float(value)
        except ValueError:
            raise ValueError(f"--set value for {key!r} is not numeric: {value!r}")
    return overrides


def _parse_dims(text: str) -> list[int]:
    if not text:
        return []
    try:
        return [int(part) for part in text.split(",") if part]
    except ValueError:
        raise ValueError(f"--n expects comma-separated integers, got {text!r}")


def _parse_synth(text: str) -> dict:
    parts = text.split(",")
    if len(parts) != 2:
        raise ValueError(f"--synth expects M,n, got {text!r}")
    return {"m": int(parts[0]), "n": int(parts[1])}


def _client(server: str | None):
    if server:
        import httpx

        return httpx.Client(base_url=server, timeout=None)
    # In-process default: the CLI stays a client of the same HTTP surface
    # without needing a running server.
    import warnings

    with warnings.catch_warnings():
        # starlette announces its testclient deprecation as a UserWarning
        warnings.simplefilter("ignore", Warning)
        from fastapi.testclient import TestClient

    from .service.app import app

    return TestClient(app)


def _row_from_payload(payload: dict) -> ResultRow:
    def number(value):
        return math.nan if value is None else float(value)

    return ResultRow(
        problem=payload["problem"],
        n=int(payload["n"]),
        solver=payload["solver"],
        mean_iter=number(payload["mean_iter"]),
        mean_nf=number(payload["mean_nf"]),
        mean_tcpu_seconds=number(payload["mean_tcpu_seconds"]),
        mean_final_residual=number(payload["mean_final_residual"]),
        mean_aa_steps=number(payload["mean_aa_steps"]),
        failures=int(payload["failures"]),
    )


def _cmd_run(args) -> int:
    try:
        overrides = _parse_overrides(args.overrides)
        dims = _parse_dims(args.n)
        synth = _parse_synth(args.synth) if args.synth else None
    except ValueError as err:
        print(f"error: {err}", file=sys.stderr)
        return USAGE_ERROR
    if args.profile and args.profile_out is None:
        print("error: --profile requires --profile-out", file=sys.stderr)
        return USAGE_ERROR

    request = {
        "problem": args.problem,
        "dims": dims,
        "dataset_path": args.dataset,
        "synth": ({**synth, "seed": args.seed} if synth else None),
        "solvers": args.solvers.split(","),
        "repeats": args.repeats,
        "seed": args.seed,
        "tol": args.tol,
        "max_iter": args.max_iter,
        "overrides": overrides,
    }
    try:
        with _client(args.server) as client:
            response = client.post("/experiments", json=request)
            if response.status_code != 200:
                detail = response.json().get("detail", response.text)
                print(f"error: {detail}", file=sys.stderr)
                return USAGE_ERROR
            rows = [_row_from_payload(r) for r in response.json()["rows"]]
            if args.profile:
                payload = {
                    "rows": response.json()["rows"],
                    "metric": args.profile,
                }
                profile_response = client.post("/profiles", json=payload)
                if profile_response.status_code != 200:
                    detail = profile_response.json().get(
                        "detail", profile_response.text
                    )
                    print(f"error: {detail}", file=sys.stderr)
                    return USAGE_ERROR
    except Exception as err:  # connection failures, bad URLs
        print(f"error: {err}", file=sys.stderr)
        return USAGE_ERROR

    try:
        emit(rows, format=args.format, path=args.out)
        if args.profile:
            profile = {}
            for point in profile_response.json()["points"]:
                profile.setdefault(point["solver"], []).append(
                    (point["theta"], point["rho"])
                )
            emit(profile, format=args.format, path=args.profile_out)
    except OSError as err:
        print(f"error: {err}", file=sys.stderr)
        return USAGE_ERROR

    failures = sum(row.failures for row in rows)
    if failures:
        print(f"{failures} run(s) did not converge", file=sys.stderr)
        return 1
    return 0


def _cmd_serve(args) -> int:
    import uvicorn

    uvicorn.run("dfproj.service.app:app", host=args.host, port=args.port)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="bench",
        description="Benchmark runner for the projection solvers.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="run an experiment and write result rows")
    run_p.add_argument(
        "--problem", required=True, choices=["1", "2", "3", "4", "logistic"]
    )
    run_p.add_argument(
        "--n", default="", help="comma-separated dimensions (numbered problems)"
    )
    run_p.add_argument(
        "--solvers",
        default=",".join(SOLVER_TAGS),
        help=f"comma-separated tags from: {', '.join(SOLVER_TAGS)}",
    )
    run_p.add_argument("--repeats", type=int, default=10)
    run_p.add_argument("--seed", type=int, default=0)
    run_p.add_argument("--tol", type=float, default=1e-6)
    run_p.add_argument("--max-iter", type=int, default=2000)
    run_p.add_argument("--out", required=True, help="output file for result rows")
    run_p.add_argument("--format", choices=["csv", "json"], default="csv")
    run_p.add_argument("--dataset", help="LIBSVM file (logistic problem)")
    run_p.add_argument("--synth", help="M,n synthetic dataset (logistic problem)")
    run_p.add_argument(
        "--profile", choices=["iter", "nf"], help="also emit a performance profile"
    )
    run_p.add_argument("--profile-out", help="output file for the profile")
    run_p.add_argument(
        "--set",
        action="append",
        dest="overrides",
        default=[],
        metavar="KEY=VALUE",
        help="configuration override, e.g. aa.m=5 or ls.sigma=0.02",
    )
    run_p.add_argument(
        "--server", help="base URL of a running service (default: in process)"
    )
    run_p.set_defaults(func=_cmd_run)

    serve_p = sub.add_parser("serve", help="start the benchmark service")
    serve_p.add_argument("--host", default="127.0.0.1")
    serve_p.add_argument("--port", type=int, default=8000)
    serve_p.set_defaults(func=_cmd_serve)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
