"""Command-line client for the experiment service.

Each subcommand assembles a JSON request, sends it to an in-process
application instance (or to a running server given with ``--server``),
and renders the response as a CSV table next to a manifest file that
records the exact request, dataset provenance, and tool version.
Re-running a command with the same flags, or with ``--from-manifest``
pointing at a previous manifest, reproduces the CSV byte for byte.

Exit codes: 0 success, 1 run failure, 2 usage error, 3 unusable dataset,
4 validation failure.
"""

from __future__ import annotations

import argparse
import asyncio
import csv
import json
import os
import sys

import httpx

from . import __version__
from .chemdata import DATASET_ENV_VAR, default_dataset_path
from .experiments import DEFAULT_SCAN_TIMES

EXIT_OK = 0
EXIT_RUN = 1
EXIT_USAGE = 2
EXIT_DATA = 3
EXIT_VALIDATION = 4

_EXIT_BY_KIND = {"usage": EXIT_USAGE, "data": EXIT_DATA, "run": EXIT_RUN}

SWEEP_HEADER = (
    "distance_angstrom",
    "method",
    "theta_star",
    "energy_hartree",
    "exact_hartree",
    "abs_error_hartree",
    "acceptance_probability",
)
SCAN_HEADER = ("time_us", "swept_channel", "mitigation", "abs_error_hartree")

#: Significant digits for every numeric CSV field.
_DIGITS = 12


def _fmt(value) -> str:
    if isinstance(value, float):
        return format(value, f".{_DIGITS}g")
    return str(value)


def _fail(message: str, code: int) -> int:
    print(f"symverify: {message}", file=sys.stderr)
    return code


def _request(server: str | None, method: str, path: str, payload: dict | None = None):
    """Send one request, either over the wire or to an in-process app."""
    if server is not None:
        with httpx.Client(base_url=server, timeout=None) as client:
            return client.request(method, path, json=payload)

    from .service import create_app

    async def call():
        transport = httpx.ASGITransport(app=create_app())
        async with httpx.AsyncClient(
            transport=transport, base_url="http://symverify.internal", timeout=None
        ) as client:
            return await client.request(method, path, json=payload)

    return asyncio.run(call())


def _error_exit(response) -> int:
    try:
        detail = response.json().get("detail")
    except (ValueError, AttributeError):
        detail = None
    if isinstance(detail, dict) and "kind" in detail:
        return _fail(str(detail.get("message", detail)), _EXIT_BY_KIND.get(detail["kind"], EXIT_RUN))
    if response.status_code == 422:
        return _fail(f"invalid request: {detail}", EXIT_USAGE)
    return _fail(f"request failed with status {response.status_code}: {detail}", EXIT_RUN)


def _write_csv(path: str, header, rows) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([_fmt(row[name]) for name in header])


def _write_manifest(path: str, manifest: dict) -> None:
    with open(path, "w") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _emit(out: str, header, body: dict) -> int:
    _write_csv(f"{out}.csv", header, body["rows"])
    _write_manifest(f"{out}.manifest.json", body["manifest"])
    count = len(body["rows"])
    noun = "row" if count == 1 else "rows"
    print(f"wrote {out}.csv ({count} {noun}) and {out}.manifest.json")
    return EXIT_OK


def _dataset_path(args) -> str:
    if args.dataset is not None:
        return args.dataset
    return os.environ.get(DATASET_ENV_VAR) or default_dataset_path()


def _comma_floats(parser, text: str, flag: str) -> list:
    values = []
    for token in text.split(","):
        token = token.strip()
        if not token:
            continue
        try:
            values.append(float(token))
        except ValueError:
            parser.error(f"{flag} expects comma-separated numbers, got {token!r}")
    if not values:
        parser.error(f"{flag} received an empty list")
    return values


def _load_manifest_config(parser, path: str) -> dict:
    try:
        with open(path) as fh:
            manifest = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        parser.error(f"cannot read manifest {path}: {exc}")
    config = manifest.get("config") if isinstance(manifest, dict) else None
    if not isinstance(config, dict):
        parser.error(f"manifest {path} carries no config snapshot")
    return config


def _noise_field(parser, args) -> dict | None:
    """Noise profile for the request: null, a JSON file, or the default."""
    if args.noiseless and args.noise_profile:
        parser.error("--noiseless and --noise-profile are mutually exclusive")
    if args.noiseless:
        return None
    if args.noise_profile:
        try:
            with open(args.noise_profile) as fh:
                profile = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            parser.error(f"cannot read noise profile {args.noise_profile}: {exc}")
        if not isinstance(profile, dict):
            parser.error("noise profile must be a JSON object")
        return profile
    return {}


def cmd_sweep(parser, args) -> int:
    if args.from_manifest:
        payload = _load_manifest_config(parser, args.from_manifest)
    else:
        mitigations = []
        for token in args.mitigation.split(","):
            token = token.strip()
            if token == "all":
                mitigations.extend(("none", "ancilla", "inline", "sqse"))
            elif token:
                mitigations.append(token)
        if not mitigations:
            parser.error("--mitigation received an empty list")
        payload = {
            "encoding": args.encoding,
            "mitigations": mitigations,
            "rotated": args.rotated,
            "distances": _comma_floats(parser, args.distances, "--distances")
            if args.distances
            else None,
            "noise": _noise_field(parser, args),
            "optimize_on": args.optimize_on,
            "jobs": args.jobs,
            "dataset": _dataset_path(args),
        }
        if payload["noise"] == {}:
            del payload["noise"]
    response = _request(args.server, "POST", "/sweep", payload)
    if response.status_code != 200:
        return _error_exit(response)
    return _emit(args.out, SWEEP_HEADER, response.json())


def cmd_noise_scan(parser, args) -> int:
    if args.from_manifest:
        payload = _load_manifest_config(parser, args.from_manifest)
    else:
        payload = {
            "times_us": _comma_floats(parser, args.times, "--times"),
            "distance": args.distance,
            "dataset": _dataset_path(args),
        }
    response = _request(args.server, "POST", "/noise-scan", payload)
    if response.status_code != 200:
        return _error_exit(response)
    return _emit(args.out, SCAN_HEADER, response.json())


def cmd_compare(parser, args) -> int:
    if args.from_manifest:
        payload = _load_manifest_config(parser, args.from_manifest)
    else:
        payload = {
            "distances": _comma_floats(parser, args.distances, "--distances")
            if args.distances
            else None,
            "noise": _noise_field(parser, args),
            "jobs": args.jobs,
            "dataset": _dataset_path(args),
        }
        if payload["noise"] == {}:
            del payload["noise"]
    response = _request(args.server, "POST", "/compare", payload)
    if response.status_code != 200:
        return _error_exit(response)
    return _emit(args.out, SWEEP_HEADER, response.json())


def cmd_validate(parser, args) -> int:
    response = _request(args.server, "POST", "/validate", {"dataset": _dataset_path(args)})
    if response.status_code != 200:
        return _error_exit(response)
    report = response.json()
    if report["ok"]:
        print(
            f"dataset {report['dataset_path']} OK: "
            f"{report['distances_checked']} distances, both encodings agree"
        )
        return EXIT_OK
    for problem in report["problems"]:
        print(f"FAIL {problem}")
    return EXIT_VALIDATION


def cmd_serve(parser, args) -> int:
    import uvicorn

    from .service import create_app

    uvicorn.run(create_app(), host=args.host, port=args.port)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="symverify",
        description="Noisy-circuit chemistry experiments with symmetry verification.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    commands = parser.add_subparsers(dest="command", required=True)

    def common(sub):
        sub.add_argument("--server", help="base URL of a running server (default: in-process)")
        sub.add_argument(
            "--dataset",
            help=f"dataset JSON path (default: ${DATASET_ENV_VAR} or the bundled file)",
        )

    def noise_flags(sub):
        sub.add_argument("--noiseless", action="store_true", help="disable all noise")
        sub.add_argument("--noise-profile", help="JSON file overriding the noise model")

    sweep = commands.add_parser("sweep", help="optimize the dissociation curve")
    common(sweep)
    noise_flags(sweep)
    sweep.add_argument("--encoding", default="2q", help="2q, 4q, or a full encoding name")
    sweep.add_argument(
        "--mitigation",
        default="none",
        help="none, ancilla, inline, sqse, a comma list, or all",
    )
    sweep.add_argument("--rotated", action="store_true", help="use the rotated frame (4q only)")
    sweep.add_argument("--distances", help="comma-separated subset of bond distances")
    sweep.add_argument(
        "--optimize-on", choices=("raw", "mitigated"), default="mitigated", dest="optimize_on"
    )
    sweep.add_argument("--jobs", type=int, default=1, help="parallel sweep workers")
    sweep.add_argument("--from-manifest", help="re-run the request stored in a manifest")
    sweep.add_argument("--out", required=True, help="output base name (.csv, .manifest.json)")
    sweep.set_defaults(run=cmd_sweep)

    scan = commands.add_parser("noise-scan", help="decoherence-time scan at one distance")
    common(scan)
    scan.add_argument(
        "--times",
        default=",".join(_fmt(t * 1e6) for t in DEFAULT_SCAN_TIMES),
        help="comma-separated decoherence times in microseconds",
    )
    scan.add_argument("--distance", type=float, default=0.75, help="bond distance in angstrom")
    scan.add_argument("--from-manifest", help="re-run the request stored in a manifest")
    scan.add_argument("--out", required=True, help="output base name (.csv, .manifest.json)")
    scan.set_defaults(run=cmd_noise_scan)

    compare = commands.add_parser("compare", help="six-curve encoding comparison")
    common(compare)
    noise_flags(compare)
    compare.add_argument("--distances", help="comma-separated subset of bond distances")
    compare.add_argument("--jobs", type=int, default=1, help="parallel sweep workers")
    compare.add_argument("--from-manifest", help="re-run the request stored in a manifest")
    compare.add_argument("--out", required=True, help="output base name (.csv, .manifest.json)")
    compare.set_defaults(run=cmd_compare)

    validate = commands.add_parser("validate", help="check a dataset file")
    common(validate)
    validate.set_defaults(run=cmd_validate)

    serve = commands.add_parser("serve", help="run the HTTP service")
    serve.add_argument("--host", default="127.0.0.1")
    serve.add_argument("--port", type=int, default=8000)
    serve.set_defaults(run=cmd_serve)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.run(parser, args)
    except httpx.HTTPError as exc:
        return _fail(f"cannot reach server: {exc}", EXIT_RUN)


if __name__ == "__main__":
    sys.exit(main())
