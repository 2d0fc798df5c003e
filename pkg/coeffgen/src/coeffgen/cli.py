"""Command-line front end: generate a coefficient dataset, verify one."""

import argparse
import json
import sys

from .dataset import GeneratorConfig, default_grid, generate, verify_against_fci

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_USAGE = 2


def _comma_floats(text):
    try:
        return [float(part) for part in text.split(",") if part.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"cannot parse distance list {text!r}")


def _points(count):
    return f"{count} point" if count == 1 else f"{count} points"


def cmd_generate(args):
    distances = args.distances if args.distances is not None else default_grid()
    try:
        config = GeneratorConfig(
            distances_angstrom=distances, basis=args.basis, output_path=args.out
        )
    except ValueError as exc:
        print(f"coeffgen: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        path = generate(config)
    except RuntimeError as exc:
        print(f"coeffgen: {exc}", file=sys.stderr)
        return EXIT_FAILURE
    print(f"wrote {_points(len(config.distances_angstrom))} to {path}")
    return EXIT_OK


def cmd_verify(args):
    try:
        with open(args.dataset) as fh:
            payload = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        print(f"coeffgen: cannot read dataset {args.dataset}: {exc}", file=sys.stderr)
        return EXIT_FAILURE
    try:
        report = verify_against_fci(payload)
    except (KeyError, TypeError, ValueError) as exc:
        print(f"coeffgen: {exc}", file=sys.stderr)
        return EXIT_FAILURE
    bad = [check for check in report if not check.ok]
    for check in bad:
        print(
            f"FAIL {check.r_angstrom} angstrom: fci {check.e_fci:.10f}, "
            f"two-qubit {check.e_two_qubit:.10f}, four-qubit {check.e_four_qubit:.10f}"
        )
    if bad:
        print(f"{_points(len(bad))} of {len(report)} disagree with FCI")
        return EXIT_FAILURE
    print(f"all {_points(len(report))} match FCI within 1e-08 hartree")
    return EXIT_OK


def build_parser():
    parser = argparse.ArgumentParser(
        prog="coeffgen",
        description="Generate and verify H2/STO-3G qubit-Hamiltonian coefficient datasets.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("generate", help="compute coefficients and write the dataset JSON")
    gen.add_argument("--out", default="h2_sto3g.json", help="output path")
    gen.add_argument(
        "--distances",
        type=_comma_floats,
        default=None,
        metavar="R1,R2,...",
        help="bond distances in angstrom (default: the full 47-point grid)",
    )
    gen.add_argument("--basis", default="STO-3G", help="basis set tag")
    gen.set_defaults(handler=cmd_generate)

    ver = sub.add_parser("verify", help="recompute FCI energies and compare a dataset")
    ver.add_argument("dataset", help="path of the dataset JSON to check")
    ver.set_defaults(handler=cmd_verify)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    return args.handler(args)


if __name__ == "__main__":
    raise SystemExit(main())
