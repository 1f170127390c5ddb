"""Batch command-line driver."""

from __future__ import annotations

import argparse
import logging
import sys

from .errors import AnonError, CapabilityError, PolicyError, PolicyValidationError
from .modules import REGISTRY, load_module
from .pipeline import run_pipeline
from .policy import build_plan, parse_policy

EXIT_OK = 0
EXIT_INTERNAL = 1
EXIT_USAGE = 2
EXIT_POLICY = 3
EXIT_IO = 4
EXIT_CAPABILITY = 5
EXIT_RECORD = 6
EXIT_RUN = 7

EPILOG = """\
exit codes:
  0  success
  1  unexpected internal error
  2  bad command line
  3  policy could not be read, parsed, validated or compiled
  4  module could not be loaded, or input/output unusable
  5  policy needs random access but the input is a stream
  6  a record failed to parse (strict mode)
  7  run aborted while anonymizing or writing (output may be partial)
"""

log = logging.getLogger("loganon")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="loganon", description="Anonymize log files according to a policy.",
        epilog=EPILOG, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("-m", "--module", required=True, choices=sorted(REGISTRY),
                    help="parser module for the input format")
    ap.add_argument("-i", "--input", required=True, help="input file, or - for stdin")
    ap.add_argument("-o", "--output", required=True, help="output file, or - for stdout")
    ap.add_argument("-p", "--policy", required=True, help="anonymization policy (XML)")
    ap.add_argument("--seed", type=int, help="seed every random draw, for reproducible runs")
    mode = ap.add_mutually_exclusive_group()
    mode.add_argument("--strict", dest="strict", action="store_true", default=True,
                      help="abort on unparsable lines (default)")
    mode.add_argument("--lenient", dest="strict", action="store_false",
                      help="pass unparsable lines through unchanged, with a warning")
    nf = ap.add_argument_group("netfilter module")
    nf.add_argument("--year", type=int, help="year for syslog dates (default: current year)")
    nf.add_argument("--utc-offset", type=int, default=0,
                    help="seconds the log's local time is ahead of UTC (default 0)")
    dl = ap.add_argument_group("delimited module")
    dl.add_argument("--columns", help="column spec: JSON file or inline name:kind,...")
    dl.add_argument("--delimiter", default=",", help="column delimiter (default ,)")
    ap.add_argument("-q", "--quiet", action="store_true", help="do not print the run report")
    return ap


def _module_options(args) -> dict:
    if args.module == "netfilter":
        return {"strict": args.strict, "year": args.year, "utc_offset": args.utc_offset}
    if args.module == "delimited":
        return {"strict": args.strict, "columns": args.columns, "delimiter": args.delimiter}
    return {"strict": args.strict}


def run(args) -> int:
    module = load_module(args.module, **_module_options(args))
    schema = module.get_module_schema()
    try:
        with open(args.policy, encoding="utf-8") as fh:
            document = fh.read()
    except OSError as exc:
        raise PolicyError(f"cannot read policy {args.policy!r}: {exc}") from None
    policy = parse_policy(document)
    plan = build_plan(policy, schema, seed=args.seed)
    # everything above happens before any output is opened
    if plan.requires_random_access() and args.input == "-":
        raise CapabilityError("the policy needs random access, which a stream cannot give")
    module.set_data_sets(args.input, args.output)
    report = run_pipeline(module, plan)
    if not args.quiet:
        for line in report.lines():
            print(f"loganon: {line}", file=sys.stderr)
    return EXIT_OK


def main(argv=None) -> int:
    logging.basicConfig(level=logging.WARNING, format="loganon: %(levelname)s: %(message)s")
    args = build_parser().parse_args(argv)
    try:
        return run(args)
    except PolicyValidationError as exc:
        for d in exc.diagnostics:
            print(f"loganon: error: {d}", file=sys.stderr)
        return exc.exit_code
    except AnonError as exc:
        print(f"loganon: error: {exc}", file=sys.stderr)
        return exc.exit_code


if __name__ == "__main__":
    sys.exit(main())
