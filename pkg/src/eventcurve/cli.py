"""``eventcurve`` command line.

Exit codes: 0 success, 1 internal error, 2 bad input, 3 missing prerequisite.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from . import report
from .config import load_config
from .errors import InputError, MissingPrerequisite

EXIT_OK = 0
EXIT_INTERNAL = 1
EXIT_BAD_INPUT = 2
EXIT_MISSING_PREREQ = 3

log = logging.getLogger("eventcurve")


def _parser():
    p = argparse.ArgumentParser(prog="eventcurve", description=__doc__.splitlines()[0])
    p.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = p.add_subparsers(dest="command", required=True)

    def add(name, help_text, fit_flags=False):
        sp = sub.add_parser(name, help=help_text)
        sp.add_argument("--config", required=True, type=Path, help="run configuration file")
        sp.add_argument("--output", type=Path, help="output directory (overrides config)")
        if fit_flags:
            sp.add_argument("--spec", action="append", metavar="NAME",
                            help="specification to fit; repeatable (overrides config)")
            sp.add_argument("--lambda", dest="ridge_lambda", type=float, metavar="X",
                            help="ridge penalty on the standardized scale")
            sp.add_argument("--min-n", dest="min_n", type=int, metavar="K",
                            help="minimum subgroup size for separate fits")
        return sp

    add("build", "build events_dataset.csv and drops.csv")
    add("fit", "fit specifications; writes fits.json and table2.csv", fit_flags=True)
    add("figures", "write figure data CSV files")
    add("all", "build, fit and figures in sequence", fit_flags=True)
    return p


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )
    try:
        cfg = load_config(args.config)
        cfg = cfg.with_overrides(
            output=args.output,
            specs=tuple(args.spec) if getattr(args, "spec", None) else None,
            ridge_lambda=getattr(args, "ridge_lambda", None),
            min_n=getattr(args, "min_n", None),
        )
        command = {
            "build": report.cmd_build,
            "fit": report.cmd_fit,
            "figures": report.cmd_figures,
            "all": report.cmd_all,
        }[args.command]
        command(cfg)
    except MissingPrerequisite as exc:
        print(f"eventcurve: missing prerequisite: {exc}", file=sys.stderr)
        return EXIT_MISSING_PREREQ
    except (InputError, FileNotFoundError) as exc:
        print(f"eventcurve: bad input: {exc}", file=sys.stderr)
        return EXIT_BAD_INPUT
    except Exception as exc:  # noqa: BLE001
        log.exception("internal error")
        print(f"eventcurve: internal error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
