"""Command line entry: python3 -m extgen_stub --mode echo|template|abstain-all."""

from __future__ import annotations

import argparse
import sys

from . import MODES, StubConfig, serve


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="extgen-stub",
        description="Answer fcg-extgen protocol requests with canned comments.",
    )
    parser.add_argument("--mode", choices=MODES, default="template")
    parser.add_argument(
        "--tcp",
        type=int,
        metavar="PORT",
        help="serve one TCP connection on 127.0.0.1:PORT instead of stdio "
        "(0 picks a free port, printed on stdout)",
    )
    args = parser.parse_args(argv)
    if args.tcp is None:
        sys.stdin.reconfigure(encoding="utf-8")
        sys.stdout.reconfigure(encoding="utf-8")
    try:
        serve(StubConfig(mode=args.mode, port=args.tcp))
    except BrokenPipeError:  # client went away mid-response; nothing to save
        pass
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
