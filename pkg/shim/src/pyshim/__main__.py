"""Entry point: serve stdin/stdout, or run the built-in selftest."""

import sys

from pyshim.server import selftest, serve


def main(argv: list[str] | None = None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    if argv == ["--selftest"]:
        return selftest()
    if argv:
        print(f"pyshim: unknown arguments: {' '.join(argv)}", file=sys.stderr)
        return 2
    serve(sys.stdin, sys.stdout)
    return 0


if __name__ == "__main__":
    sys.exit(main())
