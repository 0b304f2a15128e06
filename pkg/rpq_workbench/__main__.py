import sys

from .cli import Program

if __name__ == "__main__":
    raise SystemExit(Program().main(sys.argv[1:]))
