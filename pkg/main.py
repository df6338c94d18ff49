import logging
import sys

from cli.app import run

logging.basicConfig(stream=sys.stderr, level=logging.INFO, format="%(levelname)s %(name)s: %(message)s")

if __name__ == "__main__":
    sys.exit(run())
