"""
microinit - command line entry point
Infers latent initial microstates of chaotic systems from scalar observations
"""

import argparse
import json
import logging
import sys
from typing import List, Optional

from dotenv import load_dotenv

from microinit import __version__
from microinit.config import get_settings
from microinit.exceptions import ConfigError, MicroinitError

logger = logging.getLogger("microinit")


class CommandParser(argparse.ArgumentParser):
    """Argument parser whose usage errors go through the JSON error path"""

    def error(self, message: str):
        raise ConfigError(f"invalid arguments: {message}", usage=self.format_usage().strip())


def build_parser() -> argparse.ArgumentParser:
    # Import command modules
    from microinit.cli import analysis, ensemble, initialize, simulate, studies

    parser = CommandParser(
        prog="microinit",
        description="Microstate initialization from short aggregated observation series",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="count", default=0, help="-v info, -vv debug")
    subparsers = parser.add_subparsers(dest="command", required=True)

    # Register commands
    for module in (simulate, initialize, ensemble, analysis, studies):
        module.register(subparsers)
    return parser


def configure_logging(verbosity: int) -> None:
    if verbosity >= 2:
        level = logging.DEBUG
    elif verbosity == 1:
        level = logging.INFO
    else:
        level = getattr(logging, get_settings().log_level.upper(), logging.WARNING)
    logging.basicConfig(level=level, format="%(asctime)s %(levelname)s %(name)s: %(message)s")


def main(argv: Optional[List[str]] = None) -> int:
    # Load environment variables from .env file
    load_dotenv()
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    command = None

    try:
        args = parser.parse_args(argv)
        args.argv = argv
        command = args.command
        configure_logging(args.verbose)
        return args.handler(args)
    except MicroinitError as exc:
        logger.debug("command %s failed", command, exc_info=True)
        print(json.dumps(exc.to_dict(), sort_keys=True, default=str), file=sys.stderr)
        return exc.exit_code


if __name__ == "__main__":
    sys.exit(main())
