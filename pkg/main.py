import logging
import sys
from typing import List, Optional

from src.config import logger
from src.errors import SimulatorError
from src.handlers import build_registry


def main(argv: Optional[List[str]] = None) -> int:
    '''Parse the command line and run one subcommand; returns the exit code'''
    registry = build_registry()
    args = registry.parse(argv)  # usage errors exit with 2 here
    if args.log_level:
        logger.setLevel(getattr(logging, args.log_level))

    try:
        return registry.dispatch(args)
    except SimulatorError as e:
        logger.error(f'{args.command} failed: {e}')
        return 1
    except Exception as e:
        logger.error(f'Unexpected error during {args.command}: {e}', exc_info=True)
        return 1


if __name__ == '__main__':
    try:
        sys.exit(main())
    except KeyboardInterrupt:
        logger.info('Stopped by user')
        sys.exit(130)
