import argparse
import sys
from typing import Callable, Dict, List, Optional

from ..config import logger, COMMANDS, get_commands_help_text

Handler = Callable[[argparse.Namespace], int]


def common_parser() -> argparse.ArgumentParser:
    '''Flags shared by every subcommand'''
    parser = argparse.ArgumentParser(add_help=False)
    parser.add_argument('--config', help='Experiment JSON; command-line flags override its fields')
    parser.add_argument('--out', help='Output directory (default $HI_OUTPUT_DIR)')
    parser.add_argument('--threads', type=int, help='Worker processes for per-seed episodes (default $HI_THREADS)')
    parser.add_argument('--seed', type=int, help='Base seed; seed_i = seed + i (default $HI_BASE_SEED)')
    parser.add_argument('--log-level', choices=['DEBUG', 'INFO', 'WARNING', 'ERROR'], help='Logging level')
    return parser


class CommandRegistry:
    '''Class responsible for turning the COMMANDS table into argparse subcommands'''

    def __init__(self, prog: str = 'hi-offload'):
        self.parser = argparse.ArgumentParser(
            prog=prog,
            description='Hierarchical inference offloading simulator',
            epilog=get_commands_help_text(),
            formatter_class=argparse.RawDescriptionHelpFormatter,
        )
        self.subparsers = self.parser.add_subparsers(dest='command', metavar='command')
        self.subparsers.required = True
        self.handlers: Dict[str, Handler] = {}

    def register_all(self) -> 'CommandRegistry':
        '''Register a subcommand per COMMANDS entry'''
        current_module = sys.modules['src.handlers.commands']
        parent = common_parser()

        for cmd in COMMANDS:
            handler_func = getattr(current_module, cmd.handler, None)
            add_arguments = getattr(current_module, f'{cmd.command}_arguments', None)
            if handler_func is None or add_arguments is None:
                logger.error(f'Handler {cmd.handler} not found for command {cmd.command}')
                continue
            subparser = self.subparsers.add_parser(cmd.command, help=cmd.description,
                                                   description=cmd.description, parents=[parent])
            add_arguments(subparser)
            self.handlers[cmd.command] = handler_func
            logger.debug(f'Registered command {cmd.command}')
        return self

    def parse(self, argv: Optional[List[str]] = None) -> argparse.Namespace:
        return self.parser.parse_args(argv)

    def dispatch(self, args: argparse.Namespace) -> int:
        return self.handlers[args.command](args)


def build_registry() -> CommandRegistry:
    '''Parser with every configured command registered'''
    return CommandRegistry().register_all()
