import os
import logging
from dotenv import load_dotenv
from dataclasses import dataclass
from typing import List

from .errors import ConfigurationError

# Load environment variables from .env file
load_dotenv()


def _env_int(name: str, default: int, minimum: int) -> int:
    '''Read an integer setting, rejecting garbage and values below the minimum'''
    raw = os.getenv(name)
    if raw is None or raw.strip() == '':
        return default
    try:
        value = int(raw)
    except ValueError:
        raise ConfigurationError(f'{name} must be an integer, got {raw!r}.')
    if value < minimum:
        raise ConfigurationError(f'{name} must be >= {minimum}, got {value}.')
    return value


def _env_flag(name: str) -> bool:
    return os.getenv(name, '').strip().lower() in ('1', 'true', 'yes', 'on')


# Output settings
OUTPUT_DIR = os.getenv('HI_OUTPUT_DIR', os.path.join(os.getcwd(), 'results'))

# Worker pool size for Monte-Carlo fan-out
THREADS = _env_int('HI_THREADS', os.cpu_count() or 1, 1)

# Base seed; seed_i = BASE_SEED + i
BASE_SEED = _env_int('HI_BASE_SEED', 0, 0)

# Exploration parameter used when a policy config omits alpha
try:
    DEFAULT_ALPHA = float(os.getenv('HI_DEFAULT_ALPHA', '0.52'))
except ValueError:
    raise ConfigurationError('HI_DEFAULT_ALPHA must be a number.')
if not DEFAULT_ALPHA > 0.5:
    raise ConfigurationError(f'HI_DEFAULT_ALPHA must be > 0.5, got {DEFAULT_ALPHA}.')

# Rounds excluded from runtime measurements in the benchmark
BENCH_WARMUP = _env_int('HI_BENCH_WARMUP', 1000, 0)

# Check policy invariants after every round (slow)
DEBUG_INVARIANTS = _env_flag('HI_DEBUG_INVARIANTS')

# Checkpoints used when an experiment does not list any
DEFAULT_CHECKPOINTS = [1000, 3000, 10000, 30000, 100000]

# Command definitions
@dataclass
class CommandDefinition:
    '''Definition of a CLI subcommand'''
    command: str
    description: str
    handler: str  # Name of the handler function in src.handlers.commands

# Centralized command definitions
COMMANDS: List[CommandDefinition] = [
    CommandDefinition('simulate', 'Run Monte-Carlo episodes and write the regret-vs-time CSV', 'simulate_command'),
    CommandDefinition('sweep', 'Sweep the offload cost or the exploration parameter at the final horizon', 'sweep_command'),
    CommandDefinition('bench', 'Measure per-decision runtime against the grid size', 'bench_command'),
    CommandDefinition('bounds', 'Evaluate the analytic regret bounds of an instance', 'bounds_command'),
    CommandDefinition('ingest', 'Quantize a (confidence, correct) trace into an instance', 'ingest_command'),
]

def get_commands_help_text() -> str:
    '''Generate help text from command definitions'''
    return '\n'.join(f'  {cmd.command:<10} {cmd.description}' for cmd in COMMANDS)

# Logging configuration
LOG_LEVEL = os.getenv('HI_LOG_LEVEL', 'INFO').upper()
if not isinstance(getattr(logging, LOG_LEVEL, None), int):
    raise ConfigurationError(f'HI_LOG_LEVEL {LOG_LEVEL!r} is not a logging level.')
logging.basicConfig(
    format='%(asctime)s - %(name)s - %(levelname)s - %(message)s',
    level=getattr(logging, LOG_LEVEL)
)
logger = logging.getLogger('hi_offload')
