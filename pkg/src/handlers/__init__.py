# Command-line handlers
from . import commands
from .register import CommandRegistry, build_registry
