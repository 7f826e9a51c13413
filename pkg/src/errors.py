from typing import Optional


class SimulatorError(Exception):
    '''Base class for every error raised by the simulator'''


class ConfigurationError(SimulatorError, ValueError):
    '''Invalid settings, policy config, instance document or CLI arguments'''


class StreamError(SimulatorError, ValueError):
    '''A round stream cannot be built for the requested instance and arrivals'''


class BoundUndefinedError(SimulatorError, ValueError):
    '''A bound evaluator was called outside its preconditions'''


class TraceParseError(SimulatorError, ValueError):
    '''A trace file row failed validation'''

    def __init__(self, message: str, line: Optional[int] = None):
        self.line = line
        if line is not None:
            message = f'line {line}: {message}'
        super().__init__(message)


class ContractViolation(SimulatorError, RuntimeError):
    '''A caller broke an internal contract (programming error, never user input)'''
