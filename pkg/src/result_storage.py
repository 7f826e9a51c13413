import os
import json
import datetime
import subprocess
from typing import Any, Dict

import pandas as pd

from .config import logger, OUTPUT_DIR
from .errors import SimulatorError

PACKAGE_VERSION = '0.1.0'

# Fixed float format keeps reruns byte-identical
FLOAT_FORMAT = '%.10g'


def git_describe() -> str:
    '''`git describe --always --dirty` of the source tree, or "unknown"'''
    try:
        out = subprocess.run(['git', 'describe', '--always', '--dirty'],
                             cwd=os.path.dirname(os.path.abspath(__file__)),
                             capture_output=True, text=True, timeout=5)
    except (OSError, subprocess.SubprocessError):
        return 'unknown'
    return out.stdout.strip() if out.returncode == 0 and out.stdout.strip() else 'unknown'


class ResultStorage:
    '''Class to manage the output directory of one command'''

    def __init__(self, data_dir: str = None):
        '''Initialize storage, creating the directory if needed'''
        self.data_dir = os.path.abspath(data_dir or OUTPUT_DIR)
        try:
            os.makedirs(self.data_dir, exist_ok=True)
        except OSError as e:
            logger.error(f'Cannot create output directory {self.data_dir}: {e}')
            raise SimulatorError(f'Cannot create output directory {self.data_dir}: {e}')
        logger.info(f'Using output directory: {self.data_dir}')

    def get_file_path(self, name: str) -> str:
        '''Get the path of an output file'''
        return os.path.join(self.data_dir, name)

    def save_csv(self, name: str, frame: pd.DataFrame) -> str:
        '''Write a frame as CSV; missing values become empty cells'''
        path = self.get_file_path(name)
        try:
            frame.to_csv(path, index=False, float_format=FLOAT_FORMAT, na_rep='', lineterminator='\n')
        except OSError as e:
            logger.error(f'Error writing {path}: {e}')
            raise SimulatorError(f'Cannot write {path}: {e}')
        logger.info(f'Wrote {len(frame)} rows to {path}')
        return path

    def save_json(self, name: str, data: Dict[str, Any]) -> str:
        path = self.get_file_path(name)
        try:
            with open(path, 'w', encoding='utf-8') as f:
                json.dump(data, f, ensure_ascii=False, indent=2)
                f.write('\n')
        except (OSError, TypeError) as e:
            logger.error(f'Error writing {path}: {e}')
            raise SimulatorError(f'Cannot write {path}: {e}')
        logger.info(f'Wrote {path}')
        return path

    def build_metadata(self, **fields: Any) -> Dict[str, Any]:
        '''Run metadata: build identity plus whatever the command records'''
        return {
            'version': PACKAGE_VERSION,
            'git_describe': git_describe(),
            'created': datetime.datetime.now().strftime('%Y-%m-%d %H:%M:%S'),
            **fields,
        }
