"""
Command line package - configuration, snapshots, CSV reports and subcommands.
"""

from .config import RunConfig, load_config, parse_config
from .reports import FLOAT_FORMAT, frame, write_csv
from .snapshot import snapshot_read, snapshot_write

__all__ = [
    'RunConfig',
    'load_config',
    'parse_config',
    'FLOAT_FORMAT',
    'frame',
    'write_csv',
    'snapshot_read',
    'snapshot_write',
]
