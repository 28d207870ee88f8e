"""
Application settings and configuration.
"""

import os
import logging
from pathlib import Path
from typing import Optional

# Application constants
APP_NAME = "dcov-bounds"
APP_VERSION = "1.0.0"

# Numerical tolerances
DEFAULT_TOLERANCE_ABS = 1e-9
IDENTITY_TOLERANCE_REL = 1e-10

# Output settings
HUMAN_DIGITS = 6
MACHINE_DIGITS = 17
OUTPUT_FORMATS = ["human", "json"]

# CSV dialect
DEFAULT_DELIMITER = ","

# Exit codes
EXIT_OK = 0
EXIT_CHAIN_VIOLATION = 1
EXIT_USAGE = 2
EXIT_INVALID_SAMPLE = 3
EXIT_OUTSIDE_BOX = 4

# Campaign defaults
DEFAULT_CAMPAIGN_CONFIG = {
    "replicates": 20,
    "tolerance_abs": DEFAULT_TOLERANCE_ABS,
    "record_failures": True,
    "workers": 1,
}

LOG_FORMAT = '%(asctime)s - %(name)s - %(levelname)s - %(message)s'


# Paths
def get_app_data_dir() -> Path:
    """Get application data directory."""
    if os.name == 'nt':  # Windows
        base_dir = Path(os.environ.get('APPDATA', Path.home()))
    else:  # Unix-like
        base_dir = Path.home() / '.local' / 'share'

    app_dir = base_dir / APP_NAME
    app_dir.mkdir(parents=True, exist_ok=True)
    return app_dir


def get_log_dir() -> Path:
    """Get log directory."""
    log_dir = get_app_data_dir() / 'logs'
    log_dir.mkdir(parents=True, exist_ok=True)
    return log_dir


def default_campaign_path() -> Path:
    """Path of the campaign configuration shipped with the package."""
    return Path(__file__).parent / 'default_campaign.json'


_installed_handlers = []


def setup_logging(level: int = logging.WARNING, log_file: Optional[Path] = None) -> None:
    """
    Setup application logging.

    Console output goes to stderr so that reports on stdout stay clean. A file
    handler is attached only when ``log_file`` is given; a bare file name is
    placed in :func:`get_log_dir`.
    """
    formatter = logging.Formatter(LOG_FORMAT)
    root_logger = logging.getLogger()

    # Calling twice (e.g. repeated CLI invocations in one process) must not
    # stack handlers
    for handler in _installed_handlers:
        root_logger.removeHandler(handler)
        handler.close()
    _installed_handlers.clear()

    console_handler = logging.StreamHandler()
    console_handler.setFormatter(formatter)
    console_handler.setLevel(level)
    _installed_handlers.append(console_handler)

    if log_file is not None:
        log_path = Path(log_file)
        if not log_path.parent.parts:
            log_path = get_log_dir() / log_path
        file_handler = logging.FileHandler(log_path)
        file_handler.setFormatter(formatter)
        file_handler.setLevel(level)
        _installed_handlers.append(file_handler)

    root_logger.setLevel(level)
    for handler in _installed_handlers:
        root_logger.addHandler(handler)
