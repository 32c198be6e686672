import logging
import sys
from logging.handlers import RotatingFileHandler
from pathlib import Path
from typing import List, Optional

import colorlog

from sftkit.config import LoggingConfig

LOG_FORMAT = "%(asctime)s %(levelname)-8s %(name)s: %(message)s"
COLOR_FORMAT = "%(log_color)s%(asctime)s %(levelname)-8s%(reset)s %(name)s: %(message)s"

# Handlers installed by configure_logging, replaced on every call
_installed_handlers: List[logging.Handler] = []


def configure_logging(
    logging_config: LoggingConfig, level_override: Optional[str] = None
) -> logging.Logger:
    """Configure the sftkit logger hierarchy from the logging section of the config."""
    root = logging.getLogger("sftkit")
    level_name = (level_override or logging_config.level).upper()
    root.setLevel(getattr(logging, level_name, logging.WARNING))

    # Remove handlers from a previous call
    for handler in _installed_handlers:
        root.removeHandler(handler)
        handler.close()
    _installed_handlers.clear()

    # Console handler on stderr, stdout is reserved for reports
    stream_handler = logging.StreamHandler(sys.stderr)
    if logging_config.use_color:
        stream_handler.setFormatter(
            colorlog.ColoredFormatter(
                COLOR_FORMAT,
                log_colors={
                    "DEBUG": "cyan",
                    "INFO": "green",
                    "WARNING": "yellow",
                    "ERROR": "red",
                    "CRITICAL": "red,bg_white",
                },
            )
        )
    else:
        stream_handler.setFormatter(logging.Formatter(LOG_FORMAT))
    root.addHandler(stream_handler)
    _installed_handlers.append(stream_handler)

    # Optional rotating file handler
    if logging_config.log_to_file:
        log_dir = Path(logging_config.log_dir)
        log_dir.mkdir(parents=True, exist_ok=True)
        file_handler = RotatingFileHandler(
            log_dir / "sftkit.log",
            maxBytes=logging_config.max_size_mb * 1024 * 1024,
            backupCount=logging_config.backup_count,
        )
        file_handler.setFormatter(logging.Formatter(LOG_FORMAT))
        root.addHandler(file_handler)
        _installed_handlers.append(file_handler)

    return root
