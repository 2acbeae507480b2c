"""
 Licensed under the Apache License, Version 2.0 (the "License");
 you may not use this file except in compliance with the License.
 You may obtain a copy of the License at
      http://www.apache.org/licenses/LICENSE-2.0
 Unless required by applicable law or agreed to in writing, software
 distributed under the License is distributed on an "AS IS" BASIS,
 WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 See the License for the specific language governing permissions and
 limitations under the License.
"""
import logging
import sys
from contextlib import contextmanager

MDSP_LOGGER_NAME = "mdsp"
LOG_FORMAT = "%(levelname)s:%(name)s:%(message)s"

logger = logging.getLogger(MDSP_LOGGER_NAME)


def _attach_stdout_handler():
    handler = logging.StreamHandler(sys.stdout)
    handler.setFormatter(logging.Formatter(LOG_FORMAT))
    handler.setLevel(logging.INFO)
    logger.addHandler(handler)
    logger.setLevel(logging.INFO)


if not logger.handlers:
    _attach_stdout_handler()


def set_log_level(level):
    """Accepts a logging constant or its name, e.g. "debug"."""
    if isinstance(level, str):
        resolved = logging.getLevelName(level.upper())
        if not isinstance(resolved, int):
            raise ValueError("Unknown log level: {}".format(level))
        level = resolved
    logger.setLevel(level)
    for handler in logger.handlers:
        handler.setLevel(level)


def disable_logging():
    logger.handlers = []


def is_debug() -> bool:
    return logger.getEffectiveLevel() == logging.DEBUG


def progress_enabled() -> bool:
    """Progress bars are shown whenever INFO messages would be."""
    return bool(logger.handlers) and logger.isEnabledFor(logging.INFO)


@contextmanager
def quieted(level=logging.WARNING):
    """Drops messages below `level` for the duration, unless debug output was asked for."""
    previous = logger.level
    if not is_debug():
        logger.setLevel(max(previous, level))
    try:
        yield
    finally:
        logger.setLevel(previous)
