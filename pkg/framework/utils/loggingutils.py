#!/usr/bin/env python
"""Utility functions for logging."""
import logging
from tqdm import tqdm


class TqdmConsoleHandler(logging.StreamHandler):
    """Write console log records without breaking active progress bars."""

    def emit(self, record):
        """Write the record through tqdm."""
        try:
            tqdm.write(self.format(record))
        except Exception:
            self.handleError(record)


def configure_logging(log_level, log_file=None):
    """Configure logging to write to console, to a file, or both.

    Parameters
    ----------
    log_level: str, required
        The level of messages to display in logs.
    log_file: str, optional
        The path of the log file.
    """
    log_level = getattr(logging, log_level.upper())
    root = logging.getLogger('')
    for handler in list(root.handlers):
        root.removeHandler(handler)
    console = TqdmConsoleHandler()
    console.setLevel(log_level)
    if log_file is not None:
        logging.basicConfig(
            format='%(asctime)s %(name)-12s %(levelname)-8s %(message)s',
            filename=log_file,
            filemode='w',
            level=log_level)
        console.setFormatter(
            logging.Formatter('%(name)-12s: %(levelname)-8s %(message)s'))
    else:
        root.setLevel(log_level)
        console.setFormatter(
            logging.Formatter('%(asctime)s : %(levelname)s : %(message)s'))
    root.addHandler(console)


def progress_disabled():
    """Return True when progress bars should be hidden.

    Progress bars are shown only when the root logger lets INFO messages through.
    """
    return not logging.getLogger('').isEnabledFor(logging.INFO)
