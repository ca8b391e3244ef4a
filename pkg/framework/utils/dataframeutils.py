#!/usr/bin/env python
"""Utility functions for pandas.DataFrame objects."""
from pathlib import Path
import pandas as pd
import csv


def build_data_frame(records, columns):
    """Build a data frame with a fixed column order.

    Parameters
    ----------
    records: iterable of dict, required
        The rows of the data frame.
    columns: list of str, required
        The columns of the data frame, in output order.

    Returns
    -------
    data_frame: pandas.DataFrame
        The data frame; missing values are NaN and extra keys are dropped.
    """
    return pd.DataFrame.from_records(list(records), columns=columns)


def save_data_frame(data_frame: pd.DataFrame,
                    file_name: str,
                    append: bool = False):
    """Save the provided data frame into specified CSV file.

    Parameters
    ----------
    data_frame: pandas.DataFrame, required
        The data frame to save.
    file_name: str, required
        The path of the CSV file where to save the data frame.
    append: bool, optional
        If set to True the data will be appended to existing CSV file without
        repeating the header; otherwise the file will be overwritten.
    """
    output_file = Path(file_name)
    if not output_file.parent.exists():
        output_file.parent.mkdir(parents=True, exist_ok=True)
    write_mode = 'a' if append and output_file.exists() else 'w'
    data_frame.to_csv(str(output_file),
                      quoting=csv.QUOTE_NONNUMERIC,
                      mode=write_mode,
                      header=write_mode == 'w',
                      index=False,
                      float_format='%.17g',
                      lineterminator='\n')


def load_data_frame(file_name: str) -> pd.DataFrame:
    """Load a CSV file written by `save_data_frame`.

    Parameters
    ----------
    file_name: str, required
        The path of the CSV file.

    Returns
    -------
    data_frame: pandas.DataFrame
        The contents of the file.
    """
    return pd.read_csv(file_name)
