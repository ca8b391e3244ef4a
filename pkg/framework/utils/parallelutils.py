#!/usr/bin/env python
"""Utility functions for running independent tasks in a worker pool."""
import logging
from concurrent.futures import ProcessPoolExecutor
from tqdm import tqdm
from framework.utils.loggingutils import progress_disabled


def run_in_pool(function, tasks, jobs=1, description=None):
    """Apply a function to every task using at most `jobs` worker processes.

    Parameters
    ----------
    function: callable, required
        A picklable top-level function taking a single task.
    tasks: list, required
        The tasks to process.
    jobs: int, optional
        The maximum number of worker processes; 1 runs the tasks in-process.
    description: str, optional
        The label of the progress bar.

    Returns
    -------
    results: list
        The results, in the order of `tasks`.
    """
    tasks = list(tasks)
    jobs = max(1, min(int(jobs), len(tasks))) if tasks else 1
    progress = tqdm(total=len(tasks),
                    desc=description,
                    disable=progress_disabled())
    results = []
    try:
        if jobs == 1:
            for task in tasks:
                results.append(function(task))
                progress.update(1)
        else:
            logging.debug("Running %s tasks on %s workers.", len(tasks), jobs)
            with ProcessPoolExecutor(max_workers=jobs) as executor:
                for result in executor.map(function, tasks):
                    results.append(result)
                    progress.update(1)
    finally:
        progress.close()
    return results
