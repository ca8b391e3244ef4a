"""The `report` command: render the charts of a run directory from its CSV outputs."""
import logging
from pathlib import Path
from typing import List
from framework.commands import diffnas
from framework.commands import rankeval
from framework.commands import search
from framework.errors import InvalidInputError
from framework.utils.dataframeutils import load_data_frame

CHARTS = [
    (rankeval.RHO_FILE, rankeval.CHART_FILE, rankeval.rank_correlation_chart),
    (search.REPORT_FILE, search.CHART_FILE, search.search_chart),
    (diffnas.REPORT_FILE, diffnas.CHART_FILE, diffnas.diffnas_chart),
]


def run_report(run_dir) -> List[Path]:
    """Render an SVG chart for every report found in a run directory.

    Parameters
    ----------
    run_dir: str or Path, required
        The output directory of a previous command.

    Returns
    -------
    charts: list of Path
        The charts written.
    """
    run_dir = Path(run_dir)
    if not run_dir.is_dir():
        raise InvalidInputError("run directory {} does not exist".format(run_dir))
    charts = []
    for report_file, chart_file, build_chart in CHARTS:
        report_path = run_dir / report_file
        if not report_path.is_file():
            continue
        chart_path = run_dir / chart_file
        build_chart(load_data_frame(report_path)).save(chart_path)
        logging.info("Rendered %s from %s.", chart_path, report_path)
        charts.append(chart_path)
    if len(charts) == 0:
        raise InvalidInputError("no report found in {}".format(run_dir))
    return charts
