"""Tests of the SVG line charts."""
import math
from lxml import etree
from framework.utils.svgutils import SVG_NAMESPACE
from framework.utils.svgutils import LineChart
from framework.utils.svgutils import nice_ticks


def test_nice_ticks_cover_the_range():
    assert nice_ticks(0.0, 1.0) == [0.0, 0.2, 0.4, 0.6, 0.8, 1.0]
    assert nice_ticks(3.0, 3.0) == [3.0]


def test_chart_has_one_polyline_per_series(tmp_path):
    chart = LineChart("title", "x", "y")
    chart.add_series("first", [1, 2, 3], [0.1, 0.5, 0.4])
    chart.add_series("second", [1, 2], [math.nan, 0.2])
    path = tmp_path / 'chart.svg'
    chart.save(path)
    root = etree.parse(str(path)).getroot()
    polylines = root.findall('{%s}polyline' % SVG_NAMESPACE)
    assert len(polylines) == 2
    assert len(polylines[1].get('points').split()) == 1
    texts = [t.text for t in root.iter('{%s}text' % SVG_NAMESPACE)]
    assert 'title' in texts
    assert 'second' in texts
    assert chart.series_names == ['first', 'second']


def test_empty_chart_renders():
    svg = LineChart("empty", "x", "y").render()
    assert svg.startswith(b"<?xml")
