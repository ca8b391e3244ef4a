#!/usr/bin/env python
"""Minimal SVG line-chart emitter."""
import math
from lxml import etree
from framework.utils.fileutils import ensure_parent_directory

SVG_NAMESPACE = "http://www.w3.org/2000/svg"
PALETTE = ('#1f77b4', '#ff7f0e', '#2ca02c', '#d62728', '#9467bd', '#8c564b',
           '#e377c2', '#7f7f7f', '#bcbd22', '#17becf')


def nice_ticks(low, high, count=5):
    """Compute evenly spaced tick values covering the provided range.

    Parameters
    ----------
    low: float, required
        The lower end of the range.
    high: float, required
        The upper end of the range.
    count: int, optional
        The approximate number of ticks.

    Returns
    -------
    ticks: list of float
        The tick values.
    """
    if high <= low:
        return [low]
    raw_step = (high - low) / max(count, 1)
    magnitude = 10**math.floor(math.log10(raw_step))
    step = magnitude
    for factor in (1, 2, 2.5, 5, 10):
        step = factor * magnitude
        if step >= raw_step:
            break
    start = math.ceil(low / step) * step
    ticks = []
    value = start
    while value <= high + 1e-9 * step:
        ticks.append(round(value, 12))
        value += step
    return ticks


class LineChart:
    """Build a line chart with axes, ticks, a legend and one polyline per series."""

    def __init__(self, title, x_label, y_label, width=640, height=400):
        """Create a new instance of the class.

        Parameters
        ----------
        title: str, required
            The title of the chart.
        x_label: str, required
            The label of the horizontal axis.
        y_label: str, required
            The label of the vertical axis.
        width: int, optional
            The width of the image in pixels.
        height: int, optional
            The height of the image in pixels.
        """
        self.title = title
        self.x_label = x_label
        self.y_label = y_label
        self.width = width
        self.height = height
        self.__series = []
        self.__margin = {'left': 64, 'right': 160, 'top': 40, 'bottom': 52}

    @property
    def series_names(self):
        """Get the names of the series added so far."""
        return [name for name, _ in self.__series]

    def add_series(self, name, xs, ys):
        """Add a series to the chart; points with non-finite values are skipped.

        Parameters
        ----------
        name: str, required
            The name shown in the legend.
        xs: iterable of float, required
            The horizontal coordinates.
        ys: iterable of float, required
            The vertical coordinates.
        """
        points = [(float(x), float(y)) for x, y in zip(xs, ys)
                  if math.isfinite(float(x)) and math.isfinite(float(y))]
        self.__series.append((name, points))

    def render(self):
        """Render the chart.

        Returns
        -------
        svg: bytes
            The UTF-8 encoded SVG document.
        """
        root = etree.Element('{%s}svg' % SVG_NAMESPACE,
                             nsmap={None: SVG_NAMESPACE},
                             width=str(self.width),
                             height=str(self.height),
                             viewBox="0 0 {} {}".format(
                                 self.width, self.height))
        self.__add_text(root, self.width / 2, 22, self.title,
                        **{'text-anchor': 'middle', 'font-size': '15'})
        x_range, y_range = self.__data_ranges()
        self.__draw_axes(root, x_range, y_range)
        for index, (name, points) in enumerate(self.__series):
            color = PALETTE[index % len(PALETTE)]
            if len(points) > 0:
                coordinates = " ".join(
                    "{:.2f},{:.2f}".format(*self.__to_pixels(
                        x, y, x_range, y_range)) for x, y in points)
                etree.SubElement(root,
                                 '{%s}polyline' % SVG_NAMESPACE,
                                 points=coordinates,
                                 fill='none',
                                 stroke=color,
                                 **{'stroke-width': '2'})
            self.__draw_legend_entry(root, index, name, color)
        return etree.tostring(root,
                              xml_declaration=True,
                              encoding='UTF-8',
                              pretty_print=True)

    def save(self, file_name):
        """Render the chart and save it into the provided file.

        Parameters
        ----------
        file_name: str or Path, required
            The path of the SVG file.
        """
        path = ensure_parent_directory(file_name)
        with open(str(path), 'wb') as f:
            f.write(self.render())

    def __data_ranges(self):
        """Compute the ranges of the data on both axes."""
        xs = [x for _, points in self.__series for x, _ in points]
        ys = [y for _, points in self.__series for _, y in points]
        if len(xs) == 0:
            return (0.0, 1.0), (0.0, 1.0)
        x_range = (min(xs), max(xs))
        y_range = (min(ys), max(ys))
        if x_range[1] == x_range[0]:
            x_range = (x_range[0] - 0.5, x_range[1] + 0.5)
        if y_range[1] == y_range[0]:
            y_range = (y_range[0] - 0.5, y_range[1] + 0.5)
        return x_range, y_range

    def __to_pixels(self, x, y, x_range, y_range):
        """Map data coordinates onto the plotting area."""
        left, top = self.__margin['left'], self.__margin['top']
        plot_width = self.width - left - self.__margin['right']
        plot_height = self.height - top - self.__margin['bottom']
        px = left + (x - x_range[0]) / (x_range[1] - x_range[0]) * plot_width
        py = top + (1.0 - (y - y_range[0]) /
                    (y_range[1] - y_range[0])) * plot_height
        return px, py

    def __draw_axes(self, root, x_range, y_range):
        """Draw both axes with their ticks and labels."""
        x0, y0 = self.__to_pixels(x_range[0], y_range[0], x_range, y_range)
        x1, y1 = self.__to_pixels(x_range[1], y_range[1], x_range, y_range)
        axis_style = {'stroke': 'black', 'stroke-width': '1'}
        self.__add_line(root, x0, y0, x1, y0, **axis_style)
        self.__add_line(root, x0, y0, x0, y1, **axis_style)
        for tick in nice_ticks(*x_range):
            px, _ = self.__to_pixels(tick, y_range[0], x_range, y_range)
            self.__add_line(root, px, y0, px, y0 + 5, **axis_style)
            self.__add_text(root, px, y0 + 18, "{:g}".format(tick),
                            **{'text-anchor': 'middle', 'font-size': '11'})
        for tick in nice_ticks(*y_range):
            _, py = self.__to_pixels(x_range[0], tick, x_range, y_range)
            self.__add_line(root, x0 - 5, py, x0, py, **axis_style)
            self.__add_text(root, x0 - 8, py + 4, "{:g}".format(tick),
                            **{'text-anchor': 'end', 'font-size': '11'})
        self.__add_text(root, (x0 + x1) / 2, self.height - 12, self.x_label,
                        **{'text-anchor': 'middle', 'font-size': '12'})
        label = self.__add_text(root, 16, (y0 + y1) / 2, self.y_label,
                                **{'text-anchor': 'middle', 'font-size': '12'})
        label.set('transform', "rotate(-90 16 {:.2f})".format((y0 + y1) / 2))

    def __draw_legend_entry(self, root, index, name, color):
        """Draw the legend entry of a series."""
        x = self.width - self.__margin['right'] + 16
        y = self.__margin['top'] + 18 * index
        self.__add_line(root, x, y, x + 20, y, stroke=color,
                        **{'stroke-width': '2'})
        self.__add_text(root, x + 26, y + 4, name, **{'font-size': '11'})

    def __add_line(self, root, x1, y1, x2, y2, **attributes):
        """Append a line element."""
        return etree.SubElement(root,
                                '{%s}line' % SVG_NAMESPACE,
                                x1="{:.2f}".format(x1),
                                y1="{:.2f}".format(y1),
                                x2="{:.2f}".format(x2),
                                y2="{:.2f}".format(y2),
                                **attributes)

    def __add_text(self, root, x, y, text, **attributes):
        """Append a text element."""
        element = etree.SubElement(root,
                                   '{%s}text' % SVG_NAMESPACE,
                                   x="{:.2f}".format(x),
                                   y="{:.2f}".format(y),
                                   **attributes)
        element.text = str(text)
        return element
