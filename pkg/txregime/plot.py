""" Static SVG charts of equity curves. """

import matplotlib

matplotlib.use('Agg')

import matplotlib.pyplot as plt  # noqa: E402 pylint: disable=wrong-import-position

SVG_HASH_SALT = 'txregime'


def writeEquityCurveSvg(path, dates, equityCurves, title):
    """
    Draw one or more equity curves into an SVG file.
    The output only depends on the arguments, so re-running produces an identical file.

    :param path: The path of the SVG file.
    :param dates: The dates of the curve points.
    :param equityCurves: A dict mapping the legend label of each curve to its values.
    :param title: The title of the chart.
    """
    with matplotlib.rc_context({'svg.hashsalt': SVG_HASH_SALT, 'svg.fonttype': 'none'}):
        figure, axes = plt.subplots(figsize=(10, 4))
        try:
            for label in sorted(equityCurves):
                axes.plot(dates, equityCurves[label], label=label, linewidth=1.0)
            axes.set_title(title)
            axes.set_ylabel('Equity')
            axes.grid(True, alpha=0.3)
            axes.legend(loc='upper left')
            figure.autofmt_xdate()
            figure.savefig(path, format='svg', metadata={'Date': None})
        finally:
            plt.close(figure)
