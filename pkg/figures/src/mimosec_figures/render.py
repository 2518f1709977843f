"""Render sweep result CSVs into publication-style figures.

Reads the fixed six-column schema emitted by the simulation harness
(``algorithm,snr_db,metric,value,trials,seed``) and draws one line series per
algorithm. The figure kind selects the axis semantics; rendering never
modifies its inputs.
"""

import csv
import warnings
from dataclasses import dataclass, field

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

__all__ = ["FigureSpec", "SchemaError", "render", "BER_FLOOR", "FIGURE_KINDS"]

REQUIRED_COLUMNS = ["algorithm", "snr_db", "metric", "value", "trials", "seed"]

# Zero BER cannot sit on a log axis; points are floored here instead.
BER_FLOOR = 1e-7

FIGURE_KINDS = ("ber", "secrecy", "an_ratio", "flops")

_KIND_SETTINGS = {
    "ber": {"metric": "ber", "xlabel": "SNR (dB)", "ylabel": "BER",
            "yscale": "log", "title": "BER vs SNR"},
    "secrecy": {"metric": "secrecy_rate", "xlabel": "SNR (dB)",
                "ylabel": "Secrecy rate (bits/s/Hz)", "yscale": "linear",
                "title": "Secrecy rate vs SNR"},
    "an_ratio": {"metric": "secrecy_rate", "xlabel": "Signal power fraction rho",
                 "ylabel": "Secrecy rate (bits/s/Hz)", "yscale": "linear",
                 "title": "Secrecy rate vs AN power split"},
    "flops": {"metric": "flops", "xlabel": "Transmit antennas",
              "ylabel": "FLOPs", "yscale": "linear",
              "title": "Computational cost vs antenna count"},
}


class SchemaError(ValueError):
    """The input CSV does not match the sweep results schema."""


@dataclass
class FigureSpec:
    """One figure to render: input CSV, kind, output path, optional filter."""

    input_csv: str
    figure_kind: str
    output_image: str
    series_filter: list = field(default_factory=list)
    timestamp: bool = False


def read_series(path: str, metric: str, series_filter=()):
    """Per-algorithm (x, y) series for one metric, sorted by sweep variable."""
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        missing = [c for c in REQUIRED_COLUMNS if c not in (reader.fieldnames or [])]
        if missing:
            raise SchemaError(f"input CSV is missing required columns: {missing}")
        series: dict = {}
        for row in reader:
            if row["metric"] != metric:
                continue
            name = row["algorithm"]
            if series_filter and name not in series_filter:
                continue
            series.setdefault(name, []).append((float(row["snr_db"]),
                                                float(row["value"])))
    return {name: sorted(points) for name, points in series.items()}


def render(spec: FigureSpec):
    """Render one figure and write it to ``spec.output_image``.

    Returns the matplotlib Figure so callers (and tests) can inspect axes,
    scales, and legend entries. An input without matching rows produces an
    empty-axes figure and a warning rather than an error.
    """
    if spec.figure_kind not in _KIND_SETTINGS:
        raise SchemaError(f"unknown figure kind {spec.figure_kind!r}; "
                          f"expected one of {FIGURE_KINDS}")
    settings = _KIND_SETTINGS[spec.figure_kind]
    series = read_series(spec.input_csv, settings["metric"], spec.series_filter)

    fig, ax = plt.subplots(figsize=(6.4, 4.8))
    for name in sorted(series):
        points = series[name]
        x = [p[0] for p in points]
        y = [p[1] for p in points]
        if spec.figure_kind == "ber":
            y = [max(v, BER_FLOOR) for v in y]
        ax.plot(x, y, marker="o", label=name)
    ax.set_xlabel(settings["xlabel"])
    ax.set_ylabel(settings["ylabel"])
    ax.set_yscale(settings["yscale"])
    ax.set_title(settings["title"])
    ax.grid(True, which="both", alpha=0.3)
    if series:
        ax.legend()
    else:
        warnings.warn(f"no {settings['metric']!r} rows found in {spec.input_csv}; "
                      "rendering empty axes")

    metadata = None
    if not spec.timestamp and spec.output_image.endswith(".png"):
        metadata = {"Software": "mimosec-figures"}
    fig.savefig(spec.output_image, dpi=120, metadata=metadata)
    plt.close(fig)
    return fig
