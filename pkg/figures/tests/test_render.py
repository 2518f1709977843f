import warnings

import pytest

from mimosec_figures import BER_FLOOR, FigureSpec, SchemaError, render

HEADER = "algorithm,snr_db,metric,value,trials,seed\n"

GOLDEN = HEADER + "".join([
    "ZF,0,ber,0.1203,100,1\n",
    "ZF,5,ber,0.0803,100,1\n",
    "ZF,10,ber,0.0412,100,1\n",
    "ZF,15,ber,0.0152,100,1\n",
    "SO-THP+S-GMI,0,ber,0.0903,100,1\n",
    "SO-THP+S-GMI,5,ber,0.0502,100,1\n",
    "SO-THP+S-GMI,10,ber,0.0204,100,1\n",
    "SO-THP+S-GMI,15,ber,0,100,1\n",
    "ZF,0,secrecy_rate,0.41,100,1\n",
    "ZF,10,secrecy_rate,1.70,100,1\n",
    "SO-THP+S-GMI,0,secrecy_rate,1.8,100,1\n",
    "SO-THP+S-GMI,10,secrecy_rate,6.57,100,1\n",
    "SO-THP+S-GMI,0.3,secrecy_rate,4.1,100,1\n",
    "SO-THP+S-GMI,0.6,secrecy_rate,5.2,100,1\n",
    "SO-THP,4,flops,22208,1,1\n",
    "SO-THP,6,flops,145600,1,1\n",
    "SO-THP+S-GMI,4,flops,10758,1,1\n",
    "SO-THP+S-GMI,6,flops,32070,1,1\n",
])


@pytest.fixture
def golden_csv(tmp_path):
    path = tmp_path / "results.csv"
    path.write_text(GOLDEN)
    return str(path)


@pytest.mark.parametrize("kind", ["ber", "secrecy", "an_ratio", "flops"])
def test_all_kinds_render(golden_csv, tmp_path, kind):
    out = str(tmp_path / f"{kind}.png")
    fig = render(FigureSpec(input_csv=golden_csv, figure_kind=kind,
                            output_image=out))
    assert (tmp_path / f"{kind}.png").stat().st_size > 0
    ax = fig.axes[0]
    assert ax.get_xlabel() and ax.get_ylabel()
    assert ax.get_legend() is not None


def test_ber_log_axis_and_floor(golden_csv, tmp_path):
    out = str(tmp_path / "ber.png")
    fig = render(FigureSpec(input_csv=golden_csv, figure_kind="ber",
                            output_image=out))
    ax = fig.axes[0]
    assert ax.get_yscale() == "log"
    floored = [y for line in ax.get_lines() for y in line.get_ydata()]
    assert min(floored) == BER_FLOOR  # the zero-BER point sits on the floor
    assert all(y >= BER_FLOOR for y in floored)


def test_one_legend_entry_per_algorithm(golden_csv, tmp_path):
    fig = render(FigureSpec(input_csv=golden_csv, figure_kind="ber",
                            output_image=str(tmp_path / "b.png")))
    labels = [t.get_text() for t in fig.axes[0].get_legend().get_texts()]
    assert sorted(labels) == ["SO-THP+S-GMI", "ZF"]


def test_series_filter(golden_csv, tmp_path):
    fig = render(FigureSpec(input_csv=golden_csv, figure_kind="ber",
                            output_image=str(tmp_path / "b.png"),
                            series_filter=["ZF"]))
    labels = [t.get_text() for t in fig.axes[0].get_legend().get_texts()]
    assert labels == ["ZF"]


def test_header_only_csv_warns_but_renders(tmp_path):
    path = tmp_path / "empty.csv"
    path.write_text(HEADER)
    out = str(tmp_path / "empty.png")
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        fig = render(FigureSpec(input_csv=str(path), figure_kind="ber",
                                output_image=out))
    assert any("rendering empty axes" in str(w.message) for w in caught)
    assert (tmp_path / "empty.png").stat().st_size > 0
    assert not fig.axes[0].get_lines()


def test_missing_columns_listed(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("algorithm,value\nZF,0.1\n")
    with pytest.raises(SchemaError) as err:
        render(FigureSpec(input_csv=str(path), figure_kind="ber",
                          output_image=str(tmp_path / "x.png")))
    for column in ("snr_db", "metric", "trials", "seed"):
        assert column in str(err.value)


def test_unknown_kind(golden_csv, tmp_path):
    with pytest.raises(SchemaError):
        render(FigureSpec(input_csv=golden_csv, figure_kind="capacity",
                          output_image=str(tmp_path / "x.png")))


def test_rerender_identical_bytes(golden_csv, tmp_path):
    a, b = str(tmp_path / "a.png"), str(tmp_path / "b.png")
    render(FigureSpec(input_csv=golden_csv, figure_kind="secrecy",
                      output_image=a, timestamp=False))
    render(FigureSpec(input_csv=golden_csv, figure_kind="secrecy",
                      output_image=b, timestamp=False))
    assert open(a, "rb").read() == open(b, "rb").read()


def test_inputs_untouched(golden_csv, tmp_path):
    before = open(golden_csv).read()
    render(FigureSpec(input_csv=golden_csv, figure_kind="flops",
                      output_image=str(tmp_path / "f.png")))
    assert open(golden_csv).read() == before
