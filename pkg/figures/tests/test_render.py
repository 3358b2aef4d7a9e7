import os

import numpy as np
import pytest

from ltfigures.render import FIGURES, FigureSpec, InputError, main, read_series, render


def test_all_ten_figures_render(csv_dirs, tmp_path):
    produced = []
    for name, csv_dir in csv_dirs.items():
        out = tmp_path / name
        assert main([str(csv_dir), str(out)]) == 0
        images = sorted(os.listdir(out))
        assert images == ["figure1.png", "figure2.png", "figure3.png", "figure4.png", "figure5.png"]
        for img in images:
            assert (out / img).stat().st_size > 1000
            assert (out / img).read_bytes()[:8] == b"\x89PNG\r\n\x1a\n"
        produced.extend(images)
    assert len(produced) == 10


def _clusters(values, gap=1.2):
    ordered = sorted(values)
    groups = [[ordered[0]]]
    for v in ordered[1:]:
        if v > gap * groups[-1][-1]:
            groups.append([v])
        else:
            groups[-1].append(v)
    return groups


def test_serre_prediction_has_four_bands(csv_dirs):
    # group the predicted column by r mod 6: exactly 4 distinct plateau levels
    r, f = read_series(str(csv_dirs["serre"] / "figure2.csv"), "predicted")
    r = r.astype(int)
    window = (np.abs(r) <= 120)
    means = []
    for b in range(6):
        sel = window & (r % 6 == b)
        assert sel.sum() > 20
        means.append(float(np.mean(f[sel])))
    groups = _clusters(means)
    assert len(groups) == 4
    assert sorted(len(g) for g in groups) == [1, 1, 2, 2]
    lo, hi = groups[0][0], groups[-1][-1]
    assert hi / lo == pytest.approx(7 / 4 / (1 / 2), rel=0.1)


def test_cm_figure4_has_nan_rows(csv_dirs):
    # vanished-constant classes: relative error is nan there, and rendering copes
    _r, f = read_series(str(csv_dirs["cm"] / "figure4.csv"), "rel_err")
    assert np.isnan(f).any()


def test_empty_csv_renders_empty_axes(tmp_path):
    src = tmp_path / "figure1.csv"
    src.write_text("r,observed\n")
    spec = FigureSpec(
        csv_path=str(src),
        title="t",
        xlabel="r",
        ylabel="v",
        out_path=str(tmp_path / "empty.png"),
        value_column="observed",
    )
    assert render(spec) == str(tmp_path / "empty.png")
    assert (tmp_path / "empty.png").stat().st_size > 0


def test_header_only_directory_renders_cleanly(tmp_path):
    csv_dir = tmp_path / "empty"
    csv_dir.mkdir()
    for name, (col, _t) in FIGURES.items():
        (csv_dir / name).write_text("r,%s\n" % col)
    assert main([str(csv_dir), str(tmp_path / "out")]) == 0
    assert len(os.listdir(tmp_path / "out")) == 5


def test_missing_and_garbled_inputs(tmp_path):
    assert main([str(tmp_path / "nowhere"), str(tmp_path / "out")]) == 1
    csv_dir = tmp_path / "partial"
    csv_dir.mkdir()
    for name, (col, _t) in FIGURES.items():
        (csv_dir / name).write_text("r,%s\n1,2\n" % col)
    (csv_dir / "figure3.csv").write_text("wrong,header\n1,2\n")
    assert main([str(csv_dir), str(tmp_path / "out2")]) == 1
    (csv_dir / "figure3.csv").write_text("r,abs_err\n1,2,3\n")
    assert main([str(csv_dir), str(tmp_path / "out3")]) == 1
    (csv_dir / "figure3.csv").write_text("r,abs_err\nx,y\n")
    assert main([str(csv_dir), str(tmp_path / "out4")]) == 1
    with pytest.raises(InputError):
        read_series(str(csv_dir / "figure3.csv"), "abs_err")


def test_usage_exit_code():
    assert main([]) == 2
    assert main(["onearg"]) == 2


def test_rendering_is_deterministic_and_nondestructive(csv_dirs, tmp_path):
    src = csv_dirs["serre"] / "figure5.csv"
    before = src.read_bytes()
    spec = FigureSpec(
        csv_path=str(src),
        title="noise",
        xlabel="r",
        ylabel="v",
        out_path=str(tmp_path / "a.png"),
        value_column="norm_err",
    )
    render(spec)
    first = (tmp_path / "a.png").read_bytes()
    render(spec)
    assert (tmp_path / "a.png").read_bytes() == first
    assert src.read_bytes() == before
