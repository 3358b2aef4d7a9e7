import os

import pytest

from ltlab.cli import main

SERRE_CFG = "label = serre-6-2\na = 6\nb = -2\nserre_curve = true\n"
CM_CFG = "label = cm-27\na = -768108000\nb = 8194304162000\ncm_discriminant = -27\n"


@pytest.fixture()
def workdir(tmp_path, monkeypatch):
    monkeypatch.setenv("LTLAB_CACHE_DIR", str(tmp_path / "cache"))
    monkeypatch.chdir(tmp_path)
    (tmp_path / "serre.cfg").write_text(SERRE_CFG)
    (tmp_path / "cm.cfg").write_text(CM_CFG)
    return tmp_path


def test_pipeline_smoke(workdir):
    assert main(["build", "--curve", "serre.cfg", "--x", "1000", "--workers", "2"]) == 0
    table = workdir / "cache" / "serre-6-2-x1000.lttb"
    assert table.exists()
    assert main(["report", "--curve", "serre.cfg", "--x", "1000", "--out", "figs"]) == 0
    names = sorted(os.listdir(workdir / "figs"))
    assert names == ["figure1.csv", "figure2.csv", "figure3.csv", "figure4.csv", "figure5.csv"]
    counts = set()
    for n in names:
        counts.add(len((workdir / "figs" / n).read_text().splitlines()))
    assert counts == {2 * 63 + 1 + 1}  # r in [-63, 63] plus the header


def test_report_idempotent(workdir):
    main(["build", "--curve", "serre.cfg", "--x", "1000"])
    main(["report", "--curve", "serre.cfg", "--x", "1000", "--out", "figs"])
    first = {n: (workdir / "figs" / n).read_bytes() for n in os.listdir(workdir / "figs")}
    main(["report", "--curve", "serre.cfg", "--x", "1000", "--out", "figs"])
    second = {n: (workdir / "figs" / n).read_bytes() for n in os.listdir(workdir / "figs")}
    assert first == second


def test_check_invariants(workdir):
    main(["build", "--curve", "serre.cfg", "--x", "1000"])
    assert main(["check", "--curve", "serre.cfg", "--x", "1000", "--which", "invariants"]) == 0


def test_missing_table_exit_code(workdir):
    assert main(["check", "--curve", "serre.cfg", "--x", "1000", "--which", "invariants"]) == 3
    assert main(["report", "--curve", "serre.cfg", "--x", "1000"]) == 3


def test_corrupt_config_exit_code(workdir):
    (workdir / "bad.cfg").write_text("label = broken\na = 1\n")  # missing b
    assert main(["build", "--curve", "bad.cfg", "--x", "1000"]) == 2
    (workdir / "bad2.cfg").write_text("nonsense")
    assert main(["build", "--curve", "bad2.cfg", "--x", "1000"]) == 2
    assert main(["build", "--curve", "missing.cfg", "--x", "1000"]) == 2


def test_usage_exit_code(workdir):
    with pytest.raises(SystemExit) as exc:
        main(["build", "--x", "1000"])  # --curve required
    assert exc.value.code == 2


def test_budget_exit_code(workdir):
    # y^2 = x^3 + x + 4: delta = -2^6 * 109, so the asserted Serre level is
    # 4 * 109 = 436, whose GL2 order is far beyond the enumeration budget
    from ltlab.galois import gl2_order, ENUMERATION_BUDGET

    assert gl2_order(436) > ENUMERATION_BUDGET
    (workdir / "huge.cfg").write_text("label = huge\na = 1\nb = 4\nserre_curve = true\n")
    assert main(["build", "--curve", "huge.cfg", "--x", "600"]) == 0
    code = main(["check", "--curve", "huge.cfg", "--x", "600", "--which", "chebotarev"])
    assert code == 4


def test_constants_and_predict(workdir):
    main(["build", "--curve", "serre.cfg", "--x", "1000"])
    assert (
        main(
            ["constants", "--curve", "serre.cfg", "--x", "1000", "--r-min", "-5",
             "--r-max", "5", "--euler-cutoff", "1000", "--out", "c.csv"]
        )
        == 0
    )
    lines = (workdir / "c.csv").read_text().splitlines()
    assert lines[0] == "r,main_factor,C,tail_bound"
    assert len(lines) == 12
    assert (
        main(
            ["predict", "--curve", "serre.cfg", "--x", "1000", "--r-min", "0",
             "--r-max", "3", "--euler-cutoff", "1000", "--out", "p.csv"]
        )
        == 0
    )
    lines = (workdir / "p.csv").read_text().splitlines()
    assert lines[0] == "r,F" and len(lines) == 5


def test_noncm_level_override_uses_empirical_factors(workdir):
    # a plain curve with only m_E configured gets its main factors from data
    (workdir / "plain.cfg").write_text("label = plain\na = 1\nb = 7\nm_E = 2\n")
    assert main(["constants", "--curve", "plain.cfg", "--x", "2000", "--r-min", "0",
                 "--r-max", "2", "--euler-cutoff", "1000", "--out", "pc.csv"]) == 3
    main(["build", "--curve", "plain.cfg", "--x", "2000"])
    assert main(["constants", "--curve", "plain.cfg", "--x", "2000", "--r-min", "0",
                 "--r-max", "2", "--euler-cutoff", "1000", "--out", "pc.csv"]) == 0
    assert (workdir / "pc.csv").exists()


def test_cm_checks_smoke(workdir):
    # statistical checks at this scale may pass or fail, but must run cleanly
    main(["build", "--curve", "cm.cfg", "--x", "20000"])
    assert main(["check", "--curve", "cm.cfg", "--x", "20000", "--which", "invariants"]) == 0
    assert main(
        ["check", "--curve", "cm.cfg", "--x", "20000", "--which", "satotate", "--out", "out"]
    ) in (0, 1)
    assert (workdir / "out" / "satotate.csv").exists()
    assert main(
        ["check", "--curve", "cm.cfg", "--x", "20000", "--which", "averaging",
         "--euler-cutoff", "10000", "--out", "out"]
    ) in (0, 1)
    assert (workdir / "out" / "averaging.csv").exists()
    # no exact image for a CM curve: the class-density check cannot run
    assert main(["check", "--curve", "cm.cfg", "--x", "20000", "--which", "chebotarev"]) == 2


def test_check_wrong_curve_table(workdir):
    main(["build", "--curve", "serre.cfg", "--x", "1000"])
    # point the CM curve at the Serre curve's table
    code = main(
        ["check", "--curve", "cm.cfg", "--x", "1000", "--which", "invariants",
         "--table", str(workdir / "cache" / "serre-6-2-x1000.lttb")]
    )
    assert code == 2
