"""Generate real report CSVs through the ltlab command line (the producing
package's public interface), once per session, for both worked-example curves."""

import subprocess
from pathlib import Path

import pytest

SERRE_CFG = "label = serre-6-2\na = 6\nb = -2\nserre_curve = true\n"
CM_CFG = "label = cm-27\na = -768108000\nb = 8194304162000\ncm_discriminant = -27\n"

X = 40000


def _generate(root: Path, name: str, cfg: str) -> Path:
    cfg_path = root / ("%s.cfg" % name)
    cfg_path.write_text(cfg)
    out = root / name
    env_dir = str(root / "cache")
    common = {"cwd": str(root), "check": True, "capture_output": True, "text": True}
    subprocess.run(
        ["ltlab", "build", "--curve", str(cfg_path), "--x", str(X), "--out",
         str(root / ("%s.lttb" % name))],
        **common,
    )
    subprocess.run(
        ["ltlab", "report", "--curve", str(cfg_path), "--x", str(X), "--table",
         str(root / ("%s.lttb" % name)), "--euler-cutoff", "10000", "--out", str(out)],
        **common,
    )
    return out


@pytest.fixture(scope="session")
def csv_dirs(tmp_path_factory):
    root = tmp_path_factory.mktemp("report-csvs")
    return {
        "serre": _generate(root, "serre", SERRE_CFG),
        "cm": _generate(root, "cm", CM_CFG),
    }
