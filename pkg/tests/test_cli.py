import os
import re
import shutil
import subprocess
import sys

import numpy as np
import pytest

from conftest import RUNGE_COLS
from rnspectral.cli import RunConfig, RunError, main, run
from rnspectral.fixtures import generate_runge_fixture

RUNGE_D3 = [(0.0553329558917533, 0.737454390130916), (0.16285402990411255, 0.701183615381193),
            (0.7025131758981266, 0.5613619944877021)]


def read_rn(path):
    """Comment lines, header names and the numeric table of an output file."""
    comments, header, rows = [], None, []
    for line in open(path, encoding="utf-8").read().splitlines():
        if line.startswith("|#") and header is None:
            header = line[2:].split(",")
        elif line.startswith("|"):
            comments.append(line)
        else:
            rows.append([float(v) for v in line.split(",")])
    return comments, header, np.array(rows)


def tables(comments):
    """{title: [(f, w), ...]} from the quadrature comment block."""
    out, cur = {}, None
    for c in comments:
        m = re.match(r"\| (.+): (\d+) nodes$", c)
        if m:
            cur = out.setdefault(m.group(1), [])
            continue
        m = re.match(r"\| f\[\d+\]=(\S+) w\[\d+\]=(\S+)$", c)
        if m and cur is not None:
            cur.append((float(m.group(1)), float(m.group(2))))
    return out


@pytest.fixture
def work(tmp_path, runge_path, monkeypatch):
    shutil.copy(runge_path, tmp_path / "runge.csv")
    monkeypatch.chdir(tmp_path)
    return tmp_path


def _rn(*args):
    return main(list(args))


def test_runge_model_file_twice(work):
    rc = _rn("--data_file_to_build_model_from=runge.csv", f"--data_cols={RUNGE_COLS}",
             "--data_file_evaluation=runge.csv", "--clusters_number=3")
    assert rc == 0
    comments, header, data = read_rn("runge.csv.RN.csv")
    t = tables(comments)
    assert list(t) == ["Lebesgue quadrature", "Gaussian quadrature D=3"]
    np.testing.assert_allclose(t["Gaussian quadrature D=3"], RUNGE_D3, atol=1e-6)
    assert header[-3:] == ["psi0", "psi1", "psi2"] and data.shape == (20001, len(header))


def test_support_error_exit(work, capsys):
    rc = _rn("--data_file_to_build_model_from=runge.csv", f"--data_cols={RUNGE_COLS}",
             "--clusters_number=5")
    assert rc == 1
    err = capsys.readouterr().err
    assert "clustering" in err and "4 distinct support points" in err
    assert not os.path.exists("runge.csv.RN.csv")


def test_single_attribute_products(work):
    generate_runge_fixture("r1.csv", n=2, dx=1e-4)
    assert _rn("--data_file_to_build_model_from=r1.csv", "--data_cols=4:1,1:2:3:1",
               "--max_multiindex=6") == 0
    assert _rn("--data_file_to_build_model_from=runge.csv", f"--data_cols={RUNGE_COLS}") == 0
    a = tables(read_rn("r1.csv.RN.csv")[0])["Lebesgue quadrature"]
    b = tables(read_rn("runge.csv.RN.csv")[0])["Lebesgue quadrature"]
    np.testing.assert_allclose(a, b, atol=1e-6)


@pytest.mark.parametrize("argv", [
    ["--bogus=1"],
    ["--data_file_to_build_model_from", "runge.csv", f"--data_cols={RUNGE_COLS}"],
    ["--data_file_to_build_model_from=runge.csv", f"--data_cols={RUNGE_COLS}",
     "--regularization_method=SVD"],
    ["--data_file_to_build_model_from=runge.csv", f"--data_cols={RUNGE_COLS}",
     "--flag_print_verbosity=4"],
    ["--data_file_to_build_model_from=runge.csv", f"--data_cols={RUNGE_COLS}",
     "--flag_replace_f_by_christoffel_function=maybe"],
    ["--data_file_to_build_model_from=runge.csv", "--data_cols=9:0"],
    ["--data_file_to_build_model_from=missing.csv", f"--data_cols={RUNGE_COLS}"],
])
def test_bad_invocations_exit_one(work, argv):
    assert _rn(*argv) == 1


def test_subprocess_exit_codes(work):
    env = dict(os.environ)
    cmd = [sys.executable, "-m", "rnspectral"]
    bad = subprocess.run(cmd + ["--nope=1"], capture_output=True, text=True, env=env)
    assert bad.returncode == 1
    ok = subprocess.run(cmd + ["generate-runge", "--path=g.csv", "--n=2", "--dx=0.5"],
                        capture_output=True, text=True, env=env)
    assert ok.returncode == 0 and os.path.exists("g.csv")


def test_byte_identical_reruns(work):
    args = ("--data_file_to_build_model_from=runge.csv", f"--data_cols={RUNGE_COLS}",
            "--clusters_number=4", "--flag_print_verbosity=3")
    assert _rn(*args) == 0
    first = open("runge.csv.RN.csv", "rb").read()
    assert _rn(*args) == 0
    assert open("runge.csv.RN.csv", "rb").read() == first


def test_verbosity_and_prefix(work):
    os.mkdir("out")
    base = ("--data_file_to_build_model_from=runge.csv", f"--data_cols={RUNGE_COLS}")
    assert _rn(*base, "--flag_print_verbosity=1", "--output_files_prefix=out/") == 0
    c1, h1, _ = read_rn("out/runge.csv.RN.csv")
    assert h1[-1] == "Coverage" and not any("projections" in c for c in c1)
    assert _rn(*base, "--flag_print_verbosity=3") == 0
    c3, h3, _ = read_rn("runge.csv.RN.csv")
    assert h3[-1] == "psi6" and any(c.startswith("| <x^2|psi>") for c in c3)


def _identities(path):
    comments, header, d = read_rn(path)
    title = list(tables(comments))[-1]
    nodes, weights = np.array(tables(comments)[title]).T
    col = {h: i for i, h in enumerate(header)}
    psi = d[:, [col[f"psi{i}"] for i in range(len(nodes))]]
    sq = psi ** 2
    w = d[:, col["w"]]
    means = w @ psi
    out = {
        "f_RN": sq @ nodes / sq.sum(1),
        "Christoffel": 1 / sq.sum(1),
        "f_RNW": sq @ (nodes * weights) / (sq @ weights),
        "Coverage": sq @ weights / sq.sum(1),
        "f_LS": psi @ (nodes * means),
    }
    for name, want in out.items():
        np.testing.assert_allclose(d[:, col[name]], want, rtol=1e-9,
                                   atol=1e-12 * np.abs(want).max(), err_msg=name)
    np.testing.assert_allclose(means ** 2, weights, rtol=1e-6, atol=1e-12)
    return d, col


def test_output_row_identities(work):
    assert _rn("--data_file_to_build_model_from=runge.csv", f"--data_cols={RUNGE_COLS}") == 0
    _identities("runge.csv.RN.csv")


def test_output_row_identities_clustered(work):
    assert _rn("--data_file_to_build_model_from=runge.csv", f"--data_cols={RUNGE_COLS}",
               "--clusters_number=3") == 0
    _identities("runge.csv.RN.csv")


def test_psi_as_input_rerun(work):
    assert _rn("--data_file_to_build_model_from=runge.csv", f"--data_cols={RUNGE_COLS}") == 0
    d, col = _identities("runge.csv.RN.csv")
    shutil.copy("runge.csv.RN.csv", "psi.csv")
    # psi columns as attributes: the GEV is already diagonal
    assert _rn("--data_file_to_build_model_from=psi.csv", "--data_cols=22:15,21:8:9:0") == 0
    t0 = tables(read_rn("runge.csv.RN.csv")[0])["Lebesgue quadrature"]
    comments, header, d2 = read_rn("psi.csv.RN.csv")
    np.testing.assert_allclose(tables(comments)["Lebesgue quadrature"], t0, atol=1e-9)
    psi_old = d[:, col["psi0"]:col["psi6"] + 1]
    c2 = {h: i for i, h in enumerate(header)}
    psi_new = d2[:, c2["psi0"]:c2["psi6"] + 1]
    live = np.array(t0)[:, 1] > 1e-12
    np.testing.assert_allclose(np.abs(psi_new[:, live]), np.abs(psi_old[:, live]), rtol=1e-6,
                               atol=1e-6 * np.abs(psi_old).max())


def test_replace_f_by_christoffel(work):
    base = ("--data_file_to_build_model_from=runge.csv", f"--data_cols={RUNGE_COLS}")
    assert _rn(*base, "--flag_replace_f_by_christoffel_function=true") == 0
    _, header, d = read_rn("runge.csv.RN.csv")
    col = {h: i for i, h in enumerate(header)}
    # f column now holds K(x), so the quadrature is the K spectrum
    np.testing.assert_allclose(d[:, col["f"]], d[:, col["Christoffel"]], rtol=1e-9)


def test_diagonal_flag(work):
    base = ("--data_file_to_build_model_from=runge.csv", f"--data_cols={RUNGE_COLS}")
    assert _rn(*base, "--flag_assume_f_is_diagonal_in_christoffel_function_basis=true") == 0
    d, _ = _identities("runge.csv.RN.csv")
    assert np.all(np.isfinite(d))


def test_run_api_and_errors(work):
    paths = run(RunConfig("runge.csv", RUNGE_COLS, eval_files=["runge.csv"], verbosity=1))
    assert paths == ["runge.csv.RN.csv", "runge.csv.RN.csv"]
    with pytest.raises(RunError) as exc:
        run(RunConfig("runge.csv", RUNGE_COLS, clusters_number=9))
    assert exc.value.stage == "clustering" and exc.value.path == "runge.csv"
    with pytest.raises(ValueError):
        RunConfig("runge.csv", RUNGE_COLS, regularization_method="QR")


def test_eval_file_other_sample(work):
    generate_runge_fixture("coarse.csv", n=7, dx=0.01)
    assert _rn("--data_file_to_build_model_from=runge.csv", f"--data_cols={RUNGE_COLS}",
               "--data_file_evaluation=coarse.csv", "--regularization_method=LIN") == 0
    _, header, d = read_rn("coarse.csv.RN.csv")
    assert d.shape[0] == 201
    _identities("runge.csv.RN.csv")
