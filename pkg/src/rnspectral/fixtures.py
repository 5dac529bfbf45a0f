"""Reference data files: the Runge function grid and the Wisconsin breast
cancer data in the 11-column layout."""
from __future__ import annotations

import logging
import os
import urllib.error
import urllib.request

import numpy as np

from .observations import format_float

__all__ = [
    "FixtureUnavailable",
    "UCI_URL",
    "BREAST_CANCER_COLUMNS",
    "runge",
    "generate_runge_fixture",
    "fetch_uci_breast_cancer",
    "parse_uci_breast_cancer",
]

log = logging.getLogger(__name__)

UCI_URL = ("https://archive.ics.uci.edu/ml/machine-learning-databases/"
           "breast-cancer-wisconsin/breast-cancer-wisconsin.data")

BREAST_CANCER_COLUMNS = (
    "id", "clump_thickness", "cell_size_uniformity", "cell_shape_uniformity",
    "marginal_adhesion", "single_epithelial_cell_size", "bare_nuclei",
    "bland_chromatin", "normal_nucleoli", "mitoses", "class",
)
TRAIN_ROWS = 500


class FixtureUnavailable(RuntimeError):
    """The data source could not be reached; callers should skip, not fail."""


def runge(x):
    return 1.0 / (1.0 + 25.0 * np.asarray(x, dtype=float) ** 2)


def generate_runge_fixture(path, n: int = 7, dx: float = 1e-4) -> str:
    """Write ``1, x, ..., x^(n-1), f, w`` on a uniform grid over [-1, 1].

    ``w = dx`` except ``dx/2`` at both ends, so the weights sum to 2.
    """
    if not dx > 0:
        raise ValueError("dx must be positive")
    if n < 1:
        raise ValueError("need at least one attribute")
    steps = int(round(2.0 / dx))
    x = -1.0 + np.arange(steps + 1) * dx
    w = np.full(x.shape, dx)
    w[0] = w[-1] = 0.5 * dx
    cols = np.vander(x, n, increasing=True)
    f = runge(x)
    names = ["1" if k == 0 else ("x" if k == 1 else f"x^{k}") for k in range(n)]
    path = os.fspath(path)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(f"| Runge function 1/(1+25x^2), dx={format_float(dx)}, n={n}\n")
        fh.write("|#" + ",".join(names + ["f", "w"]) + "\n")
        for l in range(x.size):
            vals = [format_float(v) for v in cols[l]]
            vals += [format_float(f[l]), format_float(w[l])]
            fh.write(",".join(vals) + "\n")
    return path


def parse_uci_breast_cancer(text: str):
    """Rows of the raw UCI file, dropping records with a ``?`` field."""
    rows = []
    for line in text.splitlines():
        line = line.strip()
        if not line:
            continue
        fields = [s.strip() for s in line.split(",")]
        if len(fields) != len(BREAST_CANCER_COLUMNS):
            raise ValueError(f"unexpected UCI record: {line!r}")
        if "?" in fields:
            continue
        rows.append([int(v) for v in fields])
    return rows


def _from_uci(timeout):
    with urllib.request.urlopen(UCI_URL, timeout=timeout) as resp:
        return parse_uci_breast_cancer(resp.read().decode("ascii"))


def _from_pydataset():
    # same records (MASS 'biopsy'), same order, NA where UCI has '?'
    from pydataset import data

    df = data("biopsy").dropna()
    cls = {"benign": 2, "malignant": 4}
    rows = []
    for rec in df.itertuples(index=False):
        vals = [int(v) for v in rec[:10]]
        rows.append(vals + [cls[rec[10]]])
    return rows


def fetch_uci_breast_cancer(dest_dir, timeout: float = 20.0):
    """Download the Wisconsin breast cancer data and split it 500:183.

    Returns ``(train_path, test_path)``.  Falls back to the copy bundled with
    ``pydataset`` when the UCI server is unreachable; raises
    :class:`FixtureUnavailable` when neither source works.
    """
    try:
        rows = _from_uci(timeout)
    except (urllib.error.URLError, OSError, ValueError) as exc:
        log.info("UCI download failed (%s), trying pydataset", exc)
        try:
            rows = _from_pydataset()
        except Exception as exc2:  # noqa: BLE001 - any failure means "unavailable"
            raise FixtureUnavailable(
                f"breast cancer data unavailable: {exc}; pydataset: {exc2}") from exc2
    if len(rows) != 683:
        raise FixtureUnavailable(f"expected 683 complete records, got {len(rows)}")
    os.makedirs(dest_dir, exist_ok=True)
    paths = []
    for name, chunk in (("breast_cancer_train.csv", rows[:TRAIN_ROWS]),
                        ("breast_cancer_test.csv", rows[TRAIN_ROWS:])):
        path = os.path.join(os.fspath(dest_dir), name)
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write("|#" + ",".join(BREAST_CANCER_COLUMNS) + "\n")
            for r in chunk:
                fh.write(",".join(str(v) for v in r) + "\n")
        paths.append(path)
    return tuple(paths)
