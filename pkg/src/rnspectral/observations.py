"""Weighted observation samples and the comma-separated file format.

Input files are plain comma-separated text.  Empty lines and lines starting
with ``|`` are comments; the first line starting with ``|#`` carries the
column names.  The column layout is given by a ``numcols:xstart,xend:f:w:label``
descriptor (see :func:`parse_column_spec`).
"""
from __future__ import annotations

import math
import os
import re
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "ColumnSpec",
    "Sample",
    "ObservationFormatError",
    "parse_column_spec",
    "read_sample",
    "write_evaluation",
    "output_path",
    "format_float",
]

_SPEC_RE = re.compile(r"^\s*(-?\d+):(-?\d+),(-?\d+):(-?\d+):(-?\d+):(-?\d+)\s*$")


class ObservationFormatError(ValueError):
    """Malformed column descriptor or data file."""


@dataclass(frozen=True)
class ColumnSpec:
    total_columns: int
    x_start: int
    x_end: int
    f_col: int
    w_col: int = -1
    label_col: int = -1

    def __post_init__(self):
        if self.total_columns < 1:
            raise ObservationFormatError("total column count must be positive")
        if not 0 <= self.x_start <= self.x_end < self.total_columns:
            raise ObservationFormatError(
                f"attribute range {self.x_start},{self.x_end} invalid for "
                f"{self.total_columns} columns"
            )
        if not 0 <= self.f_col < self.total_columns:
            raise ObservationFormatError(f"class label column {self.f_col} out of range")
        for name in ("w_col", "label_col"):
            if getattr(self, name) >= self.total_columns:
                raise ObservationFormatError(f"{name} {getattr(self, name)} out of range")

    @property
    def n(self) -> int:
        return self.x_end - self.x_start + 1

    @property
    def has_weights(self) -> bool:
        return self.w_col >= 0

    @property
    def has_labels(self) -> bool:
        return self.label_col >= 0

    def __str__(self):
        return (f"{self.total_columns}:{self.x_start},{self.x_end}:"
                f"{self.f_col}:{self.w_col}:{self.label_col}")


@dataclass(frozen=True, eq=False)
class Sample:
    """M weighted observations: attributes ``x`` (M, n), label ``f``, weight ``w``."""

    x: np.ndarray
    f: np.ndarray
    w: np.ndarray
    labels: tuple = ()
    column_names: tuple = ()
    x_names: tuple = ()
    f_name: str = "f"
    w_name: str = "w"
    source: str = ""

    def __post_init__(self):
        x = np.array(self.x, dtype=float, ndmin=2)
        f = np.array(self.f, dtype=float).reshape(-1)
        w = np.array(self.w, dtype=float).reshape(-1)
        if not (x.shape[0] == f.shape[0] == w.shape[0]):
            raise ValueError("x, f and w must have the same number of rows")
        if np.any(w < 0):
            raise ValueError("observation weights must be nonnegative")
        if not w.sum() > 0:
            raise ValueError("total measure must be positive")
        for a in (x, f, w):
            a.setflags(write=False)
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "f", f)
        object.__setattr__(self, "w", w)
        if not self.labels:
            object.__setattr__(self, "labels", ("??",) * x.shape[0])
        if not self.x_names:
            object.__setattr__(self, "x_names", tuple(f"x{k}" for k in range(x.shape[1])))

    @property
    def M(self) -> int:
        return self.x.shape[0]

    @property
    def n(self) -> int:
        return self.x.shape[1]

    @property
    def total_measure(self) -> float:
        return float(self.w.sum())

    def with_f(self, f) -> "Sample":
        """Same observations with the class label replaced."""
        return Sample(self.x, f, self.w, self.labels, self.column_names,
                      self.x_names, self.f_name, self.w_name, self.source)


def parse_column_spec(text: str) -> ColumnSpec:
    """Parse ``numcols:xstart,xend:f:w:label``.

    A negative ``w`` means all weights are 1, a negative ``label`` means every
    row is labelled ``??``.

    >>> parse_column_spec("9:0,6:7:8:1").n
    7
    """
    m = _SPEC_RE.match(text)
    if m is None:
        raise ObservationFormatError(
            f"bad column descriptor {text!r}, expected numcols:xstart,xend:f:w:label")
    return ColumnSpec(*(int(g) for g in m.groups()))


def _parse_number(text, path, lineno, col):
    try:
        v = float(text)
    except ValueError:
        raise ObservationFormatError(
            f"{path}:{lineno}: column {col}: non-numeric value {text.strip()!r}") from None
    if not math.isfinite(v):
        raise ObservationFormatError(f"{path}:{lineno}: column {col}: non-finite value")
    return v


def read_sample(path, spec: ColumnSpec) -> Sample:
    """Read a data file laid out according to ``spec``.

    Rows keep file order.  A field count other than ``spec.total_columns`` is
    an error reported with its line number.
    """
    path = os.fspath(path)
    names = None
    xs, fs, ws, labels = [], [], [], []
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.rstrip("\r\n")
            if not line.strip():
                continue
            if line.startswith("|"):
                if names is None and line.startswith("|#"):
                    names = [s.strip() for s in line[2:].split(",")]
                continue
            fields = line.split(",")
            if len(fields) != spec.total_columns:
                raise ObservationFormatError(
                    f"{path}:{lineno}: expected {spec.total_columns} columns, "
                    f"got {len(fields)}")
            xs.append([_parse_number(fields[k], path, lineno, k)
                       for k in range(spec.x_start, spec.x_end + 1)])
            fs.append(_parse_number(fields[spec.f_col], path, lineno, spec.f_col))
            ws.append(_parse_number(fields[spec.w_col], path, lineno, spec.w_col)
                      if spec.has_weights else 1.0)
            labels.append(fields[spec.label_col].strip() if spec.has_labels else "??")
    if not xs:
        raise ObservationFormatError(f"{path}: no observations")
    if names is None or len(names) != spec.total_columns:
        names = [str(k) for k in range(spec.total_columns)]
    w = np.array(ws)
    if np.any(w < 0):
        bad = int(np.argmax(w < 0))
        raise ObservationFormatError(f"{path}: negative weight in observation {bad}")
    return Sample(
        x=np.array(xs),
        f=np.array(fs),
        w=w,
        labels=tuple(labels),
        column_names=tuple(names),
        x_names=tuple(names[spec.x_start:spec.x_end + 1]),
        f_name=names[spec.f_col],
        w_name=names[spec.w_col] if spec.has_weights else "w",
        source=path,
    )


def format_float(v) -> str:
    # shortest round-trip representation
    return repr(float(v))


def output_path(input_path, prefix: str = "") -> str:
    """``<prefix><input>.RN.csv``; the prefix is prepended verbatim."""
    return f"{prefix}{os.fspath(input_path)}.RN.csv"


def write_evaluation(path_out, sample: Sample, rows, verbosity: int = 2, *,
                     quadratures=(), projections=None, notes=()):
    """Write evaluated rows next to the original observations.

    Parameters
    ----------
    path_out : path
        Destination file.
    sample : Sample
        The evaluated observations; ``rows`` must be parallel to them.
    rows : Evaluation
        Batch evaluation (see :func:`rnspectral.spectral.evaluate_rows`).
    verbosity : {1, 2, 3}
        1 omits the psi columns, 3 adds the projection coefficients to the
        comment block.
    quadratures : sequence of (title, nodes, weights)
        Echoed into the comment block.
    projections : (n, D) array, optional
        Coefficients of each raw attribute in the psi basis (verbosity 3).
    notes : sequence of str
        Extra comment lines appended after the data rows.
    """
    if verbosity not in (1, 2, 3):
        raise ValueError("verbosity must be 1, 2 or 3")
    if rows.f_rn.shape[0] != sample.M:
        raise ValueError("evaluation rows are not parallel to the sample")
    D = rows.psi.shape[1]
    out = []
    out.append(f"| source file: {sample.source}")
    out.append(f"| observations: {sample.M}")
    out.append(f"| total measure: {format_float(sample.total_measure)}")
    for title, nodes, weights in quadratures:
        out.append(f"| {title}: {len(nodes)} nodes")
        for i, (node, weight) in enumerate(zip(nodes, weights)):
            out.append(f"| f[{i}]={format_float(node)} w[{i}]={format_float(weight)}")
    if verbosity >= 3 and projections is not None:
        out.append("| projections <x_k|psi[i]>:")
        for k, name in enumerate(sample.x_names):
            coeffs = ",".join(format_float(c) for c in projections[k])
            out.append(f"| <{name}|psi> {coeffs}")
    header = ["label", *sample.x_names, sample.f_name, sample.w_name,
              "f_RN", "f_LS", "Christoffel", "f_RNW", "Coverage"]
    if verbosity >= 2:
        header += [f"psi{i}" for i in range(D)]
    out.append("|#" + ",".join(header))
    fmt = format_float
    for l in range(sample.M):
        vals = [sample.labels[l]]
        vals += [fmt(v) for v in sample.x[l]]
        vals += [fmt(sample.f[l]), fmt(sample.w[l]),
                 fmt(rows.f_rn[l]), fmt(rows.f_ls[l]), fmt(rows.christoffel[l]),
                 fmt(rows.f_rnw[l]), fmt(rows.coverage[l])]
        if verbosity >= 2:
            vals += [fmt(v) for v in rows.psi[l]]
        out.append(",".join(vals))
    out.extend(f"| {note}" for note in notes)
    with open(path_out, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(out))
        fh.write("\n")
