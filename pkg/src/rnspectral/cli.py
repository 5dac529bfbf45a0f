"""Command line driver: build a model from one file, evaluate it on that file
and on every evaluation file, write ``<prefix><file>.RN.csv`` for each."""
from __future__ import annotations

import argparse
import logging
import sys
from dataclasses import dataclass, field

import numpy as np

from .christoffel import christoffel_spectrum, christoffel_values
from .clustering import reduce_basis
from .fixtures import FixtureUnavailable, fetch_uci_breast_cancer, generate_runge_fixture
from .observations import output_path, parse_column_spec, read_sample, write_evaluation
from .products import ProductBasis
from .regularizer import METHODS, regularize
from .spectral import build_gram, evaluate_rows, lebesgue_quadrature
from .vectorlabel import diagonalize_f_in_K_basis

__all__ = ["RunConfig", "RunError", "run", "main", "build_parser"]

log = logging.getLogger("rnspectral")

SUBCOMMANDS = ("generate-runge", "fetch-uci")


class RunError(RuntimeError):
    """A pipeline stage failed; ``stage`` and ``path`` say where."""

    def __init__(self, stage, message, path=None):
        self.stage = stage
        self.path = path
        where = f" [{path}]" if path else ""
        super().__init__(f"{stage}{where}: {message}")


@dataclass(frozen=True)
class RunConfig:
    model_file: str
    column_spec: str
    eval_files: tuple = ()
    clusters_number: int | None = None
    regularization_method: str = "EV"
    max_multiindex: int | None = None
    verbosity: int = 2
    replace_f_by_christoffel: bool = False
    assume_f_diagonal_in_K: bool = False
    output_prefix: str = ""

    def __post_init__(self):
        object.__setattr__(self, "eval_files", tuple(self.eval_files))
        object.__setattr__(self, "regularization_method", self.regularization_method.upper())
        if self.regularization_method not in METHODS:
            raise ValueError(f"regularization method must be one of {', '.join(METHODS)}")
        if self.clusters_number is not None and self.clusters_number < 1:
            raise ValueError("clusters_number must be >= 1")
        if self.max_multiindex is not None and self.max_multiindex < 1:
            raise ValueError("max_multiindex must be >= 1")
        if self.verbosity not in (1, 2, 3):
            raise ValueError("verbosity must be 1, 2 or 3")


@dataclass
class _Model:
    basis: object
    G: np.ndarray
    quadrature: object  # the one used for evaluation
    tables: list = field(default_factory=list)


def _stage(name, fn, *args, path=None, **kwargs):
    try:
        return fn(*args, **kwargs)
    except RunError:
        raise
    except Exception as exc:  # noqa: BLE001 - every failure is reported by stage
        raise RunError(name, str(exc) or type(exc).__name__, path) from exc


def _with_christoffel(sample, model):
    X = model.basis.apply(sample.x)
    return sample.with_f(christoffel_values(X, model.G))


def build_model(config: RunConfig, sample):
    method = config.regularization_method
    basis = _stage("regularize", regularize, sample, method, path=config.model_file)
    if config.max_multiindex is not None:
        inner = ProductBasis(basis, config.max_multiindex)
        basis = _stage("products", regularize, sample, method, inner, path=config.model_file)
    X = basis.apply(sample.x)
    G = (X * sample.w[:, None]).T @ X
    model = _Model(basis, 0.5 * (G + G.T), None)
    if config.replace_f_by_christoffel:
        sample = _with_christoffel(sample, model)
    gram = _stage("gram", build_gram, sample, basis, path=config.model_file)
    if config.assume_f_diagonal_in_K:
        spectrum = _stage("christoffel", christoffel_spectrum, sample, basis,
                          path=config.model_file)
        gram = diagonalize_f_in_K_basis(gram, spectrum)
    quad = _stage("quadrature", lebesgue_quadrature, gram, path=config.model_file)
    model.quadrature = quad
    model.tables.append(("Lebesgue quadrature", quad.nodes, quad.weights))
    if config.clusters_number is not None:
        cb = _stage("clustering", reduce_basis, quad, config.clusters_number,
                    path=config.model_file)
        model.quadrature = cb.quadrature
        model.tables.append((f"Gaussian quadrature D={config.clusters_number}",
                             cb.nodes, cb.weights))
    return model, sample


def _notes(rows):
    bad = np.flatnonzero(rows.degenerate)
    if bad.size == 0:
        return ()
    shown = ",".join(str(i) for i in bad[:20]) + (",..." if bad.size > 20 else "")
    return (f"warning: {bad.size} observation(s) with all psi = 0 "
            f"(rows {shown}); f_RN and f_RNW set to the prior mean, K = 0",)


def _evaluate_file(config, model, spec, path, sample=None):
    if sample is None:
        sample = _stage("read", read_sample, path, spec, path=path)
        if config.replace_f_by_christoffel:
            sample = _stage("christoffel", _with_christoffel, sample, model, path=path)
    rows = _stage("evaluate", evaluate_rows, model.quadrature, sample.x, path=path)
    projections = None
    if config.verbosity >= 3:
        psi = model.quadrature.psi(sample.x)
        projections = sample.x.T @ (psi * sample.w[:, None])
    out = output_path(path, config.output_prefix)
    _stage("write", write_evaluation, out, sample, rows, config.verbosity,
           quadratures=model.tables, projections=projections, notes=_notes(rows), path=out)
    log.info("wrote %s", out)
    return out


def run(config: RunConfig) -> list[str]:
    """Run the whole pipeline; returns the written paths.  Raises :class:`RunError`."""
    spec = _stage("column spec", parse_column_spec, config.column_spec)
    sample = _stage("read", read_sample, config.model_file, spec, path=config.model_file)
    model, sample = build_model(config, sample)
    for title, nodes, weights in model.tables:
        log.info("%s:", title)
        for i, (f, w) in enumerate(zip(nodes, weights)):
            log.info("  f[%d]=%r w[%d]=%r", i, float(f), i, float(w))
    written = [_evaluate_file(config, model, spec, config.model_file, sample)]
    for path in config.eval_files:
        written.append(_evaluate_file(config, model, spec, path))
    return written


def _bool(text):
    t = text.strip().lower()
    if t in ("true", "1", "yes"):
        return True
    if t in ("false", "0", "no"):
        return False
    raise argparse.ArgumentTypeError(f"expected true or false, got {text!r}")


def _method(text):
    t = text.strip().upper()
    if t not in METHODS:
        raise argparse.ArgumentTypeError(f"expected one of {', '.join(METHODS)}")
    return t


def _positive(text):
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return v


class _Parser(argparse.ArgumentParser):
    # usage errors exit with status 1 like every other failure
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def build_parser():
    p = _Parser(
        prog="rn", allow_abbrev=False,
        description="Radon-Nikodym spectral interpolation and classification.",
        epilog="Flags take the form --name=value.  Subcommands: "
               "'rn generate-runge --help', 'rn fetch-uci --help'.")
    p.add_argument("--data_file_to_build_model_from", required=True, metavar="FILE")
    p.add_argument("--data_file_evaluation", action="append", default=[], metavar="FILE",
                   help="may be repeated; each file is evaluated in order")
    p.add_argument("--data_cols", required=True, metavar="SPEC",
                   help="N:x0,x1:f:w:label (0-based columns, -1 for none)")
    p.add_argument("--clusters_number", type=_positive, default=None)
    p.add_argument("--regularization_method", type=_method, default="EV")
    p.add_argument("--max_multiindex", type=_positive, default=None)
    p.add_argument("--flag_print_verbosity", type=int, choices=(1, 2, 3), default=2)
    p.add_argument("--flag_replace_f_by_christoffel_function", type=_bool, default=False)
    p.add_argument("--flag_assume_f_is_diagonal_in_christoffel_function_basis",
                   type=_bool, default=False)
    p.add_argument("--output_files_prefix", default="")
    return p


def _runge_parser():
    p = _Parser(prog="rn generate-runge", allow_abbrev=False,
                                description="Write the Runge function reference file.")
    p.add_argument("--path", required=True)
    p.add_argument("--n", type=_positive, default=7)
    p.add_argument("--dx", type=float, default=1e-4)
    return p


def _uci_parser():
    p = _Parser(prog="rn fetch-uci", allow_abbrev=False,
                                description="Download and split the breast cancer data.")
    p.add_argument("--dest_dir", required=True)
    return p


def _check_equals(parser, argv):
    for a in argv:
        if a.startswith("--") and "=" not in a and a not in ("--help",):
            parser.error(f"flags must be written as --name=value, got {a!r}")


def _parse(parser, argv):
    # usage errors exit 1; hand the status back instead of raising
    try:
        _check_equals(parser, argv)
        return parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 1


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    logging.basicConfig(level=logging.INFO, format="%(message)s", stream=sys.stderr)
    if argv and argv[0] in SUBCOMMANDS:
        cmd, rest = argv[0], argv[1:]
        parser = _runge_parser() if cmd == "generate-runge" else _uci_parser()
        args = _parse(parser, rest)
        if isinstance(args, int):
            return args
        try:
            if cmd == "generate-runge":
                path = generate_runge_fixture(args.path, args.n, args.dx)
                log.info("wrote %s", path)
            else:
                for path in fetch_uci_breast_cancer(args.dest_dir):
                    log.info("wrote %s", path)
        except FixtureUnavailable as exc:
            print(f"rn: {cmd} skipped: {exc}", file=sys.stderr)
            return 1
        except (OSError, ValueError) as exc:
            print(f"rn: {cmd}: {exc}", file=sys.stderr)
            return 1
        return 0
    args = _parse(build_parser(), argv)
    if isinstance(args, int):
        return args
    try:
        config = RunConfig(
            model_file=args.data_file_to_build_model_from,
            column_spec=args.data_cols,
            eval_files=tuple(args.data_file_evaluation),
            clusters_number=args.clusters_number,
            regularization_method=args.regularization_method,
            max_multiindex=args.max_multiindex,
            verbosity=args.flag_print_verbosity,
            replace_f_by_christoffel=args.flag_replace_f_by_christoffel_function,
            assume_f_diagonal_in_K=args.flag_assume_f_is_diagonal_in_christoffel_function_basis,
            output_prefix=args.output_files_prefix,
        )
        run(config)
    except ValueError as exc:
        print(f"rn: error in configuration: {exc}", file=sys.stderr)
        return 1
    except RunError as exc:
        print(f"rn: error in {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
