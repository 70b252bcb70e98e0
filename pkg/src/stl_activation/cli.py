"""Command line front end: ``stl-act <command> [flags]``.

Exit status is 0 on success and 2 when argparse rejects the command line,
for instance an unknown activation name.  A library routine refusing its
input, or a file that cannot be read, gives exit status 1.
"""

from __future__ import annotations

import argparse
import logging
import platform
import sys
from contextlib import contextmanager

from . import csvio
from .activations import KIND_NAMES, ActivationError, activation_grad, activation_value, parse_kind
from .fast_log import (
    DEFAULT_LUT_SIZE,
    POLY_MAX_ABS_ERROR,
    FastLogError,
    audit_log2_lut,
    audit_log2_poly,
    fast_stl,
)


def _kind_arg(text: str):
    """``name`` or ``name:alpha``."""
    name, _, alpha = text.partition(":")
    if name.strip().lower() not in KIND_NAMES:
        raise argparse.ArgumentTypeError(
            f"unknown activation {name!r}; choose from {', '.join(KIND_NAMES)}"
        )
    try:
        a = float(alpha) if alpha else None
    except ValueError:
        raise argparse.ArgumentTypeError(f"malformed alpha {alpha!r}") from None
    return name.strip().lower(), a


def _kind_list(text: str):
    return [_kind_arg(t) for t in text.split(",") if t.strip()]


def _int_list(text: str):
    try:
        return [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _positive_int(text: str):
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid int value: {text!r}") from None
    if v <= 0:
        raise argparse.ArgumentTypeError(f"must be positive, got {v}")
    return v


def _add_output(p):
    p.add_argument("-o", "--output", default="-", help="output path ('-' for stdout)")


def _add_dataset(p):
    g = p.add_argument_group("dataset")
    g.add_argument("--dataset", choices=("blobs", "idx"), default="blobs")
    g.add_argument("--images", help="IDX image file (with --dataset idx)")
    g.add_argument("--labels", help="IDX label file (with --dataset idx)")
    g.add_argument("--limit", type=_positive_int, help="use only the first N samples")
    g.add_argument("--classes", type=_positive_int, default=3)
    g.add_argument("--samples", type=_positive_int, default=600)
    g.add_argument("--noise", type=float, default=0.6)
    g.add_argument("--data-seed", type=int, default=0)
    g.add_argument("--test-fraction", type=float, default=0.2)


def _add_training(p):
    p.add_argument("--epochs", type=_positive_int, default=30)
    p.add_argument("--batch-size", type=_positive_int, default=32)
    p.add_argument("--lr", type=float, default=0.1)
    p.add_argument("--hidden", type=_int_list, default=[32], help="comma-separated hidden widths")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="stl-act", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, metavar="command")

    for name, helptext in (("eval", "evaluate an activation"), ("grad", "evaluate its derivative")):
        p = sub.add_parser(name, help=helptext)
        p.add_argument("--kind", type=_kind_arg, required=True)
        p.add_argument("--x", type=float, required=True)
        p.add_argument("--alpha", type=float)
        if name == "eval":
            p.add_argument("--fast", choices=("polynomial", "lut"),
                           help="stl only: use the binary32 fast log2 path")
        _add_output(p)

    p = sub.add_parser("props", help="property table as CSV")
    p.add_argument("--kinds", type=_kind_list, help="comma list, e.g. stl,elu:0.5 (default: all)")
    p.add_argument("--uniform-points", type=_positive_int, default=2001)
    p.add_argument("--log-points", type=_positive_int, default=1000)
    p.add_argument("--outer", type=float, default=1e4)
    p.add_argument("--odd-tol", type=float, default=1e-12)
    p.add_argument("--fd-h", type=float, default=1e-6)
    p.add_argument("--fd-tol", type=float, default=1e-6)
    _add_output(p)

    p = sub.add_parser("fastlog-audit", help="error of the fast log2 approximation on [1, 2)")
    p.add_argument("--mode", choices=("polynomial", "lut"), default="polynomial")
    p.add_argument("--grid-size", type=_positive_int, default=1_000_000)
    p.add_argument("--lut-size", type=_positive_int, default=DEFAULT_LUT_SIZE)
    p.add_argument("--rows", type=_positive_int, default=1001,
                   help="evenly spaced grid rows to emit (the worst point is always included)")
    _add_output(p)

    p = sub.add_parser("bench", help="time activation evaluation")
    p.add_argument("--n", type=_positive_int, default=20000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--repeats", type=_positive_int, default=10)
    p.add_argument("--lo", type=float, default=-10000.0)
    p.add_argument("--hi", type=float, default=10000.0)
    p.add_argument("--style", choices=("scalar", "vector"), default="scalar")
    p.add_argument("--labels", help="comma list of rows (default: all)")
    p.add_argument("--no-canned-range", action="store_true",
                   help="skip the extra [-2, 2] run that mixes both STL branches")
    p.add_argument("--no-pin", action="store_true", help="do not pin to one CPU")
    _add_output(p)

    p = sub.add_parser("train", help="train one network, emit per-epoch history")
    p.add_argument("--activation", type=_kind_arg, default=("stl", None))
    p.add_argument("--seed", type=int, default=0)
    _add_training(p)
    _add_dataset(p)
    _add_output(p)

    p = sub.add_parser("compare", help="compare activations across seeds")
    p.add_argument("--kinds", type=_kind_list, default=_kind_list("relu,tanh,softsign,stl"))
    p.add_argument("--seeds", type=_int_list, default=[0, 1, 2])
    p.add_argument("--summary", help="also write the per-activation summary CSV here")
    _add_training(p)
    _add_dataset(p)
    _add_output(p)

    p = sub.add_parser("make-digits", help="write an MNIST-format subset built from sklearn digits")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--n", type=_positive_int, default=2000)
    return parser


@contextmanager
def _sink(path):
    if path in (None, "-"):
        yield sys.stdout
    else:
        with open(path, "w", newline="") as fh:
            yield fh


def _kind(arg, alpha=None):
    name, a = arg
    return parse_kind(name, alpha if alpha is not None else a)


def _cmd_eval(args):
    kind = _kind(args.kind, args.alpha)
    if args.command == "grad":
        y = activation_grad(kind, args.x)
    elif args.fast:
        if kind.name != "stl":
            raise ActivationError("--fast applies to stl only")
        y = fast_stl(args.x, kind.param, args.fast)
    else:
        y = activation_value(kind, args.x)
    with _sink(args.output) as out:
        out.write(f"{y!r}\n")


def _cmd_props(args):
    from .properties import default_grid, render_property_table, write_report_csv

    kinds = [_kind(k) for k in args.kinds] if args.kinds else None
    grid = default_grid(args.uniform_points, args.log_points, outer=args.outer)
    reports = render_property_table(kinds, grid, args.odd_tol, args.fd_h, args.fd_tol)
    meta = {"grid_points": grid.count, "grid_range": f"{grid.range[0]:g}..{grid.range[1]:g}"}
    with _sink(args.output) as out:
        write_report_csv(reports, out, meta)


def _cmd_audit(args):
    import numpy as np

    if args.mode == "polynomial":
        rep = audit_log2_poly(args.grid_size)
        meta = {"mode": "polynomial", "grid_size": args.grid_size,
                "max_abs_err": repr(rep["max_abs_err"]), "argmax_m": repr(rep["argmax"]),
                "bound": POLY_MAX_ABS_ERROR, "at_m1": repr(rep["at_1"]), "at_m2": repr(rep["at_2"])}
        bound = POLY_MAX_ABS_ERROR
    else:
        rep = audit_log2_lut(args.lut_size, args.grid_size)
        bound = rep["bound"]
        meta = {"mode": "lut", "lut_size": args.lut_size, "grid_size": args.grid_size,
                "max_abs_err": repr(rep["max_abs_err"]), "argmax_m": repr(rep["argmax"]),
                "bound": repr(bound)}
    n = rep["m"].size
    idx = np.unique(np.concatenate([
        np.linspace(0, n - 1, min(args.rows, n)).round().astype(int),
        [int(rep["abs_err"].argmax())],
    ]))
    rows = [[repr(float(rep[c][i])) for c in ("m", "approx", "exact", "abs_err")] for i in idx]
    with _sink(args.output) as out:
        out.write(csvio.render(("m", "approx", "exact", "abs_err"), rows, meta))
    status = "within" if rep["max_abs_err"] <= bound else "EXCEEDS"
    print(f"max_abs_err={rep['max_abs_err']:.6g} {status} bound {bound:.6g}", file=sys.stderr)


def _cmd_bench(args):
    from .bench import DEFAULT_LABELS, bench_csv, compare_runtimes, pin_to_one_cpu

    labels = tuple(t.strip() for t in args.labels.split(",")) if args.labels else DEFAULT_LABELS
    cpu = None if args.no_pin else pin_to_one_cpu()
    results = compare_runtimes(labels, args.n, args.seed, args.repeats, args.lo, args.hi, args.style)
    if not args.no_canned_range:
        results += compare_runtimes(labels, args.n, args.seed, args.repeats, -2.0, 2.0, args.style)
    meta = {"pinned_cpu": "none" if cpu is None else cpu, "python": platform.python_version(),
            "ranges": f"[{args.lo:g},{args.hi:g}]" + ("" if args.no_canned_range else " and [-2,2]")}
    with _sink(args.output) as out:
        out.write(bench_csv(results, meta))


def _dataset_ref(args):
    from .micronet import DatasetRef

    if args.dataset == "idx" and not (args.images and args.labels):
        raise _UsageError("--dataset idx needs --images and --labels")
    return DatasetRef(
        source=args.dataset, classes=args.classes, samples=args.samples, noise=args.noise,
        seed=args.data_seed, images_path=args.images, labels_path=args.labels,
        limit=args.limit, test_fraction=args.test_fraction,
    )


def _cmd_train(args):
    from .micronet import TrainConfig, history_csv, train

    cfg = TrainConfig(args.epochs, args.batch_size, args.lr, args.seed, _dataset_ref(args),
                      _kind(args.activation), tuple(args.hidden))
    res = train(cfg)
    with _sink(args.output) as out:
        out.write(history_csv([(cfg.activation, cfg.seed, res)]))


def _cmd_compare(args):
    from .micronet import TrainConfig, compare_activations, comparison_csv, comparison_history_csv

    base = TrainConfig(args.epochs, args.batch_size, args.lr, 0, _dataset_ref(args),
                       "stl", tuple(args.hidden))
    rows = compare_activations(base, [_kind(k) for k in args.kinds], args.seeds)
    with _sink(args.output) as out:
        out.write(comparison_history_csv(rows, args.seeds))
    summary = comparison_csv(rows)
    if args.summary:
        with _sink(args.summary) as out:
            out.write(summary)
    else:
        sys.stderr.write(summary)


def _cmd_make_digits(args):
    from .micronet import write_digits_idx

    imgs, labels = write_digits_idx(args.out, args.n)
    print(f"{imgs}\n{labels}")


class _UsageError(Exception):
    pass


_COMMANDS = {
    "eval": _cmd_eval, "grad": _cmd_eval, "props": _cmd_props, "fastlog-audit": _cmd_audit,
    "bench": _cmd_bench, "train": _cmd_train, "compare": _cmd_compare,
    "make-digits": _cmd_make_digits,
}


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        _COMMANDS[args.command](args)
    except _UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"stl-act: error: {exc}", file=sys.stderr)
        return 2
    except (ActivationError, FastLogError, ValueError, OSError) as exc:
        print(f"stl-act: {exc}", file=sys.stderr)
        return 1
    return 0


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
