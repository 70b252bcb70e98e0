"""Wall-clock timing of activation evaluation over a fixed random batch.

Two evaluation styles are available.  ``scalar`` calls a Python function
once per element, the way an interpreted loop would; ``vector`` applies
numpy kernels to the whole batch.  Rows within one comparison always share
a style and the identical input vector.
"""

from __future__ import annotations

import gc
import math
import os
import statistics
import time
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from . import csvio
from .activations import (
    Tag,
    activation_grad_array,
    activation_value_array,
    parse_kind,
    scalar_kernels,
)
from .fast_log import build_lut, fast_stl, fast_stl_array

__all__ = [
    "BenchResult",
    "sample_inputs",
    "time_activation",
    "evaluators",
    "compare_runtimes",
    "pin_to_one_cpu",
    "bench_csv",
    "read_bench_csv",
    "DEFAULT_LABELS",
]

DEFAULT_LABELS = ("relu", "softsign", "stl-exact", "stl-fast-poly", "stl-fast-lut")
WARMUP = 3


@dataclass(frozen=True)
class BenchResult:
    label: str
    n: int
    repeats: int
    times: tuple[float, ...]
    checksum: float
    input_checksum: float
    table: str = "value"
    style: str = "scalar"
    lo: float = math.nan
    hi: float = math.nan

    @property
    def median(self) -> float:
        return statistics.median(self.times)

    @property
    def min(self) -> float:
        return min(self.times)

    @property
    def max(self) -> float:
        return max(self.times)


def sample_inputs(n: int, lo: float = -10000.0, hi: float = 10000.0, seed: int = 0) -> np.ndarray:
    """``n`` uniform draws from ``[lo, hi)``, rounded to binary32 so every path sees the same values."""
    if n <= 0:
        raise ValueError(f"n must be positive, got {n}")
    if not lo < hi:
        raise ValueError(f"need lo < hi, got [{lo}, {hi}]")
    x = np.random.default_rng(seed).uniform(lo, hi, size=n).astype(np.float32).astype(np.float64)
    # float32 rounding can land exactly on hi
    return np.minimum(x, np.nextafter(np.float32(hi), np.float32(lo)).astype(np.float64))


def _checksum(values) -> float:
    return math.fsum(values)


def time_activation(label: str, evaluator: Callable, inputs, repeats: int = 10,
                    table: str = "value", style: str = "scalar",
                    lo: float = math.nan, hi: float = math.nan) -> BenchResult:
    """Time ``evaluator(inputs)`` ``repeats`` times after a short warm-up."""
    if repeats < 5:
        raise ValueError("repeats must be at least 5")
    if len(inputs) == 0:
        raise ValueError("inputs must be non-empty")
    for _ in range(WARMUP):
        out = evaluator(inputs)
    times = []
    gc_was_enabled = gc.isenabled()
    gc.disable()
    try:
        for _ in range(repeats):
            t0 = time.perf_counter()
            out = evaluator(inputs)
            times.append(time.perf_counter() - t0)
    finally:
        if gc_was_enabled:
            gc.enable()
    return BenchResult(
        label, len(inputs), repeats, tuple(times), _checksum(out),
        _checksum(inputs if isinstance(inputs, list) else inputs.tolist()), table, style, lo, hi,
    )


def _scalar_rows(kind_name, alpha):
    f, g, a = scalar_kernels(parse_kind(kind_name, alpha if kind_name == "stl" else None))
    return (lambda xs: [f(x, a) for x in xs]), (lambda xs: [g(x, a) for x in xs])


def evaluators(style: str = "scalar", alpha: float = 1.0, lut_size: int = 256
               ) -> dict[str, tuple[Callable, Callable]]:
    """``label -> (value_fn, grad_fn)``, each mapping a whole batch to outputs.

    Scalar evaluators take a list of floats and call every kind through
    the same ``fn(x, alpha)`` kernel signature; vector evaluators take a
    float64 array.  The fast STL variants have no separate gradient path:
    the gradient ``alpha/|x|`` is already cheap, so they reuse it.
    """
    lut = build_lut(lut_size)
    if style == "scalar":
        stl_grads = _scalar_rows("stl", alpha)[1]
        return {
            "relu": _scalar_rows("relu", alpha),
            "softsign": _scalar_rows("softsign", alpha),
            "stl-exact": _scalar_rows("stl", alpha),
            "stl-fast-poly": (lambda xs: [fast_stl(x, alpha, "polynomial") for x in xs], stl_grads),
            "stl-fast-lut": (lambda xs: [fast_stl(x, alpha, "lut", lut) for x in xs], stl_grads),
        }
    if style == "vector":
        relu, soft, stl = parse_kind("relu"), parse_kind("softsign"), parse_kind(Tag.STL, alpha)
        x32 = {}

        def as32(xs):
            # cast once per batch object; the fast path consumes binary32
            key = id(xs)
            if key not in x32:
                x32.clear()
                x32[key] = xs.astype(np.float32)
            return x32[key]

        return {
            "relu": (lambda xs: np.maximum(xs, 0.0), lambda xs: activation_grad_array(relu, xs)),
            "softsign": (lambda xs: activation_value_array(soft, xs),
                         lambda xs: activation_grad_array(soft, xs)),
            "stl-exact": (lambda xs: activation_value_array(stl, xs),
                          lambda xs: activation_grad_array(stl, xs)),
            "stl-fast-poly": (lambda xs: fast_stl_array(as32(xs), alpha, "polynomial"),
                              lambda xs: activation_grad_array(stl, xs)),
            "stl-fast-lut": (lambda xs: fast_stl_array(as32(xs), alpha, "lut", lut),
                             lambda xs: activation_grad_array(stl, xs)),
        }
    raise ValueError(f"unknown style {style!r}; expected 'scalar' or 'vector'")


def compare_runtimes(labels: Sequence[str] = DEFAULT_LABELS, n: int = 20000, seed: int = 0,
                     repeats: int = 10, lo: float = -10000.0, hi: float = 10000.0,
                     style: str = "scalar", alpha: float = 1.0) -> list[BenchResult]:
    """Value rows then gradient rows, one per label, all on the same inputs."""
    x = sample_inputs(n, lo, hi, seed)
    batch = x.tolist() if style == "scalar" else x
    table = evaluators(style, alpha)
    unknown = [lb for lb in labels if lb not in table]
    if unknown:
        raise ValueError(f"unknown benchmark labels {unknown}; known: {sorted(table)}")
    results = []
    for which, idx in (("value", 0), ("gradient", 1)):
        for lb in labels:
            results.append(time_activation(lb, table[lb][idx], batch, repeats, which, style, lo, hi))
    return results


def pin_to_one_cpu() -> int | None:
    """Restrict this process to a single CPU where supported; returns the CPU id."""
    if not hasattr(os, "sched_setaffinity"):
        return None
    try:
        cpu = min(os.sched_getaffinity(0))
        os.sched_setaffinity(0, {cpu})
        return cpu
    except OSError:
        return None


BENCH_COLUMNS = ("label", "n", "repeats", "median_s", "min_s", "checksum",
                 "table", "style", "lo", "hi", "input_checksum")


def bench_csv(results: Sequence[BenchResult], metadata: dict | None = None) -> str:
    """CSV text; metadata goes into leading ``#`` comment lines."""
    rows = [
        [r.label, r.n, r.repeats, f"{r.median:.9f}", f"{r.min:.9f}", repr(r.checksum),
         r.table, r.style, repr(r.lo), repr(r.hi), repr(r.input_checksum)]
        for r in results
    ]
    return csvio.render(BENCH_COLUMNS, rows, metadata)


def read_bench_csv(text: str) -> tuple[dict[str, str], list[dict[str, str]]]:
    meta, columns, rows = csvio.parse(text)
    if tuple(columns) != BENCH_COLUMNS:
        raise ValueError("unexpected benchmark columns")
    return meta, rows
