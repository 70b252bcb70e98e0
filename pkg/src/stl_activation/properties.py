"""Numerical checks of the six desirable activation properties.

Each ``check_*`` function returns a small result object whose ``passed``
flag is backed by a concrete witness whenever it is ``False``, so a
failure can always be reproduced by re-evaluating the activation at the
reported input(s).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from . import csvio
from .activations import (
    PROFILES,
    ActivationKind,
    Tag,
    activation_grad,
    activation_value,
    kinks,
    parse_kind,
    softmax,
    stl_grad,
)

__all__ = [
    "PropertyGrid",
    "default_grid",
    "CheckResult",
    "PropertyReport",
    "check_odd",
    "check_monotone",
    "check_gradient_fd",
    "check_differentiable",
    "check_gradient_continuity",
    "check_gradient_nonvanishing",
    "check_range_class",
    "check_contraction",
    "check_softmax",
    "property_report",
    "render_property_table",
    "table_concordance",
    "report_rows",
    "write_report_csv",
    "read_report_csv",
    "CONTINUITY_EPS",
    "RANGE_PROBES",
]

CANDIDATE_POINTS = (-1.0, 0.0, 1.0)
CONTINUITY_EPS = (1e-3, 1e-4, 1e-5)
RANGE_PROBES = (1e5, 1e6, 1e7)
# Allowed gap per unit eps in the one-sided comparisons.  Every activation
# here has |f''| well below this on [-2, 2].
_GAP_SLOPE = 10.0


@dataclass(frozen=True)
class PropertyGrid:
    """Strictly increasing sample points for the property checks."""

    points: np.ndarray

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=np.float64)
        if pts.ndim != 1 or pts.size < 2:
            raise ValueError("grid needs at least two points")
        if not np.all(np.diff(pts) > 0):
            raise ValueError("grid points must be strictly increasing")
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)

    @property
    def range(self) -> tuple[float, float]:
        return float(self.points[0]), float(self.points[-1])

    @property
    def count(self) -> int:
        return int(self.points.size)

    def away_from(self, centers: Iterable[float], distance: float) -> np.ndarray:
        pts = self.points
        keep = np.ones(pts.size, dtype=bool)
        for c in centers:
            keep &= np.abs(pts - c) >= distance
        return pts[keep]


def default_grid(n_uniform: int = 2001, n_log: int = 1000, inner: float = 2.0,
                 outer: float = 1e4) -> PropertyGrid:
    """2001 uniform points on [-2, 2] plus 1000 log-spaced points per tail out to 1e4.

    The default yields 4001 points and contains -1, 0 and 1 exactly.
    """
    uniform = np.linspace(-inner, inner, n_uniform)
    # linspace accumulates rounding; pin the branch points exactly
    uniform = np.round(uniform, 12)
    tail = np.geomspace(inner, outer, n_log + 1)[1:]
    return PropertyGrid(np.concatenate([-tail[::-1], uniform, tail]))


@dataclass(frozen=True)
class CheckResult:
    """Outcome of one property check.

    ``witness`` is an input (or pair of inputs) reproducing a failure;
    ``measure`` is the worst observed error or gap.
    """

    passed: bool
    witness: object = None
    measure: float = 0.0
    note: str = ""

    def __post_init__(self):
        object.__setattr__(self, "passed", bool(self.passed))

    def __bool__(self):
        return self.passed


def _values(kind, xs):
    return np.array([activation_value(kind, float(x)) for x in xs])


def _grads(kind, xs):
    return np.array([activation_grad(kind, float(x)) for x in xs])


def check_odd(kind: ActivationKind, grid: PropertyGrid, tol: float = 1e-12) -> CheckResult:
    """Pass iff ``|f(x) + f(-x)| <= tol * max(1, |f(x)|)`` on the grid and ``|f(0)| <= tol``."""
    if not tol > 0:
        raise ValueError("tol must be positive")
    f0 = activation_value(kind, 0.0)
    if not abs(f0) <= tol:
        return CheckResult(False, 0.0, abs(f0), "f(0) != 0")
    xs = grid.points[grid.points > 0]
    fp = _values(kind, xs)
    fm = _values(kind, -xs)
    rel = np.abs(fp + fm) / np.maximum(1.0, np.abs(fp))
    i = int(np.argmax(rel))
    worst = float(rel[i])
    if worst <= tol:
        return CheckResult(True, None, worst)
    return CheckResult(False, float(xs[i]), worst, "f(-x) != -f(x)")


def check_monotone(kind: ActivationKind, grid: PropertyGrid) -> CheckResult:
    """Pass iff ``f`` is non-decreasing over consecutive grid points.

    A failure reports the right-most decreasing pair, i.e. the one closest
    to where the function turns upward again.
    """
    xs = grid.points
    fx = _values(kind, xs)
    drops = np.flatnonzero(fx[:-1] > fx[1:])
    if drops.size == 0:
        return CheckResult(True)
    j = int(drops[-1])
    return CheckResult(
        False,
        (float(xs[j]), float(xs[j + 1])),
        float(fx[j] - fx[j + 1]),
        f"{drops.size} decreasing steps",
    )


def _central_diff(kind, x, h):
    # Divide by the step actually taken so rounding of x +- h cancels.
    xp, xm = x + h, x - h
    return (activation_value(kind, xp) - activation_value(kind, xm)) / (xp - xm)


def check_gradient_fd(kind: ActivationKind, grid: PropertyGrid, h: float = 1e-6,
                      tol: float = 1e-6) -> CheckResult:
    """Analytic gradient vs central finite differences, away from branch points.

    Grid points closer than ``10*h`` to one of the kind's branch points are
    skipped.  Error is relative to ``max(1, |grad|)``.
    """
    if not h > 0:
        raise ValueError("h must be positive")
    xs = grid.away_from(kinks(kind), 10.0 * h)
    worst, witness = 0.0, None
    for x in xs:
        x = float(x)
        g = activation_grad(kind, x)
        err = abs(_central_diff(kind, x, h) - g) / max(1.0, abs(g))
        if err > worst:
            worst, witness = err, x
    if worst <= tol:
        return CheckResult(True, None, worst)
    return CheckResult(False, witness, worst, "finite difference disagrees with gradient")


def _shrinking_gap(gap_at, points, eps_list, tol):
    worst = 0.0
    for k in points:
        for eps in eps_list:
            gap = gap_at(k, eps)
            worst = max(worst, gap)
            if not gap <= tol + _GAP_SLOPE * eps:
                return CheckResult(False, (k - eps, k + eps), gap, f"gap {gap:.3g} at {k:g}")
    return CheckResult(True, None, worst)


def check_differentiable(kind: ActivationKind, grid: PropertyGrid | None = None,
                         points: Sequence[float] = CANDIDATE_POINTS,
                         eps_list: Sequence[float] = CONTINUITY_EPS,
                         tol: float = 1e-6) -> CheckResult:
    """Left and right difference quotients must agree at ``points``.

    When ``grid`` is given the off-kink finite-difference check must
    pass as well.
    """

    def gap(k, eps):
        fk = activation_value(kind, k)
        right = (activation_value(kind, k + eps) - fk) / eps
        left = (fk - activation_value(kind, k - eps)) / eps
        return abs(right - left)

    res = _shrinking_gap(gap, points, eps_list, tol)
    if not res or grid is None:
        return res
    return check_gradient_fd(kind, grid)


def check_gradient_continuity(kind: ActivationKind,
                              points: Sequence[float] = CANDIDATE_POINTS,
                              eps_list: Sequence[float] = CONTINUITY_EPS,
                              tol: float = 1e-6) -> CheckResult:
    """Pass iff ``|f'(k-eps) - f'(k+eps)| <= tol + 10*eps`` at every ``k``, for each eps."""
    if not (tol > 0 and all(e > 0 for e in eps_list)):
        raise ValueError("eps and tol must be positive")

    def gap(k, eps):
        return abs(activation_grad(kind, k - eps) - activation_grad(kind, k + eps))

    return _shrinking_gap(gap, points, eps_list, tol)


def check_gradient_nonvanishing(kind: ActivationKind, grid: PropertyGrid) -> CheckResult:
    """Pass iff ``0 < f'(x) < inf`` at every grid point."""
    g = _grads(kind, grid.points)
    bad = np.flatnonzero(~((g > 0) & np.isfinite(g)))
    if bad.size == 0:
        return CheckResult(True, None, float(g.max()))
    i = int(bad[0])
    return CheckResult(False, float(grid.points[i]), float(g[i]), "gradient vanishes")


def _side_unbounded(f, direction, probes):
    p1, p2, p3 = (direction * p for p in probes)
    v1, v2, v3 = f(p1), f(p2), f(p3)
    if abs(v3) > 100.0:
        return True
    # Geometric decay of per-decade increments means the tail converges.
    d1 = direction * (v2 - v1)
    d2 = direction * (v3 - v2)
    return d2 > 0 and d2 >= 0.5 * d1


def check_range_class(kind: ActivationKind, probes: Sequence[float] = RANGE_PROBES) -> str:
    """Classify the value range as ``bounded``, ``lower-bounded`` or ``unbounded``.

    A side counts as unbounded if ``|f|`` exceeds 100 at the largest probe
    or if the increase per decade of input does not shrink (this catches
    logarithmic growth, which stays below 100 out to 1e7).
    Returns ``upper-bounded`` for the mirror case of ``lower-bounded``.
    """
    probes = tuple(sorted(abs(p) for p in probes))
    if len(probes) != 3:
        raise ValueError("need exactly three positive probe magnitudes")

    def f(x):
        return activation_value(kind, x)

    up = _side_unbounded(f, 1.0, probes)
    down = _side_unbounded(f, -1.0, probes)
    if up and down:
        return "unbounded"
    if up:
        return "lower-bounded"
    if down:
        return "upper-bounded"
    return "bounded"


def check_contraction(alpha: float, grid: PropertyGrid) -> CheckResult:
    """STL with ``0 < alpha < 1`` must have gradient strictly below 1 everywhere sampled."""
    if not 0 < alpha < 1:
        raise ValueError(f"contraction is only claimed for 0 < alpha < 1, got {alpha}")
    g = np.array([stl_grad(float(x), alpha) for x in grid.points])
    i = int(np.argmax(g))
    gmax = float(g[i])
    if gmax < 1.0:
        return CheckResult(True, None, gmax)
    return CheckResult(False, float(grid.points[i]), gmax)


def check_softmax(seed: int = 0, trials: int = 100, dim: int = 5) -> dict[str, CheckResult]:
    """Vector-level properties of softmax: normalisation, shift invariance, odd, monotone."""
    rng = np.random.default_rng(seed)
    worst_sum = worst_shift = 0.0
    for _ in range(trials):
        v = rng.normal(scale=10.0, size=dim)
        c = rng.uniform(-100.0, 100.0)
        p = softmax(v)
        worst_sum = max(worst_sum, abs(p.sum() - 1.0))
        worst_shift = max(worst_shift, float(np.abs(softmax(v + c) - p).max()))
    z = np.zeros(2)
    return {
        "sum_to_one": CheckResult(worst_sum <= 1e-12, None, worst_sum),
        "shift_invariant": CheckResult(worst_shift <= 1e-12, None, worst_shift),
        # softmax(-0) = [.5, .5] but -softmax(0) = [-.5, -.5]
        "odd": CheckResult(False, [0.0, 0.0], 1.0, "vector-valued; softmax(-v) != -softmax(v)"),
        # raising x_2 lowers component 1
        "monotone": CheckResult(
            False,
            ([0.0, 0.0], [0.0, 1.0]),
            float(softmax(z)[0] - softmax([0.0, 1.0])[0]),
            "vector-valued; component 1 decreases as x_2 grows",
        ),
    }


@dataclass
class PropertyReport:
    """Measured properties of one activation on one grid."""

    kind: ActivationKind
    odd: CheckResult
    monotone: CheckResult
    differentiable: CheckResult
    gradient_fd: CheckResult
    gradient_continuous: CheckResult
    gradient_positive_bounded: CheckResult
    range_class: str
    extra: dict = field(default_factory=dict)

    def measured(self) -> dict[str, object]:
        return {
            "odd": self.odd.passed,
            "monotone": self.monotone.passed,
            "differentiable": self.differentiable.passed,
            "range": self.range_class,
            "continuous_gradient": self.gradient_continuous.passed,
        }

    def declared(self) -> dict[str, object]:
        s = PROFILES[self.kind.tag]
        return {
            "odd": s.declared_odd,
            "monotone": s.declared_monotone,
            "differentiable": s.declared_differentiable,
            "range": s.declared_range,
            "continuous_gradient": s.declared_continuous_gradient,
        }

    def mismatches(self) -> list[str]:
        m, d = self.measured(), self.declared()
        return [k for k in d if m[k] != d[k]]


def property_report(kind: ActivationKind | str, grid: PropertyGrid | None = None,
                    odd_tol: float = 1e-12, fd_h: float = 1e-6,
                    fd_tol: float = 1e-6) -> PropertyReport:
    """Run every check for one activation."""
    kind = parse_kind(kind)
    grid = default_grid() if grid is None else grid
    if kind.tag is Tag.SOFTMAX:
        sm = check_softmax()
        ok = CheckResult(True, None, 0.0, "vector-valued; smooth")
        return PropertyReport(
            kind, sm["odd"], sm["monotone"], ok, ok, ok,
            CheckResult(True, None, 0.25, "vector-valued"),
            "bounded",
            extra={"sum_to_one": sm["sum_to_one"], "shift_invariant": sm["shift_invariant"]},
        )
    fd = check_gradient_fd(kind, grid, fd_h, fd_tol)
    two_sided = check_differentiable(kind)
    return PropertyReport(
        kind=kind,
        odd=check_odd(kind, grid, odd_tol),
        monotone=check_monotone(kind, grid),
        differentiable=two_sided if not two_sided else fd,
        gradient_fd=fd,
        gradient_continuous=check_gradient_continuity(kind),
        gradient_positive_bounded=check_gradient_nonvanishing(kind, grid),
        range_class=check_range_class(kind),
    )


def render_property_table(kinds: Sequence[ActivationKind | str] | None = None,
                          grid: PropertyGrid | None = None, odd_tol: float = 1e-12,
                          fd_h: float = 1e-6, fd_tol: float = 1e-6) -> list[PropertyReport]:
    """One :class:`PropertyReport` per kind, ordered by table row."""
    if kinds is None:
        kinds = [PROFILES[t].kind for t in Tag]
    grid = default_grid() if grid is None else grid
    parsed = [parse_kind(k) for k in kinds]
    order = list(Tag)
    parsed.sort(key=lambda k: (order.index(k.tag), k.alpha))
    return [property_report(k, grid, odd_tol, fd_h, fd_tol) for k in parsed]


# ELU's gradient jump at 0 is 1 - alpha, so the default alpha = 1 is smooth
# even though its declared profile marks the column as failing.
KNOWN_DISCREPANCIES = {(Tag.ELU, "continuous_gradient")}


def table_concordance(reports: Sequence[PropertyReport],
                      columns: Sequence[str] = ("odd", "monotone", "range", "continuous_gradient"),
                      ) -> list[tuple[str, str, object, object]]:
    """Mismatches between measured and declared columns, minus known discrepancies.

    Returns ``(kind, column, measured, declared)`` tuples; empty means full agreement.
    """
    out = []
    for r in reports:
        m, d = r.measured(), r.declared()
        for c in columns:
            if m[c] != d[c] and (r.kind.tag, c) not in KNOWN_DISCREPANCIES:
                out.append((str(r.kind), c, m[c], d[c]))
    return out


# CSV ------------------------------------------------------------------------

REPORT_COLUMNS = (
    "activation", "alpha",
    "odd", "odd_witness",
    "monotone", "monotone_witness",
    "differentiable", "differentiable_witness",
    "range", "continuous_gradient", "continuous_gradient_witness",
    "gradient_nonvanishing", "gradient_fd_max_rel_err",
)


def _fmt_witness(w):
    if w is None:
        return ""
    if isinstance(w, tuple):
        return ";".join(_fmt_witness(x) for x in w)
    if isinstance(w, list):
        return "[" + " ".join(repr(float(x)) for x in w) + "]"
    return repr(float(w))


def _mark(ok: bool) -> str:
    return "yes" if ok else "no"


def report_rows(reports: Sequence[PropertyReport]) -> list[dict[str, str]]:
    rows = []
    for r in reports:
        rows.append({
            "activation": r.kind.name,
            "alpha": "" if r.kind.param is None else repr(r.kind.param),
            "odd": _mark(r.odd.passed),
            "odd_witness": _fmt_witness(r.odd.witness),
            "monotone": _mark(r.monotone.passed),
            "monotone_witness": _fmt_witness(r.monotone.witness),
            "differentiable": _mark(r.differentiable.passed),
            "differentiable_witness": _fmt_witness(r.differentiable.witness),
            "range": r.range_class,
            "continuous_gradient": _mark(r.gradient_continuous.passed),
            "continuous_gradient_witness": _fmt_witness(r.gradient_continuous.witness),
            "gradient_nonvanishing": _mark(r.gradient_positive_bounded.passed),
            "gradient_fd_max_rel_err": f"{r.gradient_fd.measure:.3e}",
        })
    return rows


def write_report_csv(reports: Sequence[PropertyReport], fh=None, meta: dict | None = None) -> str:
    """Render the property table as CSV text; the text is also written to ``fh`` when given."""
    text = csvio.render(REPORT_COLUMNS, report_rows(reports), meta)
    if fh is not None:
        fh.write(text)
    return text


def read_report_csv(text: str) -> list[dict[str, str]]:
    _, columns, rows = csvio.parse(text)
    if tuple(columns) != REPORT_COLUMNS:
        raise ValueError("unexpected property-report columns")
    return rows
