"""Fast log2 on IEEE-754 binary32 values and the fast STL path built on it.

A normal single-precision float is ``(-1)**s * 2**(E - 127) * (1 + V)``, so
``log2(x) = E - 127 + log2(1 + V)`` for positive ``x``.  Only the
``log2(1 + V)`` term on ``[1, 2)`` needs approximating; this module does
it either with a fixed quadratic or with a linearly interpolated lookup
table.  Scalar functions accept Python floats (rounded to binary32 first);
the ``*_array`` variants operate on numpy ``float32`` arrays through an
integer view of the bits.
"""

from __future__ import annotations

import math
import struct
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

__all__ = [
    "FastLogError",
    "Binary32Parts",
    "Log2Lut",
    "POLY_COEFFS",
    "POLY_MAX_ABS_ERROR",
    "DEFAULT_LUT_SIZE",
    "to_float32",
    "decompose_binary32",
    "decompose_binary32_array",
    "reassemble_binary32_array",
    "beta_constant",
    "log2_poly",
    "build_lut",
    "fast_log2",
    "fast_log2_array",
    "fast_stl",
    "fast_stl_array",
    "audit_log2_poly",
    "audit_log2_lut",
]

# (-0.344845 m + 2.024658) m - 1.674873
POLY_COEFFS = (-0.344845, 2.024658, -1.674873)
# Measured on a 10**6 point grid over [1, 2): 0.0049411.  0.006 leaves margin.
POLY_MAX_ABS_ERROR = 0.006
DEFAULT_LUT_SIZE = 256

_FRAC_BITS = 23
_FRAC_SCALE = float(1 << _FRAC_BITS)
_LN2 = math.log(2.0)


class FastLogError(ValueError):
    """Input outside the domain of the fast path."""


@dataclass(frozen=True)
class Binary32Parts:
    s: int
    E: int
    V: float

    def value(self) -> float:
        """Reassemble ``(-1)**s * 2**(E-127) * (1+V)`` (exact in double precision)."""
        return (-1.0) ** self.s * math.ldexp(1.0 + self.V, self.E - 127)


def to_float32(x: float) -> float:
    """Round a Python float to the nearest binary32 value."""
    return struct.unpack("<f", struct.pack("<f", x))[0]


def _bits(x: float) -> int:
    try:
        return struct.unpack("<I", struct.pack("<f", x))[0]
    except OverflowError:
        raise FastLogError(f"{x!r} overflows binary32 (infinite)") from None


def _classify_reject(E: int, frac: int) -> str | None:
    if E == 0:
        return "zero" if frac == 0 else "denormal"
    if E == 255:
        return "infinite" if frac == 0 else "NaN"
    return None


def decompose_binary32(x: float) -> Binary32Parts:
    """Split a normal binary32 value into sign bit, biased exponent and fraction.

    >>> decompose_binary32(-1.5)
    Binary32Parts(s=1, E=127, V=0.5)
    """
    bits = _bits(x)
    s = bits >> 31
    E = (bits >> _FRAC_BITS) & 0xFF
    frac = bits & 0x7FFFFF
    reject = _classify_reject(E, frac)
    if reject is not None:
        raise FastLogError(f"decompose_binary32: {reject} input {x!r} is not a normal float")
    return Binary32Parts(int(s), int(E), frac / _FRAC_SCALE)


def decompose_binary32_array(x) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Vectorised :func:`decompose_binary32`; returns ``(s, E, V)`` arrays."""
    x = np.ascontiguousarray(x, dtype=np.float32)
    bits = x.view(np.uint32)
    E = ((bits >> 23) & 0xFF).astype(np.int32)
    frac = bits & 0x7FFFFF
    bad = (E == 0) | (E == 255)
    if bad.any():
        i = int(np.flatnonzero(bad)[0])
        reject = _classify_reject(int(E[i]), int(frac[i]))
        raise FastLogError(
            f"decompose_binary32: {reject} input {float(x.flat[i])!r} at index {i} "
            "is not a normal float"
        )
    s = (bits >> 31).astype(np.int8)
    V = frac.astype(np.float64) / _FRAC_SCALE
    return s, E, V


def reassemble_binary32_array(s, E, V) -> np.ndarray:
    """Inverse of :func:`decompose_binary32_array`, returned as float32."""
    mag = np.ldexp(1.0 + np.asarray(V, dtype=np.float64), np.asarray(E, dtype=np.int32) - 127)
    return np.where(np.asarray(s) == 1, -mag, mag).astype(np.float32)


def beta_constant(x: float, alpha: float) -> float:
    """Signed slope ``alpha * sign(x) / log2(e)``, i.e. ``+-alpha * ln 2``."""
    if x > 0:
        return alpha * _LN2
    if x < 0:
        return -alpha * _LN2
    return 0.0


def _horner(m):
    a, b, c = POLY_COEFFS
    return (a * m + b) * m + c


def log2_poly(m: float) -> float:
    """Quadratic approximation of ``log2(m)`` for ``1 <= m < 2``."""
    if not 1.0 <= m < 2.0:
        raise FastLogError(f"log2_poly: argument must lie in [1, 2), got {m!r}")
    return _horner(m)


@dataclass(frozen=True, eq=False)
class Log2Lut:
    """Table of ``log2(1 + i/size)`` for ``i in range(size)``.

    Immutable once built; lookups interpolate linearly between entries and
    use ``log2(2) = 1`` past the last one.
    """

    entries: np.ndarray
    size: int

    def __post_init__(self):
        ext = np.append(self.entries, 1.0)
        ext.setflags(write=False)
        object.__setattr__(self, "_ext", ext)

    @property
    def error_bound(self) -> float:
        # Linear interpolation of log2(1+v) on steps of 1/size:
        # h**2/8 * max|f''| with max|f''| = 1/ln 2, plus rounding slack.
        return 1.0 / (8.0 * _LN2 * self.size**2) + 1e-12

    def lookup(self, V):
        """Interpolated ``log2(1 + V)`` for fractions ``V`` in ``[0, 1)``."""
        pos = np.asarray(V, dtype=np.float64) * self.size
        i = np.floor(pos).astype(np.int64)
        t = pos - i
        lo = self._ext[i]
        return lo + t * (self._ext[i + 1] - lo)


def build_lut(size: int = DEFAULT_LUT_SIZE) -> Log2Lut:
    """Build a :class:`Log2Lut` with ``size`` entries (a power of two >= 2)."""
    if isinstance(size, bool) or not isinstance(size, (int, np.integer)):
        raise FastLogError(f"build_lut: size must be an integer, got {size!r}")
    size = int(size)
    if size < 2 or size & (size - 1):
        raise FastLogError(f"build_lut: size must be a power of two >= 2, got {size}")
    entries = np.log2(1.0 + np.arange(size, dtype=np.float64) / size)
    entries.setflags(write=False)
    return Log2Lut(entries, size)


@lru_cache(maxsize=8)
def _cached_lut(size: int) -> Log2Lut:
    return build_lut(size)


def _resolve(mode: str, lut: Log2Lut | None) -> Log2Lut | None:
    if mode == "polynomial":
        return None
    if mode == "lut":
        return lut if lut is not None else _cached_lut(DEFAULT_LUT_SIZE)
    raise FastLogError(f"unknown fast-log mode {mode!r}; expected 'polynomial' or 'lut'")


def fast_log2(x: float, mode: str = "polynomial", lut: Log2Lut | None = None) -> float:
    """Approximate ``log2(x)`` for a normal binary32 ``x > 1``."""
    table = _resolve(mode, lut)
    if not x > 1.0:
        raise FastLogError(f"fast_log2: requires x > 1, got {x!r}")
    p = decompose_binary32(x)
    if table is None:
        return (p.E - 127) + _horner(1.0 + p.V)
    return (p.E - 127) + float(table.lookup(p.V))


def fast_log2_array(x, mode: str = "polynomial", lut: Log2Lut | None = None) -> np.ndarray:
    """Vectorised :func:`fast_log2` over a float32 array of values > 1."""
    table = _resolve(mode, lut)
    x = np.ascontiguousarray(x, dtype=np.float32)
    if x.size and not np.all(x > 1.0):
        bad = x[~(x > 1.0)].flat[0]
        raise FastLogError(f"fast_log2: requires x > 1, got {float(bad)!r}")
    _, E, V = decompose_binary32_array(x)
    approx = _horner(1.0 + V) if table is None else table.lookup(V)
    return (E - 127) + approx


def fast_stl(x: float, alpha: float = 1.0, mode: str = "polynomial",
             lut: Log2Lut | None = None) -> float:
    """STL evaluated through :func:`fast_log2` on its logarithmic branch.

    ``x`` is rounded to binary32.  Inside ``[-1, 1]`` the result is
    ``alpha * x`` exactly; outside it is
    ``beta * fast_log2(|x|) + alpha * sign(x)`` with ``beta = +-alpha ln 2``.
    """
    if not alpha > 0:
        raise FastLogError(f"fast_stl: alpha must be > 0, got {alpha!r}")
    if x != x or math.isinf(x):
        raise FastLogError(f"fast_stl: input must be finite, got {x!r}")
    x = to_float32(x)
    ax = abs(x)
    if ax <= 1.0:
        return alpha * x
    approx = beta_constant(x, alpha) * fast_log2(ax, mode, lut)
    return approx + alpha if x > 0 else approx - alpha


def fast_stl_array(x, alpha: float = 1.0, mode: str = "polynomial",
                   lut: Log2Lut | None = None) -> np.ndarray:
    """Vectorised :func:`fast_stl` returning float64."""
    if not alpha > 0:
        raise FastLogError(f"fast_stl: alpha must be > 0, got {alpha!r}")
    x = np.ascontiguousarray(x, dtype=np.float32)
    if not np.all(np.isfinite(x)):
        raise FastLogError("fast_stl: inputs must be finite")
    ax = np.abs(x)
    outer = ax > 1.0
    out = alpha * x.astype(np.float64)
    if outer.any():
        lg = fast_log2_array(ax[outer], mode, lut)
        sgn = np.where(x[outer] > 0, 1.0, -1.0)
        out[outer] = sgn * alpha * (_LN2 * lg + 1.0)
    return out


def audit_log2_poly(n: int = 1_000_000) -> dict:
    """Compare :func:`log2_poly` with ``numpy.log2`` on ``n`` uniform points of ``[1, 2)``.

    Returns the grid, approximation, reference and absolute error arrays
    plus the maximum error and the values at the two interval ends.
    """
    m = 1.0 + np.arange(n, dtype=np.float64) / n
    approx = _horner(m)
    exact = np.log2(m)
    err = np.abs(approx - exact)
    return {
        "m": m,
        "approx": approx,
        "exact": exact,
        "abs_err": err,
        "max_abs_err": float(err.max()),
        "argmax": float(m[int(err.argmax())]),
        "at_1": float(_horner(1.0)),
        "at_2": float(_horner(2.0)),
    }


def audit_log2_lut(size: int = DEFAULT_LUT_SIZE, n: int = 1_000_000) -> dict:
    """Same report as :func:`audit_log2_poly` for an interpolated table."""
    lut = build_lut(size)
    m = 1.0 + np.arange(n, dtype=np.float64) / n
    approx = lut.lookup(m - 1.0)
    exact = np.log2(m)
    err = np.abs(approx - exact)
    return {
        "m": m,
        "approx": approx,
        "exact": exact,
        "abs_err": err,
        "max_abs_err": float(err.max()),
        "argmax": float(m[int(err.argmax())]),
        "bound": lut.error_bound,
    }
