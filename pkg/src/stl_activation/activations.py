"""Exact double-precision activation functions and their derivatives.

Every activation is available in two forms: a scalar function working on
Python floats (``activation_value`` / ``activation_grad``) and a numpy
elementwise form (``activation_value_array`` / ``activation_grad_array``)
used by the trainer.  Both forms implement the same formulas and are
checked against each other in the test suite.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy import special

_log2 = math.log2
_LN2 = math.log(2.0)

__all__ = [
    "ActivationError",
    "Tag",
    "ActivationKind",
    "ActivationProfile",
    "KIND_NAMES",
    "PROFILES",
    "parse_kind",
    "sign",
    "stl_value",
    "stl_grad",
    "scalar_kernels",
    "activation_value",
    "activation_grad",
    "activation_value_array",
    "activation_grad_array",
    "softmax",
    "kinks",
]


class ActivationError(ValueError):
    """Raised for invalid activation parameters or unsupported inputs."""


class Tag(str, enum.Enum):
    SIGMOID = "sigmoid"
    RELU = "relu"
    PRELU = "prelu"
    ELU = "elu"
    SWISH = "swish"
    TANH = "tanh"
    SOFTSIGN = "softsign"
    SOFTMAX = "softmax"
    NLRELU = "nlrelu"
    SERF = "serf"
    STL = "stl"


# Row order of the comparison table; also the canonical CLI spelling.
KIND_NAMES: tuple[str, ...] = tuple(t.value for t in Tag)

DEFAULT_PARAMS = {Tag.STL: 1.0, Tag.PRELU: 0.01, Tag.ELU: 1.0, Tag.NLRELU: 1.0}


@dataclass(frozen=True)
class ActivationKind:
    """Activation identity plus its scalar parameter.

    ``param`` is the slope/scale used by PReLU, ELU, NLReLU and STL and is
    ignored by the other activations.  ``None`` selects the default.
    """

    tag: Tag
    param: float | None = None

    def __post_init__(self):
        tag = Tag(self.tag)
        object.__setattr__(self, "tag", tag)
        if tag in DEFAULT_PARAMS:
            param = DEFAULT_PARAMS[tag] if self.param is None else float(self.param)
            if not math.isfinite(param):
                raise ActivationError(f"{tag.value}: parameter must be finite, got {param}")
            if tag is Tag.STL and param <= 0:
                raise ActivationError(f"stl: alpha must be > 0, got {param}")
            object.__setattr__(self, "param", param)
        else:
            object.__setattr__(self, "param", None)

    @property
    def alpha(self) -> float:
        return 0.0 if self.param is None else self.param

    @property
    def name(self) -> str:
        return self.tag.value

    @property
    def is_scalar(self) -> bool:
        return self.tag is not Tag.SOFTMAX

    def __str__(self):
        if self.param is None:
            return self.tag.value
        return f"{self.tag.value}(alpha={self.param:g})"


def parse_kind(name: str | ActivationKind | Tag, alpha: float | None = None) -> ActivationKind:
    """Build an :class:`ActivationKind` from a lowercase name such as ``"stl"``."""
    if isinstance(name, ActivationKind):
        if alpha is None:
            return name
        return ActivationKind(name.tag, alpha)
    if isinstance(name, Tag):
        return ActivationKind(name, alpha)
    try:
        tag = Tag(str(name).strip().lower())
    except ValueError:
        raise ActivationError(
            f"unknown activation {name!r}; expected one of {', '.join(KIND_NAMES)}"
        ) from None
    return ActivationKind(tag, alpha)


@dataclass(frozen=True)
class ActivationProfile:
    """Declared properties of one activation, as tabulated for comparison."""

    kind: ActivationKind
    declared_odd: bool
    declared_monotone: bool
    declared_differentiable: bool
    declared_range: str  # "bounded" | "lower-bounded" | "unbounded"
    declared_continuous_gradient: bool
    declared_compute_time: str
    declared_gradient_compute_time: str


def _profile(tag, odd, mono, diff, rng, cont, cost):
    return ActivationProfile(ActivationKind(tag), odd, mono, diff, rng, cont, cost, cost)


PROFILES: dict[Tag, ActivationProfile] = {
    s.kind.tag: s
    for s in (
        _profile(Tag.SIGMOID, False, True, True, "bounded", True, "high"),
        _profile(Tag.RELU, False, True, False, "lower-bounded", False, "low"),
        _profile(Tag.PRELU, False, True, False, "unbounded", False, "low"),
        _profile(Tag.ELU, False, True, True, "lower-bounded", False, "medium"),
        _profile(Tag.SWISH, False, False, True, "lower-bounded", True, "high"),
        _profile(Tag.TANH, True, True, True, "bounded", True, "high"),
        _profile(Tag.SOFTSIGN, True, True, True, "bounded", True, "low"),
        _profile(Tag.SOFTMAX, False, False, True, "bounded", True, "high"),
        _profile(Tag.NLRELU, False, True, False, "lower-bounded", False, "low"),
        _profile(Tag.SERF, False, False, True, "lower-bounded", True, "high"),
        _profile(Tag.STL, True, True, True, "unbounded", True, "low"),
    )
}


def kinks(kind: ActivationKind) -> tuple[float, ...]:
    """Points where the activation switches formula branch."""
    if kind.tag is Tag.STL:
        return (-1.0, 1.0)
    if kind.tag in (Tag.RELU, Tag.PRELU, Tag.ELU, Tag.NLRELU):
        return (0.0,)
    return ()


def sign(x: float) -> int:
    """Sign of ``x`` as -1, 0 or +1, with ``sign(0) == 0``."""
    if x > 0:
        return 1
    if x < 0:
        return -1
    return 0


def stl_value(x: float, alpha: float = 1.0) -> float:
    """Signed and truncated logarithm.

    ``alpha * x`` on ``|x| <= 1`` and ``alpha * sign(x) * (ln|x| + 1)``
    outside.  Both branches give ``+-alpha`` at ``|x| == 1``.
    NaN and infinities pass through.
    """
    # ln|x| as ln2 * log2|x|: log2 is the cheaper libm entry point in CPython
    if alpha > 0:
        if x > 1.0:
            return alpha * (_LN2 * _log2(x) + 1.0)
        if x < -1.0:
            return -alpha * (_LN2 * _log2(-x) + 1.0)
        return alpha * x
    raise ActivationError(f"stl: alpha must be > 0, got {alpha}")


def stl_grad(x: float, alpha: float = 1.0) -> float:
    """Derivative of :func:`stl_value`: ``alpha`` inside ``[-1, 1]``, ``alpha/|x|`` outside."""
    if alpha > 0:
        if x > 1.0:
            return alpha / x
        if x < -1.0:
            return -alpha / x
        if x != x:
            return x
        return alpha
    raise ActivationError(f"stl: alpha must be > 0, got {alpha}")


_TWO_OVER_SQRT_PI = 2.0 / math.sqrt(math.pi)


def _sigmoid(x):
    if x >= 0:
        return 1.0 / (1.0 + math.exp(-x))
    e = math.exp(x)
    return e / (1.0 + e)


def _softplus(x):
    return max(x, 0.0) + math.log1p(math.exp(-abs(x)))


# Per-kind scalar kernels share the signature (x, alpha) so dispatch costs
# the same for every activation.  ``not x <= 0`` keeps NaN flowing through.


def _relu(x, a):
    return x if not x <= 0 else 0.0


def _relu_grad(x, a):
    return 1.0 if x >= 0 else (0.0 if x < 0 else x)


def _prelu(x, a):
    return x if not x <= 0 else a * x


def _prelu_grad(x, a):
    return 1.0 if x >= 0 else (a if x < 0 else x)


def _elu(x, a):
    return x if not x <= 0 else a * math.expm1(x)


def _elu_grad(x, a):
    return 1.0 if x >= 0 else a * math.exp(x)


def _sigmoid_value(x, a):
    return _sigmoid(x) if x == x else x


def _sigmoid_grad(x, a):
    s = _sigmoid(x) if x == x else x
    return s * (1.0 - s)


def _swish(x, a):
    if x == -math.inf:
        return -0.0
    return x * _sigmoid(x) if x == x else x


def _swish_grad(x, a):
    if math.isinf(x):
        return 1.0 if x > 0 else 0.0
    if x != x:
        return x
    s = _sigmoid(x)
    return s + x * s * (1.0 - s)


def _tanh(x, a):
    return math.tanh(x)


def _tanh_grad(x, a):
    t = math.tanh(x)
    return 1.0 - t * t


def _softsign(x, a):
    if math.isinf(x):
        return math.copysign(1.0, x)
    return x / (abs(x) + 1.0)


def _softsign_grad(x, a):
    d = abs(x) + 1.0
    return 1.0 / (d * d)


def _nlrelu(x, a):
    return math.log1p(a * x) if not x <= 0 else 0.0


def _nlrelu_grad(x, a):
    return a / (a * x + 1.0) if x >= 0 else (0.0 if x < 0 else x)


def _serf(x, a):
    if math.isinf(x):
        return x if x > 0 else -0.0
    return x * math.erf(_softplus(x)) if x == x else x


def _serf_grad(x, a):
    if math.isinf(x):
        return 1.0 if x > 0 else 0.0
    if x != x:
        return x
    sp = _softplus(x)
    return math.erf(sp) + x * _TWO_OVER_SQRT_PI * math.exp(-sp * sp) * _sigmoid(x)


_VALUE = {
    Tag.SIGMOID: _sigmoid_value, Tag.RELU: _relu, Tag.PRELU: _prelu, Tag.ELU: _elu,
    Tag.SWISH: _swish, Tag.TANH: _tanh, Tag.SOFTSIGN: _softsign, Tag.NLRELU: _nlrelu,
    Tag.SERF: _serf, Tag.STL: stl_value,
}
_GRAD = {
    Tag.SIGMOID: _sigmoid_grad, Tag.RELU: _relu_grad, Tag.PRELU: _prelu_grad,
    Tag.ELU: _elu_grad, Tag.SWISH: _swish_grad, Tag.TANH: _tanh_grad,
    Tag.SOFTSIGN: _softsign_grad, Tag.NLRELU: _nlrelu_grad, Tag.SERF: _serf_grad,
    Tag.STL: stl_grad,
}


def scalar_kernels(kind: ActivationKind):
    """``(value_fn, grad_fn, alpha)`` where each fn is called as ``fn(x, alpha)``."""
    try:
        return _VALUE[kind.tag], _GRAD[kind.tag], kind.alpha
    except KeyError:
        raise ActivationError(f"{kind.tag.value} is vector-valued; use softmax()") from None


def activation_value(kind: ActivationKind, x: float) -> float:
    """Evaluate the activation ``kind`` at ``x`` in double precision."""
    try:
        f = _VALUE[kind.tag]
    except KeyError:
        raise ActivationError(f"{kind.tag.value} is vector-valued; use softmax()") from None
    return f(x, kind.alpha)


def activation_grad(kind: ActivationKind, x: float) -> float:
    """Analytic derivative of ``kind`` at ``x``.

    At the kink ``x == 0`` of ReLU, PReLU, ELU and NLReLU the right-hand
    derivative is returned.
    """
    try:
        g = _GRAD[kind.tag]
    except KeyError:
        raise ActivationError(f"{kind.tag.value} is vector-valued; use softmax()") from None
    return g(x, kind.alpha)


# numpy elementwise forms ---------------------------------------------------


def _sigmoid_np(x):
    e = np.exp(-np.abs(x))
    return np.where(x >= 0, 1.0 / (1.0 + e), e / (1.0 + e))


def _softplus_np(x):
    return np.maximum(x, 0.0) + np.log1p(np.exp(-np.abs(x)))


def activation_value_array(kind: ActivationKind, x) -> np.ndarray:
    """Elementwise :func:`activation_value` over a float64 array."""
    x = np.asarray(x, dtype=np.float64)
    tag = kind.tag
    a = kind.alpha
    with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
        if tag is Tag.STL:
            ax = np.abs(x)
            outer = np.copysign(a * (np.log(np.maximum(ax, 1.0)) + 1.0), x)
            return np.where(ax <= 1.0, a * x, outer)
        if tag is Tag.RELU:
            return np.where(x > 0, x, 0.0)
        if tag is Tag.PRELU:
            return np.where(x > 0, x, a * x)
        if tag is Tag.ELU:
            return np.where(x > 0, x, a * np.expm1(np.minimum(x, 0.0)))
        if tag is Tag.SIGMOID:
            return _sigmoid_np(x)
        if tag is Tag.SWISH:
            return x * _sigmoid_np(x)
        if tag is Tag.TANH:
            return np.tanh(x)
        if tag is Tag.SOFTSIGN:
            return x / (np.abs(x) + 1.0)
        if tag is Tag.NLRELU:
            return np.where(x > 0, np.log1p(a * np.maximum(x, 0.0)), 0.0)
        if tag is Tag.SERF:
            return x * special.erf(_softplus_np(x))
    raise ActivationError(f"{tag.value} is vector-valued; use softmax()")


def activation_grad_array(kind: ActivationKind, x) -> np.ndarray:
    """Elementwise :func:`activation_grad` over a float64 array."""
    x = np.asarray(x, dtype=np.float64)
    tag = kind.tag
    a = kind.alpha
    with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
        if tag is Tag.STL:
            ax = np.abs(x)
            return np.where(ax <= 1.0, a, a / np.maximum(ax, 1.0))
        if tag is Tag.RELU:
            return np.where(x >= 0, 1.0, 0.0)
        if tag is Tag.PRELU:
            return np.where(x >= 0, 1.0, a)
        if tag is Tag.ELU:
            return np.where(x >= 0, 1.0, a * np.exp(np.minimum(x, 0.0)))
        if tag is Tag.SIGMOID:
            s = _sigmoid_np(x)
            return s * (1.0 - s)
        if tag is Tag.SWISH:
            s = _sigmoid_np(x)
            return s + x * s * (1.0 - s)
        if tag is Tag.TANH:
            t = np.tanh(x)
            return 1.0 - t * t
        if tag is Tag.SOFTSIGN:
            d = np.abs(x) + 1.0
            return 1.0 / (d * d)
        if tag is Tag.NLRELU:
            return np.where(x >= 0, a / (a * np.maximum(x, 0.0) + 1.0), 0.0)
        if tag is Tag.SERF:
            sp = _softplus_np(x)
            return special.erf(sp) + x * _TWO_OVER_SQRT_PI * np.exp(-sp * sp) * _sigmoid_np(x)
    raise ActivationError(f"{tag.value} is vector-valued; use softmax()")


def softmax(xs: Sequence[float]) -> np.ndarray:
    """Softmax of a 1-D vector, or row-wise over a 2-D array.

    The row maximum is subtracted before exponentiating so large inputs
    do not overflow.
    """
    z = np.asarray(xs, dtype=np.float64)
    if z.size == 0 or z.shape[-1] == 0:
        raise ActivationError("softmax of an empty vector is undefined")
    if not np.all(np.isfinite(z)):
        raise ActivationError("softmax requires finite inputs")
    z = z - z.max(axis=-1, keepdims=True)
    e = np.exp(z)
    return e / e.sum(axis=-1, keepdims=True)
