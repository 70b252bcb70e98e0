"""Signed and truncated logarithm (STL) activation with exact and fast evaluation.

Alongside the activation itself live numerical property checks and a small
MLP trainer for comparing activations; ``bench`` times their evaluation."""

from .activations import (
    KIND_NAMES,
    PROFILES,
    ActivationError,
    ActivationKind,
    ActivationProfile,
    Tag,
    activation_grad,
    activation_grad_array,
    activation_value,
    activation_value_array,
    parse_kind,
    sign,
    softmax,
    stl_grad,
    stl_value,
)
from .estimators import ActivationTransformer, MicroNetClassifier
from .fast_log import (
    Binary32Parts,
    FastLogError,
    Log2Lut,
    build_lut,
    decompose_binary32,
    fast_log2,
    fast_stl,
    log2_poly,
)

__version__ = "0.1.0"
