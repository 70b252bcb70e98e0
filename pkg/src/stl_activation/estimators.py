"""scikit-learn compatible wrappers.

``ActivationTransformer`` applies an activation elementwise, so it can sit
inside a ``Pipeline``; ``MicroNetClassifier`` exposes the from-scratch MLP
trainer through the usual ``fit`` / ``predict`` / ``predict_proba`` API.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin, TransformerMixin
from sklearn.utils.multiclass import check_classification_targets
from sklearn.utils.validation import check_is_fitted, validate_data

from .activations import (
    ActivationError,
    Tag,
    activation_grad_array,
    activation_value_array,
    parse_kind,
    softmax,
)
from .fast_log import DEFAULT_LUT_SIZE, build_lut, fast_stl_array
from .micronet.network import forward, init_network
from .micronet.training import fit_arrays


class ActivationTransformer(TransformerMixin, BaseEstimator):
    """Elementwise activation as a stateless transformer.

    Parameters
    ----------
    activation : str
        Lowercase activation name, e.g. ``"stl"`` or ``"tanh"``.
    alpha : float or None
        Parameter for PReLU/ELU/NLReLU/STL; ``None`` uses the default.
    fast : {None, "polynomial", "lut"}
        For STL only: evaluate the log branch with the binary32 fast path.
    lut_size : int
        Table size when ``fast="lut"``.
    """

    def __init__(self, activation="stl", alpha=None, fast=None, lut_size=DEFAULT_LUT_SIZE):
        self.activation = activation
        self.alpha = alpha
        self.fast = fast
        self.lut_size = lut_size

    def _kind(self):
        kind = parse_kind(self.activation, self.alpha)
        if kind.tag is Tag.SOFTMAX:
            raise ActivationError("softmax is not elementwise; use it as an output head")
        if self.fast not in (None, "polynomial", "lut"):
            raise ValueError(f"fast must be None, 'polynomial' or 'lut', got {self.fast!r}")
        if self.fast is not None and kind.tag is not Tag.STL:
            raise ValueError("the fast path exists only for stl")
        return kind

    def fit(self, X, y=None):
        validate_data(self, X)
        self.kind_ = self._kind()
        self.lut_ = build_lut(self.lut_size) if self.fast == "lut" else None
        return self

    def transform(self, X):
        check_is_fitted(self, "kind_")
        X = validate_data(self, X, reset=False)
        if self.fast is not None:
            return fast_stl_array(X, self.kind_.param, self.fast, self.lut_).reshape(X.shape)
        return activation_value_array(self.kind_, X)

    def gradient(self, X):
        """Elementwise derivative of the activation at ``X``."""
        check_is_fitted(self, "kind_")
        X = validate_data(self, X, reset=False)
        return activation_grad_array(self.kind_, X)

    def get_feature_names_out(self, input_features=None):
        check_is_fitted(self, "n_features_in_")
        if input_features is None:
            input_features = [f"x{i}" for i in range(self.n_features_in_)]
        return np.asarray([f"{self.activation}({f})" for f in input_features], dtype=object)


class MicroNetClassifier(ClassifierMixin, BaseEstimator):
    """Fully connected softmax classifier trained with plain mini-batch SGD.

    Parameters
    ----------
    hidden_layer_sizes : tuple of int
    activation : str
        Hidden-layer activation name.
    alpha : float or None
        Activation parameter (see :class:`ActivationTransformer`).
    learning_rate : float
    epochs : int
    batch_size : int
    random_state : int
        Seeds both weight initialisation and batch shuffling.

    Attributes
    ----------
    classes_ : ndarray
    network_ : Network
    history_ : list of EpochRecord
    loss_curve_ : list of float
    """

    def __init__(self, hidden_layer_sizes=(32,), activation="stl", alpha=None,
                 learning_rate=0.1, epochs=30, batch_size=32, random_state=0):
        self.hidden_layer_sizes = hidden_layer_sizes
        self.activation = activation
        self.alpha = alpha
        self.learning_rate = learning_rate
        self.epochs = epochs
        self.batch_size = batch_size
        self.random_state = random_state

    def fit(self, X, y):
        X, y = validate_data(self, X, y)
        check_classification_targets(y)
        self.classes_, y_enc = np.unique(y, return_inverse=True)
        if self.classes_.size < 2:
            raise ValueError("got one class; need at least two")
        kind = parse_kind(self.activation, self.alpha)
        seed = 0 if self.random_state is None else int(self.random_state)
        dims = (X.shape[1], *map(int, self.hidden_layer_sizes), self.classes_.size)
        net = init_network(dims, kind, seed)
        result = fit_arrays(
            net, X, y_enc, epochs=int(self.epochs), batch_size=int(self.batch_size),
            learning_rate=float(self.learning_rate), seed=seed,
        )
        self.network_ = result.network
        self.history_ = result.history
        self.loss_curve_ = [h.loss for h in result.history]
        return self

    def predict_proba(self, X):
        check_is_fitted(self, "network_")
        X = validate_data(self, X, reset=False)
        logits, _ = forward(self.network_, X)
        return softmax(logits)

    def predict(self, X):
        check_is_fitted(self, "network_")
        return self.classes_[np.argmax(self.predict_proba(X), axis=1)]
