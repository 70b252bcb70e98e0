"""Mini-batch SGD training and the activation comparison experiment."""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Sequence

import numpy as np

from .. import csvio
from ..activations import ActivationKind, parse_kind
from .data import Dataset, DatasetRef, load_dataset
from .network import Network, backward, forward, init_network, loss, sgd_step

__all__ = [
    "TrainConfig",
    "EpochRecord",
    "TrainResult",
    "accuracy",
    "fit_arrays",
    "train",
    "compare_activations",
    "ComparisonRow",
    "history_csv",
    "comparison_csv",
    "comparison_history_csv",
]


@dataclass(frozen=True)
class TrainConfig:
    epochs: int = 30
    batch_size: int = 32
    learning_rate: float = 0.1
    seed: int = 0
    dataset: DatasetRef = field(default_factory=DatasetRef)
    activation: ActivationKind = field(default_factory=lambda: parse_kind("stl"))
    hidden: tuple[int, ...] = (32,)

    def __post_init__(self):
        if self.epochs <= 0 or self.batch_size <= 0:
            raise ValueError("epochs and batch_size must be positive")
        if not self.learning_rate >= 0:
            raise ValueError("learning_rate must be non-negative")
        object.__setattr__(self, "activation", parse_kind(self.activation))
        object.__setattr__(self, "hidden", tuple(int(h) for h in self.hidden))


@dataclass(frozen=True)
class EpochRecord:
    epoch: int
    loss: float
    train_accuracy: float
    test_accuracy: float


@dataclass
class TrainResult:
    network: Network
    history: list[EpochRecord]
    min_activation_grad: float

    @property
    def final_test_accuracy(self) -> float:
        return self.history[-1].test_accuracy


def accuracy(net: Network, X, y) -> float:
    if len(y) == 0:
        return math.nan
    logits, _ = forward(net, X)
    return float(np.mean(np.argmax(logits, axis=1) == y))


def fit_arrays(net: Network, X, y, *, epochs: int, batch_size: int,
               learning_rate: float, seed: int, X_test=None, y_test=None) -> TrainResult:
    """Train ``net`` in place with shuffled mini-batch SGD.

    The loss recorded for each epoch is the full training-set loss after
    that epoch's updates.
    """
    rng = np.random.default_rng([seed, 0xBA7C4])
    n = len(y)
    history = []
    min_g = math.inf
    for epoch in range(1, epochs + 1):
        perm = rng.permutation(n)
        for start in range(0, n, batch_size):
            idx = perm[start:start + batch_size]
            _, cache = forward(net, X[idx])
            gW, gb, g = backward(net, cache, y[idx])
            min_g = min(min_g, g)
            sgd_step(net, gW, gb, learning_rate)
        test_acc = accuracy(net, X_test, y_test) if X_test is not None else math.nan
        history.append(EpochRecord(epoch, loss(net, X, y), accuracy(net, X, y), test_acc))
    return TrainResult(net, history, min_g)


def train(config: TrainConfig, data: Dataset | None = None) -> TrainResult:
    """Run one training job; deterministic given ``config``.

    ``data`` may be passed to reuse an already loaded dataset.
    """
    if data is None:
        data = load_dataset(config.dataset)
    dims = (data.n_features, *config.hidden, data.n_classes)
    net = init_network(dims, config.activation, config.seed)
    return fit_arrays(
        net, data.X_train, data.y_train,
        epochs=config.epochs, batch_size=config.batch_size,
        learning_rate=config.learning_rate, seed=config.seed,
        X_test=data.X_test, y_test=data.y_test,
    )


@dataclass
class ComparisonRow:
    activation: ActivationKind
    accuracies: list[float]
    results: list[TrainResult] = field(repr=False)

    @property
    def mean(self) -> float:
        return float(np.mean(self.accuracies))

    @property
    def std(self) -> float:
        return float(np.std(self.accuracies))

    @property
    def spread(self) -> float:
        return float(np.max(self.accuracies) - np.min(self.accuracies))


def compare_activations(base: TrainConfig, kinds: Sequence, seeds: Sequence[int]) -> list[ComparisonRow]:
    """Train ``base`` once per (activation, seed) and collect final test accuracy.

    Only the activation and the network seed change between runs; the
    dataset split is fixed by ``base.dataset``.
    """
    if len(seeds) == 0:
        raise ValueError("need at least one seed")
    data = load_dataset(base.dataset)
    rows = []
    for k in kinds:
        kind = parse_kind(k)
        results = [train(replace(base, activation=kind, seed=int(s)), data) for s in seeds]
        rows.append(ComparisonRow(kind, [r.final_test_accuracy for r in results], results))
    return rows


HISTORY_COLUMNS = ("activation", "seed", "epoch", "loss", "test_accuracy")
SUMMARY_COLUMNS = ("activation", "seeds", "mean_test_accuracy", "std", "spread", "per_seed")


def history_csv(runs: Sequence[tuple[ActivationKind, int, TrainResult]],
                meta: dict | None = None) -> str:
    rows = [
        [kind.name, seed, rec.epoch, repr(rec.loss), repr(rec.test_accuracy)]
        for kind, seed, res in runs
        for rec in res.history
    ]
    return csvio.render(HISTORY_COLUMNS, rows, meta)


def comparison_csv(rows: Sequence[ComparisonRow], meta: dict | None = None) -> str:
    """One summary row per activation: mean, std and spread of final test accuracy."""
    out = [
        [r.activation.name, len(r.accuracies), f"{r.mean:.6f}", f"{r.std:.6f}",
         f"{r.spread:.6f}", " ".join(f"{a:.6f}" for a in r.accuracies)]
        for r in rows
    ]
    return csvio.render(SUMMARY_COLUMNS, out, meta)


def comparison_history_csv(rows: Sequence[ComparisonRow], seeds: Sequence[int],
                           meta: dict | None = None) -> str:
    runs = [(r.activation, s, res) for r in rows for s, res in zip(seeds, r.results)]
    return history_csv(runs, meta)
