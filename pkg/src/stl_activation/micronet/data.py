"""Datasets for the trainer: IDX (MNIST format) files and synthetic blobs."""

from __future__ import annotations

import gzip
import os
import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np

__all__ = [
    "DatasetError",
    "DatasetRef",
    "Dataset",
    "read_idx",
    "write_idx",
    "make_blobs",
    "load_idx_pair",
    "write_digits_idx",
    "load_dataset",
]

# Third byte of the IDX magic number selects the element type.
_IDX_TYPES = {
    0x08: np.dtype(">u1"),
    0x09: np.dtype(">i1"),
    0x0B: np.dtype(">i2"),
    0x0C: np.dtype(">i4"),
    0x0D: np.dtype(">f4"),
    0x0E: np.dtype(">f8"),
}
_IDX_CODES = {v.newbyteorder("="): k for k, v in _IDX_TYPES.items()}


class DatasetError(OSError):
    """A dataset could not be read or is malformed."""


def _open(path, mode):
    path = os.fspath(path)
    return gzip.open(path, mode) if path.endswith(".gz") else open(path, mode)


def read_idx(path) -> np.ndarray:
    """Read an IDX file (optionally gzipped) into an array of its native shape."""
    try:
        with _open(path, "rb") as fh:
            raw = fh.read()
    except OSError as exc:
        raise DatasetError(f"cannot read IDX file {path}: {exc}") from exc
    if len(raw) < 4:
        raise DatasetError(f"{path}: truncated IDX header")
    zero, code, ndim = struct.unpack(">HBB", raw[:4])
    if zero != 0 or code not in _IDX_TYPES:
        raise DatasetError(f"{path}: bad IDX magic 0x{zero:04x}{code:02x}{ndim:02x}")
    header = 4 + 4 * ndim
    if len(raw) < header:
        raise DatasetError(f"{path}: truncated IDX header")
    dims = struct.unpack(f">{ndim}I", raw[4:header])
    dtype = _IDX_TYPES[code]
    count = int(np.prod(dims, dtype=np.int64))
    if len(raw) - header != count * dtype.itemsize:
        raise DatasetError(
            f"{path}: expected {count * dtype.itemsize} data bytes for shape {dims}, "
            f"found {len(raw) - header}"
        )
    data = np.frombuffer(raw, dtype=dtype, offset=header, count=count)
    return data.reshape(dims).astype(dtype.newbyteorder("="))


def write_idx(path, array) -> None:
    """Write ``array`` as an IDX file; gzip-compressed if ``path`` ends in ``.gz``."""
    a = np.asarray(array)
    code = _IDX_CODES.get(a.dtype.newbyteorder("="))
    if code is None:
        raise DatasetError(f"dtype {a.dtype} has no IDX encoding")
    header = struct.pack(">HBB", 0, code, a.ndim) + struct.pack(f">{a.ndim}I", *a.shape)
    with _open(path, "wb") as fh:
        fh.write(header)
        fh.write(a.astype(_IDX_TYPES[code], copy=False).tobytes())


@dataclass(frozen=True)
class DatasetRef:
    """Where the data comes from and how it is split.

    ``source`` is ``"blobs"`` (synthetic Gaussian clusters) or ``"idx"``
    (an image file plus a label file in IDX format).
    """

    source: str = "blobs"
    classes: int = 3
    samples: int = 600
    noise: float = 0.6
    seed: int = 0
    images_path: str | None = None
    labels_path: str | None = None
    limit: int | None = None
    test_fraction: float = 0.2

    def __post_init__(self):
        if self.source not in ("blobs", "idx"):
            raise ValueError(f"unknown dataset source {self.source!r}")
        if not 0 < self.test_fraction < 1:
            raise ValueError("test_fraction must lie in (0, 1)")
        if self.source == "idx" and not (self.images_path and self.labels_path):
            raise ValueError("idx datasets need images_path and labels_path")


@dataclass
class Dataset:
    X_train: np.ndarray
    y_train: np.ndarray
    X_test: np.ndarray
    y_test: np.ndarray
    n_classes: int

    @property
    def n_features(self) -> int:
        return self.X_train.shape[1]


def make_blobs(classes: int = 3, samples: int = 600, noise: float = 0.6,
               seed: int = 0, dim: int = 2) -> tuple[np.ndarray, np.ndarray]:
    """Gaussian clusters with centres evenly spaced on a circle of radius 3.

    Features are min-max scaled to ``[0, 1]``.
    """
    if classes < 2 or samples < classes:
        raise ValueError("need at least two classes and one sample per class")
    rng = np.random.default_rng(seed)
    angles = 2 * np.pi * np.arange(classes) / classes
    centers = np.zeros((classes, dim))
    centers[:, 0] = 3 * np.cos(angles)
    centers[:, 1 % dim] = 3 * np.sin(angles)
    y = np.arange(samples) % classes
    X = centers[y] + noise * rng.standard_normal((samples, dim))
    lo, hi = X.min(axis=0), X.max(axis=0)
    X = (X - lo) / np.where(hi > lo, hi - lo, 1.0)
    perm = rng.permutation(samples)
    return X[perm], y[perm]


def load_idx_pair(images_path, labels_path, limit: int | None = None):
    """Load an image/label IDX pair as flattened ``[0, 1]`` features and int labels."""
    images = read_idx(images_path)
    labels = read_idx(labels_path)
    if images.shape[0] != labels.shape[0] or labels.ndim != 1:
        raise DatasetError(
            f"{images_path} / {labels_path}: {images.shape[0]} images vs labels of shape {labels.shape}"
        )
    if limit is not None:
        images, labels = images[:limit], labels[:limit]
    X = images.reshape(images.shape[0], -1).astype(np.float64)
    if images.dtype == np.uint8:
        X /= 255.0
    else:
        lo, hi = X.min(), X.max()
        X = (X - lo) / (hi - lo if hi > lo else 1.0)
    return X, labels.astype(np.int64)


def write_digits_idx(directory, n: int = 2000) -> tuple[Path, Path]:
    """Write an ``n``-sample MNIST-format subset built from scikit-learn's digits.

    The bundled set has 1797 8x8 images; beyond that, copies shifted one
    pixel to the right are appended.  Pixel values are rescaled from
    0..16 to 0..255.
    """
    from sklearn.datasets import load_digits

    digits = load_digits()
    imgs = np.rint(digits.images * (255.0 / 16.0)).astype(np.uint8)
    labels = digits.target.astype(np.uint8)
    while imgs.shape[0] < n:
        extra = min(n - imgs.shape[0], digits.images.shape[0])
        shifted = np.zeros_like(imgs[:extra])
        shifted[:, :, 1:] = imgs[:extra, :, :-1]
        imgs = np.concatenate([imgs, shifted])
        labels = np.concatenate([labels, labels[:extra]])
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    img_path = directory / "digits-images-idx3-ubyte"
    lbl_path = directory / "digits-labels-idx1-ubyte"
    write_idx(img_path, imgs[:n])
    write_idx(lbl_path, labels[:n])
    return img_path, lbl_path


def _split(X, y, test_fraction, seed):
    rng = np.random.default_rng([seed, 0x5EED])
    perm = rng.permutation(len(y))
    n_test = max(1, int(round(len(y) * test_fraction)))
    te, tr = perm[:n_test], perm[n_test:]
    return X[tr], y[tr], X[te], y[te]


def load_dataset(ref: DatasetRef) -> Dataset:
    """Materialise a :class:`DatasetRef` into a deterministic train/test split."""
    if ref.source == "blobs":
        X, y = make_blobs(ref.classes, ref.samples, ref.noise, ref.seed)
        n_classes = ref.classes
    else:
        X, y = load_idx_pair(ref.images_path, ref.labels_path, ref.limit)
        n_classes = int(y.max()) + 1
    return Dataset(*_split(X, y, ref.test_fraction, ref.seed), n_classes=n_classes)
