from .data import (
    Dataset,
    DatasetError,
    DatasetRef,
    load_dataset,
    load_idx_pair,
    make_blobs,
    read_idx,
    write_digits_idx,
    write_idx,
)
from .network import Cache, Network, NetworkError, backward, forward, init_network, loss, sgd_step
from .training import (
    ComparisonRow,
    EpochRecord,
    TrainConfig,
    TrainResult,
    accuracy,
    compare_activations,
    comparison_csv,
    comparison_history_csv,
    fit_arrays,
    history_csv,
    train,
)
