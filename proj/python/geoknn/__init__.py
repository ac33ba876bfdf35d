"""kNN kernel density estimation on Riemannian manifolds."""

from ._geoknn import (
    ContractError,
    DataError,
    DegenerateBandwidth,
    InvalidArgument,
    Manifold,
    default_jitter_scale,
    estimate,
    knn_distance,
    model_density,
    radial_normalization,
    sample_model,
    second_moment,
    squared_integral,
    sweep,
)

__all__ = [
    "ContractError",
    "DataError",
    "DegenerateBandwidth",
    "InvalidArgument",
    "Manifold",
    "default_jitter_scale",
    "estimate",
    "knn_distance",
    "model_density",
    "radial_normalization",
    "sample_model",
    "second_moment",
    "squared_integral",
    "sweep",
]
