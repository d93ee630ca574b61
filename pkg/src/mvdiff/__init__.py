"""mvdiff: multiview clustering via stationary-diffusion consensus graphs."""

from .clustering import Partition, hungarian, kmeans, spectral
from .graphs import TransitionGraph, connected_components, gaussian_affinity, sym_normalize
from .metrics import MetricReport, evaluate
from .model import (
    StationaryDiffusionClustering,
    TrainConfig,
    TrainedModel,
    fit_transition_graphs,
    fit_views,
)
from .synthetic import make_multiview_blobs

__version__ = "0.1.0"

__all__ = [
    "Partition",
    "hungarian",
    "kmeans",
    "spectral",
    "TransitionGraph",
    "connected_components",
    "gaussian_affinity",
    "sym_normalize",
    "MetricReport",
    "evaluate",
    "StationaryDiffusionClustering",
    "TrainConfig",
    "TrainedModel",
    "fit_transition_graphs",
    "fit_views",
    "make_multiview_blobs",
    "__version__",
]
