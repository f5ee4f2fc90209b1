"""Post-processing k-means assignments toward the maximin group utility."""

from .clustering import ClusterAssignment, kmeans, lloyd, recompute_centroids, squared_distance
from .dataset import Dataset, encode, ingest_adult, make_tiny_instance, sample_for_parity
from .operators import PruneConfig, ReassignmentOp, apply, generate_r1, generate_r2
from .policy import select_best, skyline
from .scan import scan
from .traverse import traverse
from .utility import UtilityPoint, evaluate, evaluate_move_delta

__version__ = "0.1.0"
