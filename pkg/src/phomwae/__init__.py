"""Topological evaluation of Wasserstein and variational auto-encoders."""
from .bottleneck import bottleneck_distance, combined_bottleneck
from .errors import InputError, NumericalError, UsageError
from .geometry import distance_matrix, subsample
from .persistence import Barcode, PersistenceDiagram, PersistencePair, barcodes, compute_persistence
from .vietoris_rips import Filtration, Simplex, build_vr

__version__ = "0.1.0"
