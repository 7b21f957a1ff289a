"""Network kriging: predict network-wide path metrics from a few measured paths."""

__version__ = "0.1.0"

from .topology import (  # noqa: E402
    RoutingMatrix,
    Topology,
    build_routing_matrix,
    bundled_topology,
    load_topology,
    path_values,
)
from .spectral import Spectrum, betweenness_report, compute_spectrum, effective_rank  # noqa: E402
from .kriging import LinkModel, Predictor, average_summary, build_eblp, mspe_exact  # noqa: E402
from .selection import (  # noqa: E402
    SelectionResult,
    compute_fk_curve,
    select_paths_deterministic,
    select_paths_randomized,
)
