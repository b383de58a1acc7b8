"""Local estimation of hitting times and effective resistances by random walks."""
from .estimators import (
    EstimatorParams,
    HtEstimate,
    cutoff_estimate,
    effective_resistance_meeting,
    meeting_time_estimate,
    theoretical_params,
    walk_sampling_estimate,
)
from .exact import (
    OracleCapError,
    exact_effective_resistance,
    exact_hitting_to,
    hitting_time,
    meeting_survival,
    mixing_time,
    spectral_info,
)
from .generators import (
    complete_graph,
    cycle_graph,
    generate_ba,
    generate_barbell,
    generate_er,
    generate_sbm,
    path_graph,
    star_graph,
)
from .graph import (
    EdgeListParseError,
    Graph,
    GraphError,
    from_edge_list,
    from_edges,
    kronecker_product,
    load_graph,
    pagerank,
    read_edge_list,
    save_graph,
    stationary,
    write_edge_list,
)
from .mixing import (
    binary_search_mixing,
    effres_truncated_series,
    l1_closeness_test,
    local_pair_mixing_exact,
    mixing_test,
)
from .pairs import PairSampler, sample_pairs
from .walks import sample_endpoints, sample_hitting_times, threads

__version__ = "0.1.0"
