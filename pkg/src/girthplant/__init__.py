"""Planted lossy-expansion gadgets in high-girth regular graphs, with numeric audits."""

__version__ = "0.1.0"

from .graphs import (  # noqa: F401
    Graph,
    VertexSet,
    LayerDecomposition,
    from_edges,
    girth,
    distance_layers,
    neighborhood,
    is_biregular,
    read_edge_list,
    write_edge_list,
    INFINITE,
)
from .errors import (  # noqa: F401
    GirthplantError,
    InvalidParams,
    DomainError,
    GirthTooSmall,
    DegreeViolation,
    NonIntegral,
    SizeExceeded,
    RetryExhausted,
    ConvergenceFailure,
    PreconditionViolated,
    InfeasibleTarget,
    HostTooSmall,
    BudgetExceeded,
)
from .hosts import HostSpec, lps_graph, random_regular  # noqa: F401
from .gadget import (  # noqa: F401
    Gadget,
    Splice,
    attach_pendants,
    construct_pipeline,
    core_girth_target,
    high_girth_regular,
    matching_size_k,
    moore_vertices,
    spaced_matching,
    splice,
    subdivide,
)
from .spectral import (  # noqa: F401
    SpectrumReport,
    adjacency_spectrum,
    ihara_bass_check,
    nb_spectrum,
    nonbacktracking_matrix,
    truncate_x,
    verify_x_radius,
)
from .kahale import (  # noqa: F401
    KahaleVector,
    kahale_lemma_check,
    kahale_vector,
    layer_mass,
    verify_subsolution,
)
from .linkage import (  # noqa: F401
    EncodingBoundParams,
    LinkageQuery,
    count_linkages_bruteforce,
    count_mirror_linkages,
    encoding_bound,
    quadratic_form,
    verify_trace_bound,
)
from .expansion import (  # noqa: F401
    BoundParams,
    ExpansionReport,
    audit_small_sets,
    build_hs,
    expander_mixing_check,
    min_vertex_expansion,
    moore_bound_check,
    small_set_bound,
    vertex_expansion,
)
from .harness import (  # noqa: F401
    AuditBundle,
    ExperimentConfig,
    PRESETS,
    load_config,
    resolve_gamma,
    run_experiment,
    run_preset,
    sweep,
)
