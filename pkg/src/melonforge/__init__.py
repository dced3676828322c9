"""melonforge: rooted colored graphs of fixed degree.

Classification (melon reduction, chains, schemes), exact enumeration
(brute-force oracle and generating functions), and the asymptotic /
double-scaling analysis of (D+1)-colored regular graphs.
"""

from .graphs import (
    ColoredGraph,
    FaceProfile,
    PreGraph,
    canonical_encoding,
    canonical_form,
    close,
    degree,
    degree_via_jackets,
    delta_graph,
    face_profile,
    open_root,
    validate,
)
from .reduction import (
    CoreDecomposition,
    MelonOccurrence,
    core,
    cut_set,
    find_melons,
    insert_melon,
    is_melon_free,
    is_melonic,
    reduce_to_core_graph,
    remove_melon,
    substitute,
)
from .chains import (
    Chain,
    ChainKind,
    Dipole,
    Scheme,
    SchemeBuilder,
    canonical_scheme_encoding,
    classify_chain,
    find_dipoles,
    find_maximal_proper_chains,
    realize,
    scheme_degree,
    scheme_of,
    scheme_signature,
)
from .removal import (
    RemovalReport,
    audit_dipole_removal,
    iterative_reduction_stats,
    remove_chain_vertex,
    remove_dipole,
)
from .series import (
    PowerSeries,
    RationalFunctionU,
    assemble_degree_series,
    chain_gf,
    closed_form_first_degree,
    fuss_catalan,
    melonic_series,
    scheme_gf,
    u_series,
)
from .enumeration import (
    DegreeCountTable,
    SchemeCatalog,
    count_rooted,
    enumerate_melon_free,
    enumerate_rooted,
    scheme_catalog,
    size_bounds,
)
from .asymptotics import (
    LPResult,
    SingularData,
    beta,
    case_a_contribution,
    dominant_scheme_family,
    double_scaling,
    shifted_critical,
    singular_data,
)

__version__ = "0.1.0"
