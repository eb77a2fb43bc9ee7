"""Homogeneous cones from T-algebras: projections, complementarity, probes."""

from .talgebra import (
    TAlgebra,
    TAlgebraSpec,
    Element,
    AxiomCheck,
    AxiomReport,
    verify_axioms,
    build_builtin,
    BUILTIN_NAMES,
)
from .cone_geometry import (
    MembershipVerdict,
    MoreauFactors,
    ProjectionError,
    SumVerdict,
    ComplementarityReport,
    factorize_K,
    factorize_Kstar,
    project,
    project_K,
    project_Kstar,
    dist_K,
    dist_Kstar,
    wedge,
    vee,
    member_sum,
    complementarity_report,
)
from .hccp_solver import (
    LinearMap,
    HccpProblem,
    Solution,
    BUILTIN_MAPS,
    builtin_map,
    natural_residual,
    residual_norm,
    solve,
    verify_solution,
)
from .oracles import (
    LcpSolution,
    MinorReport,
    lcp_enumerate,
    p_matrix_minor_test,
    lcp_zero_unique,
)
from .properties import (
    PropertyVerdict,
    AdmissiblePerturbation,
    AuditReport,
    IMPLICATION_EDGES,
    probe_monotone,
    probe_trace_P,
    probe_P,
    probe_R0,
    estimate_lipschitz,
    check_B_admissible,
    probe_square_in_sum,
    implication_audit,
)
from .error_bound import BoundReport, bound_interval, check_bound
from .instances_io import (
    FORMAT_VERSION,
    PROBLEM_CLASSES,
    Bundle,
    canonical_json,
    dump_algebra,
    load_algebra,
    dump_element,
    load_element,
    dump_problem,
    load_problem,
    dump_bundle,
    load_bundle,
    save_json,
    load_json,
    random_hermitian,
    random_cone_point,
    random_problem,
    build_corpus,
)

__version__ = "0.1.0"
