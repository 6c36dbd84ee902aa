"""cumlab: cumulant-series machinery for functions of independent variables.

Finite product spaces with tabulated complex functions; worst-case and
averaged multidimensional differences; the subset-indexed decomposition
algebra with its expectation/substitution/difference operators and
conditional cumulants; certified truncation of the cumulant series of
E e^{f(X)}; Edgeworth-corrected local approximations for triangle counts;
smoothing-lemma diagnostics; and exact labelled regular-graph counts with
their log-asymptotics.
"""

from .spaces import (
    CapExceededError,
    DegenerateModelError,
    FiniteComponent,
    ModelError,
    ProductSpace,
    TabFn,
    bernoulli_component,
    builtin_product_pairs,
    builtin_sum,
    builtin_triangle_count,
    expect,
    load_model,
    model_from_dict,
    splice,
    standardized,
    tabulate,
    uniform_component,
    variance,
)
from .differences import (
    avg_difference,
    avg_difference_all,
    difference_budget,
    difference_budgets,
    interval_derivative_bound,
    sup_difference,
)
from .decompositions import (
    Decomposition,
    add,
    average_out,
    average_out_from,
    conditional_cumulant,
    conditional_cumulant_power,
    decomp_allclose,
    difference_op,
    exp_truncated,
    hoeffding,
    multiply,
    realize,
    split_restricted_free,
    substitute,
    substitute_many,
    sup_difference_norm,
    unit,
    weighted_norm,
    zero,
)
from .cumulants import (
    CumulantCertificate,
    certify,
    certify_real,
    cumulant_magnitude_bound,
    cumulant_series_approx,
    cumulants,
    cumulants_from_moments,
    delta_envelope,
    exact_exp_expectation,
    find_alpha,
    hypothesis_lhs,
    joint_cumulant,
    raw_moments,
)
from .edgeworth import (
    EdgeworthPoly,
    LambdaSeq,
    TrianglePMF,
    TriangleReport,
    correction_poly_terms,
    edgeworth_poly,
    edgeworth_series,
    graph_count_table,
    hermite_he,
    normal_density,
    normal_deriv,
    pmf_cumulants,
    triangle_mean_variance,
    triangle_pmf,
    triangle_report,
)
from .normal_approx import (
    CharFnGrid,
    CltReport,
    bernoulli_sum_cdf_distance,
    bernoulli_sum_char,
    char_fn,
    char_fn_grid,
    clt_report,
    feller_bound,
    feller_bound_from_char,
    fit_decay_envelope,
    normal_cdf,
    sup_cdf_distance,
)
from .regular_graphs import (
    CORRECTION_POLYS,
    RegularGraphApproximation,
    conjecture_gap,
    correction_poly,
    count_regular_graphs,
    count_regular_graphs_bruteforce,
    edge_factor_log_coeffs,
    hubbard_stratonovich_poly,
    hubbard_stratonovich_poly_exact,
    log_approx_by_order,
    log_bigint,
    regular_graph_asymptotic,
)
from .masks import integer_partitions, set_partitions

__version__ = "0.1.0"
