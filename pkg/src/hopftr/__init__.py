"""Hopf algebra on tagged graphs and topological recursion on ``x = z^2``."""

from .graphs import (
    EMPTY,
    GraphFamilyId,
    GraphSyntaxError,
    LoopValidityError,
    TaggedGraph,
    WorkLimitExceeded,
    catalan,
    contract,
    enumerate_family,
    graft,
    induced_subgraph,
    parse_graph,
    permutation_fiber,
    render_graph,
    tree_from_permutation,
)
from .hopf import (
    Combo,
    TensorCombo,
    antipode,
    coproduct,
    counit,
    lr_coproduct,
    lr_product,
    reduced_coproduct,
    star,
    verify_axioms,
)
from .laurent import LocalSeries, Poly, RatExpr, expand_local, residue_at_origin, substitute_negate
from .spectral import (
    CoeffTable,
    Correlator,
    CurveModel,
    bergmann,
    coeff_table,
    phi_eval,
    recursion_kernel,
    s_sequence,
    verify_coproduct_identity,
    vertex_omega,
    w_direct,
    w_graph_sum,
)

__all__ = [
    "antipode",
    "bergmann",
    "catalan",
    "coeff_table",
    "CoeffTable",
    "Combo",
    "contract",
    "coproduct",
    "Correlator",
    "counit",
    "CurveModel",
    "EMPTY",
    "enumerate_family",
    "expand_local",
    "graft",
    "GraphFamilyId",
    "GraphSyntaxError",
    "induced_subgraph",
    "LocalSeries",
    "LoopValidityError",
    "lr_coproduct",
    "lr_product",
    "parse_graph",
    "permutation_fiber",
    "phi_eval",
    "Poly",
    "RatExpr",
    "recursion_kernel",
    "reduced_coproduct",
    "render_graph",
    "residue_at_origin",
    "s_sequence",
    "star",
    "substitute_negate",
    "TaggedGraph",
    "TensorCombo",
    "tree_from_permutation",
    "verify_axioms",
    "verify_coproduct_identity",
    "vertex_omega",
    "w_direct",
    "w_graph_sum",
    "WorkLimitExceeded",
]
