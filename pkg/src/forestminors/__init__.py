"""Minor search, exact pathwidth and packing/covering certificates for
families of graphs that contain a forest."""

from .canon import CapExceeded, canonical_form, canonical_graph
from .erdosposa import (
    ConstantOverflowError,
    DualityCertificate,
    Family,
    LemmaGuaranteeFailed,
    MainPwConstants,
    MinorOracle,
    Packing,
    Transversal,
    ep_duality,
    find_small_pw_subgraph,
    forest_transversal,
    fpt_pw_deletion,
    klogk_bound,
    klogk_transversal,
    main_pw_constants,
    minimal_pw_subgraph,
    nu_exact,
    packing_or_transversal_bounded_pw,
    reduce_and_solve,
    select_disjoint_subpaths,
    tau_exact,
    verify_certificate,
    verify_packing,
    verify_transversal,
)
from .graph import Graph, RootedGraph, Separation, delete_vertices, induced_subgraph
from .minors import (
    DeletionFolio,
    Folio,
    MinorModel,
    Reduction,
    SearchBudgetExceeded,
    deletion_folio,
    find_model,
    find_rooted_model,
    has_rooted_binary_tree_minor,
    q_folio,
    reduce_separation,
    validate_model,
)
from .pathwidth import (
    PathDecomposition,
    TSeparation,
    apex_join,
    exact_pathwidth,
    make_nice,
    marked_separation,
    pathwidth_at_most,
    refine_separation,
    validate_path_decomposition,
    validate_tseparation,
)

__version__ = "0.1.0"

__all__ = [
    "apex_join",
    "canonical_form",
    "canonical_graph",
    "CapExceeded",
    "ConstantOverflowError",
    "delete_vertices",
    "deletion_folio",
    "DeletionFolio",
    "DualityCertificate",
    "ep_duality",
    "exact_pathwidth",
    "Family",
    "find_model",
    "find_rooted_model",
    "find_small_pw_subgraph",
    "Folio",
    "forest_transversal",
    "fpt_pw_deletion",
    "Graph",
    "has_rooted_binary_tree_minor",
    "induced_subgraph",
    "klogk_bound",
    "klogk_transversal",
    "LemmaGuaranteeFailed",
    "main_pw_constants",
    "MainPwConstants",
    "make_nice",
    "marked_separation",
    "minimal_pw_subgraph",
    "MinorModel",
    "MinorOracle",
    "nu_exact",
    "Packing",
    "packing_or_transversal_bounded_pw",
    "PathDecomposition",
    "pathwidth_at_most",
    "q_folio",
    "reduce_and_solve",
    "reduce_separation",
    "Reduction",
    "refine_separation",
    "RootedGraph",
    "SearchBudgetExceeded",
    "select_disjoint_subpaths",
    "Separation",
    "tau_exact",
    "Transversal",
    "TSeparation",
    "validate_model",
    "validate_path_decomposition",
    "validate_tseparation",
    "verify_certificate",
    "verify_packing",
    "verify_transversal",
]
