from .clique import CliqueGadgetFn, clique_constants, clique_xos_instance, xos_clause_value
from .hidden_set import (
    HiddenSetFn,
    cube_root,
    hidden_set_instance,
    hidden_set_objective_by_counts,
    is_successful_query,
)
from .kprover import (
    Formula3CNF5,
    KProverCoverage,
    KProverParams,
    greedy_codebook,
    kprover_coverage,
    verify_block_claims,
)
from .pseudosymmetric import pseudosymmetric_instance, random_pseudosymmetric_spec
from .submodular import (
    PlantedCover,
    anchored_coverage,
    coverage_gap_report,
    multiaction_submodular_gadget,
    multiagent_submodular_gadget,
    planted_cover_coverage,
)

__all__ = [
    "CliqueGadgetFn",
    "clique_constants",
    "clique_xos_instance",
    "xos_clause_value",
    "HiddenSetFn",
    "cube_root",
    "hidden_set_instance",
    "hidden_set_objective_by_counts",
    "is_successful_query",
    "Formula3CNF5",
    "KProverCoverage",
    "KProverParams",
    "greedy_codebook",
    "kprover_coverage",
    "verify_block_claims",
    "pseudosymmetric_instance",
    "random_pseudosymmetric_spec",
    "PlantedCover",
    "anchored_coverage",
    "coverage_gap_report",
    "multiaction_submodular_gadget",
    "multiagent_submodular_gadget",
    "planted_cover_coverage",
]
