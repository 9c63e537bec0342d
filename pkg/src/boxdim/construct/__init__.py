"""Builders for touching and clique-sum extendable representations."""

from .basic import (
    apex_add,
    cocktail_party,
    corner_clique,
    is_unit_hypercube_rep,
    strong_product,
    subgraph_extend,
    unit_rep_clique,
    unit_rep_path,
)
from .extendable import (
    clique_sum,
    complete_cert,
    ktree_base_cert,
    ktree_cs_rep,
    make_cs_extendable,
    pad_dimension,
    promote_root,
    relabel,
    treewidth_rep,
)
from .pipeline import (
    CliqueSumNode,
    CliqueSumTree,
    PipelineResult,
    build_recipe,
    pipeline_clique_sums,
    pipeline_minor,
)
