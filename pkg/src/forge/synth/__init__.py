from .assembly import Assembly, Built
from .blocks import DESIGNS, BlockDesign, frucht_graph, get_design
from .gadgets import Fragment, blow_up_labelled, certify_gadget, gadget_directed, gadget_undirected
from .pipeline import PipelineCertificate, PipelineError, build_rigid_graph, check_degree, verify_graph
from .regularize import (
    PendantError,
    asymmetric_pendant,
    d_regularize,
    default_pendant_orders,
    p_gadget,
    three_regularize,
)
from .small import small_group_base
from .tags import (
    GateError,
    TagSpec,
    WordReservation,
    reserve_words,
    tag_graph,
    verify_block_design,
    verify_tag_family,
)

__all__ = [
    "Assembly",
    "Built",
    "DESIGNS",
    "BlockDesign",
    "frucht_graph",
    "get_design",
    "Fragment",
    "blow_up_labelled",
    "certify_gadget",
    "gadget_directed",
    "gadget_undirected",
    "PipelineCertificate",
    "PipelineError",
    "build_rigid_graph",
    "check_degree",
    "verify_graph",
    "PendantError",
    "asymmetric_pendant",
    "d_regularize",
    "default_pendant_orders",
    "p_gadget",
    "three_regularize",
    "small_group_base",
    "GateError",
    "TagSpec",
    "WordReservation",
    "reserve_words",
    "tag_graph",
    "verify_block_design",
    "verify_tag_family",
]
