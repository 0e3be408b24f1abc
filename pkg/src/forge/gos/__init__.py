from .instances import binary_tree, heap_tree, parse_gamma, random_instance, spider_instance
from .measures import (
    bottleneck_profile,
    embedded_graph_check,
    neighborhood_intersection_diameter,
    quasiconvexity_measure,
    realization_delta,
    vertex_embedding_distortion,
    visited_vertex_sequence,
)
from .model import GraphOfSpaces, UniformityReport, paper_constants, uniformity_constants, validate_gos
from .network import RealizationNetwork, StringPath, gos_distance, gos_geodesic, realize_network
from .oracle import string_oracle
from .spiders import build_spider_gos, link_rigidity_check, link_rigidity_order, spider_space

__all__ = [
    "binary_tree",
    "heap_tree",
    "parse_gamma",
    "random_instance",
    "spider_instance",
    "bottleneck_profile",
    "embedded_graph_check",
    "neighborhood_intersection_diameter",
    "quasiconvexity_measure",
    "realization_delta",
    "vertex_embedding_distortion",
    "visited_vertex_sequence",
    "GraphOfSpaces",
    "UniformityReport",
    "paper_constants",
    "uniformity_constants",
    "validate_gos",
    "RealizationNetwork",
    "StringPath",
    "gos_distance",
    "gos_geodesic",
    "realize_network",
    "string_oracle",
    "build_spider_gos",
    "link_rigidity_check",
    "link_rigidity_order",
    "spider_space",
]
