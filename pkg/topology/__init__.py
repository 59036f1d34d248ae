from .adjacency import Edge, EdgeList, VertexAdjacency, edges_from_adjacency
from .fixtures import A_V4, A_V10
from .incidence import (
    EdgeTransitionMatrix,
    IncidenceMatrix,
    IncidenceSplit,
    edge_transition_matrix,
    incidence_from_edges,
    split_incidence,
)
from .io import Graph, graph_from_dict, load_graph

__all__ = [
    "A_V4",
    "A_V10",
    "Edge",
    "EdgeList",
    "EdgeTransitionMatrix",
    "Graph",
    "IncidenceMatrix",
    "IncidenceSplit",
    "VertexAdjacency",
    "edge_transition_matrix",
    "edges_from_adjacency",
    "graph_from_dict",
    "incidence_from_edges",
    "load_graph",
    "split_incidence",
]
