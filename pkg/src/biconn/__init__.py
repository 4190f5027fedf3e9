"""2-node-connectivity network design: tree embeddings, incidence-graph
reductions to Steiner problems, crossing-family covering, and brute-force
oracles for all of them."""

from .graph_core import Edge, EdgeSet, Graph, Tree, generate
from .embedding import SamplerConfig, TreeEmbedding

__all__ = ["Edge", "EdgeSet", "Graph", "Tree", "generate", "SamplerConfig", "TreeEmbedding"]
__version__ = "0.1.0"
