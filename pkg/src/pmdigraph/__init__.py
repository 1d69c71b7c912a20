"""Perfect matchings in the two-round random bipartite digraph B_{n,m}.

The package has two halves. The simulation half (:mod:`~pmdigraph.model`,
:mod:`~pmdigraph.matching`) draws graphs and checks Hall's condition
directly. The analytic half (:mod:`~pmdigraph.certificate`,
:mod:`~pmdigraph.optimizer`, :mod:`~pmdigraph.moments`) evaluates the
first-moment bounds and minimizes the certificate exponent ``H_{n,m}(t; r)``
over ``r = (x, y, z, u)``.
"""

__version__ = "0.1.0"

from .model import INF, ModelParams, BipartiteDigraph, generate, one_round_graph, expected_out_degree
from .matching import MatchingResult, HallWitness, max_matching, hall_witness, components

__all__ = [
    "__version__",
    "INF",
    "ModelParams",
    "BipartiteDigraph",
    "generate",
    "one_round_graph",
    "expected_out_degree",
    "MatchingResult",
    "HallWitness",
    "max_matching",
    "hall_witness",
    "components",
]
