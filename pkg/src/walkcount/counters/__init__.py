from .counter import Counter
from .grover import GroverCounter
from .bipartite import BipartiteCounter

__all__ = [
    "Counter",
    "GroverCounter",
    "BipartiteCounter",
]
