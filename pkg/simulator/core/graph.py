"""
Communication graph between sensors.

Undirected weighted graph with a symmetric adjacency matrix; provides the
Laplacian, its algebraic connectivity and the neighbor sets used by the
consensus term. Sensor indices are 1-based at the API boundary and 0-based
inside numpy arrays.
"""

from dataclasses import dataclass, field
from typing import FrozenSet, Iterable, List, Sequence, Tuple

import networkx as nx
import numpy as np
from scipy import linalg

from .exceptions import ConfigurationError, DomainError, PreconditionError

# lambda2 below this value is treated as a disconnected graph
CONNECTIVITY_TOL = 1e-8


@dataclass(frozen=True)
class NetworkGraph:
    """
    Immutable undirected graph over m sensors.

    `weights[i][j] > 0` iff (i, j) is an edge; the matrix is symmetric with a
    zero diagonal. Safe to share read-only across concurrent runs.
    """

    weights: np.ndarray = field(repr=False)

    def __post_init__(self):
        w = np.array(self.weights, dtype=float)
        if w.ndim != 2 or w.shape[0] != w.shape[1] or w.shape[0] < 1:
            raise ConfigurationError("adjacency must be a non-empty square matrix", ["graph.edges"])
        if not np.all(np.isfinite(w)) or np.any(w < 0.0):
            raise ConfigurationError("edge weights must be finite and nonnegative", ["graph.edges"])
        if np.any(np.diag(w) != 0.0):
            raise ConfigurationError("self-loops are not allowed", ["graph.edges"])
        if not np.array_equal(w, w.T):
            raise ConfigurationError("adjacency must be symmetric", ["graph.edges"])
        w.setflags(write=False)
        object.__setattr__(self, "weights", w)

    # ==================== CONSTRUCTORS ====================

    @classmethod
    def from_edges(cls, m: int, edges: Iterable[Sequence[float]]) -> "NetworkGraph":
        """Build from 1-based (i, j, weight) triples; symmetry is enforced here."""
        if m < 1:
            raise ConfigurationError("graph needs at least one sensor", ["graph.m"])
        w = np.zeros((m, m))
        for idx, edge in enumerate(edges):
            if len(edge) == 2:
                i, j, a = edge[0], edge[1], 1.0
            elif len(edge) == 3:
                i, j, a = edge
            else:
                raise ConfigurationError("edge must be (i, j) or (i, j, weight)", [f"graph.edges.{idx}"])
            if not (float(i).is_integer() and float(j).is_integer()):
                raise ConfigurationError(f"edge ({i}, {j}) needs whole sensor indices", [f"graph.edges.{idx}"])
            i, j = int(i), int(j)
            if not (1 <= i <= m and 1 <= j <= m):
                raise ConfigurationError(f"edge ({i}, {j}) outside 1..{m}", [f"graph.edges.{idx}"])
            if i == j:
                raise ConfigurationError(f"self-loop on sensor {i}", [f"graph.edges.{idx}"])
            if not float(a) > 0.0:
                raise ConfigurationError(f"edge ({i}, {j}) needs positive weight", [f"graph.edges.{idx}"])
            w[i - 1, j - 1] = w[j - 1, i - 1] = float(a)
        return cls(w)

    @classmethod
    def from_networkx(cls, g: nx.Graph) -> "NetworkGraph":
        nodes = sorted(g.nodes())
        return cls(nx.to_numpy_array(g, nodelist=nodes, weight="weight"))

    @classmethod
    def cycle(cls, m: int, weight: float = 1.0) -> "NetworkGraph":
        """C_m with sensors labelled cyclically 1..m."""
        if m < 3:
            return cls.path(m, weight)
        g = nx.cycle_graph(m)
        nx.set_edge_attributes(g, weight, "weight")
        return cls.from_networkx(g)

    @classmethod
    def complete(cls, m: int, weight: float = 1.0) -> "NetworkGraph":
        g = nx.complete_graph(m)
        nx.set_edge_attributes(g, weight, "weight")
        return cls.from_networkx(g)

    @classmethod
    def path(cls, m: int, weight: float = 1.0) -> "NetworkGraph":
        g = nx.path_graph(m)
        nx.set_edge_attributes(g, weight, "weight")
        return cls.from_networkx(g)

    # ==================== PROPERTIES ====================

    @property
    def m(self) -> int:
        return int(self.weights.shape[0])

    def to_networkx(self) -> nx.Graph:
        return nx.from_numpy_array(np.array(self.weights))

    def directed_edges(self) -> List[Tuple[int, int, float]]:
        """
        Directed channels (sender, receiver, weight), 0-based, in row-major order.

        Each undirected edge yields two channels; the order fixes the column
        layout of the channel random stream.
        """
        senders, receivers = np.nonzero(self.weights)
        return [(int(s), int(r), float(self.weights[s, r])) for s, r in zip(senders, receivers)]


def _check_index(g: NetworkGraph, i: int) -> int:
    if not 1 <= int(i) <= g.m:
        raise DomainError(f"sensor index {i} outside 1..{g.m}")
    return int(i) - 1


def laplacian(g: NetworkGraph) -> np.ndarray:
    """L = D - A with D the diagonal of row sums."""
    w = np.array(g.weights)
    return np.diag(w.sum(axis=1)) - w


def laplacian_spectrum(g: NetworkGraph) -> np.ndarray:
    """All Laplacian eigenvalues in ascending order (full symmetric solver)."""
    return linalg.eigh(laplacian(g), eigvals_only=True)


def is_connected(g: NetworkGraph) -> bool:
    """Breadth-first reachability over positive-weight edges."""
    if g.m == 1:
        return True
    return nx.is_connected(g.to_networkx())


def lambda2(g: NetworkGraph) -> float:
    """Second-smallest Laplacian eigenvalue (algebraic connectivity)."""
    if g.m == 1:
        raise PreconditionError("algebraic connectivity is undefined for a single sensor")
    value = float(laplacian_spectrum(g)[1])
    if value <= CONNECTIVITY_TOL:
        raise PreconditionError(f"graph is disconnected (lambda2={value:.3e})")
    return value


def neighbors(g: NetworkGraph, i: int) -> FrozenSet[int]:
    """1-based neighbor set N_i = {j : a_ij > 0}."""
    row = g.weights[_check_index(g, i)]
    return frozenset(int(j) + 1 for j in np.flatnonzero(row > 0.0))


def degree(g: NetworkGraph, i: int) -> int:
    """d_i = |N_i|, the count used by the bit-rate normaliser."""
    return len(neighbors(g, i))


def total_degree(g: NetworkGraph) -> int:
    return int(np.count_nonzero(g.weights > 0.0))
