"""
Random Walks and Spectra

Edge-to-edge Markov chains of a coset complex, built from their procedural definitions
as exact transition counts, plus the spectral report (vertex links, skeleton graph,
swap-composed walk) and sampled checks of the up/down and expander-mixing inequalities.
"""

import logging
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional

import networkx as nx
import numpy as np
import scipy.sparse as sp

from hdxcodes.config import settings
from hdxcodes.services.algebra import counter_rng, normalized_adjacency, second_eigenvalue
from hdxcodes.services.coset_complex import (
    ComplexInstance,
    expected_link_gram,
    link_graph,
    vertex_link_biadjacency,
)

logger = logging.getLogger(__name__)


@dataclass
class WalkMatrices:
    """
    Row-stochastic transition matrices on the edge index space.

    lower:   e -> v in e -> e' containing v          (down-then-up)
    up:      e -> t containing e -> e' in t          (up-then-down)
    upper:   e -> t containing e -> e' in t, e' != e (non-lazy upper walk)
    swap:    e -> t containing e -> v = t minus e -> e' containing v
    """

    lower: sp.csr_matrix
    up: sp.csr_matrix
    upper: sp.csr_matrix
    swap: sp.csr_matrix
    residuals: Dict[str, float] = field(default_factory=dict)
    sampled: bool = False

    def row_sum_error(self) -> float:
        errs = []
        for m in (self.lower, self.up, self.upper, self.swap):
            errs.append(float(np.max(np.abs(np.asarray(m.sum(axis=1)).ravel() - 1.0))))
        return max(errs)


def _transition(rows: np.ndarray, cols: np.ndarray, weight: float, size: int) -> sp.csr_matrix:
    data = np.full(rows.size, weight)
    return sp.coo_matrix((data, (rows, cols)), shape=(size, size)).tocsr()


def build_walks(x: ComplexInstance) -> WalkMatrices:
    """Transition matrices only; see walk_matrices for the identity residuals."""
    q = x.q
    n_edges = x.num_edges
    fan = x.vertex_edges.shape[1]

    # lower: each endpoint (prob 1/2), then any incident edge (prob 1/fan)
    ends = x.edge_vertices  # (E, 2)
    rows = np.repeat(np.arange(n_edges), 2 * fan)
    cols = x.vertex_edges[ends].reshape(-1)
    lower = _transition(rows, cols, 1.0 / (2 * fan), n_edges)

    # up and upper: ordered pairs of edges inside each triangle
    te = x.tri_edge
    a_idx, b_idx = np.meshgrid(np.arange(3), np.arange(3), indexing="ij")
    pairs = np.stack([a_idx.ravel(), b_idx.ravel()], axis=1)
    up = _transition(te[:, pairs[:, 0]].ravel(), te[:, pairs[:, 1]].ravel(), 1.0 / (3 * q), n_edges)
    distinct = pairs[pairs[:, 0] != pairs[:, 1]]
    upper = _transition(
        te[:, distinct[:, 0]].ravel(), te[:, distinct[:, 1]].ravel(), 1.0 / (2 * q), n_edges
    )

    # swap: edge of type k in t, opposite vertex is the type-k vertex of t
    rows_parts: List[np.ndarray] = []
    cols_parts: List[np.ndarray] = []
    for k in range(3):
        opposite = x.tri_vertex[:, k]
        rows_parts.append(np.repeat(te[:, k], fan))
        cols_parts.append(x.vertex_edges[opposite].reshape(-1))
    swap = _transition(
        np.concatenate(rows_parts), np.concatenate(cols_parts), 1.0 / (q * fan), n_edges
    )
    return WalkMatrices(lower=lower, up=up, upper=upper, swap=swap)


def walk_matrices(x: ComplexInstance, seed: int = 0) -> WalkMatrices:
    """
    Walk matrices plus the residuals of up = 2/3 upper + 1/3 I and
    upper @ lower = 1/2 swap + 1/2 lower on the edge space.

    Above settings.walk_dense_limit edges the residuals are taken over
    settings.walk_sample_vectors random basis vectors.
    """
    walks = build_walks(x)
    n_edges = x.num_edges
    ident = sp.identity(n_edges, format="csr")
    rhs1 = (2.0 / 3.0) * walks.upper + (1.0 / 3.0) * ident
    if n_edges <= settings.walk_dense_limit:
        r1 = (walks.up - rhs1).tocoo()
        r2 = (walks.upper @ walks.lower - 0.5 * (walks.swap + walks.lower)).tocoo()
        walks.residuals = {
            "up_identity": float(np.max(np.abs(r1.data))) if r1.nnz else 0.0,
            "swap_identity": float(np.max(np.abs(r2.data))) if r2.nnz else 0.0,
        }
    else:
        walks.sampled = True
        rng = counter_rng(seed, n_edges)
        cols = rng.choice(n_edges, size=min(settings.walk_sample_vectors, n_edges), replace=False)
        basis = sp.csr_matrix(
            (np.ones(cols.size), (cols, np.arange(cols.size))), shape=(n_edges, cols.size)
        )
        d1 = (walks.up @ basis - rhs1 @ basis).toarray()
        d2 = (
            walks.upper @ (walks.lower @ basis) - 0.5 * (walks.swap @ basis + walks.lower @ basis)
        ).toarray()
        walks.residuals = {
            "up_identity": float(np.max(np.abs(d1))),
            "swap_identity": float(np.max(np.abs(d2))),
        }
        logger.info(f"Walk identities sampled on {cols.size} basis vectors")
    walks.residuals["row_sum"] = walks.row_sum_error()
    return walks


@dataclass
class SpectralReport:
    link_lambda2: List[float]
    link_connected: bool
    link_bipartite: bool
    link_regular: bool
    skeleton_lambda2: float
    swap_lambda2: float
    gamma: float
    values: Dict[str, Any] = field(default_factory=dict)

    @property
    def max_link_lambda2(self) -> float:
        return max(self.link_lambda2)

    @property
    def swap_bound(self) -> float:
        return 3.0 * self.gamma

    @property
    def swap_bound_vacuous(self) -> bool:
        return self.swap_bound >= 1.0


def link_lambda2_all(x: ComplexInstance) -> np.ndarray:
    """lambda_2 of the normalized adjacency of every vertex link (batched dense eigh)."""
    q = x.q
    m = q * q
    out = np.zeros(x.num_vertices)
    for chunk in np.array_split(np.arange(x.num_vertices), max(1, x.num_vertices // 1024)):
        adj = np.zeros((chunk.size, 2 * m, 2 * m))
        for slot, v in enumerate(chunk):
            bi = vertex_link_biadjacency(x, int(v))
            adj[slot, :m, m:] = bi
            adj[slot, m:, :m] = bi.T
        # every link is q-regular, so normalisation is division by q
        out[chunk] = np.linalg.eigvalsh(adj / q)[:, -2]
    return out


def link_shape_checks(x: ComplexInstance) -> Dict[str, bool]:
    """Connectivity, bipartiteness and q-regularity of every vertex link (networkx)."""
    q = x.q
    connected = bipartite = regular = True
    for v in range(x.num_vertices):
        bi = vertex_link_biadjacency(x, v)
        if bi.shape != (q * q, q * q):
            regular = False
            continue
        g = nx.algorithms.bipartite.from_biadjacency_matrix(sp.csr_matrix(bi))
        connected &= nx.is_connected(g)
        bipartite &= nx.is_bipartite(g)
        regular &= bool(np.all(bi.sum(axis=0) == q) and np.all(bi.sum(axis=1) == q))
    return {"connected": connected, "bipartite": bipartite, "regular": regular}


def skeleton_adjacency(x: ComplexInstance) -> sp.csr_matrix:
    u, v = x.edge_vertices[:, 0], x.edge_vertices[:, 1]
    n = x.num_vertices
    adj = sp.coo_matrix((np.ones(u.size), (u, v)), shape=(n, n))
    return (adj + adj.T).tocsr()


def spectral_report(x: ComplexInstance, walks: Optional[WalkMatrices] = None) -> SpectralReport:
    """
    Link spectra (each should be 1/sqrt(q)), the skeleton graph's lambda_2 (reported
    only) and lambda_2 of the symmetrised swap walk against the 3*gamma bound.
    """
    link = link_lambda2_all(x)
    shape = link_shape_checks(x)
    skeleton = second_eigenvalue(normalized_adjacency(skeleton_adjacency(x)))
    walks = walks or build_walks(x)
    sym = ((walks.swap + walks.swap.T) * 0.5).tocsr()
    swap = second_eigenvalue(sym)
    gamma = float(link.max())
    report = SpectralReport(
        link_lambda2=[float(v) for v in link],
        link_connected=shape["connected"],
        link_bipartite=shape["bipartite"],
        link_regular=shape["regular"],
        skeleton_lambda2=skeleton.lambda2,
        swap_lambda2=swap.lambda2,
        gamma=gamma,
        values={"skeleton_method": skeleton.method, "swap_method": swap.method},
    )
    logger.info(
        f"Spectra q={x.q}: max link lambda2 {gamma:.6f}, skeleton {skeleton.lambda2:.6f}, "
        f"swap {swap.lambda2:.6f}"
    )
    return report


def updown_check(
    walks: WalkMatrices, gamma: float, trials: int, seed: int
) -> Dict[str, Any]:
    """
    <g, upper g> <= <g, (lower + gamma I) g> for random edge vectors g, and the same
    inequality normalised by |R| for random edge subsets R.
    """
    rng = counter_rng(seed, 1)
    n = walks.lower.shape[0]
    worst_vec = -np.inf
    for _ in range(trials):
        g = rng.standard_normal(n)
        lhs = g @ (walks.upper @ g)
        rhs = g @ (walks.lower @ g) + gamma * (g @ g)
        worst_vec = max(worst_vec, float(lhs - rhs))
    worst_set = -np.inf
    for _ in range(trials):
        size = int(rng.integers(1, n))
        r = np.zeros(n)
        r[rng.choice(n, size=size, replace=False)] = 1.0
        upper = r @ (walks.upper @ r) / size
        lower = r @ (walks.lower @ r) / size
        worst_set = max(worst_set, float(upper - lower - gamma))
    return {"max_vector_excess": worst_vec, "max_set_excess": worst_set}


def alon_chung_check(q: int, trials: int, seed: int) -> Dict[str, Any]:
    """
    |T| >= (delta - gamma) |V| for random vertex subsets T of the link graph, with
    delta = induced average degree / q and gamma the measured lambda_2.
    """
    link = link_graph(q)
    adj = link.adjacency()
    gamma = second_eigenvalue(normalized_adjacency(adj)).lambda2
    n_nodes = adj.shape[0]
    rng = counter_rng(seed, q, 2)
    worst = np.inf
    for _ in range(trials):
        size = int(rng.integers(1, n_nodes + 1))
        t = rng.choice(n_nodes, size=size, replace=False)
        induced = adj[np.ix_(t, t)].sum() / size
        delta = induced / q
        worst = min(worst, float(size - (delta - gamma) * n_nodes))
    return {"gamma": gamma, "min_slack": worst}


def link_structure(q: int) -> Dict[str, Any]:
    """B B^T against (J - I) (x) J + q I and lambda_2 of the parameterised link graph."""
    link = link_graph(q)
    gram = link.biadjacency @ link.biadjacency.T
    lam2 = second_eigenvalue(normalized_adjacency(link.adjacency())).lambda2
    g = link.to_networkx()
    return {
        "gram_matches": bool(np.array_equal(gram, expected_link_gram(q))),
        "lambda2": lam2,
        "expected": 1.0 / np.sqrt(q),
        "regular": bool(all(d == q for _, d in g.degree())),
        "connected": nx.is_connected(g),
        "bipartite": nx.is_bipartite(g),
        "edges": g.number_of_edges(),
    }
