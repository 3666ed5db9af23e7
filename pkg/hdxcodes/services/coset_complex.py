"""
Coset Complex Service

Builds the 2-dimensional coset complex X[G; K1, K2, K3] for G generated by the elementary
matrices h_1(a) = e31(a t), h_2(a) = e12(a t), h_3(a) = e23(a t) over R_n = F_q[t]/<phi>.

Triangles are the group elements themselves, sorted by canonical key. Edges of type k are
the left cosets g H_k and vertices of type i the left cosets g K_i; both are found from
the permutations g -> g h_k(1) without ever materialising a coset by multiplication.
"""

import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import networkx as nx
import numpy as np
import scipy.sparse as sp
from scipy.sparse.csgraph import connected_components

from hdxcodes.config import settings
from hdxcodes.services.algebra import (
    BudgetExceededError,
    ParameterError,
    Ring,
    is_primitive,
    require_prime,
)

logger = logging.getLogger(__name__)

TYPES = (1, 2, 3)


class ComplexError(Exception):
    """Custom exception for inconsistent group arithmetic or incidence."""
    pass


def next_type(i: int) -> int:
    return i % 3 + 1


def prev_type(i: int) -> int:
    return (i + 1) % 3 + 1


# ---------------------------------------------------------------------------
# Subgroups and canonical serialisation
# ---------------------------------------------------------------------------

# (row, col) of the alpha*t entry of h_k(alpha)
H_POSITION: Dict[int, Tuple[int, int]] = {1: (2, 0), 2: (0, 1), 3: (1, 2)}


@dataclass(frozen=True)
class SubgroupKind:
    family: str  # "K" or "H"
    index: int

    def __post_init__(self) -> None:
        if self.family not in ("K", "H") or self.index not in TYPES:
            raise ParameterError(f"Unknown subgroup {self.family}{self.index}")

    @property
    def order_exponent(self) -> int:
        return 3 if self.family == "K" else 1


def h_element(ring: Ring, k: int, alpha: int) -> np.ndarray:
    """h_k(alpha): identity with alpha*t at H_POSITION[k]."""
    m = ring.identity_matrix()
    r, c = H_POSITION[k]
    m[r, c] = (alpha * ring.t()) % ring.q
    return m


def k_element(ring: Ring, i: int, a: np.ndarray, b: np.ndarray, c: np.ndarray) -> np.ndarray:
    """
    Batched K_i(a, b, c) for scalar parameter arrays of a common shape.

    K1 = [[1, at, ct^2], [0, 1, bt], [0, 0, 1]]
    K2 = [[1, 0, 0], [ct^2, 1, at], [bt, 0, 1]]
    K3 = [[1, at, 0], [0, 1, 0], [bt, ct^2, 1]]
    """
    a, b, c = (np.asarray(v, dtype=np.int64) for v in (a, b, c))
    shape = a.shape
    t = ring.t()
    t2 = ring.mul(t, t)
    m = np.broadcast_to(ring.identity_matrix(), shape + (3, 3, ring.n)).copy()
    at = (a[..., None] * t) % ring.q
    bt = (b[..., None] * t) % ring.q
    ct2 = (c[..., None] * t2) % ring.q
    if i == 1:
        m[..., 0, 1, :], m[..., 1, 2, :], m[..., 0, 2, :] = at, bt, ct2
    elif i == 2:
        m[..., 1, 2, :], m[..., 2, 0, :], m[..., 1, 0, :] = at, bt, ct2
    elif i == 3:
        m[..., 0, 1, :], m[..., 2, 0, :], m[..., 2, 1, :] = at, bt, ct2
    else:
        raise ParameterError(f"Unknown vertex type {i}")
    return m


def subgroup_elements(ring: Ring, kind: SubgroupKind) -> np.ndarray:
    q = ring.q
    if kind.family == "H":
        return np.stack([h_element(ring, kind.index, a) for a in range(q)])
    a, b, c = np.meshgrid(np.arange(q), np.arange(q), np.arange(q), indexing="ij")
    return k_element(ring, kind.index, a.ravel(), b.ravel(), c.ravel())


def key_weights(q: int, n: int) -> np.ndarray:
    """Positional weights making the integer key order equal the digit-string order."""
    if q ** (9 * n) >= 2**62:
        raise BudgetExceededError(
            f"Canonical keys for q={q}, n={n} exceed 62 bits",
            {"q": q, "n": n, "key_space": q ** (9 * n)},
        )
    return q ** np.arange(9 * n - 1, -1, -1, dtype=np.int64)


def element_keys(elements: np.ndarray, q: int) -> np.ndarray:
    """
    Integer keys of ring matrices shaped (..., 3, 3, n).

    Digits are the 9 entries row-major, each entry's n coefficients with t^0 first; the
    first digit is most significant.
    """
    n = elements.shape[-1]
    digits = elements.reshape(*elements.shape[:-3], 9 * n)
    return digits @ key_weights(q, n)


def serialize(element: np.ndarray) -> bytes:
    """Canonical byte string: one byte per base-q digit in key order."""
    return np.asarray(element, dtype=np.uint8).reshape(-1).tobytes()


def deserialize(data: bytes, n: int) -> np.ndarray:
    return np.frombuffer(data, dtype=np.uint8).astype(np.int64).reshape(3, 3, n)


def canonical_coset_rep(g: np.ndarray, kind: SubgroupKind, ring: Ring) -> np.ndarray:
    """Lexicographically smallest element of the left coset g * subgroup."""
    coset = ring.matmul(np.asarray(g, dtype=np.int64)[None], subgroup_elements(ring, kind))
    return coset[int(np.argmin(element_keys(coset, ring.q)))]


# ---------------------------------------------------------------------------
# Group generation
# ---------------------------------------------------------------------------


def sl3_order(q: int, n: int) -> int:
    big = q**n
    return (big**3 - 1) * (big**3 - big) * (big**3 - big**2) // (big - 1)


@dataclass
class GroupTable:
    """Group elements sorted by canonical key."""

    ring: Ring
    elements: np.ndarray  # (N, 3, 3, n)
    keys: np.ndarray  # (N,)
    expected_order: Optional[int] = None

    @property
    def order(self) -> int:
        return int(self.keys.size)

    def index_of(self, elements: np.ndarray) -> np.ndarray:
        """Indices of the given elements; raises ComplexError for non-members."""
        keys = element_keys(elements, self.ring.q)
        idx = np.searchsorted(self.keys, keys)
        idx = np.minimum(idx, self.keys.size - 1)
        if not np.array_equal(self.keys[idx], keys):
            raise ComplexError("Product left the group table")
        return idx


def generators(ring: Ring) -> np.ndarray:
    return np.stack([h_element(ring, k, a) for k in TYPES for a in range(1, ring.q)])


def generate_group(ring: Ring, budget: Optional[int] = None) -> GroupTable:
    """
    BFS closure of {h_k(a) : k in 1..3, a != 0} under right multiplication.

    Raises:
        BudgetExceededError: If the closure grows beyond the element budget
        ComplexError: If phi is primitive, 3 does not divide q^n - 1 and the closure
            is not all of SL3(R_n)
    """
    limit = settings.budget_group if budget is None else budget
    q = ring.q
    gens = generators(ring)
    identity = ring.identity_matrix()[None]
    visited = element_keys(identity, q)
    frontier = identity
    layers = 0
    while frontier.shape[0]:
        products = ring.matmul(frontier[:, None], gens[None]).reshape(-1, 3, 3, ring.n)
        keys, first = np.unique(element_keys(products, q), return_index=True)
        fresh = ~np.isin(keys, visited, assume_unique=True)
        frontier = products[first[fresh]]
        visited = np.union1d(visited, keys[fresh])
        layers += 1
        if visited.size > limit:
            raise BudgetExceededError(
                f"Group closure exceeded {limit} elements",
                {"q": q, "n": ring.n, "elements_so_far": int(visited.size), "budget": limit},
            )
    digits = (visited[:, None] // key_weights(q, ring.n)[None, :]) % q
    elements = digits.reshape(-1, 3, 3, ring.n)
    table = GroupTable(ring, elements, visited)
    logger.info(f"Group closure for q={q}, n={ring.n}: {table.order} elements, {layers} layers")

    big = q**ring.n
    if (big - 1) % 3 != 0 and is_primitive(ring):
        table.expected_order = sl3_order(q, ring.n)
        if table.order != table.expected_order:
            raise ComplexError(
                f"Closure has {table.order} elements, expected |SL3| = {table.expected_order}"
            )
    return table


def det_filter_keys(ring: Ring, budget: Optional[int] = None) -> np.ndarray:
    """Sorted keys of every determinant-1 matrix over R_n, by direct enumeration."""
    limit = settings.budget_enum if budget is None else budget
    q, n = ring.q, ring.n
    total = q ** (9 * n)
    if total > limit:
        raise BudgetExceededError(
            f"Enumerating {total} matrices exceeds budget {limit}",
            {"q": q, "n": n, "matrices": total, "budget": limit},
        )
    weights = key_weights(q, n)
    found: List[np.ndarray] = []
    one = ring.one()
    for start in range(0, total, 1 << 18):
        keys = np.arange(start, min(start + (1 << 18), total), dtype=np.int64)
        mats = ((keys[:, None] // weights[None, :]) % q).reshape(-1, 3, 3, n)
        found.append(keys[np.all(ring.det(mats) == one, axis=-1)])
    return np.concatenate(found)


# ---------------------------------------------------------------------------
# The complex
# ---------------------------------------------------------------------------


@dataclass
class ComplexInstance:
    """
    Indexed face tables of X[G; K1, K2, K3].

    Vertex and edge ids are global: all type-1 faces first (sorted by representative
    key), then type 2, then type 3. Type k lives at column k-1 of the per-triangle tables.
    """

    group: GroupTable
    perms: np.ndarray  # (3, N): index of g * h_k(1)
    vertex_type: np.ndarray  # (V,)
    vertex_rep: np.ndarray  # (V,) triangle index of the canonical rep
    vertex_star: np.ndarray  # (V, q^3) ordered by chart point x + q*y + q^2*z
    edge_type: np.ndarray  # (E,)
    edge_rep: np.ndarray  # (E,)
    edge_star: np.ndarray  # (E, q): rep * h_k(alpha) for alpha = 0..q-1
    edge_vertices: np.ndarray  # (E, 2) endpoint ids, lower type first
    tri_vertex: np.ndarray  # (N, 3)
    tri_edge: np.ndarray  # (N, 3)
    tri_edge_pos: np.ndarray  # (N, 3): alpha of the triangle in each edge star
    tri_star_pos: np.ndarray  # (N, 3): chart index of the triangle in each vertex star
    vertex_edges: np.ndarray = field(default_factory=lambda: np.zeros((0, 0), np.int64))

    @property
    def ring(self) -> Ring:
        return self.group.ring

    @property
    def q(self) -> int:
        return self.ring.q

    @property
    def n(self) -> int:
        return self.ring.n

    @property
    def phi(self) -> Tuple[int, ...]:
        return self.ring.phi

    @property
    def triangles(self) -> np.ndarray:
        return self.group.elements

    @property
    def num_vertices(self) -> int:
        return int(self.vertex_type.size)

    @property
    def num_edges(self) -> int:
        return int(self.edge_type.size)

    @property
    def num_triangles(self) -> int:
        return self.group.order

    def counts(self) -> Dict[str, int]:
        return {
            "vertices": self.num_vertices,
            "edges": self.num_edges,
            "triangles": self.num_triangles,
        }

    def vertices_of_type(self, i: int) -> np.ndarray:
        return np.flatnonzero(self.vertex_type == i)

    def edges_of_type(self, k: int) -> np.ndarray:
        return np.flatnonzero(self.edge_type == k)

    def edge_local_degrees(self, degrees: Sequence[int]) -> np.ndarray:
        return np.asarray(degrees, dtype=np.int64)[self.edge_type - 1]


def _orbit_tables(perm: np.ndarray, q: int) -> Tuple[np.ndarray, np.ndarray]:
    """Per element: smallest index in its cycle, and its position counted from that index."""
    powers = [np.arange(perm.size)]
    for _ in range(q - 1):
        powers.append(perm[powers[-1]])
    stacked = np.stack(powers)  # stacked[a, g] = g * h(1)^a
    if not np.array_equal(perm[stacked[-1]], powers[0]):
        raise ComplexError("Right multiplication by h_k(1) does not have order q")
    rep = stacked.min(axis=0)
    # g = rep * h(1)^pos  <=>  rep = g * h(1)^(q - pos)
    back = np.argmax(stacked == rep[None, :], axis=0)
    pos = (q - back) % q
    return rep, pos


def chart_parameters(i: int, q: int) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """K_i parameters (a, b, c) for chart points x + q*y + q^2*z in index order."""
    idx = np.arange(q**3)
    x, y, z = idx % q, (idx // q) % q, idx // (q * q)
    if i == 3:
        return y, x, z
    return x, y, z


def build_complex(ring: Ring, budget: Optional[int] = None) -> ComplexInstance:
    """
    Construct the coset complex over the given ring.

    Raises:
        ComplexError: On any incidence inconsistency (signals a group-arithmetic bug)
        BudgetExceededError: If the group closure exceeds its budget
    """
    require_prime(ring.q)
    q = ring.q
    group = generate_group(ring, budget)
    n_tri = group.order
    gens = np.stack([h_element(ring, k, 1) for k in TYPES])
    perms = np.stack([group.index_of(ring.matmul(group.elements, gens[k - 1])) for k in TYPES])

    # edges
    edge_type_parts, edge_rep_parts, edge_star_parts = [], [], []
    tri_edge = np.zeros((n_tri, 3), dtype=np.int64)
    tri_edge_pos = np.zeros((n_tri, 3), dtype=np.int64)
    offset = 0
    for k in TYPES:
        rep, pos = _orbit_tables(perms[k - 1], q)
        reps = np.unique(rep)
        if reps.size * q != n_tri:
            raise ComplexError(f"H_{k} cosets do not have size q")
        star = [reps]
        for _ in range(q - 1):
            star.append(perms[k - 1][star[-1]])
        edge_star_parts.append(np.stack(star, axis=1))
        edge_rep_parts.append(reps)
        edge_type_parts.append(np.full(reps.size, k))
        tri_edge[:, k - 1] = offset + np.searchsorted(reps, rep)
        tri_edge_pos[:, k - 1] = pos
        offset += reps.size
    edge_type = np.concatenate(edge_type_parts)
    edge_rep = np.concatenate(edge_rep_parts)
    edge_star = np.concatenate(edge_star_parts)

    # vertices: connected components of g ~ g h_j(1) for the two H_j inside K_i
    vertex_type_parts, vertex_rep_parts = [], []
    tri_vertex = np.zeros((n_tri, 3), dtype=np.int64)
    offset = 0
    base = np.arange(n_tri)
    for i in TYPES:
        j, k = next_type(i), prev_type(i)
        rows = np.concatenate([base, base])
        cols = np.concatenate([perms[j - 1], perms[k - 1]])
        graph = sp.csr_matrix((np.ones(rows.size), (rows, cols)), shape=(n_tri, n_tri))
        n_comp, labels = connected_components(graph, directed=True, connection="weak")
        sizes = np.bincount(labels, minlength=n_comp)
        if n_comp * q**3 != n_tri or np.any(sizes != q**3):
            raise ComplexError(f"K_{i} cosets do not have size q^3")
        rep_of_label = np.full(n_comp, n_tri, dtype=np.int64)
        np.minimum.at(rep_of_label, labels, base)
        reps = np.sort(rep_of_label)
        rank_of_label = np.searchsorted(reps, rep_of_label)
        tri_vertex[:, i - 1] = offset + rank_of_label[labels]
        vertex_rep_parts.append(reps)
        vertex_type_parts.append(np.full(reps.size, i))
        offset += reps.size
    vertex_type = np.concatenate(vertex_type_parts)
    vertex_rep = np.concatenate(vertex_rep_parts)

    # vertex stars through the K_i charts
    vertex_star = np.zeros((vertex_type.size, q**3), dtype=np.int64)
    for i in TYPES:
        ids = np.flatnonzero(vertex_type == i)
        kmats = k_element(ring, i, *chart_parameters(i, q))
        for chunk in np.array_split(ids, max(1, ids.size // 2048)):
            prods = ring.matmul(group.elements[vertex_rep[chunk]][:, None], kmats[None])
            vertex_star[chunk] = group.index_of(prods)
        if np.any(tri_vertex[vertex_star[ids], i - 1] != ids[:, None]):
            raise ComplexError(f"Chart of a type-{i} vertex leaves its coset")

    # incidence consistency: an edge's star shares its two vertices
    edge_vertices = np.zeros((edge_type.size, 2), dtype=np.int64)
    for k in TYPES:
        ids = np.flatnonzero(edge_type == k)
        others = [i for i in TYPES if i != k]
        for slot, i in enumerate(others):
            verts = tri_vertex[edge_star[ids], i - 1]
            if np.any(verts != verts[:, :1]):
                raise ComplexError(f"Edge of type {k} meets several type-{i} vertices")
            edge_vertices[ids, slot] = verts[:, 0]

    tri_star_pos = np.zeros((n_tri, 3), dtype=np.int64)
    chart_index = np.broadcast_to(np.arange(q**3), vertex_star.shape)
    tri_star_pos[vertex_star, (vertex_type - 1)[:, None]] = chart_index

    instance = ComplexInstance(
        group=group,
        perms=perms,
        vertex_type=vertex_type,
        vertex_rep=vertex_rep,
        vertex_star=vertex_star,
        edge_type=edge_type,
        edge_rep=edge_rep,
        edge_star=edge_star,
        edge_vertices=edge_vertices,
        tri_vertex=tri_vertex,
        tri_edge=tri_edge,
        tri_edge_pos=tri_edge_pos,
        tri_star_pos=tri_star_pos,
    )
    instance.vertex_edges = _vertex_edges(instance)
    logger.info(
        f"Built complex q={q}, n={ring.n}: {instance.num_vertices} vertices, "
        f"{instance.num_edges} edges, {instance.num_triangles} triangles"
    )
    return instance


def _vertex_edges(x: ComplexInstance) -> np.ndarray:
    """(V, 2q^2) edge ids incident to each vertex, ascending."""
    ends = x.edge_vertices.reshape(-1)
    edges = np.repeat(np.arange(x.num_edges), 2)
    order = np.lexsort((edges, ends))
    counts = np.bincount(ends, minlength=x.num_vertices)
    width = 2 * x.q**2
    if np.any(counts != width):
        raise ComplexError(f"Vertices must lie on exactly {width} edges")
    return edges[order].reshape(x.num_vertices, width)


# ---------------------------------------------------------------------------
# Links
# ---------------------------------------------------------------------------


@dataclass
class LinkGraph:
    """Bipartite graph on (*, b, c) and (alpha, *, gamma), edge iff c = alpha*b + gamma."""

    q: int
    biadjacency: np.ndarray  # (q^2, q^2); row q*b + c, column q*alpha + gamma

    def adjacency(self) -> np.ndarray:
        m = self.q * self.q
        adj = np.zeros((2 * m, 2 * m), dtype=np.int64)
        adj[:m, m:] = self.biadjacency
        adj[m:, :m] = self.biadjacency.T
        return adj

    def to_networkx(self) -> nx.Graph:
        g = nx.Graph()
        m = self.q * self.q
        g.add_nodes_from(range(m), bipartite=0)
        g.add_nodes_from(range(m, 2 * m), bipartite=1)
        rows, cols = np.nonzero(self.biadjacency)
        g.add_edges_from(zip(rows.tolist(), (cols + m).tolist()))
        return g


def link_graph(q: int) -> LinkGraph:
    """The vertex link graph built from its parameterisation, without the group."""
    require_prime(q)
    b, c, alpha, gamma = np.meshgrid(*(np.arange(q),) * 4, indexing="ij")
    hit = (c == (alpha * b + gamma) % q).astype(np.int64)
    # hit[b, c, alpha, gamma] -> row q*b + c, column q*alpha + gamma
    bi = hit.reshape(q * q, q * q)
    return LinkGraph(q, bi)


def expected_link_gram(q: int) -> np.ndarray:
    """(J - I) (x) J + q I (x) I."""
    j = np.ones((q, q), dtype=np.int64)
    i = np.eye(q, dtype=np.int64)
    return np.kron(j - i, j) + q * np.kron(i, i)


def vertex_link_biadjacency(x: ComplexInstance, v: int) -> np.ndarray:
    """Biadjacency of the link of v: neighbours of the next type against the previous type."""
    i = int(x.vertex_type[v])
    star = x.vertex_star[v]
    left = x.tri_vertex[star, next_type(i) - 1]
    right = x.tri_vertex[star, prev_type(i) - 1]
    lu, li = np.unique(left, return_inverse=True)
    ru, ri = np.unique(right, return_inverse=True)
    bi = np.zeros((lu.size, ru.size), dtype=np.int64)
    np.add.at(bi, (li, ri), 1)
    return bi
