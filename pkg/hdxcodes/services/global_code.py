"""
Global Code Service

The Tanner code C_{n,d1,d2,d3} on the triangles of a coset complex: a word lies in the
code iff its restriction to every edge star of type k, read in alpha order, is a
Reed-Solomon codeword of degree d_k.

Also provides the vertex tester, local view ensembles and the greedy local correction
algorithm that repeatedly replaces one vertex view by the local codeword minimizing its
disagreements with the neighbouring views.
"""

import logging
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np
import scipy.sparse as sp

from hdxcodes.config import settings
from hdxcodes.services.algebra import (
    BudgetExceededError,
    ParameterError,
    ShapeError,
    counter_rng,
    rank_nullspace,
)
from hdxcodes.services.coset_complex import TYPES, ComplexInstance, next_type, prev_type
from hdxcodes.services.embedding import random_multipoly, rm_restrict
from hdxcodes.services.local_code import (
    LocalCodeSpec,
    RSSpec,
    build_local_code,
    local_agreement_parameters,
    rs_parity_rows,
    rs_window_checks,
    univariate_degree,
)

logger = logging.getLogger(__name__)


class GlobalCodeError(Exception):
    """Custom exception for global code errors."""
    pass


@lru_cache(maxsize=32)
def _local_code(q: int, d_x: int, d_y: int) -> LocalCodeSpec:
    return build_local_code(q, d_x, d_y)


@dataclass
class GlobalCodeSpec:
    """Parity-check description of the Tanner code on X(2)."""

    complex: ComplexInstance
    degrees: Tuple[int, int, int]
    dense: sp.csr_matrix
    sparse: sp.csr_matrix
    dense_rows_per_edge: Tuple[int, int, int]
    generator: Optional[np.ndarray] = None
    dim: Optional[int] = None
    sparse_spans_dense: bool = False

    @property
    def q(self) -> int:
        return self.complex.q

    @property
    def length(self) -> int:
        return self.complex.num_triangles

    def local_degrees(self, vertex_type: int) -> Tuple[int, int]:
        """(dx, dy) of C_v for a vertex of the given type: (d_{i+1}, d_{i-1})."""
        return self.degrees[next_type(vertex_type) - 1], self.degrees[prev_type(vertex_type) - 1]

    def local_code(self, vertex_type: int) -> LocalCodeSpec:
        return _local_code(self.q, *self.local_degrees(vertex_type))


def _edge_rows(
    x: ComplexInstance, checks_by_type: Dict[int, np.ndarray]
) -> sp.csr_matrix:
    """Map per-type RS checks through every edge's alpha-ordered star."""
    rows, cols, vals = [], [], []
    offset = 0
    for k in TYPES:
        checks = checks_by_type[k]
        edges = x.edges_of_type(k)
        r = checks.shape[0]
        if r == 0 or edges.size == 0:
            continue
        star = x.edge_star[edges]  # (m, q)
        row_ids = offset + np.arange(edges.size * r).reshape(edges.size, r)
        rows.append(np.broadcast_to(row_ids[:, :, None], (edges.size, r, x.q)).reshape(-1))
        cols.append(np.broadcast_to(star[:, None, :], (edges.size, r, x.q)).reshape(-1))
        vals.append(np.broadcast_to(checks[None, :, :], (edges.size, r, x.q)).reshape(-1))
        offset += edges.size * r
    if not rows:
        return sp.csr_matrix((0, x.num_triangles), dtype=np.int64)
    data = np.concatenate(vals)
    keep = data != 0
    return sp.csr_matrix(
        (data[keep], (np.concatenate(rows)[keep], np.concatenate(cols)[keep])),
        shape=(offset, x.num_triangles),
        dtype=np.int64,
    )


def assemble_code(x: ComplexInstance, degrees: Sequence[int]) -> GlobalCodeSpec:
    """
    Dense monomial and sparse weight-(d+2) parity rows for every edge.

    Raises:
        ParameterError: If some d_i is outside [0, q)
    """
    degs = tuple(int(d) for d in degrees)
    if len(degs) != 3:
        raise ParameterError(f"Expected three degrees, got {degs}")
    for d in degs:
        RSSpec(x.q, d)
    dense_checks = {k: rs_parity_rows(x.q, degs[k - 1]) for k in TYPES}
    sparse_checks = {k: rs_window_checks(x.q, degs[k - 1]) for k in TYPES}

    spans = True
    for k in TYPES:
        d_rows, s_rows = dense_checks[k], sparse_checks[k]
        stacked = np.vstack([d_rows, s_rows]) if d_rows.size else s_rows
        rank_d = rank_nullspace(d_rows, x.q).rank if d_rows.size else 0
        rank_s = rank_nullspace(s_rows, x.q).rank if s_rows.size else 0
        rank_all = rank_nullspace(stacked, x.q).rank if stacked.size else 0
        spans &= rank_d == rank_s == rank_all

    code = GlobalCodeSpec(
        complex=x,
        degrees=degs,  # type: ignore[arg-type]
        dense=_edge_rows(x, dense_checks),
        sparse=_edge_rows(x, sparse_checks),
        dense_rows_per_edge=tuple(dense_checks[k].shape[0] for k in TYPES),  # type: ignore[arg-type]
        sparse_spans_dense=spans,
    )
    if not spans:
        raise GlobalCodeError("Sparse window checks do not span the RS dual")
    logger.info(
        f"Assembled C_{degs} on q={x.q}: {code.dense.shape[0]} dense rows, "
        f"{code.sparse.shape[0]} sparse rows, length {code.length}"
    )
    return code


# ---------------------------------------------------------------------------
# Membership, dimension, symmetries
# ---------------------------------------------------------------------------


def _check_length(w: np.ndarray, code: GlobalCodeSpec) -> np.ndarray:
    w = np.asarray(w, dtype=np.int64)
    if w.shape != (code.length,):
        raise ShapeError(f"Word has length {w.shape}, expected {code.length}")
    return w % code.q


@dataclass
class MembershipResult:
    member: bool
    failing_edges: List[int]


def membership(w: np.ndarray, code: GlobalCodeSpec) -> MembershipResult:
    """Edge-star RS membership with the list of failing edges."""
    w = _check_length(w, code)
    x = code.complex
    failing = np.zeros(x.num_edges, dtype=bool)
    for k in TYPES:
        checks = rs_parity_rows(x.q, code.degrees[k - 1])
        if checks.shape[0] == 0:
            continue
        edges = x.edges_of_type(k)
        synd = (w[x.edge_star[edges]] @ checks.T) % x.q
        failing[edges] = synd.any(axis=1)
    bad = np.flatnonzero(failing)
    return MembershipResult(bad.size == 0, bad.tolist())


def line_membership(w: np.ndarray, code: GlobalCodeSpec) -> bool:
    """f o l has degree <= d_k along the embedded line of every type-k edge."""
    w = _check_length(w, code)
    x = code.complex
    degs = univariate_degree(w[x.edge_star], x.q)
    return bool(np.all(degs <= np.asarray(code.degrees)[x.edge_type - 1]))


@dataclass
class DimensionResult:
    value: int
    exact: bool
    rank: Optional[int] = None
    rows: int = 0
    budget_flag: bool = False


def dimension(code: GlobalCodeSpec, budget: Optional[int] = None) -> DimensionResult:
    """
    |X(2)| - rank(dense rows), storing the nullspace as generator basis.

    Above the elimination budget only the constraint-count lower bound is returned.
    """
    limit = settings.budget_rank if budget is None else budget
    n_rows = code.dense.shape[0]
    if n_rows == 0:
        code.dim = code.length
        return DimensionResult(code.length, True, 0, 0)
    if code.length > limit:
        bound = code.length - n_rows
        logger.warning(f"|X(2)| = {code.length} over elimination budget {limit}; lower bound only")
        return DimensionResult(max(bound, 0), False, None, n_rows, True)
    res = rank_nullspace(code.dense, code.q)
    code.generator = res.nullspace
    code.dim = code.length - res.rank
    logger.info(f"Exact dimension {code.dim} (rank {res.rank} of {n_rows} rows)")
    return DimensionResult(code.dim, True, res.rank, n_rows)


def left_translation(x: ComplexInstance, g_index: int) -> np.ndarray:
    """Permutation t -> index of g * t."""
    g = x.triangles[g_index]
    return x.group.index_of(x.ring.matmul(g[None], x.triangles))


def inverse_index(x: ComplexInstance, g_index: int) -> int:
    return int(x.group.index_of(x.ring.adjugate(x.triangles[g_index])[None])[0])


def translate(w: np.ndarray, g_index: int, code: GlobalCodeSpec) -> np.ndarray:
    """(translate w)[t] = w[g * t]."""
    w = _check_length(w, code)
    return w[left_translation(code.complex, g_index)]


def multiply(w1: np.ndarray, w2: np.ndarray, q: int) -> np.ndarray:
    """Coordinatewise product."""
    a, b = np.asarray(w1, dtype=np.int64), np.asarray(w2, dtype=np.int64)
    if a.shape != b.shape:
        raise ShapeError(f"Words of shapes {a.shape} and {b.shape}")
    return (a * b) % q


def translation_orbit_reaches(x: ComplexInstance, targets: Sequence[int], seed: int) -> bool:
    """Left translations act transitively: g = target * start^{-1} sends start to target."""
    rng = counter_rng(seed, 7)
    start = int(rng.integers(0, x.num_triangles))
    inv_start = x.ring.adjugate(x.triangles[start])
    for t in targets:
        g = x.ring.matmul(x.triangles[t], inv_start)
        moved = x.ring.matmul(g, x.triangles[start])
        if int(x.group.index_of(moved[None])[0]) != t:
            return False
    return True


# ---------------------------------------------------------------------------
# Vertex charts and testers
# ---------------------------------------------------------------------------


@dataclass
class VertexChart:
    """Triangles of star(v) listed in chart order x + q*y + q^2*z, and the local code."""

    vertex: int
    vertex_type: int
    triangles: np.ndarray
    local: LocalCodeSpec

    def pullback(self, w: np.ndarray) -> np.ndarray:
        return np.asarray(w)[self.triangles]

    def pushforward(self, local_word: np.ndarray, length: int) -> np.ndarray:
        out = np.zeros(length, dtype=np.int64)
        out[self.triangles] = local_word
        return out


def vertex_chart(v: int, code: GlobalCodeSpec) -> VertexChart:
    i = int(code.complex.vertex_type[v])
    return VertexChart(v, i, code.complex.vertex_star[v], code.local_code(i))


def local_pullback_failures(code: GlobalCodeSpec, vertices: Optional[Sequence[int]] = None) -> int:
    """
    Count (vertex, basis vector) pairs whose chart pullback fails a check of an edge at v.

    Only edges through v see a whole star inside star(v), so those are the ones checked.
    """
    x = code.complex
    _, mine, _ = _incidence_tables(x)
    ids = range(x.num_vertices) if vertices is None else vertices
    dense = {k: rs_parity_rows(x.q, code.degrees[k - 1]) for k in TYPES}
    failures = 0
    for v in ids:
        basis = code.local_code(int(x.vertex_type[v])).basis_eval
        edges = x.vertex_edges[v]
        restricted = basis[:, mine[v]]  # (dim, F, q)
        bad = np.zeros(basis.shape[0], dtype=bool)
        for k in TYPES:
            sel = x.edge_type[edges] == k
            if dense[k].shape[0] == 0 or not np.any(sel):
                continue
            synd = np.einsum("bfa,ja->bfj", restricted[:, sel], dense[k]) % x.q
            bad |= synd.reshape(basis.shape[0], -1).any(axis=1)
        failures += int(bad.sum())
    return failures


def local_words(w: np.ndarray, code: GlobalCodeSpec) -> np.ndarray:
    """(V, q^3) pullbacks of w through every vertex chart."""
    return np.asarray(w, dtype=np.int64)[code.complex.vertex_star] % code.q


def local_acceptance(w: np.ndarray, code: GlobalCodeSpec) -> np.ndarray:
    """Per vertex: does w restricted to star(v) lie in C_v."""
    w = _check_length(w, code)
    x = code.complex
    views = local_words(w, code)
    ok = np.zeros(x.num_vertices, dtype=bool)
    for i in TYPES:
        ids = x.vertices_of_type(i)
        ok[ids] = code.local_code(i).syndrome_ok(views[ids])
    return ok


def vertex_tester(w: np.ndarray, code: GlobalCodeSpec) -> float:
    """Fraction of vertices v with w|star(v) outside C_v."""
    return float(1.0 - local_acceptance(w, code).mean())


# ---------------------------------------------------------------------------
# Local views and local correction
# ---------------------------------------------------------------------------


@dataclass
class LocalViewEnsemble:
    """One local word per vertex in chart order; bottom views are the zero codeword."""

    views: np.ndarray  # (V, q^3)
    bottom: np.ndarray  # (V,) bool

    def copy(self) -> "LocalViewEnsemble":
        return LocalViewEnsemble(self.views.copy(), self.bottom.copy())


def _edge_view_pairs(x: ComplexInstance) -> Tuple[np.ndarray, np.ndarray]:
    """Chart positions of each edge star inside its two endpoint stars, (E, q) each."""
    star = x.edge_star
    slots = []
    for s in range(2):
        vtype = x.vertex_type[x.edge_vertices[:, s]]
        slots.append(x.tri_star_pos[star, (vtype - 1)[:, None]])
    return slots[0], slots[1]


def disagreeing_edges(z: LocalViewEnsemble, x: ComplexInstance) -> np.ndarray:
    """Boolean per edge uv: do z_u and z_v differ on star(uv)."""
    pos_u, pos_v = _edge_view_pairs(x)
    u, v = x.edge_vertices[:, 0], x.edge_vertices[:, 1]
    zu = np.take_along_axis(z.views[u], pos_u, axis=1)
    zv = np.take_along_axis(z.views[v], pos_v, axis=1)
    return np.any(zu != zv, axis=1)


def disagreement(z: LocalViewEnsemble, x: ComplexInstance) -> float:
    """alpha(z): fraction of edges whose endpoint views disagree."""
    return float(disagreeing_edges(z, x).mean())


def _nearest_all(views: np.ndarray, spec: LocalCodeSpec, budget: Optional[int]) -> np.ndarray:
    """Nearest codeword to each row, lexicographic tie-break, by full enumeration."""
    best_dist = np.full(views.shape[0], np.iinfo(np.int64).max)
    best = np.zeros_like(views)
    for _, words in spec.enumerate_codewords(budget, chunk=8192):
        dist = (views[:, None, :] != words[None, :, :]).sum(axis=2)
        k = dist.argmin(axis=1)
        d = dist[np.arange(views.shape[0]), k]
        better = d < best_dist
        best_dist[better] = d[better]
        best[better] = words[k[better]]
    return best


def views_from_word(
    w: np.ndarray, code: GlobalCodeSpec, mode: str = "restrict", budget: Optional[int] = None
) -> LocalViewEnsemble:
    """
    Local views of a word.

    mode "restrict": z_v = w|star(v) when it lies in C_v, else bottom (zero codeword).
    mode "nearest": z_v = the nearest C_v codeword by exhaustive enumeration.

    Raises:
        BudgetExceededError: In nearest mode when q^dim(C_v) exceeds the budget
    """
    w = _check_length(w, code)
    x = code.complex
    raw = local_words(w, code)
    if mode == "restrict":
        ok = local_acceptance(w, code)
        views = np.where(ok[:, None], raw, 0)
        return LocalViewEnsemble(views, ~ok)
    if mode != "nearest":
        raise ParameterError(f"Unknown view mode: {mode}")
    views = np.zeros_like(raw)
    for i in TYPES:
        ids = x.vertices_of_type(i)
        views[ids] = _nearest_all(raw[ids], code.local_code(i), budget)
    return LocalViewEnsemble(views, np.zeros(x.num_vertices, dtype=bool))


@dataclass
class CorrectionStep:
    vertex: int
    old_count: int
    new_count: int


@dataclass
class CorrectionTrace:
    steps: List[CorrectionStep] = field(default_factory=list)
    sweeps: int = 0
    initial_alpha: float = 0.0
    final_alpha: float = 0.0
    initial_disagreeing: int = 0
    outcome: str = "stalled"
    changed_vertex_fraction: float = 0.0
    proximity_bound: float = 0.0

    @property
    def monotone(self) -> bool:
        return all(s.new_count < s.old_count for s in self.steps)

    @property
    def within_step_bound(self) -> bool:
        return len(self.steps) <= self.initial_disagreeing


@dataclass
class CorrectionResult:
    views: LocalViewEnsemble
    codeword: Optional[np.ndarray]
    trace: CorrectionTrace


def _incidence_tables(x: ComplexInstance) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """
    For each vertex v and each incident edge: the other endpoint, the chart positions of
    the edge star inside v, and inside the other endpoint. Shapes (V, 2q^2[, q]).
    """
    pos_a, pos_b = _edge_view_pairs(x)
    ve = x.vertex_edges  # (V, F)
    ends = x.edge_vertices[ve]  # (V, F, 2)
    me = np.arange(x.num_vertices)[:, None]
    first = ends[:, :, 0] == me
    other = np.where(first, ends[:, :, 1], ends[:, :, 0])
    mine = np.where(first[:, :, None], pos_a[ve], pos_b[ve])
    theirs = np.where(first[:, :, None], pos_b[ve], pos_a[ve])
    return other, mine, theirs


def local_correction(
    z: LocalViewEnsemble,
    code: GlobalCodeSpec,
    budget: Optional[int] = None,
    max_sweeps: Optional[int] = None,
) -> CorrectionResult:
    """
    Greedy local correction.

    Sweeps vertices in id order; at each vertex the view is replaced by the C_v codeword
    with the fewest disagreeing incident edges, when that strictly improves the count
    (ties: smallest coefficient vector). Stops after a sweep without changes.
    """
    x = code.complex
    start = z.copy()
    z = z.copy()
    codebooks = {i: code.local_code(i).all_codewords(budget)[1] for i in TYPES}
    other, mine, theirs = _incidence_tables(x)

    bad = disagreeing_edges(z, x)
    trace = CorrectionTrace(
        initial_alpha=float(bad.mean()), initial_disagreeing=int(bad.sum())
    )
    count = int(bad.sum())
    limit = max_sweeps if max_sweeps is not None else count + 1
    changed = True
    while changed and trace.sweeps < limit:
        changed = False
        trace.sweeps += 1
        for v in range(x.num_vertices):
            nb = z.views[other[v][:, None], theirs[v]]  # (F, q)
            current = int(np.any(z.views[v][mine[v]] != nb, axis=1).sum())
            if current == 0:
                continue
            book = codebooks[int(x.vertex_type[v])]
            scores = np.any(book[:, mine[v]] != nb[None], axis=2).sum(axis=1)
            k = int(np.argmin(scores))
            if scores[k] < current:
                z.views[v] = book[k]
                z.bottom[v] = False
                new_count = count - current + int(scores[k])
                trace.steps.append(CorrectionStep(v, count, new_count))
                count = new_count
                changed = True
    trace.final_alpha = count / x.num_edges

    codeword: Optional[np.ndarray] = None
    if count == 0:
        owner = x.tri_vertex.min(axis=1)
        owner_type = x.vertex_type[owner]
        pos = x.tri_star_pos[np.arange(x.num_triangles), owner_type - 1]
        codeword = z.views[owner, pos]
        if not membership(codeword, code).member:
            raise GlobalCodeError("Extracted word fails the edge checks")
        trace.outcome = "codeword"
    ratio = x.num_edges / x.num_vertices
    trace.changed_vertex_fraction = float(np.any(z.views != start.views, axis=1).mean())
    trace.proximity_bound = ratio * trace.initial_alpha
    logger.info(
        f"Local correction: {len(trace.steps)} steps over {trace.sweeps} sweeps, "
        f"alpha {trace.initial_alpha:.5f} -> {trace.final_alpha:.5f} ({trace.outcome})"
    )
    return CorrectionResult(z, codeword, trace)


def global_agreement_parameters(
    delta: float, gamma: float, eps0: Optional[float], degree_ratio: float
) -> Dict[str, Any]:
    """
    Local-to-global agreement parameters for local codes with (eps0, rho0(a) = 4 a^(1/3)).

    eps = delta^2/128 * min(eps0, rho0^{-1}(delta/4)); needs gamma < min(delta/8, eps);
    rho(t) = D * t with D = |X(1)| / |X(0)|.
    """
    if eps0 is None:
        return {"eps": None, "hypothesis": False, "vacuous": True, "D": degree_ratio}
    rho_inv = (delta / 16.0) ** 3
    eps = delta**2 / 128.0 * min(eps0, rho_inv)
    hypothesis = gamma < min(delta / 8.0, eps)
    return {"eps": eps, "hypothesis": hypothesis, "vacuous": not hypothesis, "D": degree_ratio}


def agreement_parameters_for(code: GlobalCodeSpec, gamma: float) -> Dict[str, Any]:
    x = code.complex
    d = max(code.degrees)
    delta = RSSpec(code.q, d).relative_distance
    eps0s = [local_agreement_parameters(code.q, *code.local_degrees(i))[0] for i in TYPES]
    eps0 = None if any(e is None for e in eps0s) else min(eps0s)  # type: ignore[type-var]
    return global_agreement_parameters(delta, gamma, eps0, x.num_edges / x.num_vertices)


def random_codeword(code: GlobalCodeSpec, rng: np.random.Generator) -> np.ndarray:
    """
    Random member: a uniform combination of the generator basis when one is stored,
    otherwise the restriction of a random polynomial of degree min(d_i).
    """
    if code.generator is not None and code.generator.shape[0]:
        coeffs = rng.integers(0, code.q, size=code.generator.shape[0])
        return (coeffs @ code.generator) % code.q
    x = code.complex
    poly = random_multipoly(x.q, 9 * x.n, min(code.degrees), rng)
    return rm_restrict(poly, x)


def corrupt(w: np.ndarray, count: int, seed: int, q: int) -> np.ndarray:
    """Change `count` distinct seeded positions to a uniformly random different symbol."""
    w = np.asarray(w, dtype=np.int64) % q
    if not 0 <= count <= w.size:
        raise ParameterError(f"Cannot corrupt {count} of {w.size} positions")
    rng = counter_rng(seed, 11, count)
    pos = rng.choice(w.size, size=count, replace=False)
    out = w.copy()
    out[pos] = (out[pos] + rng.integers(1, q, size=count)) % q
    return out


# ---------------------------------------------------------------------------
# Distance probes and two-query views
# ---------------------------------------------------------------------------


@dataclass
class MinWeightResult:
    weight: int
    exact: bool
    method: str
    witness: Optional[np.ndarray]
    distance_bound: float
    bound_vacuous: bool


def min_weight_probe(
    code: GlobalCodeSpec, gamma: float, budget: int, seed: int
) -> MinWeightResult:
    """
    Exact minimum weight when q^dim <= settings.budget_min_weight, otherwise the best over
    all generators and `budget` random nonzero combinations (an upper bound).
    """
    q = code.q
    d = max(code.degrees)
    delta = (q - d) / q
    bound = (delta - 2 * gamma) * (delta - gamma) * delta
    vacuous = bound <= 0

    if code.dense.shape[0] == 0:
        witness = np.zeros(code.length, dtype=np.int64)
        witness[0] = 1
        return MinWeightResult(1, True, "full-space", witness, bound, vacuous)
    if code.generator is None:
        dimension(code)
    if code.generator is None:
        raise BudgetExceededError(
            "Generator basis unavailable above the elimination budget",
            {"length": code.length, "budget_rank": settings.budget_rank},
        )
    gen = code.generator
    k = gen.shape[0]
    if k == 0:
        return MinWeightResult(0, True, "zero-code", None, bound, vacuous)

    best_w: Optional[np.ndarray] = None
    best = code.length + 1
    if q**k <= settings.budget_min_weight:
        weights = q ** np.arange(k - 1, -1, -1, dtype=np.int64)
        for start in range(1, q**k, 4096):
            idx = np.arange(start, min(start + 4096, q**k), dtype=np.int64)
            coeffs = (idx[:, None] // weights[None, :]) % q
            words = (coeffs @ gen) % q
            wt = np.count_nonzero(words, axis=1)
            j = int(wt.argmin())
            if wt[j] < best:
                best, best_w = int(wt[j]), words[j]
        method, exact = "enumeration", True
    else:
        rng = counter_rng(seed, 13)
        cands = [gen]
        for start in range(0, budget, 1024):
            coeffs = rng.integers(0, q, size=(min(1024, budget - start), k))
            coeffs[~coeffs.any(axis=1), 0] = 1
            cands.append((coeffs @ gen) % q)
        for words in cands:
            wt = np.count_nonzero(words, axis=1)
            j = int(wt.argmin())
            if 0 < wt[j] < best:
                best, best_w = int(wt[j]), words[j]
        method, exact = "sampling", False
    if best_w is None or not np.any(best_w) or not membership(best_w, code).member:
        raise GlobalCodeError("Minimum-weight witness is not a nonzero codeword")
    return MinWeightResult(best, exact, method, best_w, bound, vacuous)


@dataclass
class TwoQueryViews:
    """Per-vertex symbols (chart coefficient vectors), None for the non-code symbol."""

    code: GlobalCodeSpec
    symbols: List[Optional[np.ndarray]]

    def decoded(self, v: int) -> Optional[np.ndarray]:
        sym = self.symbols[v]
        if sym is None:
            return None
        i = int(self.code.complex.vertex_type[v])
        return self.code.local_code(i).encode(sym)

    def test_edge(self, e: int) -> bool:
        """Accept iff both endpoints decode and agree on star(e)."""
        x = self.code.complex
        u, v = (int(a) for a in x.edge_vertices[e])
        wu, wv = self.decoded(u), self.decoded(v)
        if wu is None or wv is None:
            return False
        star = x.edge_star[e]
        pu = x.tri_star_pos[star, x.vertex_type[u] - 1]
        pv = x.tri_star_pos[star, x.vertex_type[v] - 1]
        return bool(np.array_equal(wu[pu], wv[pv]))

    def rejection_fraction(self) -> float:
        x = self.code.complex
        return float(np.mean([not self.test_edge(e) for e in range(x.num_edges)]))


def two_query_views(w: np.ndarray, code: GlobalCodeSpec) -> TwoQueryViews:
    w = _check_length(w, code)
    x = code.complex
    views = local_words(w, code)
    symbols: List[Optional[np.ndarray]] = []
    for v in range(x.num_vertices):
        spec = code.local_code(int(x.vertex_type[v]))
        symbols.append(spec.coefficients_of(views[v]))
    return TwoQueryViews(code, symbols)
