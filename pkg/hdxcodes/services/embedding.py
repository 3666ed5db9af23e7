"""
Embedding Service

The coordinate map iota: G -> F_q^{9n} (nine matrix entries row-major, each entry's
n coefficients with t^0 first), the affine lines traced by edge stars, and
restrictions of low-degree multivariate polynomials to the triangles of a complex.
"""

import itertools
import logging
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np

from hdxcodes.services.algebra import power_table, rank_nullspace
from hdxcodes.services.coset_complex import ComplexInstance

logger = logging.getLogger(__name__)


class EmbeddingError(Exception):
    """Custom exception for embedding and line construction errors."""
    pass


# source and destination columns of t*g_src for lines of type 1, 2, 3
LINE_COLUMNS: Dict[int, Tuple[int, int]] = {1: (2, 0), 2: (0, 1), 3: (1, 2)}


def iota(g: np.ndarray) -> np.ndarray:
    """Embedded point of one ring matrix (3, 3, n) or a batch (..., 3, 3, n)."""
    g = np.asarray(g, dtype=np.int64)
    return g.reshape(*g.shape[:-3], 9 * g.shape[-1])


def slot(row: int, col: int, coeff: int, n: int) -> int:
    """Coordinate index of coefficient t^coeff of matrix entry (row, col), all 0-based."""
    return (3 * row + col) * n + coeff


@dataclass
class AffineLine:
    """point(alpha) = base + alpha * direction; triangles[alpha] is the triangle hit."""

    edge_id: int
    edge_type: int
    base: np.ndarray
    direction: np.ndarray
    triangles: np.ndarray
    q: int

    def point(self, alpha: int) -> np.ndarray:
        return (self.base + alpha * self.direction) % self.q

    def points(self) -> np.ndarray:
        alphas = np.arange(self.q)[:, None]
        return (self.base[None, :] + alphas * self.direction[None, :]) % self.q

    def export(self) -> Dict[str, Any]:
        return {
            "edge_id": self.edge_id,
            "v0": self.base.tolist(),
            "dir": self.direction.tolist(),
            "alpha_to_triangle": self.triangles.tolist(),
        }


def line_directions(x: ComplexInstance, reps: np.ndarray, types: np.ndarray) -> np.ndarray:
    """Direction vectors iota(t * g_src placed in column dst) for the given rep triangles."""
    ring = x.ring
    elems = x.triangles[reps]
    out = np.zeros_like(elems)
    for k, (src, dst) in LINE_COLUMNS.items():
        sel = types == k
        if np.any(sel):
            out[sel, :, dst, :] = ring.mul(ring.t(), elems[sel, :, src, :])
    return iota(out)


def line_of_edge(e: int, x: ComplexInstance) -> AffineLine:
    """
    The affine line traced by the star of edge e from its canonical representative.

    Raises:
        EmbeddingError: If the direction is zero or a star point is off the line
    """
    rep = x.edge_rep[e : e + 1]
    k = int(x.edge_type[e])
    direction = line_directions(x, rep, x.edge_type[e : e + 1])[0]
    if not np.any(direction):
        raise EmbeddingError(f"Edge {e} has a zero direction vector")
    line = AffineLine(e, k, iota(x.triangles[rep[0]]), direction, x.edge_star[e].copy(), x.q)
    if not np.array_equal(line.points(), iota(x.triangles[line.triangles])):
        raise EmbeddingError(f"Star of edge {e} is not the affine line of its representative")
    return line


def line_from_rep(x: ComplexInstance, tri: int, k: int) -> AffineLine:
    """Line through triangle `tri` in direction type k, parameterised from tri itself."""
    direction = line_directions(x, np.array([tri]), np.array([k]))[0]
    e = int(x.tri_edge[tri, k - 1])
    shift = int(x.tri_edge_pos[tri, k - 1])
    order = np.roll(x.edge_star[e], -shift)
    return AffineLine(e, k, iota(x.triangles[tri]), direction, order, x.q)


def verify_all_lines(x: ComplexInstance) -> Dict[str, Any]:
    """Check every edge star against its line and the independence of directions per triangle."""
    dirs = line_directions(x, x.edge_rep, x.edge_type)
    zero_dirs = int(np.sum(~dirs.any(axis=1)))
    base = iota(x.triangles[x.edge_rep])
    alphas = np.arange(x.q)
    predicted = (base[:, None, :] + alphas[None, :, None] * dirs[:, None, :]) % x.q
    actual = iota(x.triangles[x.edge_star])
    off_line = int(np.sum(np.any(predicted != actual, axis=(1, 2))))
    # directions of the three lines through a triangle sit in different column blocks
    n = x.n
    blocks = np.zeros((x.num_edges, 3), dtype=bool)
    for col in range(3):
        cols = [slot(r, col, c, n) for r in range(3) for c in range(n)]
        blocks[:, col] = dirs[:, cols].any(axis=1)
    expected_block = np.array([LINE_COLUMNS[int(k)][1] for k in x.edge_type])
    block_ok = bool(
        np.all(blocks[np.arange(x.num_edges), expected_block])
        and np.all(blocks.sum(axis=1) == 1)
    )
    return {"edges": x.num_edges, "zero_directions": zero_dirs, "off_line": off_line,
            "independent_directions": block_ok}


def star_affine_dimension(x: ComplexInstance, v: int) -> int:
    """Rank over F_q of iota(star) - iota(first star triangle)."""
    pts = iota(x.triangles[x.vertex_star[v]])
    diffs = (pts[1:] - pts[0]) % x.q
    return rank_nullspace(diffs, x.q).rank


# ---------------------------------------------------------------------------
# Multivariate polynomials
# ---------------------------------------------------------------------------


@dataclass
class MultiPoly:
    """Sparse polynomial over F_q in nvars variables: exponent tuple -> coefficient."""

    q: int
    nvars: int
    terms: Dict[Tuple[int, ...], int] = field(default_factory=dict)

    def __post_init__(self) -> None:
        clean: Dict[Tuple[int, ...], int] = {}
        for exps, coeff in self.terms.items():
            if len(exps) != self.nvars:
                raise EmbeddingError(f"Monomial {exps} does not have {self.nvars} exponents")
            if any(e < 0 or e > self.q - 1 for e in exps):
                raise EmbeddingError(f"Exponents must lie in [0, {self.q - 1}]: {exps}")
            c = int(coeff) % self.q
            if c:
                clean[tuple(exps)] = (clean.get(tuple(exps), 0) + c) % self.q
        self.terms = {k: v for k, v in clean.items() if v}

    @property
    def degree(self) -> int:
        return max((sum(e) for e in self.terms), default=0)

    @classmethod
    def constant(cls, q: int, nvars: int, value: int = 1) -> "MultiPoly":
        return cls(q, nvars, {(0,) * nvars: value})

    @classmethod
    def variable(cls, q: int, nvars: int, index: int) -> "MultiPoly":
        exps = [0] * nvars
        exps[index] = 1
        return cls(q, nvars, {tuple(exps): 1})

    def combine(self, other: "MultiPoly", a: int = 1, b: int = 1) -> "MultiPoly":
        """a * self + b * other."""
        terms: Dict[Tuple[int, ...], int] = {}
        for exps, c in self.terms.items():
            terms[exps] = (terms.get(exps, 0) + a * c) % self.q
        for exps, c in other.terms.items():
            terms[exps] = (terms.get(exps, 0) + b * c) % self.q
        return MultiPoly(self.q, self.nvars, terms)

    def evaluate(self, points: np.ndarray) -> np.ndarray:
        """Values at points (N, nvars), using x^e tables over F_q."""
        pts = np.asarray(points, dtype=np.int64) % self.q
        out = np.zeros(pts.shape[0], dtype=np.int64)
        if not self.terms:
            return out
        table = power_table(self.q, self.q - 1, self.q)
        for exps, coeff in self.terms.items():
            term = np.full(pts.shape[0], coeff, dtype=np.int64)
            for var, e in enumerate(exps):
                if e:
                    term = term * table[pts[:, var], e] % self.q
            out = (out + term) % self.q
        return out


def random_multipoly(
    q: int,
    nvars: int,
    degree: int,
    rng: np.random.Generator,
    variables: Optional[Sequence[int]] = None,
) -> MultiPoly:
    """Uniform random polynomial of total degree <= degree in the chosen variables."""
    chosen = list(range(nvars)) if variables is None else list(variables)
    terms: Dict[Tuple[int, ...], int] = {}
    for combo in itertools.chain.from_iterable(
        itertools.combinations_with_replacement(chosen, d) for d in range(degree + 1)
    ):
        exps = [0] * nvars
        for var in combo:
            exps[var] += 1
        if max(exps, default=0) <= q - 1:
            terms[tuple(exps)] = int(rng.integers(0, q))
    return MultiPoly(q, nvars, terms)


def upper_slots(n: int) -> List[int]:
    """Coordinates of the constant coefficients of entries (1,2), (1,3), (2,3)."""
    return [slot(0, 1, 0, n), slot(0, 2, 0, n), slot(1, 2, 0, n)]


def designated_rm_polys(x: ComplexInstance) -> List[MultiPoly]:
    """{1, u1, u2, u3}: the constant and the three strictly-upper coordinate slots."""
    nvars = 9 * x.n
    polys = [MultiPoly.constant(x.q, nvars)]
    polys += [MultiPoly.variable(x.q, nvars, s) for s in upper_slots(x.n)]
    return polys


def rm_restrict(poly: MultiPoly, x: ComplexInstance) -> np.ndarray:
    """Word on X(2): word[t] = poly(iota(triangle t))."""
    if poly.nvars != 9 * x.n:
        raise EmbeddingError(f"Polynomial has {poly.nvars} variables, expected {9 * x.n}")
    return poly.evaluate(iota(x.triangles))
