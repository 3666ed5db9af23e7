"""
Local Code Service

Reed-Solomon component codes over a full prime field and the vertex-local code
C_{dx,dy} of functions on F_p^3 whose restrictions to row lines (., b, c) have degree
<= dx and whose restrictions to skew lines (a, y, a*y + c) have degree <= dy.

Point order on F_p^3 is index = x + p*y + p^2*z throughout. Row line (b, c) is stored at
line index b + p*c and ordered by x; skew line (a, c) is stored at a + p*c and ordered by y.
"""

import logging
import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterator, List, Optional, Sequence, Tuple

import numpy as np
import scipy.sparse as sp

from hdxcodes.config import settings
from hdxcodes.services.algebra import (
    BudgetExceededError,
    ParameterError,
    inverse_matrix,
    inv,
    power_table,
    rank_nullspace,
    require_prime,
)

logger = logging.getLogger(__name__)


class LocalCodeError(Exception):
    """Custom exception for local code construction errors."""
    pass


# ---------------------------------------------------------------------------
# Reed-Solomon component codes
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class RSSpec:
    """RS(q, d): evaluations of polynomials of degree <= d at every point of F_q."""

    q: int
    d: int

    def __post_init__(self) -> None:
        require_prime(self.q)
        if not 0 <= self.d < self.q:
            raise ParameterError(f"RS degree must satisfy 0 <= d < q, got d={self.d}, q={self.q}")

    @property
    def relative_distance(self) -> float:
        return (self.q - self.d) / self.q

    def encode(self, coeffs: Sequence[int]) -> np.ndarray:
        return rs_encode(coeffs, self.q)


def rs_parity_rows(q: int, d: int) -> np.ndarray:
    """
    Monomial parity rows of RS(q, d).

    Row j (j = 0..q-d-2) is (alpha^j) over alpha = 0..q-1 with 0^0 = 1. Power sums of
    F_q vanish for exponents 0..q-2, so these rows annihilate every degree-<=d word.

    Returns:
        Array of shape (q - d - 1, q); empty when d >= q - 1
    """
    require_prime(q)
    if d < 0:
        raise ParameterError(f"RS degree must be nonnegative, got {d}")
    if d >= q:
        logger.warning(f"RS degree {d} >= q={q}: code is the full space, no parity rows")
        return np.zeros((0, q), dtype=np.int64)
    count = q - d - 1
    if count == 0:
        return np.zeros((0, q), dtype=np.int64)
    return power_table(q, count - 1, q).T.copy()


def rs_sparse_check(q: int, d: int, support: Sequence[int]) -> np.ndarray:
    """
    Weight-(d+2) parity check supported on the given points.

    The coefficient at alpha is prod_{beta != alpha} (alpha - beta)^{-1}, the Lagrange
    dual weight, so the check annihilates every polynomial of degree <= d.

    Raises:
        ParameterError: If the support does not consist of d+2 distinct field points
    """
    require_prime(q)
    pts = [int(a) for a in support]
    if len(pts) != d + 2:
        raise ParameterError(f"Support must have d+2 = {d + 2} points, got {len(pts)}")
    if len(set(pts)) != len(pts):
        raise ParameterError(f"Support points must be distinct, got {pts}")
    if any(not 0 <= a < q for a in pts):
        raise ParameterError(f"Support points must lie in [0, {q})")
    row = np.zeros(q, dtype=np.int64)
    for a in pts:
        denom = 1
        for b in pts:
            if b != a:
                denom = denom * (a - b) % q
        row[a] = inv(denom, q)
    return row


def rs_window_checks(q: int, d: int) -> np.ndarray:
    """Sparse checks on the windows {j, ..., j+d+1} for j = 0..q-d-2 (staircase supports)."""
    rows = [rs_sparse_check(q, d, range(j, j + d + 2)) for j in range(q - d - 1)]
    if not rows:
        return np.zeros((0, q), dtype=np.int64)
    return np.vstack(rows)


def rs_encode(coeffs: Sequence[int], q: int) -> np.ndarray:
    """Evaluate sum_k coeffs[k] x^k at every x in F_q."""
    c = np.asarray(coeffs, dtype=np.int64) % q
    return (power_table(q, max(len(c) - 1, 0), q) @ c) % q if c.size else np.zeros(q, np.int64)


@lru_cache(maxsize=64)
def _inverse_vandermonde(p: int) -> np.ndarray:
    return inverse_matrix(power_table(p, p - 1, p), p)


def interpolate_univariate(values: np.ndarray, p: int) -> np.ndarray:
    """
    Coefficients (length p, low-to-high) of the reduced polynomial taking `values` on F_p.

    Works on the last axis, so a batch of words can be interpolated at once.
    """
    v = np.asarray(values, dtype=np.int64) % p
    return (v @ _inverse_vandermonde(p).T) % p


def univariate_degree(values: np.ndarray, p: int) -> np.ndarray:
    """Degree of the interpolating polynomial along the last axis (-1 for the zero word)."""
    coeffs = interpolate_univariate(values, p)
    nz = coeffs != 0
    rev = np.argmax(nz[..., ::-1], axis=-1)
    return np.where(nz.any(axis=-1), p - 1 - rev, -1)


# ---------------------------------------------------------------------------
# Geometry of F_p^3
# ---------------------------------------------------------------------------


def point_index(x: int, y: int, z: int, p: int) -> int:
    return x + p * y + p * p * z


def skew_line_points(a: int, c: int, p: int) -> List[Tuple[int, int, int]]:
    """Points (a, y, a*y + c) for y = 0..p-1."""
    return [(a, y, (a * y + c) % p) for y in range(p)]


@lru_cache(maxsize=64)
def row_line_indices(p: int) -> np.ndarray:
    """(p^2, p) table: row line b + p*c lists the point indices of (x, b, c), x ascending."""
    x = np.arange(p)
    b, c = np.meshgrid(np.arange(p), np.arange(p), indexing="xy")
    base = (p * b + p * p * c).reshape(-1)
    return base[:, None] + x[None, :]


@lru_cache(maxsize=64)
def skew_line_indices(p: int) -> np.ndarray:
    """(p^2, p) table: skew line a + p*c lists the point indices of (a, y, a*y+c), y ascending."""
    y = np.arange(p)
    a, c = np.meshgrid(np.arange(p), np.arange(p), indexing="xy")
    a = a.reshape(-1)[:, None]
    c = c.reshape(-1)[:, None]
    z = (a * y[None, :] + c) % p
    return a + p * y[None, :] + p * p * z


def local_dim_formula(d_x: int, d_y: int) -> int:
    """(dx+1)(dy+1)(dx+dy+2)/2."""
    if d_x < 0 or d_y < 0:
        raise ParameterError("Degrees must be nonnegative")
    return (d_x + 1) * (d_y + 1) * (d_x + d_y + 2) // 2


def local_agreement_parameters(p: int, d_x: int, d_y: int) -> Tuple[Optional[float], float]:
    """
    Agreement-testability parameters (eps0, rho0 coefficient) of C_{dx,dy}.

    eps0 = ((p - 2(dx+dy)) / (5p))^3 and rho0(a) = 4 * a^(1/3); eps0 is None when
    dx + dy >= p/2 and the decoder's regime is empty.
    """
    slack = p - 2 * (d_x + d_y)
    if slack <= 0:
        return None, 4.0
    return (slack / (5 * p)) ** 3, 4.0


# ---------------------------------------------------------------------------
# The local code
# ---------------------------------------------------------------------------


@dataclass
class LocalCodeSpec:
    """C_{dx,dy} as an evaluation basis plus per-vector coefficient tensors c[i, j, k]."""

    p: int
    d_x: int
    d_y: int
    basis_eval: np.ndarray  # (dim, p^3)
    basis_coeffs: np.ndarray  # (dim, dx+1, p, p)
    formula_checked: bool = False
    method: str = "graded"
    _info_set: Optional[np.ndarray] = field(default=None, repr=False)
    _info_inverse: Optional[np.ndarray] = field(default=None, repr=False)

    @property
    def dim(self) -> int:
        return int(self.basis_eval.shape[0])

    @property
    def length(self) -> int:
        return self.p**3

    def encode(self, coeffs: np.ndarray) -> np.ndarray:
        """Codeword(s) sum_b coeffs[b] * basis_eval[b]; coeffs may be (dim,) or (N, dim)."""
        return (np.asarray(coeffs, dtype=np.int64) @ self.basis_eval) % self.p

    def syndrome_ok(self, words: np.ndarray) -> np.ndarray:
        """Boolean membership for one word (p^3,) or a batch (N, p^3)."""
        w = np.atleast_2d(np.asarray(words, dtype=np.int64)) % self.p
        ok = np.ones(w.shape[0], dtype=bool)
        for d, lines in ((self.d_x, row_line_indices(self.p)), (self.d_y, skew_line_indices(self.p))):
            checks = rs_parity_rows(self.p, d)
            if checks.shape[0] == 0:
                continue
            synd = np.einsum("nlx,jx->nlj", w[:, lines], checks) % self.p
            ok &= ~synd.reshape(w.shape[0], -1).any(axis=1)
        return ok

    def contains(self, word: np.ndarray) -> bool:
        return bool(self.syndrome_ok(word)[0])

    def _information_set(self) -> Tuple[np.ndarray, np.ndarray]:
        if self._info_set is None:
            # pivot columns of the reduced basis form an information set
            res = rank_nullspace(self.basis_eval, self.p)
            cols = np.asarray(res.pivots, dtype=np.int64)
            if cols.size != self.dim:
                raise LocalCodeError("Local code basis is not linearly independent")
            self._info_set = cols
            self._info_inverse = inverse_matrix(self.basis_eval[:, cols].T, self.p)
        assert self._info_inverse is not None
        return self._info_set, self._info_inverse

    def coefficients_of(self, word: np.ndarray) -> Optional[np.ndarray]:
        """Coefficient vector over the basis, or None when the word is not a codeword."""
        cols, inverse = self._information_set()
        w = np.asarray(word, dtype=np.int64) % self.p
        coeffs = (inverse @ w[cols]) % self.p
        if not np.array_equal(self.encode(coeffs), w):
            return None
        return coeffs

    def enumerate_codewords(
        self, budget: Optional[int] = None, chunk: int = 65_536
    ) -> Iterator[Tuple[np.ndarray, np.ndarray]]:
        """
        Yield (coefficient block, codeword block) over all p^dim codewords.

        Blocks follow the lexicographic order of coefficient vectors (first basis vector
        most significant).

        Raises:
            BudgetExceededError: If p^dim exceeds the enumeration budget
        """
        limit = settings.budget_enum if budget is None else budget
        total = self.p**self.dim
        if total > limit:
            raise BudgetExceededError(
                f"Enumerating {total} local codewords exceeds budget {limit}",
                {"p": self.p, "dim": self.dim, "codewords": total, "budget": limit},
            )
        weights = self.p ** np.arange(self.dim - 1, -1, -1, dtype=np.int64)
        for start in range(0, total, chunk):
            idx = np.arange(start, min(start + chunk, total), dtype=np.int64)
            coeffs = (idx[:, None] // weights[None, :]) % self.p
            yield coeffs, self.encode(coeffs)

    def all_codewords(self, budget: Optional[int] = None) -> Tuple[np.ndarray, np.ndarray]:
        blocks = list(self.enumerate_codewords(budget))
        return np.vstack([b[0] for b in blocks]), np.vstack([b[1] for b in blocks])


def local_constraint_matrix(p: int, d_x: int, d_y: int) -> sp.csr_matrix:
    """Row-line and skew-line RS checks over the p^3 evaluation points."""
    blocks = []
    for d, lines in ((d_x, row_line_indices(p)), (d_y, skew_line_indices(p))):
        checks = rs_parity_rows(p, d)
        if checks.shape[0] == 0:
            continue
        n_lines, n_checks = lines.shape[0], checks.shape[0]
        rows = np.arange(n_lines * n_checks).reshape(n_lines, n_checks, 1)
        rows = np.broadcast_to(rows, (n_lines, n_checks, p))
        cols = np.broadcast_to(lines[:, None, :], (n_lines, n_checks, p))
        vals = np.broadcast_to(checks[None, :, :], (n_lines, n_checks, p))
        blocks.append(
            sp.csr_matrix(
                (vals.reshape(-1), (rows.reshape(-1), cols.reshape(-1))),
                shape=(n_lines * n_checks, p**3),
            )
        )
    if not blocks:
        return sp.csr_matrix((0, p**3), dtype=np.int64)
    return sp.vstack(blocks).tocsr()


def _reduce_exponent(e: np.ndarray, p: int) -> np.ndarray:
    """x^e as a function on F_p equals x^r(e), r(0) = 0 and r(e) = ((e-1) mod (p-1)) + 1."""
    return np.where(e == 0, 0, (e - 1) % (p - 1) + 1)


def _graded_coefficients(p: int, d_x: int, d_y: int) -> np.ndarray:
    """
    Basis of coefficient tensors c[i, j, k] (i <= dx) satisfying the skew constraints.

    Substituting z = x*y + w turns each skew line into a w-constant line, so the skew
    condition says the reduced polynomial f(x, y, x*y + w) has y-degree <= dy. The linear
    map c -> coefficients of that polynomial is block diagonal in the torus grading
    ((i+k) mod (p-1), (j+k) mod (p-1)); each block is solved on its own.
    """
    i, j, k, l = np.meshgrid(
        np.arange(d_x + 1), np.arange(p), np.arange(p), np.arange(p), indexing="ij"
    )
    keep = l <= k
    i, j, k, l = i[keep], j[keep], k[keep], l[keep]
    s = _reduce_exponent(j + l, p)
    live = s > d_y
    i, j, k, l, s = i[live], j[live], k[live], l[live], s[live]
    t = _reduce_exponent(i + l, p)
    m = k - l
    binom = np.array([[math.comb(a, b) % p for b in range(p)] for a in range(p)], dtype=np.int64)
    vals = binom[k, l]
    nz = vals != 0
    i, j, k, t, s, m, vals = i[nz], j[nz], k[nz], t[nz], s[nz], m[nz], vals[nz]

    n_vars = (d_x + 1) * p * p
    var = i * p * p + j * p + k
    row = t * p * p + s * p + m
    grade = p - 1
    row_key = ((t + m) % grade) * grade + (s + m) % grade

    vi, vj, vk = np.meshgrid(np.arange(d_x + 1), np.arange(p), np.arange(p), indexing="ij")
    var_key_all = (((vi + vk) % grade) * grade + (vj + vk) % grade).reshape(-1)

    basis: List[np.ndarray] = []
    for key in range(grade * grade):
        block_vars = np.flatnonzero(var_key_all == key)
        if block_vars.size == 0:
            continue
        sel = row_key == key
        block_rows = np.unique(row[sel])
        if block_rows.size == 0:
            null = np.eye(block_vars.size, dtype=np.int64)
        else:
            local = sp.coo_matrix(
                (
                    vals[sel],
                    (np.searchsorted(block_rows, row[sel]), np.searchsorted(block_vars, var[sel])),
                ),
                shape=(block_rows.size, block_vars.size),
            ).toarray() % p
            null = rank_nullspace(local, p).nullspace
        for vec in null:
            full = np.zeros(n_vars, dtype=np.int64)
            full[block_vars] = vec
            basis.append(full)
    if not basis:
        return np.zeros((0, d_x + 1, p, p), dtype=np.int64)
    return np.vstack(basis).reshape(-1, d_x + 1, p, p)


def evaluate_coefficients(coeffs: np.ndarray, p: int) -> np.ndarray:
    """Evaluate tensors c[..., i, j, k] on F_p^3 in point order x + p*y + p^2*z."""
    c = np.asarray(coeffs, dtype=np.int64)
    d_x = c.shape[-3] - 1
    px = power_table(p, d_x, p)
    pw = power_table(p, c.shape[-1] - 1, p)
    out = np.einsum("...ijk,zk->...ijz", c, pw) % p
    out = np.einsum("...ijz,yj->...izy", out, pw) % p
    out = np.einsum("...izy,xi->...zyx", out, px) % p
    return out.reshape(*c.shape[:-3], p**3)


def interpolate_trivariate(words: np.ndarray, p: int) -> np.ndarray:
    """
    Full coefficient tensors c[..., i, j, k] (each exponent < p) of functions on F_p^3.

    Three inverse-Vandermonde passes, one per variable.
    """
    w = np.asarray(words, dtype=np.int64).reshape(*np.shape(words)[:-1], p, p, p)  # [z][y][x]
    vinv = _inverse_vandermonde(p)
    c = np.einsum("...zyx,ix->...zyi", w, vinv) % p
    c = np.einsum("...zyi,jy->...zji", c, vinv) % p
    c = np.einsum("...zji,kz->...kji", c, vinv) % p
    return np.moveaxis(c, (-1, -2, -3), (-3, -2, -1))  # -> [..., i, j, k]


def build_local_code(p: int, d_x: int, d_y: int, method: str = "graded") -> LocalCodeSpec:
    """
    Build C_{dx,dy} over F_p.

    Args:
        p: Prime
        d_x: Row-line degree bound
        d_y: Skew-line degree bound
        method: "graded" solves the skew constraints in coefficient space block by block;
            "evaluation" takes the nullspace of the full p^3-column constraint matrix

    Returns:
        LocalCodeSpec with basis_eval, basis_coeffs and the dimension-formula status

    Raises:
        ParameterError: If p is not prime or a degree is outside [0, p-1]
    """
    require_prime(p)
    for d in (d_x, d_y):
        if not 0 <= d <= p - 1:
            raise ParameterError(f"Degree {d} outside [0, {p - 1}]")

    if method == "evaluation":
        basis_eval = rank_nullspace(local_constraint_matrix(p, d_x, d_y), p).nullspace
        full = interpolate_trivariate(basis_eval, p)
        if np.any(full[:, d_x + 1 :, :, :]):
            raise LocalCodeError("Interpolated basis exceeds the row-line degree bound")
        basis_coeffs = full[:, : d_x + 1, :, :]
    elif method == "graded":
        graded = _graded_coefficients(p, d_x, d_y)
        basis_eval = evaluate_coefficients(graded, p)
        full = interpolate_trivariate(basis_eval, p)
        basis_coeffs = full[:, : d_x + 1, :, :]
        if np.any(full[:, d_x + 1 :, :, :]) or not np.array_equal(basis_coeffs, graded):
            raise LocalCodeError("Coefficient tensors disagree with their evaluations")
    else:
        raise ParameterError(f"Unknown construction method: {method}")

    spec = LocalCodeSpec(p, d_x, d_y, basis_eval, basis_coeffs, method=method)
    if not spec.syndrome_ok(basis_eval).all():
        raise LocalCodeError("A basis vector violates a row-line or skew-line check")
    formula = local_dim_formula(d_x, d_y)
    spec.formula_checked = p >= d_x + d_y + 2 and spec.dim == formula
    if p >= d_x + d_y + 2 and spec.dim != formula:
        logger.error(f"C_({d_x},{d_y}) over F_{p}: dim {spec.dim} != formula {formula}")
    logger.debug(f"Built C_({d_x},{d_y}) over F_{p} ({method}): dim {spec.dim}")
    return spec


@dataclass
class SupportCheck:
    ok: bool
    violations: List[Tuple[int, int, int, int]]
    skipped: bool = False


def coeff_support_check(spec: LocalCodeSpec) -> SupportCheck:
    """
    Every basis tensor vanishes on c[i, j, k] with j + k > dx + dy.

    Skipped (ok, with a warning) when p < dx + dy + 2, where the support bound is not claimed.
    """
    bound = spec.d_x + spec.d_y
    if spec.p < bound + 2:
        logger.warning(f"Support check skipped: p={spec.p} < dx+dy+2={bound + 2}")
        return SupportCheck(True, [], skipped=True)
    jk = np.add.outer(np.arange(spec.p), np.arange(spec.p)) > bound
    hits = np.argwhere((spec.basis_coeffs != 0) & jk[None, None, :, :])
    violations = [tuple(int(v) for v in h) for h in hits]
    return SupportCheck(not violations, violations)  # type: ignore[arg-type]


@dataclass
class BinomialMatrixResult:
    matrix: np.ndarray
    full_rank: bool
    hypothesis_ok: bool


def binomial_matrix_rank(m: int, k: int, r: int, p: int) -> BinomialMatrixResult:
    """Matrix (C(m-i, k-j) mod p) for 0 <= i, j <= r and whether it has rank r+1."""
    require_prime(p)
    hypothesis_ok = 0 <= r <= k <= m < p
    if not hypothesis_ok:
        logger.warning(f"Binomial matrix hypothesis r <= k <= m < p violated: {(m, k, r, p)}")

    def comb(a: int, b: int) -> int:
        return math.comb(a, b) % p if 0 <= b <= a else 0

    mat = np.array([[comb(m - i, k - j) for j in range(r + 1)] for i in range(r + 1)], np.int64)
    return BinomialMatrixResult(mat, rank_nullspace(mat, p).rank == r + 1, hypothesis_ok)


def local_min_distance(spec: LocalCodeSpec, budget: Optional[int] = None) -> int:
    """Minimum nonzero weight of the local code by exhaustive enumeration."""
    best = spec.length + 1
    for _, words in spec.enumerate_codewords(budget):
        weights = np.count_nonzero(words, axis=1)
        weights = weights[weights > 0]
        if weights.size:
            best = min(best, int(weights.min()))
    return best if best <= spec.length else 0
