"""
Algebra Service

Exact arithmetic over prime fields F_p, the ring R_n = F_q[t]/<phi>, 3x3 matrices over
R_n, dense GF(p) elimination and floating-point symmetric spectral analysis.

Every other service builds on the primitives here; all of them operate on numpy integer
arrays whose entries are kept reduced into [0, p).
"""

import logging
from dataclasses import dataclass, field
from functools import cached_property
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
import scipy.sparse as sp

from hdxcodes.config import settings

logger = logging.getLogger(__name__)


class AlgebraError(Exception):
    """Custom exception for finite-field and ring arithmetic errors."""
    pass


class ParameterError(ValueError):
    """Raised when a prime, degree or modulus parameter is out of range."""
    pass


class ShapeError(ValueError):
    """Raised when operand lengths or matrix shapes do not match."""
    pass


class SpectralValidationError(ValueError):
    """Raised when a matrix handed to the eigensolver is not symmetric."""
    pass


class BudgetExceededError(Exception):
    """Raised when an enumeration or elimination would exceed its configured budget."""

    def __init__(self, message: str, size_report: Optional[Dict[str, Any]] = None):
        super().__init__(message)
        self.size_report = dict(size_report or {})


# ---------------------------------------------------------------------------
# Prime fields
# ---------------------------------------------------------------------------


def is_prime(p: int) -> bool:
    """Deterministic trial-division primality test for machine-sized moduli."""
    if p < 2:
        return False
    if p < 4:
        return True
    if p % 2 == 0:
        return False
    k = 3
    while k * k <= p:
        if p % k == 0:
            return False
        k += 2
    return True


def require_prime(p: int) -> int:
    """Return p unchanged, raising ParameterError when it is not prime."""
    if not is_prime(int(p)):
        raise ParameterError(f"Modulus must be prime, got {p}")
    return int(p)


def field_dtype(p: int) -> np.dtype:
    """Smallest signed integer dtype in which a - b*c stays exact for a, b, c in [0, p)."""
    if (p - 1) ** 2 + p < 2**15:
        return np.dtype(np.int16)
    if (p - 1) ** 2 + p < 2**31:
        return np.dtype(np.int32)
    return np.dtype(np.int64)


def inv(a: int, p: int) -> int:
    """
    Multiplicative inverse in F_p.

    Args:
        a: Field element
        p: Prime modulus

    Returns:
        b with a*b = 1 (mod p)

    Raises:
        ZeroDivisionError: If a = 0 in F_p
    """
    a = int(a) % p
    if a == 0:
        raise ZeroDivisionError(f"0 has no inverse modulo {p}")
    return pow(a, -1, p)


def inverse_table(p: int) -> np.ndarray:
    """Array T with T[a] = a^{-1} for a != 0 and T[0] = 0."""
    table = np.zeros(p, dtype=np.int64)
    for a in range(1, p):
        table[a] = pow(a, -1, p)
    return table


def power_table(points: Union[int, Sequence[int], np.ndarray], max_exp: int, p: int) -> np.ndarray:
    """
    Table T[k, e] = points[k]^e mod p for e = 0..max_exp, with 0^0 = 1.

    Passing an int evaluates at every field element 0..p-1.
    """
    pts = np.arange(p, dtype=np.int64) if isinstance(points, int) else np.asarray(points, np.int64)
    table = np.ones((pts.size, max_exp + 1), dtype=np.int64)
    for e in range(1, max_exp + 1):
        table[:, e] = (table[:, e - 1] * pts) % p
    return table


@dataclass(frozen=True)
class PrimeField:
    """The prime field F_p."""

    p: int

    def __post_init__(self) -> None:
        require_prime(self.p)

    def inv(self, a: int) -> int:
        return inv(a, self.p)

    def elements(self) -> np.ndarray:
        return np.arange(self.p, dtype=np.int64)

    def nonzero(self) -> np.ndarray:
        return np.arange(1, self.p, dtype=np.int64)

    def reduce(self, values: Any) -> np.ndarray:
        return np.mod(np.asarray(values, dtype=np.int64), self.p)


def counter_rng(seed: int, *stream: int) -> np.random.Generator:
    """
    Named counter-based generator for one command or experiment stream.

    Philox keyed by (seed, *stream) so that independent trials never share state and
    no module touches numpy's global RNG.
    """
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([int(seed), *stream])))


# ---------------------------------------------------------------------------
# The ring R_n = F_q[t]/<phi> and 3x3 matrices over it
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class RingElement:
    """Element of R_n stored as its coefficient vector (t^l at index l)."""

    coeffs: Tuple[int, ...]

    @property
    def n(self) -> int:
        return len(self.coeffs)

    def as_array(self) -> np.ndarray:
        return np.asarray(self.coeffs, dtype=np.int64)


@dataclass(frozen=True)
class Ring:
    """
    The quotient ring F_q[t]/<phi> for a monic phi of degree n.

    Elements are numpy vectors of length n; every method accepts arbitrary leading
    batch dimensions so whole element tables can be multiplied at once.
    """

    q: int
    phi: Tuple[int, ...]  # coefficients low-to-high, phi[-1] == 1

    def __post_init__(self) -> None:
        require_prime(self.q)
        if len(self.phi) < 2:
            raise ParameterError("Modulus must have degree at least 1")
        if self.phi[-1] % self.q != 1:
            raise ParameterError(f"Modulus must be monic, got leading coefficient {self.phi[-1]}")
        object.__setattr__(self, "phi", tuple(int(c) % self.q for c in self.phi))

    @property
    def n(self) -> int:
        return len(self.phi) - 1

    @cached_property
    def reduction(self) -> np.ndarray:
        """R[i, j] = t^{i+j} mod phi, shape (n, n, n)."""
        n, q = self.n, self.q
        powers = np.zeros((2 * n - 1, n), dtype=np.int64)
        for k in range(min(n, 2 * n - 1)):
            powers[k, k] = 1
        tail = np.asarray(self.phi[:n], dtype=np.int64)
        for k in range(n, 2 * n - 1):
            prev = powers[k - 1]
            top = prev[n - 1]
            shifted = np.concatenate(([0], prev[: n - 1]))
            powers[k] = (shifted - top * tail) % q
        idx = np.add.outer(np.arange(n), np.arange(n))
        return powers[idx]

    def element(self, coeffs: Sequence[int]) -> RingElement:
        if len(coeffs) != self.n:
            raise ShapeError(f"Ring element needs {self.n} coefficients, got {len(coeffs)}")
        return RingElement(tuple(int(c) % self.q for c in coeffs))

    def zero(self) -> np.ndarray:
        return np.zeros(self.n, dtype=np.int64)

    def one(self) -> np.ndarray:
        e = self.zero()
        e[0] = 1
        return e

    def t(self) -> np.ndarray:
        """The class of t, reduced when n = 1."""
        if self.n == 1:
            return np.array([(-self.phi[0]) % self.q], dtype=np.int64)
        e = self.zero()
        e[1] = 1
        return e

    def scalar(self, alpha: int) -> np.ndarray:
        e = self.zero()
        e[0] = int(alpha) % self.q
        return e

    def mul(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        a = np.asarray(a, dtype=np.int64)
        b = np.asarray(b, dtype=np.int64)
        if a.shape[-1] != self.n or b.shape[-1] != self.n:
            raise ShapeError(f"Ring operands must have trailing length {self.n}")
        return np.einsum("...i,...j,ijl->...l", a, b, self.reduction) % self.q

    def power(self, a: np.ndarray, k: int) -> np.ndarray:
        result = self.one()
        base = np.asarray(a, dtype=np.int64) % self.q
        while k > 0:
            if k & 1:
                result = self.mul(result, base)
            base = self.mul(base, base)
            k >>= 1
        return result

    # -- 3x3 matrices over the ring, shape (..., 3, 3, n) ------------------

    def identity_matrix(self) -> np.ndarray:
        m = np.zeros((3, 3, self.n), dtype=np.int64)
        for i in range(3):
            m[i, i, 0] = 1
        return m

    def matmul(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        """Batched product of ring matrices; broadcasting over leading axes."""
        return np.einsum("...abi,...bcj,ijl->...acl", a, b, self.reduction) % self.q

    def det(self, m: np.ndarray) -> np.ndarray:
        """Batched determinant of ring matrices by cofactor expansion along row 0."""
        mul = self.mul
        minor0 = (mul(m[..., 1, 1, :], m[..., 2, 2, :]) - mul(m[..., 1, 2, :], m[..., 2, 1, :]))
        minor1 = (mul(m[..., 1, 0, :], m[..., 2, 2, :]) - mul(m[..., 1, 2, :], m[..., 2, 0, :]))
        minor2 = (mul(m[..., 1, 0, :], m[..., 2, 1, :]) - mul(m[..., 1, 1, :], m[..., 2, 0, :]))
        total = (
            mul(m[..., 0, 0, :], minor0 % self.q)
            - mul(m[..., 0, 1, :], minor1 % self.q)
            + mul(m[..., 0, 2, :], minor2 % self.q)
        )
        return total % self.q

    def adjugate(self, m: np.ndarray) -> np.ndarray:
        """Transposed cofactor matrix; the inverse of any determinant-1 matrix."""
        out = np.zeros_like(np.asarray(m, dtype=np.int64))
        for r in range(3):
            for c in range(3):
                r1, r2 = [i for i in range(3) if i != r]
                c1, c2 = [j for j in range(3) if j != c]
                minor = self.mul(m[..., r1, c1, :], m[..., r2, c2, :]) - self.mul(
                    m[..., r1, c2, :], m[..., r2, c1, :]
                )
                sign = 1 if (r + c) % 2 == 0 else -1
                out[..., c, r, :] = (sign * minor) % self.q
        return out


def ring_mul(a: RingElement, b: RingElement, ring: Ring) -> RingElement:
    """
    Multiply two ring elements modulo phi and q.

    Raises:
        ShapeError: If either operand does not have n coefficients
    """
    if a.n != ring.n or b.n != ring.n:
        raise ShapeError(f"Operands of length {a.n} and {b.n} do not match n = {ring.n}")
    return RingElement(tuple(int(c) for c in ring.mul(a.as_array(), b.as_array())))


def _prime_factors(m: int) -> List[int]:
    factors: List[int] = []
    k = 2
    while k * k <= m:
        if m % k == 0:
            factors.append(k)
            while m % k == 0:
                m //= k
        k += 1
    if m > 1:
        factors.append(m)
    return factors


@dataclass(frozen=True)
class PrimitiveModulus:
    """Search result of primitive_modulus."""

    coeffs: Tuple[int, ...]  # low-to-high, monic
    three_coprime: bool  # 3 does not divide q^n - 1

    def as_ring(self, q: int) -> Ring:
        return Ring(q, self.coeffs)


def is_primitive(ring: Ring) -> bool:
    """True iff t has multiplicative order exactly q^n - 1 in the ring."""
    order = ring.q**ring.n - 1
    t = ring.t()
    if not np.array_equal(ring.power(t, order), ring.one()):
        return False
    return all(
        not np.array_equal(ring.power(t, order // r), ring.one()) for r in _prime_factors(order)
    )


def primitive_modulus(q: int, n: int) -> PrimitiveModulus:
    """
    Lexicographically smallest monic primitive polynomial of degree n over F_q.

    Candidates are scanned with the highest non-leading coefficient most significant and
    the constant term last, so (2, 3) yields x^3 + x + 1.
    """
    require_prime(q)
    if n < 1:
        raise ParameterError(f"Degree must be at least 1, got {n}")
    for code in range(q**n):
        high_to_low = [(code // q**k) % q for k in reversed(range(n))]
        coeffs = tuple(reversed(high_to_low)) + (1,)
        if coeffs[0] == 0:
            continue
        ring = Ring(q, coeffs)
        if is_primitive(ring):
            three_coprime = (q**n - 1) % 3 != 0
            logger.debug(f"Primitive modulus for q={q}, n={n}: {coeffs}")
            return PrimitiveModulus(coeffs, three_coprime)
    raise AlgebraError(f"No primitive polynomial found for q={q}, n={n}")


# ---------------------------------------------------------------------------
# Exact GF(p) elimination
# ---------------------------------------------------------------------------


@dataclass
class EliminationResult:
    """Outcome of rank_nullspace."""

    rank: int
    nullspace: np.ndarray  # (cols - rank, cols)
    pivots: List[int]
    solution: Optional[np.ndarray] = None
    consistent: Optional[bool] = None
    reduced: np.ndarray = field(default_factory=lambda: np.zeros((0, 0), dtype=np.int64), repr=False)


def rank_nullspace(
    m: Union[np.ndarray, sp.spmatrix, Sequence[Sequence[int]]],
    p: int,
    rhs: Optional[Union[np.ndarray, Sequence[int]]] = None,
) -> EliminationResult:
    """
    Exact rank, nullspace basis and optional particular solution over GF(p).

    Gauss-Jordan with the first nonzero entry of each column as pivot; only the rows with
    a nonzero in the pivot column and the active columns are updated at each step.

    Args:
        m: Matrix (dense, scipy sparse or nested lists)
        p: Prime modulus
        rhs: Optional right-hand side, a vector of length rows or a (rows, k) block

    Returns:
        EliminationResult with rank, nullspace rows annihilated by m and, when rhs is
        given, one solution (None when inconsistent)

    Raises:
        ShapeError: If rhs does not have one entry per row
    """
    dtype = field_dtype(p)
    if sp.issparse(m):
        a = np.asarray(m.toarray(), dtype=np.int64)
    else:
        a = np.asarray(m, dtype=np.int64)
    if a.ndim != 2:
        a = a.reshape(-1, a.shape[-1]) if a.size else np.zeros((0, 0), dtype=np.int64)
    rows, cols = a.shape

    extra = 0
    vector_rhs = False
    if rhs is not None:
        b = np.asarray(rhs, dtype=np.int64)
        vector_rhs = b.ndim == 1
        if vector_rhs:
            b = b[:, None]
        if b.shape[0] != rows:
            raise ShapeError(f"rhs has {b.shape[0]} entries for {rows} rows")
        extra = b.shape[1]
        a = np.concatenate([a, b], axis=1)

    work = np.mod(a, p).astype(dtype)
    inverses = inverse_table(p)
    pivots: List[int] = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        nz = np.flatnonzero(work[r:, c])
        if nz.size == 0:
            continue
        piv = r + int(nz[0])
        if piv != r:
            work[[r, piv]] = work[[piv, r]]
        scale = inverses[int(work[r, c])]
        if scale != 1:
            work[r, c:] = (work[r, c:].astype(np.int64) * scale % p).astype(dtype)
        column = work[:, c].copy()
        column[r] = 0
        targets = np.flatnonzero(column)
        if targets.size:
            update = work[targets, c:] - np.outer(column[targets], work[r, c:]).astype(dtype)
            work[targets, c:] = np.mod(update, p)
        pivots.append(c)
        r += 1

    rank = len(pivots)
    pivot_set = set(pivots)
    free = [c for c in range(cols) if c not in pivot_set]
    nullspace = np.zeros((len(free), cols), dtype=np.int64)
    if free:
        nullspace[np.arange(len(free)), free] = 1
        if rank:
            nullspace[:, pivots] = np.mod(-work[:rank, free].astype(np.int64).T, p)

    result = EliminationResult(rank=rank, nullspace=nullspace, pivots=pivots)
    result.reduced = work[:rank, :cols].astype(np.int64)
    if rhs is not None:
        tail = work[:, cols:].astype(np.int64)
        consistent = not np.any(tail[rank:])
        result.consistent = bool(consistent)
        if consistent:
            sol = np.zeros((cols, extra), dtype=np.int64)
            if rank:
                sol[pivots] = tail[:rank]
            result.solution = sol[:, 0] if vector_rhs else sol
    return result


def matrix_rank(m: Union[np.ndarray, sp.spmatrix], p: int) -> int:
    return rank_nullspace(m, p).rank


def solve_unique(m: np.ndarray, rhs: np.ndarray, p: int) -> Optional[np.ndarray]:
    """Solution of m x = rhs when it exists and is unique, else None."""
    res = rank_nullspace(m, p, rhs)
    if not res.consistent or res.nullspace.shape[0]:
        return None
    return res.solution


def inverse_matrix(m: np.ndarray, p: int) -> np.ndarray:
    """Inverse of a square GF(p) matrix."""
    m = np.asarray(m, dtype=np.int64)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ShapeError(f"Expected a square matrix, got shape {m.shape}")
    res = rank_nullspace(m, p, np.eye(m.shape[0], dtype=np.int64))
    if res.rank != m.shape[0]:
        raise AlgebraError("Matrix is singular over the field")
    assert res.solution is not None
    return res.solution


# ---------------------------------------------------------------------------
# Spectral analysis
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SpectralResult:
    """Eigenvalues sorted descending; lambda2 is the second entry."""

    eigenvalues: Tuple[float, ...]
    lambda2: float
    method: str = "dense"


def _asymmetry(a: Union[np.ndarray, sp.spmatrix]) -> float:
    if sp.issparse(a):
        diff = (a - a.T).tocoo()
        return float(np.max(np.abs(diff.data))) if diff.nnz else 0.0
    return float(np.max(np.abs(a - a.T))) if a.size else 0.0


def _power_top(
    op: Any, dim: int, deflate: List[np.ndarray], shift: float, rng: np.random.Generator
) -> Tuple[float, np.ndarray]:
    v = rng.standard_normal(dim)
    for u in deflate:
        v -= (u @ v) * u
    v /= np.linalg.norm(v)
    value = 0.0
    for _ in range(settings.power_max_iter):
        w = op @ v + shift * v
        for u in deflate:
            w -= (u @ w) * u
        norm = np.linalg.norm(w)
        if norm == 0.0:
            return -shift, v
        w /= norm
        new_value = float(w @ (op @ w))
        if abs(new_value - value) < settings.power_tol and np.linalg.norm(w - v) < 1e-6:
            return new_value, w
        v, value = w, new_value
    logger.warning("Power iteration hit the iteration cap before converging")
    return value, v


def second_eigenvalue(a: Union[np.ndarray, sp.spmatrix]) -> SpectralResult:
    """
    Spectrum of a real symmetric matrix, sorted descending.

    Dense eigh up to settings.dense_eig_limit; above that, the two leading eigenvalues
    are found by shifted, deflated power iteration.

    Raises:
        SpectralValidationError: If a is not symmetric within settings.symmetry_tol
    """
    dim = a.shape[0]
    if a.shape[0] != a.shape[1]:
        raise ShapeError(f"Expected a square matrix, got shape {a.shape}")
    if _asymmetry(a) > settings.symmetry_tol:
        raise SpectralValidationError("Matrix is not symmetric")
    if dim <= settings.dense_eig_limit:
        dense = a.toarray() if sp.issparse(a) else np.asarray(a, dtype=float)
        values = np.linalg.eigh(dense)[0][::-1]
        lam2 = float(values[1]) if dim > 1 else float("nan")
        return SpectralResult(tuple(float(x) for x in values), lam2, "dense")

    op = sp.csr_matrix(a, dtype=float) if sp.issparse(a) else np.asarray(a, dtype=float)
    bound = float(abs(op).sum(axis=1).max())
    rng = counter_rng(0, dim)
    top, u1 = _power_top(op, dim, [], bound, rng)
    second, _ = _power_top(op, dim, [u1], bound, rng)
    return SpectralResult((top, second), second, "power")


def normalized_adjacency(adj: Union[np.ndarray, sp.spmatrix]) -> sp.csr_matrix:
    """D^{-1/2} A D^{-1/2} for an undirected graph without isolated vertices."""
    adj = sp.csr_matrix(adj, dtype=float)
    deg = np.asarray(adj.sum(axis=1)).ravel()
    if np.any(deg == 0):
        raise AlgebraError("Graph has isolated vertices")
    scale = sp.diags(1.0 / np.sqrt(deg))
    return (scale @ adj @ scale).tocsr()
