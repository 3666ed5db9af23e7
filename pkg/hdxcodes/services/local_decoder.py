"""
Local Decoder Service

Agreement decoding for the local code C_{dx,dy}: given a degree-<=dx polynomial on every
row line and a degree-<=dy polynomial on every skew line, find a low-degree error locator
E vanishing where the two ensembles disagree, then a codeword Q agreeing with the row
data wherever E is nonzero. Division of the product polynomial by E is realized as a
linear solve over the C_{dx,dy} basis.

Also hosts the exhaustive nearest-codeword oracle used to cross-check the decoder.
"""

import enum
import logging
from dataclasses import dataclass
from functools import lru_cache
from typing import Any, Dict, Optional, Sequence, Tuple

import numpy as np

from hdxcodes.services.algebra import ShapeError, counter_rng, power_table, rank_nullspace
from hdxcodes.services.local_code import (
    LocalCodeSpec,
    build_local_code,
    interpolate_univariate,
    row_line_indices,
    skew_line_indices,
)

logger = logging.getLogger(__name__)


class DecoderError(Exception):
    """Custom exception for local decoder errors."""
    pass


@lru_cache(maxsize=32)
def cached_local_code(p: int, d_x: int, d_y: int) -> LocalCodeSpec:
    """Shared, lazily built C_{dx,dy}; specs are never mutated after build."""
    return build_local_code(p, d_x, d_y)


@dataclass
class LineEnsemble:
    """Row polynomials X(., b, c); row (b, c) stored at index b + p*c."""

    p: int
    d_x: int
    polys: np.ndarray  # (p^2, dx+1)

    def __post_init__(self) -> None:
        if self.polys.shape != (self.p * self.p, self.d_x + 1):
            raise ShapeError(f"Row ensemble must have shape {(self.p**2, self.d_x + 1)}")

    def values(self) -> np.ndarray:
        """X evaluated at every point of F_p^3."""
        vals = (self.polys @ power_table(self.p, self.d_x, self.p).T) % self.p
        out = np.empty(self.p**3, dtype=np.int64)
        out[row_line_indices(self.p)] = vals
        return out


@dataclass
class SkewEnsemble:
    """Skew polynomials Y(a, y, a*y + c) in y; line (a, c) stored at index a + p*c."""

    p: int
    d_y: int
    polys: np.ndarray  # (p^2, dy+1)

    def __post_init__(self) -> None:
        if self.polys.shape != (self.p * self.p, self.d_y + 1):
            raise ShapeError(f"Skew ensemble must have shape {(self.p**2, self.d_y + 1)}")

    def values(self) -> np.ndarray:
        vals = (self.polys @ power_table(self.p, self.d_y, self.p).T) % self.p
        out = np.empty(self.p**3, dtype=np.int64)
        out[skew_line_indices(self.p)] = vals
        return out


def restrict(word: np.ndarray, d_x: int, d_y: int, p: int) -> Tuple[LineEnsemble, SkewEnsemble]:
    """Row and skew restrictions of a member of C_{dx,dy}."""
    w = np.asarray(word, dtype=np.int64) % p
    rows = interpolate_univariate(w[row_line_indices(p)], p)
    skews = interpolate_univariate(w[skew_line_indices(p)], p)
    if np.any(rows[:, d_x + 1 :]) or np.any(skews[:, d_y + 1 :]):
        raise DecoderError("Word is not a member of the local code")
    return LineEnsemble(p, d_x, rows[:, : d_x + 1]), SkewEnsemble(p, d_y, skews[:, : d_y + 1])


def disagreement_set(x: LineEnsemble, y: SkewEnsemble) -> Tuple[np.ndarray, float]:
    """Point indices where the two ensembles differ, and the fraction |S| / p^3."""
    if x.p != y.p:
        raise ShapeError(f"Ensembles over different fields: {x.p} and {y.p}")
    s = np.flatnonzero(x.values() != y.values())
    return s, s.size / x.p**3


@dataclass
class Locator:
    """Error locator E in C_{e,e}: basis coefficients plus its evaluation grid."""

    degree: int
    coeffs: np.ndarray
    values: np.ndarray


def fit_error_locator(
    x: LineEnsemble, y: SkewEnsemble, e: int, s: Optional[np.ndarray] = None
) -> Optional[Locator]:
    """
    Nonzero member of C_{e,e} vanishing on the disagreement set, or None.

    Among the nullspace basis vectors (and their sum) the one with the largest support
    is returned, which keeps the quotient system as determined as possible.
    """
    p = x.p
    if not 0 <= e <= p - 1:
        raise DecoderError(f"Locator degree {e} outside [0, {p - 1}]")
    if s is None:
        s, _ = disagreement_set(x, y)
    code = cached_local_code(p, e, e)
    if s.size == 0:
        ones = np.ones(p**3, dtype=np.int64)
        coeffs = code.coefficients_of(ones)
        assert coeffs is not None
        return Locator(e, coeffs, ones)

    null = rank_nullspace(code.basis_eval[:, s].T, p).nullspace
    if null.shape[0] == 0:
        return None
    candidates = np.vstack([null, null.sum(axis=0, keepdims=True) % p])
    evals = code.encode(candidates)
    support = np.count_nonzero(evals, axis=1)
    best = int(np.argmax(support))
    if support[best] == 0:
        return None
    locator = Locator(e, candidates[best], evals[best])
    if np.any(locator.values[s]):
        raise DecoderError("Locator does not vanish on the disagreement set")
    return locator


@dataclass
class Quotient:
    coeffs: np.ndarray
    values: np.ndarray
    unique: bool = True


def fit_quotient(
    x: LineEnsemble, locator_values: np.ndarray, d_x: int, d_y: int
) -> Optional[Quotient]:
    """
    Q in C_{dx,dy} with Q = X at every point where E is nonzero.

    When several codewords fit, the one with every free basis coefficient zero is returned
    and flagged `unique=False`. Returns None when the system is inconsistent or E is zero.
    """
    p = x.p
    code = cached_local_code(p, d_x, d_y)
    pts = np.flatnonzero(np.asarray(locator_values) % p)
    if pts.size == 0:
        return None
    res = rank_nullspace(code.basis_eval[:, pts].T, p, x.values()[pts])
    if not res.consistent:
        return None
    assert res.solution is not None
    values = code.encode(res.solution)
    if not code.contains(values) or np.any(values[pts] != x.values()[pts]):
        raise DecoderError("Quotient failed verification")
    return Quotient(res.solution, values, unique=res.nullspace.shape[0] == 0)


class DecodeStatus(str, enum.Enum):
    EXACT = "exact"
    WITHIN_BOUND = "within-bound"
    BEYOND_BOUND = "beyond-bound"
    FAILED = "failed"


@dataclass
class DecodeResult:
    status: DecodeStatus
    delta_cubed: float
    delta: float
    disagreement_count: int
    hypothesis_ok: bool
    locator_degree: Optional[int] = None
    line_disagreement: Optional[float] = None
    coeffs: Optional[np.ndarray] = None  # over the C_{dx,dy} basis
    values: Optional[np.ndarray] = None

    def tensor(self, spec: LocalCodeSpec) -> Optional[np.ndarray]:
        """Coefficient tensor c[i, j, k] of the decoded codeword."""
        if self.coeffs is None:
            return None
        return np.einsum("b,bijk->ijk", self.coeffs, spec.basis_coeffs) % spec.p


def _cube_root_ceil(n: int) -> int:
    e = int(round(n ** (1.0 / 3.0)))
    while e**3 < n:
        e += 1
    while e > 0 and (e - 1) ** 3 >= n:
        e -= 1
    return e


def hypothesis_holds(p: int, d_x: int, d_y: int, disagreements: int) -> bool:
    """p >= 2(dx+dy) + 5*delta*p, evaluated exactly via delta*p = |S|^(1/3)."""
    slack = p - 2 * (d_x + d_y)
    return slack >= 0 and 125 * disagreements <= slack**3


def locator_schedule(p: int, d_x: int, d_y: int, disagreements: int) -> list[int]:
    """ceil(delta*p) upward to the cap from the hypothesis, then downward to 0."""
    start = min(_cube_root_ceil(disagreements), p - 1)
    cap = min(max(start, (p - 2 * (d_x + d_y)) // 5), p - 1)
    return list(range(start, cap + 1)) + list(range(start - 1, -1, -1))


def line_disagreement(
    x: LineEnsemble, y: SkewEnsemble, q_values: np.ndarray
) -> float:
    """Pr_{b,c}[X row != Q row] + Pr_{a,c}[Y line != Q line]."""
    p = x.p
    xv, yv = x.values(), y.values()
    rows = np.any(xv[row_line_indices(p)] != q_values[row_line_indices(p)], axis=1)
    skews = np.any(yv[skew_line_indices(p)] != q_values[skew_line_indices(p)], axis=1)
    return float(rows.mean() + skews.mean())


def agreement_decode(x: LineEnsemble, y: SkewEnsemble) -> DecodeResult:
    """
    Decode a pair of line ensembles to a single codeword of C_{dx,dy}.

    The decoding hypothesis p >= 2(dx+dy) + 5*delta*p is reported, not enforced.
    """
    p, d_x, d_y = x.p, x.d_x, y.d_y
    s, delta_cubed = disagreement_set(x, y)
    delta = float(delta_cubed ** (1.0 / 3.0))
    hyp = hypothesis_holds(p, d_x, d_y, int(s.size))
    if not hyp:
        logger.warning(
            f"Decoder hypothesis violated: p={p}, dx={d_x}, dy={d_y}, |S|={s.size}"
        )
    result = DecodeResult(DecodeStatus.FAILED, delta_cubed, delta, int(s.size), hyp)
    code = cached_local_code(p, d_x, d_y)

    for e in locator_schedule(p, d_x, d_y, int(s.size)):
        locator = fit_error_locator(x, y, e, s)
        if locator is None:
            continue
        quotient = fit_quotient(x, locator.values, d_x, d_y)
        if quotient is None or not quotient.unique:
            continue
        ld = line_disagreement(x, y, quotient.values)
        if ld == 0:
            status = DecodeStatus.EXACT
        elif ld <= 4 * delta:
            status = DecodeStatus.WITHIN_BOUND
        else:
            status = DecodeStatus.BEYOND_BOUND
        result.status = status
        result.locator_degree = e
        result.line_disagreement = ld
        result.coeffs = quotient.coeffs
        result.values = quotient.values
        assert code.contains(quotient.values)
        return result

    logger.info(f"Agreement decode failed for |S|={s.size} at p={p}")
    return result


@dataclass
class NearestResult:
    coeffs: np.ndarray
    codeword: np.ndarray
    distance: int


def brute_nearest(
    word: np.ndarray, spec: LocalCodeSpec, budget: Optional[int] = None
) -> NearestResult:
    """
    Nearest codeword by exhaustive enumeration.

    Ties go to the lexicographically smallest coefficient vector.

    Raises:
        BudgetExceededError: If p^dim exceeds the enumeration budget
    """
    w = np.asarray(word, dtype=np.int64) % spec.p
    if w.shape != (spec.length,):
        raise ShapeError(f"Word must have length {spec.length}")
    best: Optional[NearestResult] = None
    for coeffs, words in spec.enumerate_codewords(budget):
        dist = np.count_nonzero(words != w[None, :], axis=1)
        k = int(np.argmin(dist))
        if best is None or dist[k] < best.distance:
            best = NearestResult(coeffs[k].copy(), words[k].copy(), int(dist[k]))
        if best.distance == 0:
            break
    assert best is not None
    return best


def merge_views(x: LineEnsemble, y: SkewEnsemble) -> np.ndarray:
    """Pointwise merged word: Y off the disagreement set S, the row value X on S."""
    s, _ = disagreement_set(x, y)
    merged = y.values()
    merged[s] = x.values()[s]
    return merged


def corrupt_rows(
    x: LineEnsemble, rows: Sequence[int], rng: np.random.Generator
) -> LineEnsemble:
    """Replace the listed row polynomials by uniformly random different polynomials."""
    polys = x.polys.copy()
    for r in rows:
        while True:
            cand = rng.integers(0, x.p, size=x.d_x + 1)
            if not np.array_equal(cand, polys[r]):
                polys[r] = cand
                break
    return LineEnsemble(x.p, x.d_x, polys)


def corrupt_skews(
    y: SkewEnsemble, lines: Sequence[int], rng: np.random.Generator
) -> SkewEnsemble:
    polys = y.polys.copy()
    for r in lines:
        while True:
            cand = rng.integers(0, y.p, size=y.d_y + 1)
            if not np.array_equal(cand, polys[r]):
                polys[r] = cand
                break
    return SkewEnsemble(y.p, y.d_y, polys)


def decoder_trial(
    p: int, d_x: int, d_y: int, seed: int, rows: int = 1, lines: int = 0
) -> Dict[str, Any]:
    """
    One seeded experiment: random codeword, `rows` corrupted row polynomials and `lines`
    corrupted skew polynomials, then agreement decoding.

    Returns:
        Row dict with the decode outcome and whether the original codeword came back
    """
    code = cached_local_code(p, d_x, d_y)
    rng = counter_rng(seed, p, d_x, d_y)
    original = code.encode(rng.integers(0, p, size=code.dim))
    x, y = restrict(original, d_x, d_y, p)
    bad_rows = rng.choice(p * p, size=rows, replace=False) if rows else []
    bad_lines = rng.choice(p * p, size=lines, replace=False) if lines else []
    x = corrupt_rows(x, bad_rows, rng)
    y = corrupt_skews(y, bad_lines, rng)
    result = agreement_decode(x, y)
    recovered = result.values is not None and bool(np.array_equal(result.values, original))
    return {
        "p": p,
        "dx": d_x,
        "dy": d_y,
        "seed": seed,
        "corruption": {"rows": rows, "lines": lines},
        "deltaCubed": result.delta_cubed,
        "e": result.locator_degree,
        "status": result.status.value,
        "lineDisagreement": result.line_disagreement,
        "hypothesisHolds": result.hypothesis_ok,
        "recovered": recovered,
    }
