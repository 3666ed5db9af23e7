"""
Verification Service

Check suites behind the CLI commands. Each suite runs library operations on a concrete
instance and turns the outcome into CheckRecords (pass, fail, report-only or vacuous).
"""

import logging
import math
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np

from hdxcodes.config import settings
from hdxcodes.models.schemas import CheckRecord, CheckStatus, CorrectionRow, DecodeRow
from hdxcodes.services import global_code as gc
from hdxcodes.services.algebra import BudgetExceededError, counter_rng, rank_nullspace
from hdxcodes.services.coset_complex import (
    TYPES,
    ComplexInstance,
    det_filter_keys,
    sl3_order,
)
from hdxcodes.services.embedding import (
    designated_rm_polys,
    rm_restrict,
    star_affine_dimension,
    verify_all_lines,
)
from hdxcodes.services.local_code import (
    RSSpec,
    binomial_matrix_rank,
    build_local_code,
    coeff_support_check,
    local_agreement_parameters,
    local_dim_formula,
    local_min_distance,
    rs_window_checks,
)
from hdxcodes.services.local_decoder import (
    agreement_decode,
    brute_nearest,
    cached_local_code,
    corrupt_rows,
    decoder_trial,
    merge_views,
    restrict,
)
from hdxcodes.services.walks import (
    alon_chung_check,
    link_structure,
    spectral_report,
    updown_check,
    walk_matrices,
)

logger = logging.getLogger(__name__)

EIG_TOL = 1e-9


class VerificationError(Exception):
    """Custom exception for verification suites that cannot run."""
    pass


# ---------------------------------------------------------------------------
# build / stats
# ---------------------------------------------------------------------------


def census_checks(x: ComplexInstance, budget_enum: Optional[int] = None) -> List[CheckRecord]:
    """Group order, face counts, star sizes and the determinant-1 filter comparison."""
    q, n = x.q, x.n
    records: List[CheckRecord] = []
    expected = sl3_order(q, n)
    if x.group.expected_order is not None:
        records.append(
            CheckRecord.from_bool(
                "group_order",
                "G = SL3(R_n) when phi is primitive",
                x.num_triangles == expected,
                group_order=x.num_triangles,
                sl3_order=expected,
            )
        )
    else:
        records.append(
            CheckRecord.report(
                "group_order",
                "G = SL3(R_n) when phi is primitive",
                group_order=x.num_triangles,
                sl3_order=expected,
            )
        )
    counts = x.counts()
    ok = (
        counts["vertices"] * q**3 == 3 * counts["triangles"]
        and counts["edges"] * q == 3 * counts["triangles"]
    )
    records.append(CheckRecord.from_bool("face_counts", "|X(0)| = 3|G|/q^3, |X(1)| = 3|G|/q", ok, **counts))

    star_sizes = {len(set(row)) for row in x.vertex_star.tolist()}
    edge_sizes = {len(set(row)) for row in x.edge_star.tolist()}
    records.append(
        CheckRecord.from_bool(
            "star_sizes",
            "every vertex lies in q^3 = |K_i| triangles, every edge in q",
            star_sizes == {q**3} and edge_sizes == {q},
            vertex_star_sizes=sorted(star_sizes),
            edge_star_sizes=sorted(edge_sizes),
        )
    )
    try:
        keys = det_filter_keys(x.ring, budget_enum)
        records.append(
            CheckRecord.from_bool(
                "closure_equals_det_filter",
                "the generated group is every determinant-1 matrix over R_n",
                bool(np.array_equal(keys, x.group.keys)),
                det_one_matrices=int(keys.size),
            )
        )
    except BudgetExceededError as e:
        records.append(
            CheckRecord(
                name="closure_equals_det_filter",
                anchor="the generated group is every determinant-1 matrix over R_n",
                status=CheckStatus.VACUOUS,
                values={"skipped": str(e), **e.size_report},
            )
        )
    return records


def spectral_checks(x: ComplexInstance) -> List[CheckRecord]:
    """Vertex-link spectra, skeleton spectrum, swap-walk bound and line embeddings."""
    report = spectral_report(x)
    target = 1.0 / math.sqrt(x.q)
    worst = max(abs(v - target) for v in report.link_lambda2)
    records = [
        CheckRecord.from_bool(
            "link_lambda2",
            "|lambda_2| of every vertex link equals 1/sqrt(q)",
            worst <= EIG_TOL,
            max_link_lambda2=report.max_link_lambda2,
            expected=target,
            max_deviation=worst,
        ),
        CheckRecord.from_bool(
            "link_shape",
            "vertex links are connected bipartite q-regular graphs",
            report.link_connected and report.link_bipartite and report.link_regular,
            connected=report.link_connected,
            bipartite=report.link_bipartite,
            regular=report.link_regular,
        ),
        CheckRecord.report(
            "skeleton_lambda2",
            "second eigenvalue of the 1-skeleton",
            skeleton_lambda2=report.skeleton_lambda2,
            method=report.values.get("skeleton_method"),
        ),
    ]
    swap_ok = report.swap_lambda2 <= report.swap_bound + EIG_TOL
    records.append(
        CheckRecord(
            name="swap_walk_bound",
            anchor="second eigenvalue of the swap-composed walk is at most 3*gamma",
            status=(
                CheckStatus.VACUOUS
                if report.swap_bound_vacuous
                else (CheckStatus.PASS if swap_ok else CheckStatus.FAIL)
            ),
            values={
                "swap_lambda2": report.swap_lambda2,
                "bound": report.swap_bound,
                "holds": swap_ok,
            },
        )
    )
    lines = verify_all_lines(x)
    records.append(
        CheckRecord.from_bool(
            "edge_lines",
            "iota of every edge star is the affine line v0 + alpha*v_i",
            lines["zero_directions"] == 0 and lines["off_line"] == 0 and lines["independent_directions"],
            **lines,
        )
    )
    type1 = x.vertices_of_type(1)
    dims = {star_affine_dimension(x, int(v)) for v in type1}
    records.append(
        CheckRecord.from_bool(
            "vertex_star_affine_dimension",
            "every type-1 vertex star embeds as a 3-dimensional affine subspace",
            dims == {3},
            dimensions=sorted(dims),
            vertices=int(type1.size),
        )
    )
    return records


# ---------------------------------------------------------------------------
# code
# ---------------------------------------------------------------------------


def _ldpc_checks(code: gc.GlobalCodeSpec, rng: np.random.Generator) -> CheckRecord:
    q = code.q
    weights_ok = True
    annihilate_ok = True
    observed: Dict[str, List[int]] = {}
    for k in TYPES:
        d = code.degrees[k - 1]
        sparse = rs_window_checks(q, d)
        weights = np.count_nonzero(sparse, axis=1)
        observed[f"type{k}"] = sorted(set(weights.tolist()))
        weights_ok &= bool(np.all(weights == d + 2))
        words = np.stack([RSSpec(q, d).encode(rng.integers(0, q, size=d + 1)) for _ in range(100)])
        annihilate_ok &= not np.any((words @ sparse.T) % q)
    per_edge_ok = True
    if code.sparse.shape[0]:
        per_edge_ok = bool(np.all(np.diff(code.sparse.indptr) == np.repeat(
            [code.degrees[k - 1] + 2 for k in TYPES],
            [code.complex.edges_of_type(k).size * max(q - code.degrees[k - 1] - 1, 0) for k in TYPES],
        )))
    return CheckRecord.from_bool(
        "sparse_checks",
        "parity checks of length d+2 that annihilate RS codewords and span the dual",
        weights_ok and annihilate_ok and per_edge_ok and code.sparse_spans_dense,
        weights=observed,
        annihilate=annihilate_ok,
        rows_have_weight=per_edge_ok,
        spans_dense=code.sparse_spans_dense,
        sparse_rows=code.sparse.shape[0],
    )


def _membership_checks(code: gc.GlobalCodeSpec, rng: np.random.Generator) -> List[CheckRecord]:
    x = code.complex
    q = x.q
    records: List[CheckRecord] = []
    ones = np.ones(x.num_triangles, dtype=np.int64)
    records.append(
        CheckRecord.from_bool("all_ones_member", "constant words are codewords", gc.membership(ones, code).member)
    )

    member = gc.random_codeword(code, rng)
    tri = int(rng.integers(0, x.num_triangles))
    flipped = member.copy()
    flipped[tri] = (flipped[tri] + 1) % q
    result = gc.membership(flipped, code)
    expected = sorted(int(e) for e in x.tri_edge[tri])
    exact_edges = result.failing_edges == expected if max(code.degrees) <= q - 2 else True
    records.append(
        CheckRecord.from_bool(
            "single_change_detected",
            "a single-symbol change fails exactly the three edges of its triangle",
            gc.membership(member, code).member and not result.member and exact_edges,
            triangle=tri,
            failing_edges=result.failing_edges,
            triangle_edges=expected,
        )
    )

    agree = 0
    members = 0
    for i in range(100):
        w = gc.random_codeword(code, rng) if i % 2 == 0 else rng.integers(0, q, size=x.num_triangles)
        by_edges = gc.membership(w, code).member
        by_lines = gc.line_membership(w, code)
        agree += by_edges == by_lines
        members += by_edges
    records.append(
        CheckRecord.from_bool(
            "membership_equivalence",
            "edge-star RS membership equals low degree along every embedded line",
            agree == 100,
            agreements=agree,
            members=members,
            words=100,
        )
    )

    polys = designated_rm_polys(x)
    words = np.stack([rm_restrict(poly, x) for poly in polys])
    in_code = all(gc.membership(w, code).member for w in words)
    rank = rank_nullspace(words, q).rank
    records.append(
        CheckRecord.from_bool(
            "designated_rm_members",
            "restrictions of 1, u1, u2, u3 are independent codewords",
            in_code and rank == len(polys),
            members=in_code,
            rank=rank,
        )
    )
    return records


def _dimension_checks(code: gc.GlobalCodeSpec, budget_rank: Optional[int]) -> List[CheckRecord]:
    x = code.complex
    q = x.q
    rows_expected = sum(
        x.edges_of_type(k).size * max(q - code.degrees[k - 1] - 1, 0) for k in TYPES
    )
    records = [
        CheckRecord.from_bool(
            "dense_row_count",
            "one monomial check per edge and per degree above d_i",
            code.dense.shape[0] == rows_expected,
            dense_rows=code.dense.shape[0],
            expected=rows_expected,
            length=code.length,
        )
    ]
    dim = gc.dimension(code, budget_rank)
    d = min(code.degrees)
    rm_dim = math.comb(d + 3, 3)
    if dim.exact:
        gen_ok = True
        if code.generator is not None and code.generator.shape[0]:
            gen_ok = not np.any((code.dense @ code.generator.T) % q)
        records.append(
            CheckRecord.from_bool(
                "dimension",
                "dim(C) = |X(2)| - rank(parity rows), at least dim RM_d in three variables",
                gen_ok
                and dim.value + (dim.rank or 0) == code.length
                and dim.value >= min(rm_dim, code.length),
                dimension=dim.value,
                rank=dim.rank,
                rm_lower_bound=rm_dim,
                generators_are_members=gen_ok,
                exact=True,
            )
        )
    else:
        records.append(
            CheckRecord(
                name="dimension",
                anchor="dim(C) >= |X(2)| - (number of parity rows)",
                status=CheckStatus.REPORT_ONLY,
                values={
                    "lower_bound": dim.value,
                    "rows": dim.rows,
                    "length": code.length,
                    "rate_lower_bound": dim.value / code.length,
                    "budget_flag": dim.budget_flag,
                    "exact": False,
                },
            )
        )
    return records


def _tester_checks(code: gc.GlobalCodeSpec, rng: np.random.Generator) -> List[CheckRecord]:
    x = code.complex
    member = gc.random_codeword(code, rng)
    corrupted = gc.corrupt(member, 1, int(rng.integers(0, 2**31)), x.q)
    p_member = gc.vertex_tester(member, code)
    p_corrupt = gc.vertex_tester(corrupted, code)
    two_member = gc.two_query_views(member, code)
    two_corrupt = gc.two_query_views(corrupted, code)
    rej_member = two_member.rejection_fraction()
    rej_corrupt = two_corrupt.rejection_fraction()
    pullback = gc.local_pullback_failures(code)
    return [
        CheckRecord.from_bool(
            "local_pullbacks",
            "every chart pullback of a local basis vector passes the edge checks at its vertex",
            pullback == 0,
            failures=pullback,
        ),
        CheckRecord.from_bool(
            "vertex_tester",
            "p = Pr_v[f restricted to star(v) is not in C_v]",
            p_member == 0.0 and math.isclose(p_corrupt, 3 / x.num_vertices),
            member=p_member,
            one_corrupted=p_corrupt,
            expected=3 / x.num_vertices,
        ),
        CheckRecord.from_bool(
            "two_query_tester",
            "two-query edge test on decoded vertex symbols",
            rej_member == 0.0 and rej_corrupt > 0.0,
            member_rejection=rej_member,
            one_corrupted_rejection=rej_corrupt,
        ),
        CheckRecord.report(
            "vertex_tester_random_word",
            "p for a uniformly random word",
            p=gc.vertex_tester(rng.integers(0, x.q, size=x.num_triangles), code),
        ),
    ]


def _distance_checks(code: gc.GlobalCodeSpec, gamma: float, seed: int) -> List[CheckRecord]:
    try:
        probe = gc.min_weight_probe(code, gamma, budget=2000, seed=seed)
    except BudgetExceededError as e:
        return [
            CheckRecord(
                name="min_weight",
                anchor="relative distance at least (delta - 2 gamma)(delta - gamma) delta",
                status=CheckStatus.VACUOUS,
                values={"skipped": str(e), **e.size_report},
            )
        ]
    status = CheckStatus.VACUOUS if probe.bound_vacuous else CheckStatus.PASS
    if not probe.bound_vacuous and probe.exact and probe.weight < probe.distance_bound * code.length:
        status = CheckStatus.FAIL
    return [
        CheckRecord(
            name="min_weight",
            anchor="relative distance at least (delta - 2 gamma)(delta - gamma) delta",
            status=status,
            values={
                "weight": probe.weight,
                "relative": probe.weight / code.length,
                "exact": probe.exact,
                "method": probe.method,
                "distance_bound": probe.distance_bound,
                "gamma": gamma,
            },
        )
    ]


def ltc_parameters(code: gc.GlobalCodeSpec, eps: float, rho: float) -> Dict[str, Any]:
    """
    Classical LTC parameters of the sparse-check form: q0 = d+2 queries and m0 sparse
    checks on the edges through a vertex, giving (q0, eps/m0, rho(m0 t)).
    """
    q = code.q
    m0 = max(
        q * q * sum(max(q - code.degrees[k - 1] - 1, 0) for k in TYPES if k != i) for i in TYPES
    )
    return {
        "queries": max(code.degrees) + 2,
        "local_checks": m0,
        "eps": eps / m0 if m0 else None,
        "rho_scale": rho * m0,
    }


def code_suite(
    x: ComplexInstance,
    degrees: Sequence[int],
    seed: int = 0,
    budget_rank: Optional[int] = None,
    gamma: Optional[float] = None,
) -> Tuple[gc.GlobalCodeSpec, List[CheckRecord]]:
    """Assembly, dimension, membership, testers, distance probe and LTC parameters."""
    rng = counter_rng(seed, 3)
    code = gc.assemble_code(x, degrees)
    records = _dimension_checks(code, budget_rank)
    records.append(_ldpc_checks(code, rng))
    records.extend(_membership_checks(code, rng))
    records.extend(_tester_checks(code, rng))
    if gamma is None:
        gamma = 1.0 / math.sqrt(x.q)
    if code.generator is not None or code.dense.shape[0] == 0:
        records.extend(_distance_checks(code, gamma, seed))
    params = gc.agreement_parameters_for(code, gamma)
    records.append(
        CheckRecord(
            name="ltc_parameters",
            anchor="agreement testability implies local testability with q0 = d+2 queries",
            status=CheckStatus.VACUOUS if params["vacuous"] else CheckStatus.REPORT_ONLY,
            values={
                **params,
                **ltc_parameters(code, params["eps"] or 0.0, params["D"]),
            },
        )
    )
    return code, records


# ---------------------------------------------------------------------------
# localrate
# ---------------------------------------------------------------------------


def local_rate_table(p: int, dmax: int, cross_check_limit: int = 7) -> List[Dict[str, Any]]:
    """One row per (dx, dy) with dx, dy <= dmax and dx + dy + 2 <= p."""
    rows = []
    for d_x in range(dmax + 1):
        for d_y in range(dmax + 1):
            if d_x + d_y + 2 > p:
                continue
            spec = build_local_code(p, d_x, d_y)
            support = coeff_support_check(spec)
            row: Dict[str, Any] = {
                "dx": d_x,
                "dy": d_y,
                "formula": local_dim_formula(d_x, d_y),
                "rank": spec.dim,
                "support_ok": support.ok,
            }
            if p <= cross_check_limit:
                row["evaluation_rank"] = build_local_code(p, d_x, d_y, method="evaluation").dim
            if p**spec.dim <= settings.budget_enum and spec.dim:
                row["min_distance"] = local_min_distance(spec)
            eps0, rho0 = local_agreement_parameters(p, d_x, d_y)
            row["eps0"] = eps0
            row["rho0_coefficient"] = rho0
            rows.append(row)
    return rows


def binomial_sweep(primes: Sequence[int]) -> Dict[str, Any]:
    """Full rank of (C(m-i, k-j)) for every r <= k <= m < p."""
    checked = failures = 0
    for p in primes:
        for m in range(p):
            for k in range(m + 1):
                for r in range(k + 1):
                    checked += 1
                    failures += not binomial_matrix_rank(m, k, r, p).full_rank
    return {"primes": list(primes), "matrices": checked, "rank_deficient": failures}


def localrate_suite(p: int, dmax: int) -> Tuple[List[Dict[str, Any]], List[CheckRecord]]:
    rows = local_rate_table(p, dmax)
    mismatched = [(r["dx"], r["dy"]) for r in rows if r["rank"] != r["formula"]]
    cross = [(r["dx"], r["dy"]) for r in rows if r.get("evaluation_rank", r["rank"]) != r["rank"]]
    support = [(r["dx"], r["dy"]) for r in rows if not r["support_ok"]]
    binom = binomial_sweep([p])
    records = [
        CheckRecord.from_bool(
            "local_rate",
            "dim C_{dx,dy} = (dx+1)(dy+1)(dx+dy+2)/2 for p >= dx+dy+2",
            not mismatched,
            p=p,
            rows=rows,
            mismatched=mismatched,
        ),
        CheckRecord.from_bool(
            "evaluation_cross_check",
            "the evaluation-domain constraint matrix gives the same dimension",
            not cross,
            mismatched=cross,
        ),
        CheckRecord.from_bool(
            "coefficient_support",
            "c_ijk = 0 whenever j + k > dx + dy",
            not support,
            violations=support,
        ),
        CheckRecord.from_bool(
            "binomial_matrix",
            "the binomial matrix has full rank over F_p",
            binom["rank_deficient"] == 0,
            **binom,
        ),
    ]
    return rows, records


# ---------------------------------------------------------------------------
# identities
# ---------------------------------------------------------------------------


def identities_suite(
    x: ComplexInstance, seed: int, trials: int, link_primes: Sequence[int] = (3, 5, 7, 11, 13)
) -> List[CheckRecord]:
    """Walk identities, up/down inequalities, Alon-Chung sampling, link structure, binomials."""
    walks = walk_matrices(x, seed)
    tol = settings.symmetry_tol
    gamma = 1.0 / math.sqrt(x.q)
    records = [
        CheckRecord.from_bool(
            "du_identity",
            "DU = 2/3 M+ + 1/3 I",
            walks.residuals["up_identity"] < tol,
            residual=walks.residuals["up_identity"],
            sampled=walks.sampled,
        ),
        CheckRecord.from_bool(
            "swap_identity",
            "M+ UD = 1/2 S D + 1/2 UD",
            walks.residuals["swap_identity"] < tol,
            residual=walks.residuals["swap_identity"],
            sampled=walks.sampled,
        ),
        CheckRecord.from_bool(
            "row_stochastic",
            "walk operators are Markov",
            walks.residuals["row_sum"] < tol,
            residual=walks.residuals["row_sum"],
        ),
    ]
    updown = updown_check(walks, gamma, trials, seed)
    records.append(
        CheckRecord.from_bool(
            "updown_inequality",
            "<g, M+ g> <= <g, (UD + gamma I) g>, and for random edge sets",
            updown["max_vector_excess"] <= EIG_TOL and updown["max_set_excess"] <= EIG_TOL,
            gamma=gamma,
            **updown,
        )
    )
    alon = [alon_chung_check(q, trials, seed) for q in link_primes]
    records.append(
        CheckRecord.from_bool(
            "alon_chung",
            "|T| >= (delta - gamma)|V| for vertex subsets of the link graph",
            all(a["min_slack"] >= -EIG_TOL for a in alon),
            samples=alon,
        )
    )
    structure = {q: link_structure(q) for q in link_primes}
    records.append(
        CheckRecord.from_bool(
            "link_structure",
            "B B^T = (J - I) (x) J + q I and lambda_2 = 1/sqrt(q)",
            all(
                s["gram_matches"] and abs(s["lambda2"] - s["expected"]) <= EIG_TOL
                for s in structure.values()
            ),
            links={str(q): s for q, s in structure.items()},
        )
    )
    binom = binomial_sweep((5, 7, 11, 13))
    records.append(
        CheckRecord.from_bool(
            "binomial_matrix",
            "the binomial matrix has full rank over F_p",
            binom["rank_deficient"] == 0,
            **binom,
        )
    )
    return records


# ---------------------------------------------------------------------------
# agree-local
# ---------------------------------------------------------------------------


def agreement_suite(
    p: int, d_x: int, d_y: int, seed: int, trials: int, rows: int = 1, oracle_trials: int = 20
) -> Tuple[List[DecodeRow], List[CheckRecord]]:
    """Seeded agreement-decoder trials plus the exhaustive-oracle comparison when affordable."""
    results = [DecodeRow.model_validate(decoder_trial(p, d_x, d_y, seed + t, rows=rows)) for t in range(trials)]
    in_regime = [r for r in results if r.hypothesis_holds]
    recovered = sum(r.recovered for r in in_regime)
    bound_ok = all(
        r.line_disagreement is not None and r.line_disagreement <= 4 * r.delta_cubed ** (1 / 3) + 1e-12
        for r in in_regime
    )
    records = [
        CheckRecord.from_bool(
            "decoder_recovery",
            "p >= 2(dx+dy) + 5 delta p implies a codeword Q close to both ensembles",
            recovered == len(in_regime) and bound_ok,
            trials=trials,
            in_regime=len(in_regime),
            recovered=recovered,
            line_bound_holds=bound_ok,
        ),
        CheckRecord.report(
            "decoder_statuses",
            "decode outcomes",
            counts={s: sum(r.status == s for r in results) for s in sorted({r.status for r in results})},
        ),
    ]
    if len(in_regime) < trials:
        records.append(
            CheckRecord(
                name="decoder_hypothesis",
                anchor="p >= 2(dx+dy) + 5 delta p",
                status=CheckStatus.VACUOUS,
                values={"outside_regime": trials - len(in_regime)},
            )
        )

    spec = cached_local_code(p, d_x, d_y)
    if p**spec.dim <= settings.budget_enum:
        records.append(oracle_consistency(p, d_x, d_y, seed, oracle_trials))
    return results, records


def oracle_consistency(p: int, d_x: int, d_y: int, seed: int, trials: int) -> CheckRecord:
    """
    Agreement decoding against exhaustive nearest-codeword search, on clean ensembles and
    on ensembles with one corrupted row.
    """
    spec = cached_local_code(p, d_x, d_y)
    rng = counter_rng(seed, p, 12)
    clean_ok = 0
    decoded = agreed = 0
    for t in range(trials):
        word = spec.encode(rng.integers(0, p, size=spec.dim))
        x, y = restrict(word, d_x, d_y, p)
        result = agreement_decode(x, y)
        nearest = brute_nearest(merge_views(x, y), spec)
        clean_ok += result.values is not None and bool(np.array_equal(result.values, nearest.codeword))

        bad = corrupt_rows(x, [int(rng.integers(0, p * p))], rng)
        result = agreement_decode(bad, y)
        if result.values is not None:
            decoded += 1
            nearest = brute_nearest(merge_views(bad, y), spec)
            agreed += bool(np.array_equal(result.values, nearest.codeword))
    return CheckRecord.from_bool(
        "oracle_consistency",
        "the agreement decoder returns the nearest codeword",
        clean_ok == trials and agreed == decoded,
        clean=clean_ok,
        corrupted_decoded=decoded,
        corrupted_agreed=agreed,
        trials=trials,
    )


# ---------------------------------------------------------------------------
# correct
# ---------------------------------------------------------------------------


def correction_trial(
    code: gc.GlobalCodeSpec,
    seed: int,
    corrupt: int,
    mode: str,
    budget_enum: Optional[int] = None,
) -> CorrectionRow:
    """Random member, `corrupt` changed triangles, local views, greedy correction."""
    rng = counter_rng(seed, 17)
    member = gc.random_codeword(code, rng)
    word = gc.corrupt(member, corrupt, seed, code.q)
    views = gc.views_from_word(word, code, mode=mode, budget=budget_enum)
    result = gc.local_correction(views, code, budget=budget_enum)
    trace = result.trace
    recovered = result.codeword is not None and bool(np.array_equal(result.codeword, member))
    distance = None
    if result.codeword is not None:
        distance = float(np.mean(result.codeword != word))
    return CorrectionRow(
        seed=seed,
        corrupted=corrupt,
        mode=mode,
        initial_alpha=trace.initial_alpha,
        final_alpha=trace.final_alpha,
        steps=len(trace.steps),
        sweeps=trace.sweeps,
        outcome=trace.outcome,
        recovered=recovered,
        monotone=trace.monotone,
        within_step_bound=trace.within_step_bound,
        changed_vertex_fraction=trace.changed_vertex_fraction,
        proximity_bound=trace.proximity_bound,
        bottom_fraction=float(views.bottom.mean()),
        distance_to_result=distance,
    )


def correction_suite(
    code: gc.GlobalCodeSpec,
    seed: int,
    trials: int,
    max_corrupt: int,
    mode: str = "nearest",
    budget_enum: Optional[int] = None,
    success_rate: float = 0.95,
) -> Tuple[List[CorrectionRow], List[CheckRecord]]:
    """Corruption/correction Monte Carlo with trace properties and parameter reporting."""
    rows = [
        correction_trial(code, seed + t, 1 + t % max(max_corrupt, 1), mode, budget_enum)
        for t in range(trials)
    ]
    rate = sum(r.recovered for r in rows) / trials
    successes = [r for r in rows if r.outcome == "codeword"]
    records = [
        CheckRecord(
            name="correction_success",
            anchor="the local algorithm reaches a codeword from nearby local views",
            status=(
                (CheckStatus.PASS if rate >= success_rate else CheckStatus.FAIL)
                if mode == "nearest"
                else CheckStatus.REPORT_ONLY
            ),
            values={"rate": rate, "threshold": success_rate, "trials": trials, "mode": mode},
        ),
        CheckRecord.from_bool(
            "correction_trace",
            "the disagreement count drops at every step and halts within alpha(z0)|X(1)| steps",
            all(r.monotone and r.within_step_bound for r in rows),
            monotone=sum(r.monotone for r in rows),
            step_bound=sum(r.within_step_bound for r in rows),
            trials=trials,
        ),
        CheckRecord.from_bool(
            "correction_proximity",
            "final views differ from the initial ones on at most D alpha(z0) of the vertices",
            all(r.changed_vertex_fraction <= r.proximity_bound + 1e-12 for r in successes),
            checked=len(successes),
        ),
        CheckRecord.report(
            "testability_reduction",
            "dist(f, h) <= Pr[v not accepted] + Pr[z_v differs from h]",
            bottom_fraction=[r.bottom_fraction for r in rows],
            distance_to_result=[r.distance_to_result for r in rows],
            changed_vertex_fraction=[r.changed_vertex_fraction for r in rows],
        ),
    ]
    gamma = 1.0 / math.sqrt(code.q)
    params = gc.agreement_parameters_for(code, gamma)
    records.append(
        CheckRecord(
            name="agreement_parameters",
            anchor="eps = delta^2/128 min(eps0, rho0^-1(delta/4)) with gamma < min(delta/8, eps)",
            status=CheckStatus.VACUOUS if params["vacuous"] else CheckStatus.REPORT_ONLY,
            values={**params, "gamma": gamma},
        )
    )
    return rows, records


# ---------------------------------------------------------------------------
# multcheck
# ---------------------------------------------------------------------------


def multiplication_suite(
    x: ComplexInstance, degrees: Sequence[int], seed: int, trials: int
) -> List[CheckRecord]:
    """Products land in the degree-sum code; left translations are automorphisms."""
    rng = counter_rng(seed, 5)
    q = x.q
    code = gc.assemble_code(x, degrees)
    records: List[CheckRecord] = []

    sums = tuple(min(2 * d, q - 1) for d in degrees)
    if all(2 * d < q for d in degrees):
        product_code = gc.assemble_code(x, sums)
        passed = 0
        for _ in range(trials):
            w1, w2 = gc.random_codeword(code, rng), gc.random_codeword(code, rng)
            passed += gc.membership(gc.multiply(w1, w2, q), product_code).member
        records.append(
            CheckRecord.from_bool(
                "multiplication",
                "w (.) w' lies in the code of degrees d_i + d_i'",
                passed == trials,
                passed=passed,
                trials=trials,
                product_degrees=sums,
            )
        )
    else:
        records.append(
            CheckRecord(
                name="multiplication",
                anchor="w (.) w' lies in the code of degrees d_i + d_i'",
                status=CheckStatus.VACUOUS,
                values={"reason": "degree sums reach q"},
            )
        )

    w = gc.random_codeword(code, rng)
    ones = np.ones(x.num_triangles, dtype=np.int64)
    records.append(
        CheckRecord.from_bool(
            "multiplicative_identity", "w (.) 1 = w", bool(np.array_equal(gc.multiply(w, ones, q), w))
        )
    )

    identity = int(x.group.index_of(x.ring.identity_matrix()[None])[0])
    preserved = inverse_ok = 0
    for _ in range(trials):
        g = int(rng.integers(0, x.num_triangles))
        member = gc.random_codeword(code, rng)
        moved = gc.translate(member, g, code)
        preserved += gc.membership(moved, code).member
        back = gc.translate(moved, gc.inverse_index(x, g), code)
        inverse_ok += bool(np.array_equal(back, member))
    targets = rng.choice(x.num_triangles, size=min(100, x.num_triangles), replace=False)
    records.append(
        CheckRecord.from_bool(
            "translation",
            "w^g(g') = w(g g') is a codeword and the action is transitive",
            preserved == trials
            and inverse_ok == trials
            and bool(np.array_equal(gc.translate(w, identity, code), w))
            and gc.translation_orbit_reaches(x, targets.tolist(), seed),
            preserved=preserved,
            inverse_roundtrip=inverse_ok,
            trials=trials,
        )
    )
    return records
