"""
CLI Command Handlers

One handler per subcommand. Each builds or loads the instance it needs, runs the
matching verification suite and returns a Report; the router prints it and maps it to
an exit code.
"""

import logging
import time
from contextlib import contextmanager
from pathlib import Path
from typing import Dict, Iterator, Optional

from hdxcodes.cli.router import CommandRouter, UsageError
from hdxcodes.config import settings
from hdxcodes.models.schemas import CheckRecord, LineExport, Report, RunConfig
from hdxcodes.services import global_code as gc
from hdxcodes.services import verification
from hdxcodes.services.algebra import Ring, primitive_modulus
from hdxcodes.services.coset_complex import ComplexInstance, build_complex
from hdxcodes.services.embedding import line_of_edge
from hdxcodes.services.local_decoder import cached_local_code
from hdxcodes.storage.repository import (
    CodewordRepository,
    InstanceRepository,
    LocalCodeRepository,
    MatrixRepository,
    ReportRepository,
)

logger = logging.getLogger(__name__)

# Create router for handlers
router = CommandRouter(name="hdx")


@contextmanager
def timed(timing: Dict[str, float], key: str) -> Iterator[None]:
    start = time.perf_counter()
    try:
        yield
    finally:
        timing[key] = round(time.perf_counter() - start, 6)


def new_report(config: RunConfig) -> Report:
    return Report(
        command=config.command,
        config=config.model_dump(mode="json"),
        seed=config.seed,
    )


def budget(value: Optional[int], default: int) -> int:
    """CLI budget flags override settings for one run."""
    return value if value is not None else default


def resolve_ring(config: RunConfig) -> Ring:
    if config.phi == "auto":
        return primitive_modulus(config.q, config.n).as_ring(config.q)
    return Ring(config.q, tuple(config.phi))


def load_or_build(config: RunConfig, timing: Dict[str, float]) -> ComplexInstance:
    """
    Instance from --in when given, otherwise built from --q/--n/--phi.

    Raises:
        VerificationError: If the stored instance disagrees with explicit --q/--n
    """
    group_budget = budget(config.budget_group, settings.budget_group)
    with timed(timing, "instance"):
        if config.in_path:
            repo = InstanceRepository()
            header = repo.load_header(config.in_path)
            if (header.q, header.n) != (config.q, config.n):
                raise verification.VerificationError(
                    f"{config.in_path} holds q={header.q}, n={header.n}; "
                    f"flags say q={config.q}, n={config.n}"
                )
            return repo.load(config.in_path, group_budget)
        return build_complex(resolve_ring(config), group_budget)


def save_report(report: Report, config: RunConfig) -> None:
    if config.out_path:
        ReportRepository().save(report, config.out_path)
        logger.info(f"Report written to {config.out_path}")


@router.command("build", help="Construct and serialize a coset-complex instance")
def cmd_build(config: RunConfig) -> Report:
    report = new_report(config)
    x = load_or_build(config, report.timing)
    with timed(report.timing, "census"):
        for record in verification.census_checks(x, budget(config.budget_enum, settings.budget_enum)):
            report.add(record)
    report.add(
        CheckRecord.report(
            "instance",
            "header of the stored instance",
            q=x.q,
            n=x.n,
            phi=list(x.phi),
            group_order=x.num_triangles,
            **x.counts(),
        )
    )
    if config.out_path:
        InstanceRepository().save(x, config.out_path)
    return report


@router.command("stats", help="Face counts and spectral report")
def cmd_stats(config: RunConfig) -> Report:
    report = new_report(config)
    x = load_or_build(config, report.timing)
    report.add(CheckRecord.report("counts", "face counts of X", **x.counts()))
    with timed(report.timing, "spectra"):
        for record in verification.spectral_checks(x):
            report.add(record)
    save_report(report, config)
    return report


@router.command("code", help="Assemble the global code, its dimension and membership suite")
def cmd_code(config: RunConfig) -> Report:
    report = new_report(config)
    x = load_or_build(config, report.timing)
    with timed(report.timing, "code"):
        code, records = verification.code_suite(
            x,
            config.degrees,
            seed=config.seed or 0,
            budget_rank=budget(config.budget_rank, settings.budget_rank),
        )
    for record in records:
        report.add(record)
    if config.out_path:
        out = Path(config.out_path)
        MatrixRepository().save(code.dense, code.q, out.with_suffix(".parity.mtx"))
        MatrixRepository().save(code.sparse, code.q, out.with_suffix(".sparse.mtx"))
        lines = [
            LineExport(**line_of_edge(e, x).export()).model_dump()
            for e in range(min(x.num_edges, 16))
        ]
        report.add(CheckRecord.report("line_samples", "embedded lines of the first edges", lines=lines))
        if code.generator is not None and code.generator.shape[0]:
            CodewordRepository().save(code.generator[0], code.q, out.with_suffix(".codeword.txt"))
    save_report(report, config)
    return report


@router.command("localrate", help="Dimension sweep of the local codes C_{dx,dy}")
def cmd_localrate(config: RunConfig) -> Report:
    assert config.p is not None and config.dmax is not None
    report = new_report(config)
    with timed(report.timing, "localrate"):
        _, records = verification.localrate_suite(config.p, config.dmax)
    for record in records:
        report.add(record)
    if config.out_path:
        d_x, d_y = config.degrees[0], config.degrees[1]
        if d_x + d_y + 2 <= config.p:
            LocalCodeRepository().save(
                cached_local_code(config.p, d_x, d_y), Path(config.out_path).with_suffix(".local.json")
            )
    save_report(report, config)
    return report


@router.command("identities", help="Walk identities, up/down and Alon-Chung sampling, binomial sweep")
def cmd_identities(config: RunConfig) -> Report:
    assert config.seed is not None
    report = new_report(config)
    x = load_or_build(config, report.timing)
    with timed(report.timing, "identities"):
        for record in verification.identities_suite(x, config.seed, config.trials):
            report.add(record)
    save_report(report, config)
    return report


@router.command("agree-local", help="Agreement-decoder Monte Carlo on C_{dx,dy}")
def cmd_agree_local(config: RunConfig) -> Report:
    assert config.seed is not None
    p = config.p or config.q
    d_x, d_y = config.degrees[0], config.degrees[1]
    report = new_report(config)
    with timed(report.timing, "trials"):
        rows, records = verification.agreement_suite(
            p, d_x, d_y, config.seed, config.trials, rows=config.corrupt
        )
    for record in records:
        report.add(record)
    report.add(CheckRecord.report("trials", "decoder experiment rows", rows=[r.row() for r in rows]))
    save_report(report, config)
    return report


@router.command("correct", help="Corruption and local-correction Monte Carlo")
def cmd_correct(config: RunConfig) -> Report:
    assert config.seed is not None
    report = new_report(config)
    x = load_or_build(config, report.timing)
    code = gc.assemble_code(x, config.degrees)
    with timed(report.timing, "dimension"):
        dim = gc.dimension(code, budget(config.budget_rank, settings.budget_rank))
    report.add(CheckRecord.report("dimension", "dimension of the code", value=dim.value, exact=dim.exact))
    with timed(report.timing, "trials"):
        rows, records = verification.correction_suite(
            code,
            config.seed,
            config.trials,
            max(config.corrupt, 1),
            mode=config.mode,
            budget_enum=budget(config.budget_enum, settings.budget_enum),
        )
    for record in records:
        report.add(record)
    report.add(
        CheckRecord.report(
            "trials", "correction experiment rows", rows=[r.model_dump(mode="json") for r in rows]
        )
    )
    save_report(report, config)
    return report


@router.command("multcheck", help="Multiplication and translation suites")
def cmd_multcheck(config: RunConfig) -> Report:
    assert config.seed is not None
    report = new_report(config)
    x = load_or_build(config, report.timing)
    with timed(report.timing, "multcheck"):
        for record in verification.multiplication_suite(x, config.degrees, config.seed, config.trials):
            report.add(record)
    save_report(report, config)
    return report


@router.command("report", help="Merge JSON reports")
def cmd_report(config: RunConfig) -> Report:
    if not config.inputs:
        raise UsageError("report needs at least one --in")
    merged = ReportRepository().merge(config.inputs)
    merged.config = {**merged.config, **config.model_dump(mode="json")}
    save_report(merged, config)
    return merged
