"""
Command-Line Entry Point

This module configures logging and the thread cap, then dispatches to the command
router:
- build / stats / code / localrate
- identities / agree-local / correct / multcheck
- report
"""

import logging
import os
import sys
from typing import Optional, Sequence

from hdxcodes.config import settings

# BLAS pools read these once, before numpy is first imported
for _var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS"):
    os.environ.setdefault(_var, str(settings.threads))

from hdxcodes.cli import router  # noqa: E402

# Configure logging (stderr keeps stdout for JSON reports)
logging.basicConfig(
    level=getattr(logging, settings.log_level.upper()),
    format="%(asctime)s - %(name)s - %(levelname)s - %(message)s",
    handlers=[
        logging.StreamHandler(sys.stderr),
    ],
)
logger = logging.getLogger(__name__)


def run(argv: Sequence[str]) -> int:
    """
    Run one subcommand.

    Args:
        argv: Arguments without the program name

    Returns:
        Exit code: 0 ok, 1 failed check, 2 usage or invalid input, 3 budget exceeded
    """
    logger.info("=" * 60)
    logger.info("hdx-codes")
    logger.info("=" * 60)
    logger.info(f"Python version: {sys.version.split()[0]}")
    logger.info(f"Log level: {settings.log_level}")
    logger.info(f"Threads: {settings.threads}")
    logger.info(
        f"Budgets: group={settings.budget_group}, rank={settings.budget_rank}, "
        f"enum={settings.budget_enum}"
    )
    logger.info("=" * 60)
    try:
        return router.run(argv)
    except Exception as e:
        logger.error(f"Unhandled error: {e}", exc_info=True)
        return 1


def main(argv: Optional[Sequence[str]] = None) -> None:
    sys.exit(run(sys.argv[1:] if argv is None else argv))


if __name__ == "__main__":
    main()
