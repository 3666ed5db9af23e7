"""
Models Package Initialization
"""

from hdxcodes.models.schemas import (
    CheckRecord,
    CheckStatus,
    CorrectionRow,
    DecodeRow,
    InstanceHeader,
    LineExport,
    LocalCodeDocument,
    Report,
    RunConfig,
)

__all__ = [
    "CheckRecord",
    "CheckStatus",
    "CorrectionRow",
    "DecodeRow",
    "InstanceHeader",
    "LineExport",
    "LocalCodeDocument",
    "Report",
    "RunConfig",
]
