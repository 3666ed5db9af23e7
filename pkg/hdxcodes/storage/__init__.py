"""
Storage Module Initialization

Exports file repositories for use across the application.
"""

from hdxcodes.storage.repository import (
    BaseRepository,
    CodewordRepository,
    InstanceRepository,
    LocalCodeRepository,
    MatrixRepository,
    ReportRepository,
    StoreError,
)

__all__ = [
    "BaseRepository",
    "CodewordRepository",
    "InstanceRepository",
    "LocalCodeRepository",
    "MatrixRepository",
    "ReportRepository",
    "StoreError",
]
