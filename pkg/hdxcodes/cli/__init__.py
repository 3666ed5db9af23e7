"""
CLI Module Initialization

Exports the command router with every handler registered.
"""

from hdxcodes.cli.handlers import router
from hdxcodes.cli.router import CommandRouter, UsageError

__all__ = [
    "router",
    "CommandRouter",
    "UsageError",
]
