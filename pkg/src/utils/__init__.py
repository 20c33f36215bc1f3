"""
Utilities package.

Helper modules shared by the CLI and the numerical packages:
- display: Rich terminal formatting and logging on stderr
- concurrency: asyncio worker fan-out
- documents: output documents, JSON and CSV serialization
"""

from src.utils.concurrency import gather_in_threads, run_in_threads
from src.utils.display import (
    console,
    create_cdf_table,
    create_metrics_table,
    create_progress,
    print_error,
    print_header,
    print_status,
    print_success,
    print_warning,
    setup_logging,
)

__all__ = [
    "console",
    "create_cdf_table",
    "create_metrics_table",
    "create_progress",
    "gather_in_threads",
    "print_error",
    "print_header",
    "print_status",
    "print_success",
    "print_warning",
    "run_in_threads",
    "setup_logging",
]
