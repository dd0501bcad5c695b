"""
Output formats
"""

from .emitters import (
    SCHEMA_VERSION,
    emit_report_json,
    emit_spectrum_csv,
    emit_table_csv,
    emit_trajectory_csv,
    read_report_json,
    read_spectrum_csv,
    read_trajectory_csv,
)

__all__ = [
    "SCHEMA_VERSION",
    "emit_report_json",
    "emit_spectrum_csv",
    "emit_table_csv",
    "emit_trajectory_csv",
    "read_report_json",
    "read_spectrum_csv",
    "read_trajectory_csv",
]
