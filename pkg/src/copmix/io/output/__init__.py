"""Report and table writers."""

from .files import dumps_json, format_float, write_csv, write_csv_stream, write_json

__all__ = ["dumps_json", "format_float", "write_csv", "write_csv_stream", "write_json"]
