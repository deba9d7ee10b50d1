from app.io.report import ComparisonReport, compare_fields
from app.io.run_config import RunConfig, load_document, parse_config
from app.io.writer import ResultStore, format_fields, parse_fields


__all__ = [
    "ComparisonReport",
    "compare_fields",
    "RunConfig",
    "load_document",
    "parse_config",
    "ResultStore",
    "format_fields",
    "parse_fields",
]
