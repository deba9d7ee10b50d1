"""CSV result files

Header `method,t,x1[,x2,...],u,err`, one row per grid point, floats printed
with 17 significant digits and '\n' line endings. Doubles survive a write and
read unchanged, so comparisons can be recomputed from the files alone.
"""
import csv
import io
import threading
from pathlib import Path
from typing import Dict, Iterable, List, Optional, Union

from app.config import PROJECT_ROOT
from app.exceptions import InputError
from app.logger import logger
from app.schema import GridPoint, SolutionField
from app.utils.enums import SolveMethod


def format_float(value: float) -> str:
    return format(float(value), ".17g")


def _header(dimension: int) -> List[str]:
    return ["method", "t", *(f"x{i + 1}" for i in range(dimension)), "u", "err"]


def format_fields(fields: Iterable[SolutionField]) -> str:
    """Render one or more fields (same spatial dimension) as a single CSV document."""
    fields = list(fields)
    if not fields:
        return ""
    dimension = len(fields[0].grid[0].x) if fields[0].grid else 1
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(_header(dimension))
    for field in fields:
        for point, value, err in zip(field.grid, field.values, field.err):
            if len(point.x) != dimension:
                raise InputError(f"grid point {point.x} does not match dimension {dimension}")
            writer.writerow([
                str(field.method),
                format_float(point.t),
                *(format_float(c) for c in point.x),
                format_float(value),
                format_float(err),
            ])
    return buffer.getvalue()


def parse_fields(text: str) -> Dict[SolveMethod, SolutionField]:
    """Read a CSV document back into one SolutionField per method, rows in file order."""
    reader = csv.reader(io.StringIO(text))
    header = next(reader, None)
    if not header or header[:2] != ["method", "t"] or header[-2:] != ["u", "err"]:
        raise InputError(f"unexpected CSV header {header}")
    dimension = len(header) - 4
    rows: Dict[SolveMethod, Dict[str, list]] = {}
    for line, row in enumerate(reader, start=2):
        if len(row) != len(header):
            raise InputError(f"line {line}: expected {len(header)} columns, got {len(row)}")
        try:
            method = SolveMethod(row[0])
            numbers = [float(v) for v in row[1:]]
        except ValueError as e:
            raise InputError(f"line {line}: {e}") from e
        bucket = rows.setdefault(method, {"grid": [], "values": [], "err": []})
        bucket["grid"].append(GridPoint(t=numbers[0], x=tuple(numbers[1:1 + dimension])))
        bucket["values"].append(numbers[-2])
        bucket["err"].append(numbers[-1])
    return {method: SolutionField(method=method, **bucket) for method, bucket in rows.items()}


class ResultStore:
    """Writes run artifacts under one directory; writes are serialized.

    Files are named `<prefix>_<method>.csv` and `<prefix>_report.json`.
    Relative directories resolve against the project root.
    """

    _lock = threading.Lock()

    def __init__(self, directory: Union[str, Path], prefix: str):
        path = Path(directory)
        self.directory = path if path.is_absolute() else PROJECT_ROOT / path
        self.prefix = prefix

    def path_for(self, name: str, suffix: str) -> Path:
        return self.directory / f"{self.prefix}_{name}.{suffix}"

    def _write(self, path: Path, text: str) -> Path:
        with self._lock:
            self.directory.mkdir(parents=True, exist_ok=True)
            # newline="" keeps '\n' on every platform
            with path.open("w", encoding="utf-8", newline="") as handle:
                handle.write(text)
        logger.debug(f"wrote {path}")
        return path

    def write_field(self, field: SolutionField) -> Path:
        return self._write(self.path_for(str(field.method), "csv"), format_fields([field]))

    def write_text(self, name: str, suffix: str, text: str) -> Path:
        return self._write(self.path_for(name, suffix), text)

    def read_field(self, method: Union[SolveMethod, str]) -> Optional[SolutionField]:
        path = self.path_for(str(method), "csv")
        if not path.exists():
            return None
        fields = parse_fields(path.read_text(encoding="utf-8"))
        return fields.get(SolveMethod(str(method)))
