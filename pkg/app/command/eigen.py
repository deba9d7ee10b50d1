import csv
import io
from typing import List, Optional

from app.command.base import BaseCommand, CommandResult
from app.io.writer import ResultStore, format_float
from app.schema import DomainSpec, EigenMode
from app.spectral.domain import eigenpairs
from app.utils.enums import CommandName


def format_eigenpairs(modes: List[EigenMode]) -> str:
    """CSV `n,multi_index,lambda,sup_norm`; multi-indices are joined with ':'."""
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(["n", "multi_index", "lambda", "sup_norm"])
    for mode in modes:
        writer.writerow([mode.n, ":".join(str(i) for i in mode.multi_index),
                         format_float(mode.eigenvalue), format_float(mode.sup_norm)])
    return buffer.getvalue()


class EigenCommand(BaseCommand):
    name: str = CommandName.EIGEN
    description: str = "Dump the first Dirichlet eigenpairs of a domain (index, multi-index, eigenvalue, sup norm)."

    def execute(self, domain: DomainSpec, count: int = 16, store: Optional[ResultStore] = None,
                **kwargs) -> CommandResult:
        text = format_eigenpairs(eigenpairs(domain, count))
        args = {"count": count}
        if store is not None:
            args["path"] = str(store.write_text("eigen", "csv", text))
        return CommandResult(content=text.rstrip("\n"), args=args)
