from fractions import Fraction
from typing import Dict, Iterable, List, Optional

from rich.console import Console
from rich.markup import escape
from rich.table import Table

from lattice.fock import Params
from models.kernels import KernelDim
from models.logarithmic import SubsingularRecord
from reports.schema import Report, rational

STATUS_STYLE = {"pass": "green", "fail": "bold red", "skipped": "yellow"}


def _witness_summary(witness: Dict, limit: int = 80) -> str:
    if not witness:
        return ""
    text = ", ".join(f"{k}={v}" for k, v in sorted(witness.items()))
    return text if len(text) <= limit else text[: limit - 3] + "..."


def render_report(report: Report, console: Optional[Console] = None) -> None:
    console = console or Console()
    table = Table(title=f"verification {report.config.get('p')},{report.config.get('pprime')} "
                        f"up to weight {report.config.get('max_weight')}")
    table.add_column("suite")
    table.add_column("check")
    table.add_column("status")
    table.add_column("ms", justify="right")
    table.add_column("witness", overflow="fold")
    for c in report.checks:
        status = c.status + (" (info)" if c.informational else "")
        style = STATUS_STYLE.get(c.status, "")
        table.add_row(
            c.suite,
            escape(c.name),
            f"[{style}]{status}[/{style}]" if style else status,
            "" if c.timing_ms is None else f"{c.timing_ms:.0f}",
            escape(_witness_summary(c.witness)) if c.status != "pass" else "",
        )
    console.print(table)
    counts = report.summary()
    verdict = "[green]all checks passed[/green]" if report.passed else "[bold red]failed checks present[/bold red]"
    console.print(f"{counts['pass']} passed, {counts['fail']} failed, {counts['skipped']} skipped: {verdict}")


def render_dims(title: str, dims: Dict[Fraction, int], console: Optional[Console] = None) -> None:
    console = console or Console()
    table = Table(title=title)
    table.add_column("weight", justify="right")
    table.add_column("dim", justify="right")
    for w, d in sorted(dims.items()):
        table.add_row(rational(w), str(d))
    console.print(table)


def render_kernel_dims(title: str, rows: Iterable[KernelDim], console: Optional[Console] = None) -> None:
    console = console or Console()
    table = Table(title=title)
    table.add_column("weight", justify="right")
    table.add_column("source", justify="right")
    table.add_column("kernel", justify="right")
    table.add_column("oracle", justify="right")
    table.add_column("bases agree")
    for r in rows:
        agree = "[green]yes[/green]" if r.bases_agree else "[bold red]no[/bold red]"
        table.add_row(rational(r.weight), str(r.source_dim), str(r.dim), str(r.oracle_dim), agree)
    console.print(table)


def subsingular_lines(record: SubsingularRecord, P: Params) -> List[str]:
    return [
        f"weight: {rational(record.weight)}",
        f"w = {record.vector.format(P)}",
        f"Q w = {record.q_image.format(P)}  (scale {rational(record.scale)})",
        f"2 Q~ Q w = {record.double_screening.format(P)}",
        f"N^2 w = {record.n_squared.format(P)}",
        f"N^2 w equals 2 Q~ Q w: {'yes' if record.n_squared_matches else 'no'}",
        f"solution space: {record.source_dim} monomials, kernel dim {record.solution_dim} "
        f"(oracle {record.oracle_kernel_dim})",
    ]


def render_subsingular(record: SubsingularRecord, P: Params, console: Optional[Console] = None) -> None:
    console = console or Console()
    console.print(f"[bold]subsingular vector for {P.label()}[/bold]")
    for line in subsingular_lines(record, P):
        console.print(line, markup=False)
