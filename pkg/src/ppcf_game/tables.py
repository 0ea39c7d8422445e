"""Parameter sweeps of the benchmark error tables with their reference values."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

from .analytic import CircleBenchmark, ErrorReport, track_errors
from .solver import GameConfig

# Shared setting of tables 1-4.
BASE_07 = dict(gamma=0.7, epsilon=0.08, h=0.01, l0=160, horizon_T=0.12, scale=0.9)


@dataclass(frozen=True)
class TableRow:
    label: str
    value: float
    overrides: dict
    ref_linf: float
    ref_l1: float


@dataclass(frozen=True)
class Table:
    number: int
    title: str
    param: str
    base: dict
    rows: tuple[TableRow, ...]
    extra_columns: tuple[str, ...] = ()
    transposed: bool = False

    def config(self, row: TableRow, **overrides) -> GameConfig:
        settings = {**self.base, **overrides, **row.overrides}
        if "r0" in settings and "ds" in settings:
            # The swept or pinned one wins over a generic override of the other.
            keep = "r0" if "r0" in row.overrides or "r0" in self.base else "ds"
            settings.pop("ds" if keep == "r0" else "r0")
        if "scale" in settings and "alpha1" in settings:
            settings.pop("scale")
        return GameConfig(**settings)


def _rows(param: str, values, ref, fmt=str, key: Optional[str] = None):
    key = key or param
    return tuple(
        TableRow(f"{param}={fmt(v)}", v, {key: v}, linf, l1) for v, (linf, l1) in zip(values, ref)
    )


TABLES: dict[int, Table] = {
    1: Table(
        1, "Error for epsilon=0.08 and gamma=0.7", "scale",
        {**{k: v for k, v in BASE_07.items() if k != "scale"}, "ds": 0.01},
        _rows("scale", (0.1, 0.3, 0.9), ((0.1085, 0.1571), (0.08432, 0.1006), (0.08431, 0.0988))),
        transposed=True,
    ),
    2: Table(
        2, "Influence of h on the error (epsilon=0.08, gamma=0.7, scale=0.9, l0=160, r0=160)", "h",
        {**BASE_07, "r0": 160},
        _rows("h", (0.16, 0.08, 0.04, 0.02),
              ((0.2639, 0.1876), (0.1180, 0.0999), (0.0947, 0.1035), (0.0868, 0.1045))),
    ),
    3: Table(
        3, "Influence of r0 on the error (epsilon=0.08, gamma=0.7, scale=0.9, h=0.01, l0=160)", "r0",
        dict(BASE_07),
        _rows("r0", (10, 20, 40, 80, 160),
              ((0.0902, 0.1075), (0.0860, 0.1014), (0.0848, 0.0998), (0.0844, 0.0991), (0.0843, 0.0988))),
    ),
    4: Table(
        4, "Influence of l0 on the error (epsilon=0.08, gamma=0.7, scale=0.9, h=0.01, r0=160)", "l0",
        {**BASE_07, "r0": 160},
        _rows("l0", (10, 20, 40, 80, 160),
              ((0.4254, 0.4333), (0.1885, 0.2463), (0.1291, 0.1327), (0.0922, 0.1114), (0.0843, 0.0988))),
    ),
    5: Table(
        5, "Convergence of the value functions for gamma=0.8", "epsilon",
        dict(gamma=0.8, h=0.01, r0=100, l0=360, horizon_T=0.12, scale=0.9),
        _rows("epsilon", (0.09, 0.08, 0.05, 0.04, 0.02),
              ((0.0339, 0.0261), (0.0325, 0.0253), (0.0250, 0.0170), (0.0205, 0.0112), (0.0139, 0.0130))),
        extra_columns=("h", "r0", "l0"),
    ),
    6: Table(
        6, "Convergence of the value functions for gamma=0.9", "epsilon",
        dict(gamma=0.9, h=0.01, r0=80, l0=300, horizon_T=0.12, scale=0.9),
        _rows("epsilon", (0.08, 0.04, 0.02), ((0.1121, 0.1234), (0.1060, 0.1127), (0.0781, 0.0756))),
        extra_columns=("h", "r0", "l0"),
    ),
}


@dataclass
class TableResult:
    table: Table
    configs: list[GameConfig]
    reports: list[ErrorReport]

    def rows(self):
        for row, cfg, rep in zip(self.table.rows, self.configs, self.reports):
            yield row, cfg, rep

    def to_csv(self) -> str:
        """CSV in the layout of the printed table."""
        t = self.table
        if t.transposed:
            head = [""] + [f"{t.param}={r.value:g}" for r in t.rows]
            lines = [",".join(head)]
            lines.append(",".join(["linf_error"] + [repr(rep.sup_linf) for rep in self.reports]))
            lines.append(",".join(["l1_error"] + [repr(rep.sup_l1) for rep in self.reports]))
            return "\n".join(lines) + "\n"
        head = [t.param, "linf_error", "l1_error", *t.extra_columns]
        lines = [",".join(head)]
        for row, cfg, rep in self.rows():
            extra = [repr(getattr(cfg, c)) for c in t.extra_columns]
            lines.append(",".join([f"{row.value:g}", repr(rep.sup_linf), repr(rep.sup_l1), *extra]))
        return "\n".join(lines) + "\n"

    def format(self) -> str:
        t = self.table
        out = [f"Table {t.number}: {t.title}", f"{'':>16} {'linf':>10} {'l1':>10} {'ref linf':>11} {'ref l1':>10}"]
        for row, cfg, rep in self.rows():
            out.append(
                f"{row.label:>16} {rep.sup_linf:10.4f} {rep.sup_l1:10.4f} {row.ref_linf:11.4f} {row.ref_l1:10.4f}"
            )
        return "\n".join(out)


def run_table(
    number: int,
    overrides: Optional[dict] = None,
    *,
    only: Optional[list[float]] = None,
    benchmark: Optional[CircleBenchmark] = None,
    progress: Optional[Callable[[str], None]] = None,
) -> TableResult:
    """Run every row of a table (or the rows whose swept value is in ``only``)."""
    table = TABLES[number]
    overrides = dict(overrides or {})
    rows = [r for r in table.rows if only is None or any(abs(r.value - v) < 1e-12 for v in only)]
    table = Table(table.number, table.title, table.param, table.base, tuple(rows), table.extra_columns, table.transposed)
    configs, reports = [], []
    for row in table.rows:
        cfg = table.config(row, **overrides)
        bench = benchmark or CircleBenchmark(cfg.gamma, 1.0)
        if progress:
            progress(f"table {number}: {row.label}")
        configs.append(cfg)
        reports.append(track_errors(cfg, bench))
    return TableResult(table, configs, reports)
