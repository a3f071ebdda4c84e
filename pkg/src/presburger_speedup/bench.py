"""Size-growth benchmark: polynomial families against doubly exponential axioms.

Each row records the size of one generated formula.  The compressed
families (Mul, Hyp, Div, Pow, Root) grow linearly in n; the PrA_alt axiom
needed at the prime k in (2^(2^n - 1), 2^(2^n)) grows with k, so its size
is computed analytically instead of rendered.  A fixed random corpus
records how much quantifier elimination inflates formulas.
"""

from __future__ import annotations

import csv
import io
import time
from dataclasses import dataclass, field
from importlib import metadata
from typing import Callable

from .corpus import random_corpus
from .grammar import render
from .logic import BudgetExceeded, Formula, node_count, paper_symbols
from .pra_families import (
    gen_div,
    gen_hyp,
    gen_mul,
    gen_pra_alt_axiom,
    pra_alt_axiom_nodes,
    pra_alt_axiom_symbols,
    prime_window,
)
from .qe import eliminate_all
from .rcf_families import gen_odd_degree_axiom, gen_pow, gen_root

CSV_HEADER = ("family", "n", "node_count", "paper_symbols", "rendered_len", "gen_ms")
MAX_COMPRESSED_N = 16
RENDER_LIMIT_P = 1000  # render PrA_alt axioms only up to this prime
QE_CORPUS_SIZE = 20
QE_NODE_BUDGET = 200_000


@dataclass(frozen=True)
class GrowthRow:
    family: str
    n: int
    node_count: int
    paper_symbols: int
    rendered_len: int | None
    gen_ms: int
    note: str = ""

    def csv_fields(self) -> list[str]:
        return [
            self.family,
            str(self.n),
            str(self.node_count),
            str(self.paper_symbols),
            "" if self.rendered_len is None else str(self.rendered_len),
            str(self.gen_ms),
        ]


@dataclass
class BenchReport:
    rows: list[GrowthRow] = field(default_factory=list)
    metadata: dict[str, object] = field(default_factory=dict)

    def sort(self) -> None:
        self.rows.sort(key=lambda r: (r.family, r.n))

    def family(self, name: str) -> list[GrowthRow]:
        return [r for r in self.rows if r.family == name]

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(CSV_HEADER)
        for r in self.rows:
            w.writerow(r.csv_fields())
        return buf.getvalue()

    def qe_ratios(self) -> list[float]:
        ins = {r.n: r.node_count for r in self.family("QE-in")}
        return [r.node_count / ins[r.n] for r in self.family("QE-out") if r.n in ins]


def _version() -> str:
    try:
        return metadata.version("artifact")
    except metadata.PackageNotFoundError:
        return "unknown"


def _measure(family: str, n: int, make: Callable[[], Formula], rcf: bool = False, rendered: bool = True) -> GrowthRow:
    t0 = time.perf_counter()
    f = make()
    ms = int((time.perf_counter() - t0) * 1000)
    return GrowthRow(
        family,
        n,
        node_count(f),
        paper_symbols(f, rcf),
        len(render(f).encode("utf-8")) if rendered else None,
        ms,
    )


def bench_growth(max_n: int, seed: int = 0, qe_corpus: int = QE_CORPUS_SIZE) -> BenchReport:
    if not 0 <= max_n <= MAX_COMPRESSED_N:
        raise ValueError(f"max_n must be in 0..{MAX_COMPRESSED_N}")
    report = BenchReport(
        metadata={"seed": seed, "max_n": max_n, "qe_node_budget": QE_NODE_BUDGET, "version": _version()}
    )
    rows = report.rows
    for n in range(max_n + 1):
        rows.append(_measure("Mul", n, lambda: gen_mul(n)))
        rows.append(_measure("Hyp", n, lambda: gen_hyp(n)))
        rows.append(_measure("Div", n, lambda: gen_div(n)))
        rows.append(_measure("Pow", n, lambda: gen_pow(n), rcf=True))
        rows.append(_measure("Root", n, lambda: gen_root(n), rcf=True))
    for n in range(1, min(max_n, 6) + 1):
        k = prime_window(n)
        t0 = time.perf_counter()
        rendered = len(render(gen_pra_alt_axiom(k)).encode("utf-8")) if k <= RENDER_LIMIT_P else None
        ms = int((time.perf_counter() - t0) * 1000)
        rows.append(GrowthRow("PraAltAxiom", n, pra_alt_axiom_nodes(k), pra_alt_axiom_symbols(k), rendered, ms))
    for m in range(1, 2 * max_n + 2, 2):
        rows.append(_measure("OddDegreeAxiom", m, lambda: gen_odd_degree_axiom(m), rcf=True))
    for i, f in enumerate(random_corpus(qe_corpus, seed)):
        rows.append(GrowthRow("QE-in", i, node_count(f), paper_symbols(f), len(render(f)), 0))
        t0 = time.perf_counter()
        try:
            out, _ = eliminate_all(f, QE_NODE_BUDGET)
        except BudgetExceeded as e:
            ms = int((time.perf_counter() - t0) * 1000)
            rows.append(GrowthRow("QE-out", i, -1, -1, None, ms, note=str(e)))
            continue
        ms = int((time.perf_counter() - t0) * 1000)
        rows.append(GrowthRow("QE-out", i, node_count(out), paper_symbols(out), len(render(out)), ms))
    report.sort()
    return report


def fit_linear(rows: list[GrowthRow]) -> tuple[int, int]:
    """(a, b) with node_count <= a*n + b on every row: a is the largest step, b the n=0 size."""
    rows = sorted(rows, key=lambda r: r.n)
    a = max((y.node_count - x.node_count for x, y in zip(rows, rows[1:])), default=0)
    b = max(r.node_count - a * r.n for r in rows)
    return a, b


__all__ = ["BenchReport", "CSV_HEADER", "GrowthRow", "bench_growth", "fit_linear"]
