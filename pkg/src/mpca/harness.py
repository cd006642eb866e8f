"""Monte Carlo experiment runner, real-data ingestion and persistence.

Replications are the unit of parallelism; each (cell, replication)
task is seeded independently of scheduling, and every requested method
within a cell consumes the identical generated dataset, so results are
bit-for-bit reproducible across worker counts.
"""

from __future__ import annotations

import csv
import io
import json
import math
import zlib
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, asdict

import numpy as np

from .estimators import IterationControl, get_estimator, mpca_f, mpca_op
from .metrics import evaluate_fit
from .model import Ranks, as_observations
from .ranks import select_rank
from .sampling import SimulationConfig, gen_dataset

ESTIMATOR_TAGS = ("mpca_op", "mpca_f", "pca_2d2", "pe")
SELECTOR_TAGS = ("mer_op", "mer_f", "er_2d2", "iter_er")


@dataclass
class ExperimentSpec:
    """Grid of simulation cells to run, with shared method list."""

    dims: list = field(default_factory=lambda: [(100, 100)])  # (p, q) pairs
    dists: list = field(default_factory=lambda: ["gaussian"])
    s_E_values: list = field(default_factory=lambda: [1.0])
    p0: int = 3
    q0: int = 3
    phi: float = 0.1
    psi: float = 0.1
    T: int | None = None  # None: floor(3 sqrt(pq)) per cell
    methods: list = field(default_factory=lambda: ["mpca_op", "mpca_f"])
    replications: int = 100
    r_max: int = 8
    base_seed: int = 0

    def __post_init__(self):
        if self.replications < 1:
            raise ValueError("replications must be >= 1")
        if not self.methods:
            raise ValueError("methods must be nonempty")
        for m in self.methods:
            if m not in ESTIMATOR_TAGS + SELECTOR_TAGS:
                raise ValueError(f"unknown method {m!r}")
        self.dims = [tuple(d) for d in self.dims]

    def cells(self):
        for dist in self.dists:
            for (p, q) in self.dims:
                for s_E in self.s_E_values:
                    yield {"dist": dist, "p": p, "q": q, "s_E": s_E}

    @staticmethod
    def cell_id(cell: dict) -> str:
        return f"{cell['dist']}_p{cell['p']}_q{cell['q']}_se{cell['s_E']:g}"


@dataclass
class ResultsTable:
    """Aggregated Monte Carlo results, one row per (cell, method, metric)."""

    rows: list = field(default_factory=list)
    failures: list = field(default_factory=list)
    metadata: dict = field(default_factory=dict)

    FIELDS = ("distribution", "p", "q", "s_E", "method", "metric",
              "mean", "sd")

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(self.FIELDS)
        for r in self.rows:
            writer.writerow([r[f] if f in ("distribution", "method", "metric")
                             else repr(r[f]) for f in self.FIELDS])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str) -> "ResultsTable":
        reader = csv.reader(io.StringIO(text))
        header = next(reader)
        if tuple(header) != cls.FIELDS:
            raise ValueError("unexpected results header")
        rows = []
        for rec in reader:
            row = dict(zip(cls.FIELDS, rec))
            for f in ("p", "q"):
                row[f] = int(row[f])
            for f in ("s_E", "mean", "sd"):
                row[f] = float(row[f])
            rows.append(row)
        return cls(rows=rows)

    def to_json(self) -> str:
        return json.dumps({"rows": self.rows, "failures": self.failures,
                           "metadata": self.metadata}, indent=2)

    @classmethod
    def from_json(cls, text: str) -> "ResultsTable":
        d = json.loads(text)
        return cls(rows=d["rows"], failures=d.get("failures", []),
                   metadata=d.get("metadata", {}))

    def to_markdown(self) -> str:
        lines = ["| distribution | p | q | s_E | method | metric | (mean,sd) |",
                 "|---|---|---|---|---|---|---|"]
        for r in self.rows:
            lines.append(
                f"| {r['distribution']} | {r['p']} | {r['q']} | {r['s_E']:g} "
                f"| {r['method']} | {r['metric']} "
                f"| ({r['mean']:.4f},{r['sd']:.4f}) |")
        return "\n".join(lines) + "\n"

    def lookup(self, **keys) -> dict:
        hits = [r for r in self.rows
                if all(r[k] == v for k, v in keys.items())]
        if len(hits) != 1:
            raise KeyError(f"{len(hits)} rows match {keys}")
        return hits[0]


def _rep_seed(base_seed: int, cell_id: str, rep: int) -> np.random.SeedSequence:
    return np.random.SeedSequence(
        [base_seed, zlib.crc32(cell_id.encode()), rep])


def _run_replication(args):
    """One (cell, replication) task.  Returns per-method metric values."""
    spec_dict, cell, rep = args
    spec = ExperimentSpec(**spec_dict)
    cid = ExperimentSpec.cell_id(cell)
    cfg = SimulationConfig(
        p=cell["p"], q=cell["q"], p0=spec.p0, q0=spec.q0, T=spec.T,
        phi=spec.phi, psi=spec.psi, s_E=cell["s_E"], dist=cell["dist"])
    rng = np.random.default_rng(_rep_seed(spec.base_seed, cid, rep))
    try:
        X, truth = gen_dataset(cfg, rng)
        ranks = Ranks(spec.p0, spec.q0)
        ctl = IterationControl()
        out = {}
        warm = None
        # canonical order so mpca_f can reuse the mpca_op warm start
        estimators = [m for m in ESTIMATOR_TAGS if m in spec.methods]
        if "mpca_f" in estimators and "mpca_op" not in estimators:
            warm = mpca_op(X, ranks)
        for m in estimators:
            if m == "mpca_op":
                warm = mpca_op(X, ranks)
                L = warm
            elif m == "mpca_f":
                L = mpca_f(X, ranks, ctl, warm_start=warm).loadings
            else:
                L = get_estimator(m)(X, ranks, ctl)
            rep_metrics = evaluate_fit(L, X, truth)
            out[m] = {"d_R": rep_metrics.d_R, "d_C": rep_metrics.d_C,
                      "mse": rep_metrics.mse, "op_max": rep_metrics.op_max}
        for m in spec.methods:
            if m in SELECTOR_TAGS:
                sel = select_rank(X, m, spec.r_max, ctl)
                exact = float(sel.p0_hat == spec.p0 and sel.q0_hat == spec.q0)
                under = float(not exact and (sel.p0_hat <= spec.p0
                                             and sel.q0_hat <= spec.q0))
                out[m] = {"exact": exact, "under": under}
        return (cid, rep, out, None)
    except Exception as exc:  # noqa: BLE001 - isolate replication failures
        return (cid, rep, None, f"{type(exc).__name__}: {exc}")


def run_monte_carlo(spec: ExperimentSpec, n_jobs: int = 1,
                    progress: bool = False) -> ResultsTable:
    """Run the full experiment grid and aggregate into a ResultsTable.

    Every method in a cell sees the same generated dataset (matched
    seeds).  Aggregation is an order-fixed reduction over replication
    index, so the output does not depend on n_jobs.
    """
    cells = list(spec.cells())
    spec_dict = asdict(spec)
    tasks = [(spec_dict, cell, rep)
             for cell in cells for rep in range(spec.replications)]
    if n_jobs > 1:
        with ProcessPoolExecutor(max_workers=n_jobs) as pool:
            raw = list(pool.map(_run_replication, tasks, chunksize=1))
    else:
        raw = []
        for i, task in enumerate(tasks):
            raw.append(_run_replication(task))
            if progress:
                print(f"  replication {i + 1}/{len(tasks)}", flush=True)

    by_cell: dict[str, dict[int, dict]] = {}
    failures = []
    for cid, rep, out, err in raw:
        if err is not None:
            failures.append({"cell": cid, "replication": rep, "reason": err})
        else:
            by_cell.setdefault(cid, {})[rep] = out

    table = ResultsTable(metadata={
        "base_seed": spec.base_seed, "replications": spec.replications,
        "methods": list(spec.methods)})
    table.failures = failures
    for cell in cells:
        cid = ExperimentSpec.cell_id(cell)
        reps = by_cell.get(cid, {})
        ordered = [reps[r] for r in sorted(reps)]
        for m in spec.methods:
            if m in ESTIMATOR_TAGS:
                metrics = ("d_R", "d_C", "mse", "op_max")
                names = metrics
            else:
                metrics = ("exact", "under")
                names = ("exact_freq", "under_freq")
            for metric, name in zip(metrics, names):
                vals = np.array([o[m][metric] for o in ordered])
                table.rows.append({
                    "distribution": cell["dist"], "p": cell["p"],
                    "q": cell["q"], "s_E": cell["s_E"], "method": m,
                    "metric": name,
                    "mean": float(vals.mean()) if vals.size else math.nan,
                    "sd": float(vals.std(ddof=1)) if len(vals) > 1 else 0.0,
                })
    return table


def emit_results(table: ResultsTable, path, fmt: str = "csv") -> None:
    """Write a results table as csv, json or markdown."""
    if fmt == "csv":
        text = table.to_csv()
    elif fmt == "json":
        text = table.to_json()
    elif fmt == "markdown":
        text = table.to_markdown()
    else:
        raise ValueError(f"unknown format {fmt!r}")
    with open(path, "w") as fh:
        fh.write(text)


# ---------------------------------------------------------------------------
# dataset interchange


def write_dataset(path, X: np.ndarray) -> None:
    """Write observations as text: a 'T p q' header then T blocks of p
    rows of q values, using shortest round-trip float printing."""
    X = as_observations(X)
    T, p, q = X.shape
    with open(path, "w") as fh:
        fh.write(f"{T} {p} {q}\n")
        for t in range(T):
            for i in range(p):
                fh.write(" ".join(repr(float(v)) for v in X[t, i]) + "\n")
            fh.write("\n")


def read_dataset(path) -> np.ndarray:
    with open(path) as fh:
        header = fh.readline().split()
        if len(header) != 3:
            raise ValueError("malformed dataset header, expected 'T p q'")
        T, p, q = (int(v) for v in header)
        values = [float(v) for v in fh.read().split()]
    if len(values) != T * p * q:
        raise ValueError(f"expected {T * p * q} values, found {len(values)}")
    return np.array(values).reshape(T, p, q)


# ---------------------------------------------------------------------------
# portfolio panel ingestion


def ingest_portfolios(path, layout=None, n_rows: int = 10, n_cols: int = 10,
                      sentinel: float = -99.99, month_col: int = 0,
                      adjustment_col=None, delimiter: str = ","):
    """Read a monthly portfolio-return table into a matrix panel.

    The file has one row per month: a month column (YYYYMM) plus
    n_rows * n_cols value columns.  layout maps value-column position
    to a (row, col) grid cell; by default columns fill the grid in
    row-major order.  Sentinel values are treated as missing and filled
    by linear interpolation along time per cell (boundary gaps take the
    nearest observed value).  If adjustment_col names a column index,
    that column is subtracted from every cell of its month.

    Returns (matrices (T, n_rows, n_cols), months, years).
    """
    n_cells = n_rows * n_cols
    months, rows = [], []
    adjustments = []
    with open(path) as fh:
        reader = csv.reader(fh, delimiter=delimiter)
        for lineno, rec in enumerate(reader, start=1):
            rec = [c.strip() for c in rec if c.strip() != ""]
            if not rec:
                continue
            if lineno == 1 and not rec[month_col].lstrip("-").isdigit():
                continue  # header line
            try:
                month = int(rec[month_col])
                data_cols = [c for i, c in enumerate(rec)
                             if i != month_col and i != adjustment_col]
                values = [float(c) for c in data_cols]
                adj = float(rec[adjustment_col]) if adjustment_col is not None else 0.0
            except ValueError as exc:
                raise ValueError(f"malformed row {lineno}: {exc}") from None
            if len(values) != n_cells:
                raise ValueError(
                    f"row {lineno}: expected {n_cells} value columns, "
                    f"got {len(values)}")
            months.append(month)
            rows.append(values)
            adjustments.append(adj)
    if not months:
        raise ValueError("no data rows found")
    if any(b <= a for a, b in zip(months, months[1:])):
        raise ValueError("months are not strictly increasing")

    flat = np.array(rows, dtype=np.float64)
    flat[np.isclose(flat, sentinel)] = np.nan
    T = flat.shape[0]
    idx = np.arange(T)
    for j in range(n_cells):
        col = flat[:, j]
        good = ~np.isnan(col)
        if not good.any():
            raise ValueError(f"cell {j} is missing in every month")
        if not good.all():
            flat[:, j] = np.interp(idx, idx[good], col[good])
    flat -= np.asarray(adjustments)[:, None]

    if layout is None:
        layout = [(j // n_cols, j % n_cols) for j in range(n_cells)]
    X = np.empty((T, n_rows, n_cols))
    for j, (r, c) in enumerate(layout):
        X[:, r, c] = flat[:, j]
    months = np.array(months)
    years = months // 100
    return as_observations(X), months, years
