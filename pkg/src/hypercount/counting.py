"""Point counting: brute force, the stratified XStrip counter, sharded runs.

The stratified counter evaluates

    #X(F_q) = q^13 - q^2 N_Y + q^3 N_Z

where N_Y and N_Z count tuples (a1..a6, b2..b6) of affine 11-space on which
I5, G5 and the B1-coefficient of G~6 vanish (N_Z additionally asks the
constant part of G~6 to vanish).  Shards fix (A1, A3), giving q^2 disjoint
pieces of work whose tallies simply add.
"""
from __future__ import annotations

import concurrent.futures as cf
import csv
import io
import json
import os
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Iterable, Sequence

import numpy as np

from . import kernels
from .errors import (
    BudgetExceeded,
    CorruptCheckpoint,
    InvariantViolation,
    NotACone,
    SchemeMismatch,
)
from .ffield import FieldSpec, make_field
from .graphcore import Graph, cycle_matrix, psi_tree_sum, read_graph, spanning_trees
from .kernels import Terms
from .matteval import ws_terms, xstrip_terms

BRUTE_BUDGET = 10**8
XSTRIP_VARS = 14
METHODS = ("brute", "stratified", "stratified-accelerated")
MODES = {"stratified": "baseline", "stratified-accelerated": "accelerated"}
CSV_COLUMNS = ("graph", "q", "p", "k", "method", "count", "n_y", "n_z", "elapsed_seconds")
CHECKPOINT_ENV = "HYPERCOUNT_CHECKPOINT_DIR"


@dataclass(frozen=True)
class CountRecord:
    graph: str
    q: int
    p: int
    k: int
    method: str
    count: int
    n_y: int | None = None
    n_z: int | None = None
    elapsed_seconds: float = 0.0
    n_vars: int | None = None

    def __post_init__(self) -> None:
        if self.method not in METHODS:
            raise ValueError(f"unknown method {self.method!r}")
        if self.count < 0:
            raise InvariantViolation(f"negative count {self.count}")
        if self.n_vars is not None and self.count >= self.q**self.n_vars:
            raise InvariantViolation(f"count {self.count} is not below q^{self.n_vars}")
        if self.method != "brute":
            if self.n_y is None or self.n_z is None or self.n_y < 0 or self.n_z < 0:
                raise InvariantViolation("stratified records carry nonnegative N_Y and N_Z")
            if self.count != stratified_total(self.q, self.n_y, self.n_z):
                raise InvariantViolation("count disagrees with q^13 - q^2 N_Y + q^3 N_Z")
        if self.graph == "xstrip":
            check_xstrip_count(self.q, self.count)

    def to_json(self) -> dict:
        return {
            "graph": self.graph,
            "q": self.q,
            "p": self.p,
            "k": self.k,
            "method": self.method,
            "count": str(self.count),
            "n_y": self.n_y,
            "n_z": self.n_z,
            "elapsed_seconds": round(self.elapsed_seconds, 6),
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json())

    @classmethod
    def from_json(cls, data: dict) -> "CountRecord":
        return cls(
            graph=data["graph"], q=int(data["q"]), p=int(data["p"]), k=int(data["k"]),
            method=data["method"], count=int(data["count"]),
            n_y=data.get("n_y"), n_z=data.get("n_z"),
            elapsed_seconds=float(data.get("elapsed_seconds", 0.0)),
        )


def records_to_csv(records: Iterable[CountRecord]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for r in records:
        row = r.to_json()
        w.writerow(["" if row[c] is None else row[c] for c in CSV_COLUMNS])
    return buf.getvalue()


def stratified_total(q: int, n_y: int, n_z: int) -> int:
    return q**13 - q**2 * n_y + q**3 * n_z


def check_xstrip_count(q: int, count: int) -> None:
    if count % (q * q):
        raise InvariantViolation(f"q^2 does not divide the XStrip count {count} at q = {q}")
    if count < q**13 - 14 * q**12:
        raise InvariantViolation(f"XStrip count {count} below q^13 - 14 q^12 at q = {q}")


def projective_count(affine_count: int, q: int) -> int:
    """Projective count of a cone's base from its affine count: (#affine - 1)/(q - 1)."""
    if affine_count < 1 or (affine_count - 1) % (q - 1):
        raise NotACone(f"{affine_count} points over F_{q} cannot come from an affine cone")
    return (affine_count - 1) // (q - 1)


# -- brute force -----------------------------------------------------------------

@dataclass(frozen=True)
class Source:
    """Something whose affine zero set can be counted: a matrix pencil of linear forms."""

    name: str
    m: int
    n_vars: int
    terms: Terms
    graph: Graph | None = None


def resolve_source(source: str | Graph | Source) -> Source:
    """Accepts ``xstrip``, ``ws:<m>``, ``file:<path>``, a Graph or a Source."""
    if isinstance(source, Source):
        return source
    if isinstance(source, Graph):
        return Source(source.name, source.h1, source.n_edges, cycle_matrix(source).terms(), source)
    if source == "xstrip":
        return Source("xstrip", 7, XSTRIP_VARS, xstrip_terms())
    if source.startswith("ws:"):
        m = int(source[3:])
        return Source(f"ws:{m}", m, 2 * m, ws_terms(m))
    if source.startswith("file:"):
        g = read_graph(source[5:])
        return resolve_source(g)
    raise ValueError(f"unknown source {source!r}")


def brute_force_count(source: str | Graph | Source, q: int, override: bool = False, evaluator: str = "det") -> CountRecord:
    """Count zeros of the source's polynomial in F_q^n by full enumeration.

    ``evaluator="trees"`` evaluates the spanning-tree sum instead of the
    determinant; only available for graph sources.
    """
    src = resolve_source(source)
    spec = make_field(q)
    total = q**src.n_vars
    if total > BRUTE_BUDGET and not override:
        raise BudgetExceeded(f"{total} tuples exceeds the brute-force budget {BRUTE_BUDGET}")
    t0 = time.perf_counter()
    if evaluator == "det":
        count = kernels.count_pencil_zeros(src.m, src.n_vars, src.terms, spec)
    elif evaluator == "trees":
        if src.graph is None:
            raise ValueError("tree-sum evaluation needs a graph source")
        count = _tree_sum_zeros(src.graph, spec)
    else:
        raise ValueError(f"unknown evaluator {evaluator!r}")
    return CountRecord(
        src.name, q, spec.p, spec.k, "brute", count,
        elapsed_seconds=time.perf_counter() - t0, n_vars=src.n_vars,
    )


def _tree_sum_zeros(g: Graph, spec: FieldSpec, chunk: int = 1 << 14) -> int:
    trees = spanning_trees(g)
    n, q = g.n_edges, spec.q
    total = q**n
    zeros = 0
    for s in range(0, total, chunk):
        idx = np.arange(s, min(total, s + chunk), dtype=np.int64)
        pts = np.empty((len(idx), n), dtype=np.int64)
        for pos in range(n - 1, -1, -1):
            pts[:, pos] = idx % q
            idx //= q
        zeros += int(np.count_nonzero(psi_tree_sum(g, pts, spec, trees) == 0))
    return zeros


# -- stratified XStrip counting -----------------------------------------------

def method_for(mode: str) -> str:
    for method, m in MODES.items():
        if m == mode:
            return method
    raise ValueError(f"unknown mode {mode!r}")


def shard_coordinates(index: int, q: int) -> tuple[int, int]:
    """Shard ``index`` fixes A1 = index // q and A3 = index % q."""
    return divmod(index, q)


def count_shard(q: int, mode: str, index: int, backend: str | None = None) -> tuple[int, int]:
    spec = make_field(q)
    a1, a3 = shard_coordinates(index, q)
    if backend is None or backend == kernels.backend():
        return kernels.xstrip_shard(mode, a1, a3, xstrip_terms(), spec)
    with kernels.use_backend(backend):
        return kernels.xstrip_shard(mode, a1, a3, xstrip_terms(), spec)


def _shard_task(args: tuple[int, str, int, str]) -> tuple[int, int, int]:
    q, mode, index, backend = args
    ny, nz = count_shard(q, mode, index, backend)
    return index, ny, nz


def stratified_count_xstrip(q: int, mode: str = "accelerated", workers: int = 1, checkpoint: str | Path | None = None) -> CountRecord:
    return run_sharded(q, mode, workers=workers, checkpoint=checkpoint)


def midform_count_xstrip(q: int) -> tuple[int, int, int]:
    """(count, #V(I5, G5), #V(I5, I6, G~6)) from the two-stratum formula."""
    n_v5, n_w = kernels.xstrip_midform(xstrip_terms(), make_field(q))
    return q**13 - q**2 * n_v5 + q**2 * n_w, n_v5, n_w


# -- checkpointed sharded execution -------------------------------------------

CKPT_MAGIC = "hypercount-ckpt v1"


class ShardLedger:
    """Completed shards of one (q, mode) run, optionally mirrored to a checkpoint file.

    The owning process is the only writer; each finished shard is one
    appended line, flushed before the next shard is recorded.
    """

    def __init__(self, q: int, mode: str, path: str | Path | None = None):
        if mode not in MODES.values():
            raise ValueError(f"unknown mode {mode!r}")
        self.q = q
        self.mode = mode
        self.n_shards = q * q
        self.path = Path(path) if path is not None else None
        self.done: dict[int, tuple[int, int]] = {}
        self.total: int | None = None
        if self.path is not None:
            if self.path.exists() and self.path.stat().st_size:
                self._load()
            else:
                self.path.parent.mkdir(parents=True, exist_ok=True)
                self.path.write_text(self._header(), encoding="utf-8")

    def _header(self) -> str:
        return f"{CKPT_MAGIC}\ngraph xstrip\nq {self.q}\nmode {self.mode}\n"

    def _load(self) -> None:
        text = self.path.read_text(encoding="utf-8")
        lines = text.split("\n")
        if not text.endswith("\n"):
            # an append cut short by a kill; drop the fragment and rewrite
            lines = lines[:-1]
            self.path.write_text("\n".join(lines) + "\n", encoding="utf-8")
        else:
            lines = lines[:-1]
        if len(lines) < 4 or lines[0] != CKPT_MAGIC or lines[1] != "graph xstrip":
            raise CorruptCheckpoint(f"{self.path}: bad header")
        try:
            q = int(lines[2].removeprefix("q "))
            mode = lines[3].removeprefix("mode ")
        except ValueError as exc:
            raise CorruptCheckpoint(f"{self.path}: bad header") from exc
        if not lines[2].startswith("q ") or not lines[3].startswith("mode "):
            raise CorruptCheckpoint(f"{self.path}: bad header")
        if (q, mode) != (self.q, self.mode):
            raise SchemeMismatch(f"{self.path} holds q={q} mode={mode}, expected q={self.q} mode={self.mode}")
        for n, line in enumerate(lines[4:], start=5):
            parts = line.split(" ")
            try:
                if parts[0] == "shard" and len(parts) == 4:
                    i, ny, nz = (int(x) for x in parts[1:])
                    if not 0 <= i < self.n_shards or ny < 0 or nz < 0:
                        raise ValueError
                    if self.done.get(i, (ny, nz)) != (ny, nz):
                        raise ValueError
                    self.done[i] = (ny, nz)
                elif parts[0] == "total" and len(parts) == 2 and self.total is None:
                    self.total = int(parts[1])
                else:
                    raise ValueError
            except ValueError as exc:
                raise CorruptCheckpoint(f"{self.path}:{n}: malformed line {line!r}") from exc
        if self.total is not None and (not self.complete or self.total != self.count()):
            raise CorruptCheckpoint(f"{self.path}: total line disagrees with shard tallies")

    def _append(self, line: str) -> None:
        if self.path is None:
            return
        with open(self.path, "a", encoding="utf-8") as fh:
            fh.write(line + "\n")
            fh.flush()
            os.fsync(fh.fileno())

    def pending(self) -> list[int]:
        return [i for i in range(self.n_shards) if i not in self.done]

    @property
    def complete(self) -> bool:
        return len(self.done) == self.n_shards

    def record(self, index: int, ny: int, nz: int) -> None:
        if index in self.done:
            raise InvariantViolation(f"shard {index} recorded twice")
        if ny < 0 or nz < 0:
            raise InvariantViolation(f"negative tallies for shard {index}")
        self.done[index] = (ny, nz)
        self._append(f"shard {index} {ny} {nz}")

    def tallies(self) -> tuple[int, int]:
        return sum(v[0] for v in self.done.values()), sum(v[1] for v in self.done.values())

    def count(self) -> int:
        return stratified_total(self.q, *self.tallies())

    def finish(self) -> int:
        if not self.complete:
            raise InvariantViolation("cannot finish a ledger with pending shards")
        total = self.count()
        if self.total is None:
            self.total = total
            self._append(f"total {total}")
        return total


def checkpoint_path(q: int, mode: str, checkpoint: str | Path | None) -> Path | None:
    """Resolve the checkpoint location, honouring HYPERCOUNT_CHECKPOINT_DIR.

    With the variable set, a relative ``checkpoint`` is placed inside that
    directory and a missing one defaults to ``xstrip-q<q>-<mode>.ckpt`` there.
    """
    root = os.environ.get(CHECKPOINT_ENV)
    if checkpoint is None:
        return Path(root) / f"xstrip-q{q}-{mode}.ckpt" if root else None
    path = Path(checkpoint)
    if root and not path.is_absolute():
        path = Path(root) / path
    return path


def run_sharded(
    q: int,
    mode: str = "accelerated",
    workers: int = 1,
    checkpoint: str | Path | None = None,
    on_shard: Callable[[int, int, int], None] | None = None,
) -> CountRecord:
    """Stratified XStrip count over q^2 shards, resumable from a checkpoint."""
    if workers < 1:
        raise ValueError("workers must be >= 1")
    spec = make_field(q)
    ledger = ShardLedger(q, mode, checkpoint_path(q, mode, checkpoint))
    t0 = time.perf_counter()
    todo = ledger.pending()

    def accept(index: int, ny: int, nz: int) -> None:
        ledger.record(index, ny, nz)
        if on_shard is not None:
            on_shard(index, ny, nz)

    backend = kernels.backend()
    if workers == 1 or len(todo) <= 1:
        for i in todo:
            accept(i, *count_shard(q, mode, i))
    else:
        with cf.ProcessPoolExecutor(max_workers=workers) as pool:
            futures = [pool.submit(_shard_task, (q, mode, i, backend)) for i in todo]
            try:
                for fut in cf.as_completed(futures):
                    accept(*fut.result())
            except BaseException:
                for fut in futures:
                    fut.cancel()
                raise
    ledger.finish()
    ny, nz = ledger.tallies()
    return CountRecord(
        "xstrip", q, spec.p, spec.k, method_for(mode), ledger.count(), ny, nz,
        elapsed_seconds=time.perf_counter() - t0, n_vars=XSTRIP_VARS,
    )


def count(source: str | Graph, q: int, method: str = "brute", workers: int = 1,
          checkpoint: str | Path | None = None, override: bool = False) -> CountRecord:
    """Dispatch on ``method``; stratified methods exist for XStrip only."""
    if method == "brute":
        return brute_force_count(source, q, override=override)
    if method not in MODES:
        raise ValueError(f"unknown method {method!r}")
    if source != "xstrip":
        raise ValueError("stratified counting is implemented for xstrip only")
    return run_sharded(q, MODES[method], workers=workers, checkpoint=checkpoint)


def count_many(source: str | Graph, qs: Sequence[int], **kw) -> list[CountRecord]:
    return [count(source, q, **kw) for q in qs]
