"""Engine registry and the benchmark harness behind ``envyext bench``."""
from __future__ import annotations

import csv
import io as _io
import time
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path
from typing import Optional

from envyext.core import EFAE, Answer, Instance, SolveOutcome
from envyext.dp import solve_dp
from envyext.errors import ExtensionError
from envyext.fpt import solve_fpt_k_nt
from envyext.ilp import solve_ilp_query
from envyext.oracle import solve_bruteforce

COLUMNS = ("path", "engine", "answer", "millis", "nodes")
DISAGREEMENT = "DISAGREEMENT"


def _brute(inst, t):
    return solve_bruteforce(inst, time_limit=t)


def _fpt(inst, t):
    return solve_fpt_k_nt(inst, time_limit=t)


def _dp(inst, t):
    return solve_dp(inst, time_limit=t)


def _ilp(inst, t):
    return solve_ilp_query(inst)


ENGINES = {"brute": _brute, "fpt-k-nt": _fpt, "dp-p-nt": _dp, "ilp-p-mt": _ilp}


def applicable(engine: str, inst: Instance) -> bool:
    if engine == "brute":
        return True
    if engine == "fpt-k-nt":
        return inst.query.variant == EFAE
    return inst.query.variant != EFAE


def run_engine(engine: str, inst: Instance, time_limit: Optional[float] = None) -> SolveOutcome:
    """Dispatch by id; ``time_limit`` is in seconds (the ILP path uses its node budget instead)."""
    return ENGINES[engine](inst, time_limit)


def _bench_file(path: str, engines, time_limit):
    from envyext.io import read_instance

    try:
        inst = read_instance(path)
    except (OSError, ExtensionError) as exc:
        code = getattr(exc, "code", "IO_ERROR")
        return [(path, "", f"ERROR:{code}", "", "")]
    rows = []
    for name in engines:
        if not applicable(name, inst):
            continue
        t0 = time.perf_counter()
        try:
            out = run_engine(name, inst, time_limit)
            answer, nodes = out.answer.value, out.stats.get("nodes", "")
        except ExtensionError as exc:
            answer, nodes = f"ERROR:{exc.code}", ""
        millis = round((time.perf_counter() - t0) * 1000)
        rows.append((path, name, answer, millis, nodes))
    verdicts = {r[2] for r in rows if r[2] in (Answer.YES.value, Answer.NO.value)}
    if len(verdicts) > 1:
        rows.append((path, DISAGREEMENT, "/".join(sorted(verdicts)), "", ""))
    return rows


def run_bench(directory, engines=None, timeout_ms: Optional[int] = None, jobs: int = 1) -> list:
    """Rows ``(path, engine, answer, millis, nodes)`` for every ``*.json`` file, ordered by path."""
    engines = list(engines or ENGINES)
    unknown = [e for e in engines if e not in ENGINES]
    if unknown:
        raise ValueError(f"unknown engines: {unknown}")
    paths = sorted(str(p) for p in Path(directory).glob("*.json"))
    limit = None if timeout_ms is None else timeout_ms / 1000
    if jobs > 1 and len(paths) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            chunks = list(pool.map(_bench_file, paths, [engines] * len(paths), [limit] * len(paths)))
    else:
        chunks = [_bench_file(p, engines, limit) for p in paths]
    return [row for chunk in chunks for row in chunk]


def to_csv(rows) -> str:
    buf = _io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(COLUMNS)
    w.writerows(rows)
    return buf.getvalue()
