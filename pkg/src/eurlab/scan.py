"""Grid scans over state families, written as deterministic CSV."""

from __future__ import annotations

import csv
import io
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from itertools import product
from typing import Iterable, Sequence

from .criteria import CRITERION_IDS, NAMED_CRITERIA, evaluate
from .errors import DomainError
from .observables import ObservableScenario, bases_from_names
from .states import StateFamilySpec, make_state

SCAN_IDS = ("eps_family", "ghz", "w_plane", "custom")

# scan id -> (family, scanned parameter names)
_SCAN_FAMILIES = {
    "eps_family": ("eps_family", ("eps",)),
    "ghz": ("ghz", ("l0",)),
    "w_plane": ("w", ("l0", "l2")),
}

DEFAULT_CRITERIA = {
    "eps_family": ("criterio1", "criterio2", "criterio3"),
    "ghz": ("multi_ent1", "multi_ent2", "gen_ent1", "gen_ent2"),
    "w_plane": ("multi_ent1", "multi_ent2", "gen_ent1", "gen_ent2"),
}


def fmt(x: float) -> str:
    return format(float(x), ".9g")


def grid_axis(lo: float, hi: float, steps: int) -> list[float]:
    """``steps`` interior points lo + (hi - lo) k / (steps + 1), k = 1..steps."""
    return [lo + (hi - lo) * k / (steps + 1) for k in range(1, steps + 1)]


@dataclass(frozen=True)
class ScanConfig:
    scan_id: str
    steps: int = 99
    criteria: tuple[str, ...] = ()
    bases: tuple[str, ...] = ("Z", "X", "Y")
    output_path: str | None = None
    seed: int = 0
    ranges: dict = field(default_factory=dict)
    family: str | None = None
    param: str | None = None
    fixed: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.scan_id not in SCAN_IDS:
            raise DomainError(f"scan must be one of {SCAN_IDS}, got {self.scan_id!r}")
        if self.steps < 2:
            raise DomainError(f"steps must be >= 2, got {self.steps}")
        for name, (lo, hi) in self.ranges.items():
            if not lo < hi:
                raise DomainError(f"range for {name}: min {lo} must be below max {hi}")
            if lo < 0 or hi > 1:
                raise DomainError(f"range for {name} must stay inside [0, 1], got ({lo}, {hi})")
        if self.scan_id == "custom" and (not self.family or not self.param):
            raise DomainError("custom scans need both family and param")
        if not self.criteria and self.scan_id == "custom":
            raise DomainError("custom scans need an explicit criteria list")
        for c in self.criteria:
            if c not in NAMED_CRITERIA and c not in CRITERION_IDS:
                raise DomainError(f"unknown criterion {c!r}")

    @property
    def family_name(self) -> str:
        return self.family if self.scan_id == "custom" else _SCAN_FAMILIES[self.scan_id][0]

    @property
    def parameters(self) -> tuple[str, ...]:
        return (self.param,) if self.scan_id == "custom" else _SCAN_FAMILIES[self.scan_id][1]

    @property
    def criteria_list(self) -> tuple[str, ...]:
        return self.criteria or DEFAULT_CRITERIA[self.scan_id]

    def axes(self) -> list[list[float]]:
        return [grid_axis(*self.ranges.get(p, (0.0, 1.0)), self.steps) for p in self.parameters]


def _site_count(family: str, fixed: dict) -> tuple[int, int]:
    if family in ("bell_phi_plus", "eps_family"):
        return 2, 2
    if family == "qudit_schmidt":
        return 2, len(fixed.get("lambdas", ()))
    return 3, 2


def _criterion_plan(config: ScanConfig) -> list[tuple[str, str, ObservableScenario]]:
    n_sites, d = _site_count(config.family_name, config.fixed)
    plan = []
    for name in config.criteria_list:
        cid, names = NAMED_CRITERIA.get(name, (name, config.bases))
        scenario = ObservableScenario.uniform(bases_from_names(d, names), n_sites)
        plan.append((name, cid, scenario))
    return plan


def header(config: ScanConfig) -> list[str]:
    cols = list(config.parameters) + ["status"]
    for name, _, scenario in _criterion_plan(config):
        cols += [f"{name}_H{j + 1}" for j in range(scenario.L)]
        cols += [f"{name}_lhs", f"{name}_threshold", f"{name}_margin", f"{name}_verdict"]
    return cols


def _feasible(config: ScanConfig, point: dict) -> bool:
    if config.scan_id == "w_plane":
        return point["l0"] ** 2 + point["l2"] ** 2 < 1.0
    return True


def evaluate_point(config: ScanConfig, values: Sequence[float], plan=None) -> list[str]:
    """One CSV row for the grid point ``values``."""
    if plan is None:
        plan = _criterion_plan(config)
    point = dict(zip(config.parameters, values))
    row = [fmt(v) for v in values]
    ncols = sum(scenario.L + 4 for _, _, scenario in plan)
    if not _feasible(config, point):
        return row + ["infeasible"] + [""] * ncols
    try:
        state = make_state(StateFamilySpec(config.family_name, {**config.fixed, **point}))
    except DomainError:
        return row + ["infeasible"] + [""] * ncols
    row.append("ok")
    for _, cid, scenario in plan:
        rep = evaluate(cid, state, scenario)
        row += [fmt(rep.components[f"H{j + 1}"]) for j in range(scenario.L)]
        row += [fmt(rep.lhs), fmt(rep.threshold), fmt(rep.margin), rep.verdict]
    return row


def _evaluate_chunk(args):
    config, plan, points = args
    return [evaluate_point(config, p, plan) for p in points]


def default_workers() -> int:
    env = os.environ.get("EURLAB_THREADS")
    if env:
        try:
            n = int(env)
        except ValueError:
            raise DomainError(f"EURLAB_THREADS must be an integer, got {env!r}") from None
        return max(n, 1)
    return os.cpu_count() or 1


def run_scan(config: ScanConfig, workers: int | None = None) -> tuple[list[str], list[list[str]]]:
    """Evaluate every grid point in lexicographic order; returns (header, rows)."""
    workers = default_workers() if workers is None else max(int(workers), 1)
    points = list(product(*config.axes()))
    cols = header(config)
    plan = _criterion_plan(config)
    if workers == 1 or len(points) < 64:
        rows = [evaluate_point(config, p, plan) for p in points]
    else:
        size = max(len(points) // (workers * 8), 1)
        chunks = [(config, plan, points[i:i + size]) for i in range(0, len(points), size)]
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = [r for chunk in pool.map(_evaluate_chunk, chunks) for r in chunk]
    return cols, rows


def to_csv(cols: Sequence[str], rows: Iterable[Sequence[str]]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\r\n")
    writer.writerow(cols)
    writer.writerows(rows)
    return buf.getvalue()


def write_scan(config: ScanConfig, workers: int | None = None) -> str:
    cols, rows = run_scan(config, workers)
    text = to_csv(cols, rows)
    if config.output_path:
        with open(config.output_path, "w", newline="", encoding="utf-8") as fh:
            fh.write(text)
    return text


def verify_csv(text: str) -> list[str]:
    """Recompute every verdict from its row's lhs and threshold columns.

    Returns a list of problems; an empty list means the file is consistent.
    Values carry 9 significant digits, so margins within 1e-7 of zero may
    legitimately go either way.
    """
    reader = csv.reader(io.StringIO(text))
    try:
        cols = next(reader)
    except StopIteration:
        return ["file is empty"]
    if "status" not in cols:
        return ["header has no status column"]
    prefixes = [c[: -len("_verdict")] for c in cols if c.endswith("_verdict")]
    idx = {c: i for i, c in enumerate(cols)}
    problems = []
    for lineno, row in enumerate(reader, start=2):
        if len(row) != len(cols):
            problems.append(f"line {lineno}: {len(row)} fields, header has {len(cols)}")
            continue
        if row[idx["status"]] != "ok":
            continue
        for p in prefixes:
            try:
                lhs = float(row[idx[f"{p}_lhs"]])
                thr = float(row[idx[f"{p}_threshold"]])
                margin = float(row[idx[f"{p}_margin"]])
            except (KeyError, ValueError) as exc:
                problems.append(f"line {lineno}: {p}: unreadable numbers ({exc})")
                continue
            verdict = row[idx[f"{p}_verdict"]]
            scale = max(1.0, abs(lhs), abs(thr))
            if abs((lhs - thr) - margin) > 1e-7 * scale:
                problems.append(f"line {lineno}: {p}: margin {margin} != lhs - threshold {lhs - thr}")
            recomputed = lhs - thr
            if abs(recomputed) > 1e-7 * scale:
                expected = "violated" if recomputed < 0 else "satisfied"
                if verdict != expected:
                    problems.append(f"line {lineno}: {p}: verdict {verdict} but lhs - threshold = {recomputed}")
            elif verdict not in ("violated", "satisfied"):
                problems.append(f"line {lineno}: {p}: unknown verdict {verdict!r}")
    return problems
