"""Pass@k curves, the multiplicative barrier, capability census, emergence
and per-skill shift analysis.

All functions take :class:`~algebrarium.response_eval.InstanceEstimate`
objects (or plain numbers) and are pure reductions.
"""

from __future__ import annotations

import math
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Optional, Sequence

import numpy as np

from .errors import DegenerateInput, DomainError, EmptyChain, IdMismatch, InsufficientData
from .response_eval import ClassificationConfig, InstanceEstimate, State, classify

DEFAULT_KS = (1, 2, 4, 8, 16, 32, 64, 128)


# ------------------------------------------------------------------ pass@k ---

def theoretical_pass_k(p_hat: float, k: int) -> float:
    """Expected Pass@k of one instance solved with probability ``p_hat``."""
    if k < 1:
        raise DomainError(f"k must be >= 1, got {k}")
    if not 0.0 <= p_hat <= 1.0:
        raise DomainError(f"p_hat {p_hat} outside [0, 1]")
    return 1.0 - (1.0 - p_hat) ** k


def empirical_pass_k(n: int, c: int, k: int) -> float:
    """Unbiased Pass@k from ``c`` successes among ``n`` samples.

    ``1 - C(n-c, k) / C(n, k)``, evaluated as a running product of
    ``(n-c-i) / (n-i)`` so no factorial is ever formed.
    """
    if not 0 <= c <= n:
        raise DomainError(f"c={c} outside [0, {n}]")
    if not 1 <= k <= n:
        raise DomainError(f"k={k} outside [1, n={n}]")
    if n - c < k:
        return 1.0
    miss = 1.0
    for i in range(k):
        miss *= (n - c - i) / (n - i)
    return 1.0 - miss


@dataclass(frozen=True)
class PassKCurve:
    ks: tuple
    values: tuple
    kind: str  # "theoretical" | "empirical"


def dataset_pass_k_curves(estimates: Sequence[InstanceEstimate], ks: Iterable[int] = DEFAULT_KS):
    """Dataset-level (theoretical, empirical) Pass@k curves, averaged over instances."""
    ks = tuple(int(k) for k in ks)
    if not estimates:
        raise InsufficientData("no estimates")
    n_min = min(e.n for e in estimates)
    if max(ks) > n_min:
        raise DomainError(f"k={max(ks)} exceeds the smallest sample count n={n_min}")
    theo = tuple(float(np.mean([theoretical_pass_k(e.p_hat, k) for e in estimates])) for k in ks)
    emp = tuple(float(np.mean([empirical_pass_k(e.n, e.c, k) for e in estimates])) for k in ks)
    return PassKCurve(ks, theo, "theoretical"), PassKCurve(ks, emp, "empirical")


def curve_mse(a: PassKCurve, b: PassKCurve) -> float:
    if a.ks != b.ks:
        raise DomainError("curves are sampled at different k")
    return float(np.mean((np.asarray(a.values) - np.asarray(b.values)) ** 2))


# ------------------------------------------------------------------ barrier ---

def joint_probability(chain_estimates: Sequence[InstanceEstimate]) -> float:
    """Product of per-step success estimates (the independent-steps prediction)."""
    if not chain_estimates:
        raise EmptyChain("no step estimates")
    return math.prod(e.p_hat for e in chain_estimates)


@dataclass(frozen=True)
class BarrierFit:
    p_hat_fit: float
    points_used: int
    residual_rms: float
    dropped_zero_points: int

    def predict(self, depth: int) -> float:
        return self.p_hat_fit ** depth


def fit_barrier(points: Iterable[tuple]) -> BarrierFit:
    """Fit ``P = p ** N`` by least squares on ``log P = N log p`` through the origin.

    Points with ``P == 0`` have no logarithm; they are dropped and counted.
    ``residual_rms`` is measured in log space, where the fit is made.
    """
    kept, dropped = [], 0
    for depth, prob in points:
        if not 0.0 <= prob <= 1.0 or depth < 0:
            raise DomainError(f"bad point ({depth}, {prob})")
        if prob == 0.0:
            dropped += 1
        else:
            kept.append((float(depth), math.log(prob)))
    if len(kept) < 2:
        raise InsufficientData(f"{len(kept)} usable point(s); need at least 2 with P > 0")
    x = np.array([d for d, _ in kept])
    y = np.array([lp for _, lp in kept])
    if not np.any(x):
        raise InsufficientData("all usable points sit at depth 0")
    slope = float(x @ y / (x @ x))
    resid = y - slope * x
    return BarrierFit(
        p_hat_fit=math.exp(slope),
        points_used=len(kept),
        residual_rms=float(np.sqrt(np.mean(resid ** 2))),
        dropped_zero_points=dropped,
    )


def pearson(xs: Sequence[float], ys: Sequence[float]) -> float:
    x = np.asarray(xs, dtype=float)
    y = np.asarray(ys, dtype=float)
    if x.shape != y.shape or x.ndim != 1 or len(x) < 2:
        raise DegenerateInput("need two equal-length sequences of at least 2 values")
    dx, dy = x - x.mean(), y - y.mean()
    sxx, syy = float(dx @ dx), float(dy @ dy)
    if sxx == 0.0 or syy == 0.0:
        raise DegenerateInput("zero variance")
    r = float(dx @ dy) / math.sqrt(sxx * syy)
    return max(-1.0, min(1.0, r))


# ------------------------------------------------------------- transitions ---

def census(estimates: Iterable[InstanceEstimate]) -> dict:
    counts = {s: 0 for s in State}
    for e in estimates:
        counts[e.state] += 1
    return counts


def _by_id(estimates: Iterable[InstanceEstimate]) -> dict:
    return {e.task_id: e for e in estimates}


def _matched(base, post):
    b, p = _by_id(base), _by_id(post)
    if b.keys() != p.keys():
        missing = sorted(b.keys() ^ p.keys())
        raise IdMismatch(f"{len(missing)} id(s) present on one side only, e.g. {missing[:3]}")
    return b, p


@dataclass(frozen=True)
class EmergenceReport:
    null_count_base: int
    recovered_count: int
    recovery_rate: float
    recovered_mean: Optional[float]
    recovered_median: Optional[float]
    histogram: tuple  # counts over ten equal bins of [0, 1]
    bin_edges: tuple = tuple(i / 10 for i in range(11))


def emergence(base: Iterable[InstanceEstimate], post: Iterable[InstanceEstimate],
              cfg: ClassificationConfig = ClassificationConfig()) -> EmergenceReport:
    """Share of base-Null tasks that are Feasible after training.

    ``recovery_rate`` is 0 when the base model has no Null tasks.
    """
    b, p = _matched(base, post)
    null_ids = sorted(i for i, e in b.items() if classify(e.p_hat, cfg) is State.NULL)
    recovered = [p[i].p_hat for i in null_ids if classify(p[i].p_hat, cfg) is State.FEASIBLE]
    hist, _ = np.histogram(recovered, bins=10, range=(0.0, 1.0))
    return EmergenceReport(
        null_count_base=len(null_ids),
        recovered_count=len(recovered),
        recovery_rate=len(recovered) / len(null_ids) if null_ids else 0.0,
        recovered_mean=float(np.mean(recovered)) if recovered else None,
        recovered_median=float(np.median(recovered)) if recovered else None,
        histogram=tuple(int(h) for h in hist),
    )


@dataclass(frozen=True)
class ShiftRecord:
    skill_id: str
    base_acc: float
    delta: float


def shift_analysis(base: Iterable[InstanceEstimate], post: Iterable[InstanceEstimate]) -> list:
    b, p = _matched(base, post)
    return [ShiftRecord(i, b[i].p_hat, p[i].p_hat - b[i].p_hat) for i in sorted(b)]


def erosion_count(shifts: Iterable[ShiftRecord], mastered: float = 0.8, drop: float = -0.1) -> int:
    """Skills that were mastered (``base_acc >= mastered``) and lost at least ``-drop``."""
    return sum(1 for s in shifts if s.base_acc >= mastered and s.delta <= drop)


# --------------------------------------------------------------- pipelines ---

def depth_points(estimates: Mapping[str, InstanceEstimate], tasks: Iterable) -> dict:
    """Mean composite success per depth, keyed by domain value and ``"all"``."""
    acc = defaultdict(lambda: defaultdict(list))
    for t in tasks:
        if t.mode != "forward_eval" or t.task_id not in estimates:
            continue
        p = estimates[t.task_id].p_hat
        acc[t.domain.value][t.depth].append(p)
        acc["all"][t.depth].append(p)
    return {
        scope: [(d, float(np.mean(v))) for d, v in sorted(by_depth.items())]
        for scope, by_depth in sorted(acc.items())
    }


@dataclass(frozen=True)
class ProcessOutcome:
    task_id: str
    domain: str
    depth: int
    joint: float
    outcome: float


def process_outcome(estimates: Mapping[str, InstanceEstimate], tasks: Iterable,
                    chains: Mapping) -> list:
    """Pair each multi-step task's measured accuracy with its joint step probability."""
    rows = []
    for t in tasks:
        chain = chains.get(t.task_id)
        if chain is None or t.depth < 2 or t.task_id not in estimates:
            continue
        steps = [estimates.get(s.step_id) for s in chain.steps]
        if any(s is None for s in steps):
            continue
        rows.append(ProcessOutcome(t.task_id, t.domain.value, t.depth,
                                   joint_probability(steps), estimates[t.task_id].p_hat))
    return rows


@dataclass
class AnalysisReport:
    theoretical: Optional[PassKCurve] = None
    empirical: Optional[PassKCurve] = None
    curve_mse: Optional[float] = None
    census: dict = field(default_factory=dict)  # (domain, depth) -> {state: count}
    barrier_points: dict = field(default_factory=dict)
    barrier_fits: dict = field(default_factory=dict)
    correlation_rows: list = field(default_factory=list)
    correlation: Optional[float] = None
    emergence: Optional[EmergenceReport] = None
    shifts: Optional[list] = None
    erosion_count: Optional[int] = None


def analyze(estimates: Sequence[InstanceEstimate], tasks: Sequence, chains: Mapping,
            ks: Iterable[int] = DEFAULT_KS,
            cfg: ClassificationConfig = ClassificationConfig(),
            compare: Optional[tuple] = None) -> AnalysisReport:
    """Run every single-log analysis; ``compare=(base, post)`` adds emergence and shifts.

    In comparison mode the emergence census is restricted to task-level
    estimates, and shifts to atomic skills (step records and depth-1 tasks).
    """
    report = AnalysisReport()
    by_id = _by_id(estimates)
    task_ids = {t.task_id for t in tasks}
    task_est = [e for e in estimates if e.task_id in task_ids] if tasks else list(estimates)

    if task_est:
        n_min = min(e.n for e in task_est)
        usable = tuple(k for k in ks if k <= n_min)
        if usable:
            report.theoretical, report.empirical = dataset_pass_k_curves(task_est, usable)
            report.curve_mse = curve_mse(report.theoretical, report.empirical)

    groups = defaultdict(list)
    for t in tasks:
        if t.task_id in by_id:
            groups[(t.domain.value, t.depth)].append(by_id[t.task_id])
    if not tasks:
        groups[("all", 0)] = list(estimates)
    report.census = {key: census(v) for key, v in sorted(groups.items())}

    report.barrier_points = depth_points(by_id, tasks)
    for scope, pts in report.barrier_points.items():
        try:
            report.barrier_fits[scope] = fit_barrier(pts)
        except InsufficientData:
            pass

    report.correlation_rows = process_outcome(by_id, tasks, chains)
    if len(report.correlation_rows) >= 2:
        try:
            report.correlation = pearson([r.joint for r in report.correlation_rows],
                                         [r.outcome for r in report.correlation_rows])
        except DegenerateInput:
            report.correlation = None

    if compare is not None:
        base, post = list(compare[0]), list(compare[1])
        if task_ids:
            depth_one = {t.task_id for t in tasks if t.depth == 1}
            is_task = lambda e: e.task_id in task_ids
            is_skill = lambda e: "/s" in e.task_id or e.task_id in depth_one
        else:
            is_task = is_skill = lambda e: True
        report.emergence = emergence([e for e in base if is_task(e)],
                                     [e for e in post if is_task(e)], cfg)
        report.shifts = shift_analysis([e for e in base if is_skill(e)],
                                       [e for e in post if is_skill(e)])
        report.erosion_count = erosion_count(report.shifts)
    return report
