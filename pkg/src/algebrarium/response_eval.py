"""Grading of boxed answers and per-instance success-probability estimates."""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Optional

from .algebra import Element, parse, render
from .errors import (
    ConfigError, DataFormatError, DomainError, EmptyRecord, ParseError,
)
from .jsonl import iter_jsonl, load_jsonl, write_jsonl


class State(str, enum.Enum):
    NULL = "Null"
    TRANSITIONAL = "Transitional"
    FEASIBLE = "Feasible"


@dataclass(frozen=True)
class ClassificationConfig:
    """Capability thresholds.

    ``epsilon`` is the rule-of-three bound ``3 / k_large`` (zero successes in
    ``k_large`` draws); ``delta`` is ``1 / k_min``, one expected success
    within the minimal budget.
    """

    k_large: int = 128
    k_min: int = 8

    @property
    def epsilon(self) -> float:
        return 3.0 / self.k_large

    @property
    def delta(self) -> float:
        return 1.0 / self.k_min


def classify(p_hat: float, cfg: ClassificationConfig = ClassificationConfig()) -> State:
    if cfg.epsilon >= cfg.delta:
        raise ConfigError(f"epsilon {cfg.epsilon:g} must be below delta {cfg.delta:g}")
    if not 0.0 <= p_hat <= 1.0:
        raise DomainError(f"p_hat {p_hat} outside [0, 1]")
    if p_hat < cfg.epsilon:
        return State.NULL
    if p_hat >= cfg.delta:
        return State.FEASIBLE
    return State.TRANSITIONAL


_BOXED_RE = re.compile(r"\\boxed\s*\{")
_UNESCAPE = (
    (r"\#", "#"),
    (r"\varepsilon", "ε"),
    (r"\epsilon", "ε"),
)


def _balanced_body(text: str, start: int) -> Optional[str]:
    depth = 1
    for i in range(start, len(text)):
        ch = text[i]
        if ch == "{":
            depth += 1
        elif ch == "}":
            depth -= 1
            if depth == 0:
                return text[start:i]
    return None


def extract_boxed(raw: str) -> Optional[str]:
    """Content of the last complete ``\\boxed{...}`` marker, or ``None``.

    A trailing marker whose braces never close (a truncated generation) is
    skipped in favour of the previous complete one.
    """
    if not raw:
        return None
    for m in reversed(list(_BOXED_RE.finditer(raw))):
        body = _balanced_body(raw, m.end())
        if body is not None:
            body = body.strip()
            for src, dst in _UNESCAPE:
                body = body.replace(src, dst)
            return body.strip()
    return None


def grade(answer_text: Optional[str], truth: Element) -> bool:
    """Exact match at the level of group elements.

    The answer is parsed in the truth's domain and compared canonically;
    text that does not parse falls back to string equality with the rendered
    truth.
    """
    if answer_text is None:
        return False
    try:
        return parse(truth.domain, answer_text) == truth
    except ParseError:
        return answer_text.strip() == render(truth)


@dataclass
class ResponseRecord:
    task_id: str
    samples: list
    graded: Optional[list] = None
    model: Optional[str] = None

    def to_json(self) -> dict:
        d = {"task_id": self.task_id, "samples": list(self.samples)}
        if self.model is not None:
            d["model"] = self.model
        return d

    @classmethod
    def from_json(cls, d: dict) -> "ResponseRecord":
        samples = d["samples"]
        if not isinstance(samples, list) or not all(isinstance(s, str) for s in samples):
            raise ValueError("samples must be a list of strings")
        return cls(task_id=str(d["task_id"]), samples=samples, model=d.get("model"))


def grade_record(rec: ResponseRecord, truth: Element) -> ResponseRecord:
    graded = [grade(extract_boxed(s), truth) for s in rec.samples]
    return ResponseRecord(rec.task_id, list(rec.samples), graded, rec.model)


@dataclass(frozen=True)
class InstanceEstimate:
    task_id: str
    n: int
    c: int
    p_hat: float = field(init=False)
    state: State = field(init=False)
    cfg: ClassificationConfig = field(default=ClassificationConfig(), repr=False, compare=False)

    def __post_init__(self):
        if self.n < 1:
            raise EmptyRecord(f"{self.task_id}: no samples")
        if not 0 <= self.c <= self.n:
            raise DomainError(f"{self.task_id}: c={self.c} outside [0, {self.n}]")
        p = self.c / self.n
        object.__setattr__(self, "p_hat", p)
        object.__setattr__(self, "state", classify(p, self.cfg))

    def to_json(self) -> dict:
        return {
            "task_id": self.task_id, "n": self.n, "c": self.c,
            "p_hat": self.p_hat, "state": self.state.value,
        }

    @classmethod
    def from_json(cls, d: dict, cfg: ClassificationConfig = ClassificationConfig()) -> "InstanceEstimate":
        return cls(str(d["task_id"]), int(d["n"]), int(d["c"]), cfg)


def estimate(rec: ResponseRecord, cfg: ClassificationConfig = ClassificationConfig()) -> InstanceEstimate:
    if not rec.samples:
        raise EmptyRecord(f"{rec.task_id}: no samples")
    if rec.graded is None or len(rec.graded) != len(rec.samples):
        raise ValueError(f"{rec.task_id}: record has not been graded")
    return InstanceEstimate(rec.task_id, len(rec.graded), sum(map(bool, rec.graded)), cfg)


def estimate_records(records: Iterable[ResponseRecord], truths: Mapping[str, Element],
                     cfg: ClassificationConfig = ClassificationConfig()) -> list:
    return [estimate(grade_record(r, truths[r.task_id]), cfg) for r in records]


def grade_file(path, truths: Mapping[str, Element],
               cfg: ClassificationConfig = ClassificationConfig()) -> list:
    """Grade a ``responses.jsonl`` log; errors name the offending line."""
    out = []
    for lineno, obj in iter_jsonl(path):
        try:
            rec = ResponseRecord.from_json(obj)
        except (KeyError, TypeError, ValueError) as exc:
            raise DataFormatError(f"bad response record: {exc}", path, lineno) from None
        if rec.task_id not in truths:
            raise DataFormatError(f"unknown task_id {rec.task_id!r}", path, lineno)
        if not rec.samples:
            raise DataFormatError(f"{rec.task_id}: empty samples list", path, lineno)
        out.append(estimate(grade_record(rec, truths[rec.task_id]), cfg))
    return out


def truth_table(tasks: Iterable, chains: Iterable = ()) -> dict:
    """Map task ids and step ids (``<task_id>/s<j>``) to their ground truth."""
    table = {t.task_id: t.answer for t in tasks}
    for chain in chains:
        for step in chain.steps:
            table[step.step_id] = step.truth
    return table


def write_responses(path, records: Iterable[ResponseRecord]) -> None:
    write_jsonl(path, (r.to_json() for r in records))


def load_responses(path) -> list:
    return load_jsonl(path, ResponseRecord.from_json)


def write_estimates(path, estimates: Iterable[InstanceEstimate]) -> None:
    write_jsonl(path, (e.to_json() for e in estimates))


def load_estimates(path, cfg: ClassificationConfig = ClassificationConfig()) -> list:
    return load_jsonl(path, lambda d: InstanceEstimate.from_json(d, cfg))
