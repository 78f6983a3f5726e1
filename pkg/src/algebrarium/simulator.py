"""A stochastic stand-in for a policy that solves each atomic step with a
fixed probability, independently of every other step.

In this world the composite success probability of an ``N``-step chain is
exactly ``p ** N``, which makes the simulator an oracle for the analytics.
Failed samples still emit a well-formed boxed answer: the truth combined with
a random non-identity element, which can never equal the truth.
"""

from __future__ import annotations

import hashlib
import random
import sys
from dataclasses import dataclass, field
from typing import Mapping, Optional

from .algebra import Element, combine, render
from .domains import DomainId
from .errors import ConfigError, ProfileMismatch
from .response_eval import ResponseRecord
from .taskgen import (
    FORWARD, AtomicStep, DecompositionChain, ExpressionTask, GenerationConfig, decompose,
    sample_nonidentity,
)

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

ERROR_MODELS = ("corrupt_by_random_factor",)
_CORRUPTION_BOUNDS = GenerationConfig(counts={})


@dataclass(frozen=True)
class AgentProfile:
    label: str
    step_success: Mapping
    seed: int = 0
    error_model: str = "corrupt_by_random_factor"
    # optional per-step-index probabilities (1-based) overriding the domain value
    step_overrides: Mapping = field(default_factory=dict)

    def __post_init__(self):
        probs = {DomainId.lookup(d): float(p) for d, p in self.step_success.items()}
        overrides = {int(j): float(p) for j, p in self.step_overrides.items()}
        for p in (*probs.values(), *overrides.values()):
            if not 0.0 <= p <= 1.0:
                raise ConfigError(f"step probability {p} outside [0, 1]")
        if self.error_model not in ERROR_MODELS:
            raise ConfigError(f"unknown error model {self.error_model!r}")
        object.__setattr__(self, "step_success", probs)
        object.__setattr__(self, "step_overrides", overrides)

    def p_step(self, domain: DomainId, j: int = 1) -> float:
        if j in self.step_overrides:
            return self.step_overrides[j]
        try:
            return self.step_success[domain]
        except KeyError:
            raise ProfileMismatch(f"profile {self.label!r} has no probability for {domain.value}") from None

    @classmethod
    def from_toml(cls, text: str) -> "AgentProfile":
        """Flat key/value profile: ``label``, ``seed``, ``error_model`` and one
        probability per domain name (any accepted alias)."""
        try:
            raw = tomllib.loads(text)
        except tomllib.TOMLDecodeError as exc:
            raise ConfigError(f"invalid profile: {exc}") from None
        label = str(raw.pop("label", "agent"))
        seed = int(raw.pop("seed", 0))
        error_model = raw.pop("error_model", "corrupt_by_random_factor")
        overrides = raw.pop("step_overrides", {})
        probs = {}
        for key, value in raw.items():
            try:
                probs[DomainId.lookup(key)] = value
            except ValueError:
                raise ConfigError(f"unknown profile key {key!r}") from None
        return cls(label, probs, seed, error_model, overrides)

    @classmethod
    def load(cls, path) -> "AgentProfile":
        with open(path, encoding="utf-8") as fh:
            return cls.from_toml(fh.read())


def _sample_rng(seed: int, item_id: str, index: int) -> random.Random:
    key = f"{seed}\x1f{item_id}\x1f{index}".encode()
    return random.Random(int.from_bytes(hashlib.blake2b(key, digest_size=8).digest(), "big"))


def corrupt(truth: Element, rng: random.Random) -> Element:
    """A guaranteed-wrong answer: ``truth`` combined with a non-identity factor."""
    return combine(truth, sample_nonidentity(truth.domain, _CORRUPTION_BOUNDS, rng))


def _emit(answer: Element) -> str:
    return f"Combining step by step gives \\boxed{{{render(answer)}}}"


def _simulate(item_id: str, truth: Element, probs: list, prof: AgentProfile, n: int) -> ResponseRecord:
    if n < 1:
        raise ConfigError("need at least one sample")
    samples = []
    for i in range(n):
        rng = _sample_rng(prof.seed, item_id, i)
        ok = True
        for p in probs:
            # draw every step so each sample consumes a fixed-length prefix of its stream
            ok = (rng.random() < p) and ok
        samples.append(_emit(truth if ok else corrupt(truth, rng)))
    return ResponseRecord(item_id, samples, model=prof.label)


def simulate_composite(task: ExpressionTask, chain: DecompositionChain,
                       prof: AgentProfile, n: int) -> ResponseRecord:
    if chain.task_id != task.task_id or len(chain.steps) != task.depth:
        raise ValueError(f"chain does not match task {task.task_id}")
    probs = [prof.p_step(task.domain, s.j) for s in chain.steps]
    return _simulate(task.task_id, task.answer, probs, prof, n)


def simulate_atomic(step: AtomicStep, prof: AgentProfile, n: int) -> ResponseRecord:
    return _simulate(step.step_id, step.truth, [prof.p_step(step.domain, step.j)], prof, n)


def simulate_log(tasks, chains: Optional[Mapping] = None, prof: AgentProfile = None,
                 n: int = 128, atomic: bool = True) -> list:
    """Composite records for every task, followed by atomic records for each
    step of every multi-step chain when ``atomic`` is set."""
    chains = dict(chains or {})
    records = []
    steps = []
    for t in tasks:
        if t.mode != FORWARD:
            records.append(_simulate(t.task_id, t.answer, [prof.p_step(t.domain)], prof, n))
            continue
        chain = chains.get(t.task_id) or decompose(t)
        records.append(simulate_composite(t, chain, prof, n))
        if atomic and t.depth > 1:
            steps.extend(chain.steps)
    records.extend(simulate_atomic(s, prof, n) for s in steps)
    return records
