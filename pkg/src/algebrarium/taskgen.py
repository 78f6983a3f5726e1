"""Seeded dataset construction: operand sampling, ground truth, splits,
sequential decomposition and JSONL serialization.

Every task draws from its own RNG stream keyed on
``(seed, domain, mode, depth, index)``, so a dataset is a pure function of
its :class:`GenerationConfig` no matter how many workers build it.
"""

from __future__ import annotations

import hashlib
import json
import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Sequence

from .algebra import Element, fold_chain, identity, parse, render, solve_for_x
from .domains import CUBE_FACES, KNIT_LETTERS, CubeToken, DomainId, cube_reduce
from .errors import ConfigError, ResampleExhausted, UnsupportedMode
from .jsonl import load_jsonl, write_jsonl

ALL_DOMAINS = tuple(DomainId)
DEFAULT_COUNTS = {1: 3200, 2: 50, 3: 50, 4: 50, 5: 50}
MAX_ATTEMPTS = 1000

FORWARD = "forward_eval"
SOLVE = "solve_equation"

_SHORT = {
    DomainId.ENCRYPTED_HISTORY: "eh",
    DomainId.ENIGMA: "enigma",
    DomainId.KNITTING: "knit",
    DomainId.RUBIKS_CUBE: "cube",
}
_KNIT_NEXT = {ch: [c for c in KNIT_LETTERS if c != ch.swapcase()] for ch in KNIT_LETTERS}


def split_for_depth(depth: int) -> str:
    return "train" if depth == 1 else "test"


@dataclass
class GenerationConfig:
    seed: int = 0
    domains: tuple = ALL_DOMAINS
    counts: dict = field(default_factory=lambda: dict(DEFAULT_COUNTS))
    eh_magnitude: tuple = (1, 342)
    knit_length: tuple = (1, 6)
    cube_length: tuple = (1, 4)
    reject_degenerate: bool = True
    solve_equation_count: int = 0

    def __post_init__(self):
        self.domains = tuple(DomainId.lookup(d) for d in self.domains)
        self.counts = {int(k): int(v) for k, v in self.counts.items()}
        for name in ("eh_magnitude", "knit_length", "cube_length"):
            lo, hi = (int(x) for x in getattr(self, name))
            if lo > hi or lo < 0:
                raise ConfigError(f"{name} range [{lo}, {hi}] is empty or negative")
            setattr(self, name, (lo, hi))
        for depth, n in self.counts.items():
            if depth < 1 or n < 0:
                raise ConfigError(f"invalid count {n} for depth {depth}")
        if self.solve_equation_count < 0:
            raise ConfigError("solve_equation_count must be >= 0")

    def to_dict(self) -> dict:
        d = asdict(self)
        d["domains"] = [dom.value for dom in self.domains]
        d["counts"] = {str(k): v for k, v in sorted(self.counts.items())}
        d["eh_magnitude"] = list(self.eh_magnitude)
        d["knit_length"] = list(self.knit_length)
        d["cube_length"] = list(self.cube_length)
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "GenerationConfig":
        known = {k: v for k, v in d.items() if k in cls.__dataclass_fields__}
        unknown = set(d) - set(known)
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        return cls(**known)

    def config_hash(self) -> str:
        blob = json.dumps(self.to_dict(), sort_keys=True).encode()
        return hashlib.sha256(blob).hexdigest()[:16]


@dataclass(frozen=True)
class ExpressionTask:
    task_id: str
    domain: DomainId
    depth: int
    operands: tuple
    mode: str
    answer: Element
    split: str

    @property
    def prompt(self) -> str:
        return render_prompt(self)

    def to_json(self) -> dict:
        return {
            "task_id": self.task_id,
            "domain": self.domain.value,
            "depth": self.depth,
            "mode": self.mode,
            "operands": [render(e) for e in self.operands],
            "answer": render(self.answer),
            "split": self.split,
            "prompt": self.prompt,
        }

    @classmethod
    def from_json(cls, d: dict) -> "ExpressionTask":
        domain = DomainId.lookup(d["domain"])
        return cls(
            task_id=d["task_id"],
            domain=domain,
            depth=int(d["depth"]),
            operands=tuple(parse(domain, s) for s in d["operands"]),
            mode=d.get("mode", FORWARD),
            answer=parse(domain, d["answer"]),
            split=d["split"],
        )


@dataclass(frozen=True)
class AtomicStep:
    task_id: str
    j: int
    left: Element
    right: Element
    truth: Element

    @property
    def step_id(self) -> str:
        return f"{self.task_id}/s{self.j}"

    @property
    def domain(self) -> DomainId:
        return self.truth.domain


@dataclass(frozen=True)
class DecompositionChain:
    task_id: str
    steps: tuple

    def to_json(self) -> dict:
        return {
            "task_id": self.task_id,
            "steps": [
                {
                    "j": s.j,
                    "left": render(s.left),
                    "right": render(s.right),
                    "truth": render(s.truth),
                    "prompt": render_prompt(s),
                }
                for s in self.steps
            ],
        }

    @classmethod
    def from_json(cls, d: dict, domain: DomainId | str) -> "DecompositionChain":
        domain = DomainId.lookup(domain)
        steps = tuple(
            AtomicStep(
                d["task_id"], int(s["j"]), parse(domain, s["left"]),
                parse(domain, s["right"]), parse(domain, s["truth"]),
            )
            for s in d["steps"]
        )
        return cls(d["task_id"], steps)


# ---------------------------------------------------------------- sampling ---

def derive_rng(*parts) -> random.Random:
    """Independent ``random.Random`` stream keyed on arbitrary printable parts."""
    key = "\x1f".join(str(p) for p in parts).encode()
    return random.Random(int.from_bytes(hashlib.blake2b(key, digest_size=8).digest(), "big"))


def sample_element(domain: DomainId, cfg: GenerationConfig, rng: random.Random) -> Element:
    """Draw one element from the configured sub-population of ``domain``.

    Knitting words and cube sequences are drawn uniformly among canonical
    forms of a length that is itself uniform over the configured range.
    """
    domain = DomainId.lookup(domain)
    if domain is DomainId.ENCRYPTED_HISTORY:
        lo, hi = cfg.eh_magnitude
        mag = rng.randint(lo, hi)
        return Element(domain, mag if rng.random() < 0.5 else -mag)
    if domain is DomainId.ENIGMA:
        return Element(domain, tuple(rng.randrange(26) for _ in range(3)))
    if domain is DomainId.KNITTING:
        length = rng.randint(*cfg.knit_length)
        word = []
        for i in range(length):
            word.append(rng.choice(KNIT_LETTERS if i == 0 else _KNIT_NEXT[word[-1]]))
        return Element(domain, "".join(word))
    length = rng.randint(*cfg.cube_length)
    for _ in range(MAX_ATTEMPTS):
        seq = tuple(CubeToken(rng.choice(CUBE_FACES), rng.randint(1, 3)) for _ in range(length))
        if cube_reduce(seq) == seq:
            return Element(domain, seq)
    raise ResampleExhausted(f"no canonical cube sequence of length {length}")


def sample_nonidentity(domain: DomainId, cfg: GenerationConfig, rng: random.Random) -> Element:
    unit = identity(domain)
    for _ in range(MAX_ATTEMPTS):
        e = sample_element(domain, cfg, rng)
        if e != unit:
            return e
    raise ResampleExhausted(f"could not draw a non-identity {domain.value} element")


def _is_degenerate(operands: Sequence[Element], answer: Element) -> bool:
    return answer == identity(answer.domain) or any(answer == e for e in operands)


def make_task(cfg: GenerationConfig, domain: DomainId, depth: int, index: int,
              mode: str = FORWARD) -> ExpressionTask:
    if mode not in (FORWARD, SOLVE):
        raise UnsupportedMode(mode)
    if mode == SOLVE and depth != 1:
        raise UnsupportedMode("equation tasks are generated at depth 1 only")
    rng = derive_rng(cfg.seed, domain.value, mode, depth, index)
    for _ in range(MAX_ATTEMPTS):
        operands = tuple(sample_element(domain, cfg, rng) for _ in range(depth + 1))
        if mode == FORWARD:
            answer = fold_chain(operands)
        else:
            answer = solve_for_x(*operands)
        if not cfg.reject_degenerate or not _is_degenerate(operands, answer):
            break
    else:
        raise ResampleExhausted(
            f"{domain.value} depth {depth} index {index}: no non-degenerate task in {MAX_ATTEMPTS} draws"
        )
    tag = hashlib.blake2b(f"{cfg.seed}:{domain.value}:{mode}:{depth}:{index}".encode(),
                          digest_size=4).hexdigest()
    kind = f"d{depth}" if mode == FORWARD else "solve"
    return ExpressionTask(
        task_id=f"{_SHORT[domain]}-{kind}-{index:05d}-{tag}",
        domain=domain,
        depth=depth,
        operands=operands,
        mode=mode,
        answer=answer,
        split=split_for_depth(depth),
    )


def task_plan(cfg: GenerationConfig) -> list:
    """Ordered ``(domain, depth, index, mode)`` jobs; output order follows this list."""
    jobs = []
    for domain in cfg.domains:
        for depth in sorted(cfg.counts):
            jobs.extend((domain, depth, i, FORWARD) for i in range(cfg.counts[depth]))
        jobs.extend((domain, 1, i, SOLVE) for i in range(cfg.solve_equation_count))
    return jobs


def _make_batch(args):
    cfg, jobs = args
    return [make_task(cfg, *job) for job in jobs]


def generate_dataset(cfg: GenerationConfig, workers: int = 1) -> list:
    jobs = task_plan(cfg)
    if workers <= 1 or len(jobs) < 2:
        return [make_task(cfg, *job) for job in jobs]
    size = max(1, len(jobs) // (workers * 4))
    batches = [(cfg, jobs[i:i + size]) for i in range(0, len(jobs), size)]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return [t for batch in pool.map(_make_batch, batches) for t in batch]


def decompose(task: ExpressionTask) -> DecompositionChain:
    if task.mode != FORWARD:
        raise UnsupportedMode(f"cannot decompose a {task.mode} task")
    steps = []
    acc = task.operands[0]
    for j, right in enumerate(task.operands[1:], start=1):
        truth = fold_chain([acc, right])
        steps.append(AtomicStep(task.task_id, j, acc, right, truth))
        acc = truth
    return DecompositionChain(task.task_id, tuple(steps))


# ----------------------------------------------------------------- prompts ---

_RULES = {
    DomainId.ENCRYPTED_HISTORY: (
        "You are tracking a walker on an integer line. A move is written DIR(val), where DIR is "
        "FWD (forward, positive) or BACK (backward, negative) and val is a distance written in "
        "base 7, most significant digit first, using the cipher a=0, b=1, c=2, d=3, e=4, f=5, g=6. "
        "Moves combine by adding their signed distances. Write the result the same way: FWD for a "
        "positive total, BACK for a negative one, the magnitude in cipher base 7 with no leading a."
    ),
    DomainId.ENIGMA: (
        "A toy machine has three independent rotors, each showing a letter with A=0, B=1, ..., Z=25. "
        "A state is written R1,R2,R3. Two states combine rotor by rotor: add the letter values "
        "modulo 26. Rotors never carry into each other."
    ),
    DomainId.KNITTING: (
        "Knitting instructions are words over k (knit), p (purl), K (undo a knit) and P (undo a "
        "purl). Instructions combine by writing them one after the other; then every adjacent pair "
        "kK, Kk, pP or Pp is deleted, again and again, until none is left. The empty instruction "
        "is written ε."
    ),
    DomainId.RUBIKS_CUBE: (
        "Moves on a 3x3x3 cube are face turns R, L, U, D, F, B. A bare letter turns that face 90 "
        "degrees clockwise, a trailing # turns it 90 degrees counter-clockwise and a trailing 2 "
        "turns it 180 degrees. Sequences combine by writing them one after the other and then "
        "simplifying: consecutive turns of the same face merge, adding quarter turns modulo 4 and "
        "dropping the move when the total is 0; adjacent turns of opposite faces commute and are "
        "ordered so that R comes before L, U before D and F before B. Repeat until nothing "
        "changes. The empty sequence is written ε."
    ),
}

_BOXED = "Give the final answer in canonical form inside \\boxed{}."


def _bracket(e: Element) -> str:
    return f"[{render(e)}]"


def render_prompt(item) -> str:
    """Deterministic prompt for an :class:`ExpressionTask` or an :class:`AtomicStep`."""
    if isinstance(item, AtomicStep):
        rules = _RULES[item.domain]
        question = f"Compute {_bracket(item.left)} ⊕ {_bracket(item.right)}."
    elif item.mode == SOLVE:
        rules = _RULES[item.domain]
        a, b = item.operands
        question = f"Find the element X such that {_bracket(a)} ⊕ X = {_bracket(b)}."
    else:
        rules = _RULES[item.domain]
        expr = " ⊕ ".join(_bracket(e) for e in item.operands)
        question = f"Compute, combining from left to right: {expr}."
    return f"{rules}\n\n{question}\n{_BOXED}"


# ----------------------------------------------------------------- file io ---

def write_tasks(path, tasks: Sequence[ExpressionTask]) -> None:
    write_jsonl(path, (t.to_json() for t in tasks))


def write_chains(path, chains: Sequence[DecompositionChain]) -> None:
    write_jsonl(path, (c.to_json() for c in chains))


def load_tasks(path) -> list:
    return load_jsonl(path, ExpressionTask.from_json)


def load_chains(path, tasks_by_id: dict) -> list:
    """Chains carry no domain tag of their own; it comes from the matching task."""

    def convert(d):
        task = tasks_by_id.get(d["task_id"])
        if task is None:
            raise ValueError(f"chain for unknown task {d['task_id']!r}")
        return DecompositionChain.from_json(d, task.domain)

    return load_jsonl(path, convert)
