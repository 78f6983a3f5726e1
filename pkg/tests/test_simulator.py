import math

import pytest

from algebrarium import DomainId
from algebrarium.errors import ConfigError, ProfileMismatch
from algebrarium.response_eval import estimate_records, extract_boxed, grade, truth_table
from algebrarium.simulator import AgentProfile, corrupt, simulate_atomic, simulate_composite, simulate_log
from algebrarium.taskgen import GenerationConfig, decompose, derive_rng, generate_dataset

ALL_HALF = {d: 0.5 for d in DomainId}


@pytest.fixture(scope="module")
def tasks():
    return generate_dataset(GenerationConfig(seed=11, counts={1: 3, 2: 2, 4: 2}))


def test_corrupt_is_always_wrong():
    cfg = GenerationConfig(seed=0, counts={1: 50})
    for t in generate_dataset(cfg):
        for i in range(5):
            assert corrupt(t.answer, derive_rng(t.task_id, i)) != t.answer


def test_deterministic(tasks):
    prof = AgentProfile("a", ALL_HALF, seed=3)
    assert simulate_log(tasks, prof=prof, n=16) == simulate_log(tasks, prof=prof, n=16)
    other = simulate_log(tasks, prof=AgentProfile("a", ALL_HALF, seed=4), n=16)
    assert other != simulate_log(tasks, prof=prof, n=16)


def test_per_task_stream_independent_of_log_composition(tasks):
    prof = AgentProfile("a", ALL_HALF, seed=3)
    full = {r.task_id: r for r in simulate_log(tasks, prof=prof, n=8)}
    alone = simulate_log(tasks[-1:], prof=prof, n=8)
    assert alone[0] == full[tasks[-1].task_id]


def test_log_layout(tasks):
    prof = AgentProfile("a", ALL_HALF)
    recs = simulate_log(tasks, prof=prof, n=4)
    multi = [t for t in tasks if t.depth > 1]
    assert len(recs) == len(tasks) + sum(t.depth for t in multi)
    assert [r.task_id for r in recs[:len(tasks)]] == [t.task_id for t in tasks]
    assert all("/s" in r.task_id for r in recs[len(tasks):])
    assert len(simulate_log(tasks, prof=prof, n=4, atomic=False)) == len(tasks)


def test_extremes(tasks):
    chains = {t.task_id: decompose(t) for t in tasks}
    table = truth_table(tasks, chains.values())
    for p, expected in ((1.0, 1.0), (0.0, 0.0)):
        prof = AgentProfile("x", {d: p for d in DomainId})
        ests = estimate_records(simulate_log(tasks, chains, prof, n=6), table)
        assert all(e.p_hat == expected for e in ests)


def test_samples_are_boxed_and_parse(tasks):
    prof = AgentProfile("a", ALL_HALF)
    rec = simulate_atomic(decompose(tasks[-1]).steps[0], prof, 20)
    assert all(extract_boxed(s) is not None for s in rec.samples)
    assert rec.model == "a"


def test_composite_rate_tracks_product():
    tasks = generate_dataset(GenerationConfig(seed=1, counts={3: 40}, domains=("enigma",)))
    prof = AgentProfile("a", {"enigma": 0.6}, seed=9)
    n = 200
    hits = 0
    for t in tasks:
        rec = simulate_composite(t, decompose(t), prof, n)
        hits += sum(grade(extract_boxed(s), t.answer) for s in rec.samples)
    total = n * len(tasks)
    p = 0.6 ** 3
    assert abs(hits / total - p) < 4 * math.sqrt(p * (1 - p) / total)


def test_step_overrides():
    tasks = generate_dataset(GenerationConfig(seed=1, counts={2: 5}, domains=("knit",)))
    prof = AgentProfile("a", {"knit": 1.0}, step_overrides={2: 0.0})
    table = truth_table(tasks, [decompose(t) for t in tasks])
    ests = {e.task_id: e for e in estimate_records(simulate_log(tasks, prof=prof, n=5), table)}
    t = tasks[0]
    assert ests[t.task_id].p_hat == 0.0
    assert ests[f"{t.task_id}/s1"].p_hat == 1.0
    assert ests[f"{t.task_id}/s2"].p_hat == 0.0


class TestProfile:
    def test_toml(self):
        prof = AgentProfile.from_toml('label = "m"\nseed = 5\nenigma = 0.4\ncube = 0.2\n')
        assert prof.label == "m" and prof.seed == 5
        assert prof.p_step(DomainId.RUBIKS_CUBE) == 0.2

    def test_missing_domain(self):
        prof = AgentProfile("m", {"enigma": 0.4})
        with pytest.raises(ProfileMismatch):
            prof.p_step(DomainId.KNITTING)

    @pytest.mark.parametrize("text", ['enigma = 1.5', 'widgets = 0.3', 'enigma = ', 'error_model = "x"\neh = 0.1'])
    def test_invalid(self, text):
        with pytest.raises(ConfigError):
            AgentProfile.from_toml(text)

    def test_needs_samples(self, tasks):
        with pytest.raises(ConfigError):
            simulate_log(tasks, prof=AgentProfile("a", ALL_HALF), n=0)
