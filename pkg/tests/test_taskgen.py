import json

import pytest

from algebrarium import DomainId, fold_chain, identity, parse, render
from algebrarium.errors import ConfigError, DataFormatError, UnsupportedMode
from algebrarium.taskgen import (
    FORWARD, SOLVE, DecompositionChain, ExpressionTask, GenerationConfig, decompose, derive_rng,
    generate_dataset, load_chains, load_tasks, make_task, render_prompt, sample_element,
    task_plan, write_chains, write_tasks,
)

SMALL = GenerationConfig(seed=7, counts={1: 12, 2: 4, 3: 4, 4: 3, 5: 3}, solve_equation_count=3)


@pytest.fixture(scope="module")
def small_set():
    return generate_dataset(SMALL)


def test_counts_and_splits(small_set):
    fwd = [t for t in small_set if t.mode == FORWARD]
    assert len(fwd) == 4 * (12 + 4 + 4 + 3 + 3)
    assert len([t for t in small_set if t.mode == SOLVE]) == 4 * 3
    assert all(t.split == ("train" if t.depth == 1 else "test") for t in small_set)
    assert all(len(t.operands) == t.depth + 1 for t in small_set)


def test_answers_verified(small_set):
    for t in small_set:
        if t.mode == FORWARD:
            assert t.answer == fold_chain(t.operands)
        else:
            a, b = t.operands
            assert fold_chain([a, t.answer]) == b


def test_no_degenerate_tasks(small_set):
    for t in small_set:
        assert t.answer != identity(t.domain)
        assert all(t.answer != e for e in t.operands)


def test_ids_unique_and_stable(small_set):
    ids = [t.task_id for t in small_set]
    assert len(set(ids)) == len(ids)
    assert generate_dataset(SMALL) == small_set
    assert ids[0].startswith("eh-d1-00000-")


def test_parallel_matches_serial(small_set):
    assert generate_dataset(SMALL, workers=3) == small_set


def test_seed_changes_output(small_set):
    other = generate_dataset(GenerationConfig(seed=8, counts=SMALL.counts))
    assert [t.answer for t in other[:20]] != [t.answer for t in small_set[:20]]


def test_degenerate_kept_when_asked():
    cfg = GenerationConfig(counts={1: 400}, domains=("enigma",), reject_degenerate=False)
    tasks = generate_dataset(cfg)
    # 26^3 outcomes; identity or operand collisions are rare but must be allowed through
    assert len(tasks) == 400


def test_cube_samples_are_canonical():
    rng = derive_rng("cube-test")
    cfg = GenerationConfig(counts={}, cube_length=(3, 3))
    for _ in range(200):
        e = sample_element(DomainId.RUBIKS_CUBE, cfg, rng)
        assert len(e.payload) == 3


def test_knit_samples_are_reduced_with_drawn_length():
    rng = derive_rng("knit-test")
    cfg = GenerationConfig(counts={}, knit_length=(5, 5))
    assert all(len(sample_element(DomainId.KNITTING, cfg, rng).payload) == 5 for _ in range(200))


def test_eh_magnitude_bounds():
    rng = derive_rng("eh-test")
    vals = [sample_element(DomainId.ENCRYPTED_HISTORY, GenerationConfig(counts={}), rng).payload
            for _ in range(500)]
    assert all(1 <= abs(v) <= 342 for v in vals)
    assert min(vals) < 0 < max(vals)


class TestConfig:
    @pytest.mark.parametrize("kwargs", [
        {"knit_length": (5, 2)}, {"eh_magnitude": (-1, 3)}, {"counts": {0: 3}},
        {"counts": {2: -1}}, {"solve_equation_count": -2},
    ])
    def test_rejects(self, kwargs):
        with pytest.raises(ConfigError):
            GenerationConfig(**kwargs)

    def test_dict_round_trip(self):
        assert GenerationConfig.from_dict(SMALL.to_dict()) == SMALL
        assert GenerationConfig.from_dict(json.loads(json.dumps(SMALL.to_dict()))) == SMALL

    def test_unknown_key(self):
        with pytest.raises(ConfigError):
            GenerationConfig.from_dict({"sed": 1})

    def test_hash_tracks_content(self):
        assert SMALL.config_hash() == GenerationConfig.from_dict(SMALL.to_dict()).config_hash()
        assert SMALL.config_hash() != GenerationConfig(seed=8).config_hash()


def test_solve_mode_only_at_depth_one():
    with pytest.raises(UnsupportedMode):
        make_task(SMALL, DomainId.ENIGMA, 2, 0, mode=SOLVE)
    with pytest.raises(UnsupportedMode):
        make_task(SMALL, DomainId.ENIGMA, 1, 0, mode="guess")


def test_plan_order():
    plan = task_plan(GenerationConfig(counts={1: 2, 3: 1}, domains=("knit", "eh")))
    assert [(d.value, depth, i) for d, depth, i, _ in plan] == [
        ("Knitting", 1, 0), ("Knitting", 1, 1), ("Knitting", 3, 0),
        ("EncryptedHistory", 1, 0), ("EncryptedHistory", 1, 1), ("EncryptedHistory", 3, 0),
    ]


class TestDecompose:
    def test_chain_structure(self, small_set):
        for t in small_set:
            if t.mode != FORWARD:
                continue
            chain = decompose(t)
            assert len(chain.steps) == t.depth
            assert chain.steps[0].left == t.operands[0]
            for j, s in enumerate(chain.steps, start=1):
                assert s.j == j and s.right == t.operands[j]
                assert s.truth == fold_chain([s.left, s.right])
                if j > 1:
                    assert s.left == chain.steps[j - 2].truth
            assert chain.steps[-1].truth == t.answer

    def test_step_ids(self, small_set):
        t = next(t for t in small_set if t.depth == 3)
        assert [s.step_id for s in decompose(t).steps] == [f"{t.task_id}/s{j}" for j in (1, 2, 3)]

    def test_solve_tasks_have_no_chain(self, small_set):
        with pytest.raises(UnsupportedMode):
            decompose(next(t for t in small_set if t.mode == SOLVE))


class TestPrompts:
    def test_enigma_prompt_mentions_modulus(self):
        t = make_task(SMALL, DomainId.ENIGMA, 2, 0)
        prompt = render_prompt(t)
        assert "modulo 26" in prompt
        assert "\\boxed{}" in prompt
        assert " ⊕ ".join(f"[{render(e)}]" for e in t.operands) in prompt

    @pytest.mark.parametrize("d", list(DomainId))
    def test_each_domain_has_prompt(self, d):
        t = make_task(SMALL, d, 1, 0)
        assert t.prompt == render_prompt(t) and len(t.prompt) > 40

    def test_step_prompt(self, small_set):
        step = decompose(small_set[-20]).steps[0]
        assert f"[{render(step.left)}]" in render_prompt(step)


class TestIO:
    def test_round_trip(self, tmp_path, small_set):
        chains = [decompose(t) for t in small_set if t.mode == FORWARD]
        write_tasks(tmp_path / "tasks.jsonl", small_set)
        write_chains(tmp_path / "chains.jsonl", chains)
        tasks = load_tasks(tmp_path / "tasks.jsonl")
        assert tasks == small_set
        loaded = load_chains(tmp_path / "chains.jsonl", {t.task_id: t for t in tasks})
        assert loaded == chains

    def test_json_shape(self, small_set):
        d = small_set[0].to_json()
        assert set(d) == {"task_id", "domain", "depth", "mode", "operands", "answer", "split", "prompt"}
        assert ExpressionTask.from_json(d) == small_set[0]
        chain = decompose(small_set[0])
        assert DecompositionChain.from_json(chain.to_json(), small_set[0].domain) == chain

    def test_bad_line_reports_position(self, tmp_path, small_set):
        path = tmp_path / "tasks.jsonl"
        write_tasks(path, small_set[:2])
        with open(path, "a") as fh:
            fh.write('{"task_id": "x", "domain": "Enigma"}\n')
        with pytest.raises(DataFormatError, match=r"tasks\.jsonl:3:"):
            load_tasks(path)

    def test_unparseable_answer(self, tmp_path):
        bad = {"task_id": "x", "domain": "Enigma", "depth": 1, "operands": ["A,A,B", "A,A,C"],
               "answer": "A,A", "split": "train"}
        (tmp_path / "t.jsonl").write_text(json.dumps(bad) + "\n")
        with pytest.raises(DataFormatError, match=":1:"):
            load_tasks(tmp_path / "t.jsonl")


def test_operand_parse_round_trip(small_set):
    for t in small_set:
        assert all(parse(t.domain, render(e)) == e for e in t.operands)
