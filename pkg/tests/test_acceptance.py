"""End-to-end acceptance checks, one test per numbered criterion.

Each test logs a PASS/FAIL line (shown in the terminal summary and on stdout)
before asserting, so a red criterion still reports its measured value.
"""

import math
import random
import time
from fractions import Fraction
from itertools import combinations

import pytest

from algebrarium import (
    DomainId, Element, combine, fold_chain, identity, inverse, parse, render, solve_for_x,
)
from algebrarium.analytics import (
    DEFAULT_KS, curve_mse, dataset_pass_k_curves, emergence, empirical_pass_k, fit_barrier,
    pearson, process_outcome,
)
from algebrarium.domains import cube_reduce, sticker_permutation
from algebrarium.response_eval import estimate_records, truth_table
from algebrarium.simulator import AgentProfile, simulate_log
from algebrarium.taskgen import (
    GenerationConfig, decompose, generate_dataset, write_chains, write_tasks,
)

from _oracles import all_cube_sequences, closure_normal_forms, cube_successors
from conftest import ACCEPTANCE_LOG, random_elements

ALL = ("EncryptedHistory", "Enigma", "Knitting", "RubiksCube")


def record(number, ok, detail):
    ACCEPTANCE_LOG.append((number, bool(ok), detail))
    print(f"[{'PASS' if ok else 'FAIL'}] criterion {number}: {detail}")
    assert ok, detail


def uniform_profile(label, p, seed):
    return AgentProfile(label, {d: p for d in ALL}, seed=seed)


def run_log(tasks, prof, n, atomic=False):
    chains = {t.task_id: decompose(t) for t in tasks}
    recs = simulate_log(tasks, chains, prof, n=n, atomic=atomic)
    return estimate_records(recs, truth_table(tasks, chains.values())), chains


def test_c1_worked_examples():
    t0 = time.perf_counter()
    eh, en, kn, cu = (DomainId(v) for v in ALL)
    got = [
        render(combine(parse(eh, "FWD(ad)"), parse(eh, "BACK(ef)"))),
        render(combine(parse(en, "A,C,Z"), parse(en, "B,B,C"))),
        render(combine(parse(kn, "kp"), parse(kn, "PK"))),
        render(solve_for_x(parse(cu, "R U"), parse(cu, "R U R#"))),
    ]
    elapsed = time.perf_counter() - t0
    want = ["BACK(ec)", "B,D,B", "ε", "R#"]
    record(1, got == want and elapsed < 1.0, f"worked examples {got} in {elapsed:.3f}s")


def _perturb(seq, r):
    """A raw cube sequence equal to ``seq`` as a group element but spelled differently."""
    out = list(seq)
    for _ in range(r.randint(1, 3)):
        i = r.randint(0, len(out))
        move = r.random()
        if move < 0.4:
            f, t = r.choice("RLUDFB"), r.randint(1, 3)
            out[i:i] = [(f, t), (f, 4 - t)]
        elif move < 0.7 and i < len(out):
            f, t = out[i]
            if t == 2:
                out[i:i + 1] = [(f, 1), (f, 1)]
            elif t == 3:
                out[i:i + 1] = [(f, 2), (f, 1)]
        elif i + 1 < len(out):
            (f1, t1), (f2, t2) = out[i], out[i + 1]
            if {f1, f2} in ({"R", "L"}, {"U", "D"}, {"F", "B"}):
                out[i], out[i + 1] = out[i + 1], out[i]
    return out


def test_c2_algebra_laws():
    t0 = time.perf_counter()
    failures = []
    for d in DomainId:
        xs = random_elements(d, 3000, seed=42)
        e = identity(d)
        for a, b, c in zip(xs[0::3], xs[1::3], xs[2::3]):
            checks = (
                combine(combine(a, b), c) == combine(a, combine(b, c)),
                combine(a, e) == a == combine(e, a),
                combine(a, inverse(a)) == e == combine(inverse(a), a),
                Element(d, a.payload) == a,
                parse(d, render(a)) == a,
            )
            if not all(checks):
                failures.append((d.value, render(a), checks))
    n_seq = 0
    for seq in all_cube_sequences(4):
        n_seq += 1
        if closure_normal_forms(seq, cube_successors) != {tuple(tuple(t) for t in cube_reduce(seq))}:
            failures.append(("confluence", seq))
    r = random.Random(2024)
    cube = DomainId.RUBIKS_CUBE
    for _ in range(1000):
        x = [(r.choice("RLUDFB"), r.randint(1, 3)) for _ in range(r.randint(1, 8))]
        y = _perturb(x, r)
        if Element(cube, x) != Element(cube, y):
            failures.append(("construction", x, y))
        elif sticker_permutation(x) != sticker_permutation(y) or \
                sticker_permutation(cube_reduce(x)) != sticker_permutation(x):
            failures.append(("soundness", x, y))
    elapsed = time.perf_counter() - t0
    record(2, not failures and elapsed < 60,
           f"1000 triples x 4 domains, {n_seq} cube sequences, 1000 cube pairs: "
           f"{len(failures)} failures in {elapsed:.1f}s")


@pytest.mark.slow
def test_c3_multiplicative_barrier():
    t0 = time.perf_counter()
    tasks = generate_dataset(GenerationConfig(seed=303, counts={5: 50}))
    n = 512
    lines, ok = [], True
    for p in (0.3, 0.7):
        ests, _ = run_log(tasks, uniform_profile(f"p{p}", p, seed=31), n)
        total = n * len(ests)
        rate = sum(e.c for e in ests) / total
        target = p ** 5
        se = math.sqrt(target * (1 - target) / total)
        z = (rate - target) / se
        ok &= abs(z) <= 3
        lines.append(f"p={p}: {rate:.5f} vs {target:.5f} (z={z:+.2f})")
    elapsed = time.perf_counter() - t0
    record(3, ok and elapsed < 120, f"{len(tasks)} tasks x {n}: " + "; ".join(lines) + f" in {elapsed:.1f}s")


def test_c4_pass_k_fidelity():
    tasks = generate_dataset(GenerationConfig(seed=404, counts={1: 50}))
    grid = [round(0.05 * i, 2) for i in range(1, 19)]
    ests = []
    for i, t in enumerate(tasks):
        e, _ = run_log([t], uniform_profile("mix", grid[i % len(grid)], seed=41), 128)
        ests.extend(e)
    theo, emp = dataset_pass_k_curves(ests, DEFAULT_KS)
    mse = curve_mse(theo, emp)
    gap1 = theo.values[0] - emp.values[0]
    record(4, len(ests) == 200 and mse < 1e-3 and gap1 == 0.0,
           f"{len(ests)} instances, MSE={mse:.2e}, k=1 gap={gap1}")


def _enumerated(n, c, k):
    hits = sum(1 for s in combinations(range(n), k) if any(i < c for i in s))
    return Fraction(hits, math.comb(n, k))


def test_c5_estimator_oracle():
    t0 = time.perf_counter()
    worst, cases = 0.0, 0
    for n in range(1, 13):
        for c in range(n + 1):
            for k in range(1, n + 1):
                worst = max(worst, abs(empirical_pass_k(n, c, k) - float(_enumerated(n, c, k))))
                cases += 1
    elapsed = time.perf_counter() - t0
    record(5, worst < 1e-12 and elapsed < 5, f"{cases} (n,c,k) cases, max |diff|={worst:.1e} in {elapsed:.2f}s")


def test_c6_barrier_fit_recovery():
    tasks = generate_dataset(GenerationConfig(seed=606, counts={d: 1 for d in range(1, 6)},
                                              domains=("enigma",)))
    ests, _ = run_log(tasks, uniform_profile("p0.3", 0.3, seed=61), 512)
    by_id = {e.task_id: e for e in ests}
    points = [(t.depth, by_id[t.task_id].p_hat) for t in tasks]
    fit = fit_barrier(points)
    clean = fit_barrier([(d, 0.3 ** d) for d in range(1, 6)])
    record(6, 0.25 <= fit.p_hat_fit <= 0.35 and clean.residual_rms < 1e-10,
           f"fitted p={fit.p_hat_fit:.4f} from {fit.points_used} points "
           f"({fit.dropped_zero_points} zero), noiseless RMS={clean.residual_rms:.1e}")


def test_c7_emergence():
    tasks = generate_dataset(GenerationConfig(seed=707, counts={5: 50}))
    base, _ = run_log(tasks, uniform_profile("base", 0.3, seed=71), 128)
    post, _ = run_log(tasks, uniform_profile("post", 0.7, seed=72), 128)
    em = emergence(base, post)
    mean = em.recovered_mean if em.recovered_mean is not None else float("nan")
    record(7, em.recovery_rate >= 0.85 and abs(mean - 0.168) <= 0.02,
           f"recovered {em.recovered_count}/{em.null_count_base} = {em.recovery_rate:.3f}, "
           f"recovered mean p={mean:.4f}")


def test_c8_process_outcome_correlation():
    tasks = generate_dataset(GenerationConfig(seed=808, counts={2: 13, 3: 13, 4: 12, 5: 12}))
    prof = AgentProfile("honest", {"eh": 0.9, "enigma": 0.75, "knit": 0.6, "cube": 0.45}, seed=81)
    ests, chains = run_log(tasks, prof, 128, atomic=True)
    rows = process_outcome({e.task_id: e for e in ests}, tasks, chains)
    rho = pearson([r.joint for r in rows], [r.outcome for r in rows])
    record(8, len(rows) == 200 and rho >= 0.95, f"pearson={rho:.4f} over {len(rows)} instances")


@pytest.mark.slow
def test_c9_dataset_protocol(tmp_path):
    t0 = time.perf_counter()
    cfg = GenerationConfig()
    serial = generate_dataset(cfg)
    again = generate_dataset(cfg)
    parallel = generate_dataset(cfg, workers=4)
    blobs = []
    for name, tasks in (("a", serial), ("b", again), ("c", parallel)):
        write_tasks(tmp_path / f"{name}.tasks.jsonl", tasks)
        write_chains(tmp_path / f"{name}.chains.jsonl", [decompose(t) for t in tasks])
        blobs.append((tmp_path / f"{name}.tasks.jsonl").read_bytes()
                     + (tmp_path / f"{name}.chains.jsonl").read_bytes())
    identical = blobs[0] == blobs[1] == blobs[2]
    per = {}
    for t in serial:
        per.setdefault((t.domain.value, t.depth, t.split), 0)
        per[(t.domain.value, t.depth, t.split)] += 1
    layout_ok = all(per.get((d, 1, "train")) == 3200 and
                    all(per.get((d, k, "test")) == 50 for k in (2, 3, 4, 5)) for d in ALL)
    n_train = sum(t.split == "train" for t in serial)
    verified = all(t.answer == fold_chain(t.operands) for t in serial)
    elapsed = time.perf_counter() - t0
    record(9, layout_ok and identical and verified and (n_train, len(serial) - n_train) == (12800, 800)
           and elapsed < 120,
           f"{n_train} train / {len(serial) - n_train} test, identical={identical}, "
           f"verified={verified} in {elapsed:.1f}s")
