"""
Why long chains fail
====================

An agent that gets each step right with probability p, independently,
finishes an N-step chain with probability p**N.  We simulate such an agent,
grade its boxed answers like any other model output and fit the decay.
"""

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from algebrarium.analytics import depth_points, fit_barrier
from algebrarium.response_eval import estimate_records, truth_table
from algebrarium.simulator import AgentProfile, simulate_log
from algebrarium.taskgen import GenerationConfig, decompose, generate_dataset

out = Path("demo_output")
out.mkdir(exist_ok=True)

tasks = generate_dataset(GenerationConfig(seed=5, counts={d: 10 for d in range(1, 6)}))
chains = {t.task_id: decompose(t) for t in tasks}
truths = truth_table(tasks, chains.values())

fig, ax = plt.subplots(figsize=(5, 3.5))
depths = np.arange(1, 6)
for p in (0.5, 0.7, 0.9):
    agent = AgentProfile(f"p={p}", {"eh": p, "enigma": p, "knit": p, "cube": p}, seed=1)
    records = simulate_log(tasks, chains, agent, n=128, atomic=False)
    estimates = {e.task_id: e for e in estimate_records(records, truths)}
    points = depth_points(estimates, tasks)["all"]
    fit = fit_barrier(points)
    print(f"true p={p}  fitted p={fit.p_hat_fit:.3f}  log-space rms={fit.residual_rms:.3f}")
    ax.plot(*zip(*points), "o")
    ax.plot(depths, fit.p_hat_fit ** depths, "-", label=f"p={p}")

ax.set_xlabel("operations in chain")
ax.set_ylabel("chain success")
ax.legend()
fig.savefig(out / "barrier.svg")
