"""
Pass@k from a sampled log
=========================

With n samples and c correct per task, Pass@k can be read two ways: plug
the rate c/n into 1-(1-p)^k, or count the k-subsets of the n samples that
contain a success.  On a large enough log the two curves coincide.
Each task is also sorted into Null, Transitional or Feasible.
"""

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

from algebrarium.analytics import census, curve_mse, dataset_pass_k_curves
from algebrarium.response_eval import estimate_records, truth_table
from algebrarium.simulator import AgentProfile, simulate_log
from algebrarium.taskgen import GenerationConfig, generate_dataset

out = Path("demo_output")
out.mkdir(exist_ok=True)

tasks = generate_dataset(GenerationConfig(seed=9, counts={1: 10, 3: 10, 5: 10}))
agent = AgentProfile("mixed", {"eh": 0.8, "enigma": 0.6, "knit": 0.45, "cube": 0.3}, seed=2)
estimates = estimate_records(simulate_log(tasks, prof=agent, n=128, atomic=False), truth_table(tasks))

theo, emp = dataset_pass_k_curves(estimates)
print("MSE between curves:", curve_mse(theo, emp))
print({state.value: n for state, n in census(estimates).items()})

fig, ax = plt.subplots(figsize=(5, 3.5))
ax.semilogx(theo.ks, theo.values, "o-", base=2, label="1-(1-p)^k")
ax.semilogx(emp.ks, emp.values, "s--", base=2, label="subset count")
ax.set_xlabel("k")
ax.set_ylabel("Pass@k")
ax.legend()
fig.savefig(out / "pass_at_k.svg")
