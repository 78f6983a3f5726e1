"""
Comparing two checkpoints
=========================

Given logs from a weaker and a stronger agent on the same tasks, which
tasks that were out of reach became solvable, and did any skill the weaker
agent had mastered get worse?
"""

from algebrarium.analytics import emergence, erosion_count, shift_analysis
from algebrarium.response_eval import estimate_records, truth_table
from algebrarium.simulator import AgentProfile, simulate_log
from algebrarium.taskgen import GenerationConfig, decompose, generate_dataset

tasks = generate_dataset(GenerationConfig(seed=3, counts={5: 25}))
chains = {t.task_id: decompose(t) for t in tasks}
truths = truth_table(tasks, chains.values())


def run(label, p, seed):
    agent = AgentProfile(label, {"eh": p, "enigma": p, "knit": p, "cube": p}, seed=seed)
    return estimate_records(simulate_log(tasks, chains, agent, n=128), truths)


base, post = run("base", 0.3, 1), run("post", 0.7, 2)
task_ids = {t.task_id for t in tasks}
em = emergence([e for e in base if e.task_id in task_ids], [e for e in post if e.task_id in task_ids])
print(f"{em.recovered_count} of {em.null_count_base} unsolvable tasks became feasible")
print(f"their success rate now: mean {em.recovered_mean:.3f}, median {em.recovered_median:.3f}")
print("histogram over [0, 1] in tenths:", em.histogram)

# Step-level records act as atomic skills.
steps = lambda es: [e for e in es if "/s" in e.task_id]
shifts = shift_analysis(steps(base), steps(post))
print("skills eroded:", erosion_count(shifts), "of", len(shifts))
