"""
Building a seeded task set
==========================

Tasks are chains of one to five binary operations.  Depth-1 tasks form the
training split, longer chains the test split.  Every chain is broken into
atomic steps so per-step and whole-chain accuracy can be compared later.
"""

from collections import Counter

from algebrarium import render
from algebrarium.taskgen import GenerationConfig, decompose, generate_dataset

cfg = GenerationConfig(seed=1, counts={1: 20, 3: 5, 5: 5}, solve_equation_count=2)
tasks = generate_dataset(cfg)
print(len(tasks), "tasks, config hash", cfg.config_hash())
print(Counter((t.domain.value, t.split) for t in tasks))

# A depth-3 Knitting task, its prompt and the stepwise route to the answer.
task = next(t for t in tasks if t.domain.value == "Knitting" and t.depth == 3)
print(task.prompt)
for step in decompose(task).steps:
    print(f"  step {step.j}: [{render(step.left)}] . [{render(step.right)}] = {render(step.truth)}")
print("answer:", render(task.answer))

# Same seed, same tasks; a different seed gives a different set.
assert generate_dataset(cfg) == tasks
assert generate_dataset(GenerationConfig(seed=2, counts=cfg.counts)) != tasks
