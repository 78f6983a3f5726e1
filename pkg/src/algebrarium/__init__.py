"""Synthetic group-algebra reasoning tasks with a probabilistic capability toolkit.

Four concrete groups (a base-7 cipher walk on the integers, a three-rotor
mod-26 product, the free group on two generators and a cube-move rewrite
system), a seeded task generator with sequential decompositions, a grader for
boxed answers, a fixed-probability agent simulator, and the Pass@k /
multiplicative-barrier analytics built on top of them.
"""

__version__ = "0.1.0"

from .algebra import (
    ALGEBRA_SPECS,
    AlgebraSpec,
    Element,
    combine,
    cube_canonicalize,
    cube_permutation,
    eh_parse,
    eh_render,
    enigma_parse,
    enigma_render,
    fold_chain,
    identity,
    inverse,
    knit_reduce,
    parse,
    render,
    solve_for_x,
)
from .domains import CubeToken, DomainId
from .taskgen import (
    AtomicStep,
    DecompositionChain,
    ExpressionTask,
    GenerationConfig,
    decompose,
    generate_dataset,
    render_prompt,
    sample_element,
)
from .response_eval import (
    ClassificationConfig,
    InstanceEstimate,
    ResponseRecord,
    State,
    classify,
    estimate,
    extract_boxed,
    grade,
)
from .simulator import AgentProfile, simulate_atomic, simulate_composite
from .analytics import (
    dataset_pass_k_curves,
    curve_mse,
    emergence,
    empirical_pass_k,
    fit_barrier,
    joint_probability,
    pearson,
    shift_analysis,
    theoretical_pass_k,
)
