from mdsp.problems.base import CoherenceClass, Problem, SamplingPlan
from mdsp.problems.builtin import PROBLEMS, get_problem
from mdsp.problems.probe import coherence_probe, estimate_lipschitz
