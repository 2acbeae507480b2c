from mdsp.adaptive.optimizers import ADAPTIVE_OPTIMIZERS, AdamHyperparams, AdamState, adam_moment_update, \
    adam_step, optimistic_adam_step, optimistic_rmsprop_step, rmsprop_step
from mdsp.adaptive.problems import ADAPTIVE_PROBLEMS, UnconstrainedProblem
from mdsp.adaptive.runner import run_adaptive
