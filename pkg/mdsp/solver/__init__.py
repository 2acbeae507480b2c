from mdsp.solver.algo import SOLVERS, ErgodicAverager, RunConfig, ergodic_average, md_step, omd_step, run
from mdsp.solver.ensemble import run_ensemble
from mdsp.solver.record import FinalState, RecordEntry, RunRecord
