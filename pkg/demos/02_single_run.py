"""One optimal-mixing run on a deceptive trap, watched up close.

Each generation every population member receives, mask by mask, a fragment
from a random donor and keeps it whenever fitness does not drop.  With
masks matching the trap blocks the deception is harmless; with single-bit
masks the same problem is nearly unsolvable.
"""

from omlab.engine import RunConfig, run_gomea
from omlab.fos import make_homogeneous_fos
from omlab.problems import make_problem

problem = make_problem("trap", 60, 5)
matched = make_homogeneous_fos(60, 5)
bitwise = make_homogeneous_fos(60, 1)

cfg = RunConfig(n=200, seed=42, record_trajectory=True)

result = run_gomea(problem, matched, cfg)
print("structure-matching masks:")
print(f"  success={result.success}  generations={result.generations}"
      f"  evaluations={result.nfe}")

# The trajectory records, per generation and mask, the fraction of the
# population already holding the optimal fragment.
last = [pt.p_correct for pt in result.trajectory if pt.generation == 0]
print(f"  mean correct-fragment share at start: {sum(last) / len(last):.3f}")

result = run_gomea(problem, bitwise, cfg)
print("single-bit masks on the same trap:")
print(f"  success={result.success}  halt={result.halt_reason}"
      f"  generations={result.generations}")
