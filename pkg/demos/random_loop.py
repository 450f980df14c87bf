"""Star formula against the overlap-product phase on a random loop.

Each star wanders along a smooth closed path.  The formula sums the stars'
own solid angles and the correlation weighted pair terms; the oracle only
multiplies consecutive state overlaps.  Their gap shrinks as 1/N^2.
"""

import numpy as np

from stellar_berry import berry
from stellar_berry.stellar import StarSet, state_from_stars

n = 4
print(f"{'N':>6} {'formula':>14} {'oracle':>14} {'gap':>10} {'gamma_R':>10}")
for steps in (500, 1000, 2000, 4000):
    pos = berry.random_smooth_positions(n, steps, np.random.default_rng(3))
    parts = berry.berry_phase(berry.LoopTrajectory.from_positions(pos))
    states = [state_from_stars(StarSet.from_cartesian(p)) for p in pos]
    oracle = berry.berry_phase_oracle(states)
    formula = berry.wrap_angle(parts.gamma_total)
    gap = abs(berry.wrap_angle(formula - oracle))
    print(f"{steps:6d} {formula:14.9f} {oracle:14.9f} {gap:10.2e} {parts.gamma_R:10.2e}")
