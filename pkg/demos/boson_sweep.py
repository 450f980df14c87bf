"""Berry phase of a two-mode boson model as the interaction grows.

The field turns once around a cone while ``lambda J_z^2`` pulls the stars
off the poles.  For each level we follow the eigenstate, compute the phase
from its stars and compare it to the overlap-product value.
"""

import math

from stellar_berry.boson import ControlLoop, sweep_lambda

n, theta = 4, math.pi / 3
loop = ControlLoop.latitude(theta, 1000)
lambdas = [0.0, 0.1, 0.2, 0.3, 0.4, 0.5]

for level in range(n + 1):
    print(f"level {level}")
    print(f"  {'lambda/R':>8} {'gamma':>12} {'oracle':>12} {'gamma_C':>12} {'gamma_R':>10} {'gap':>9}")
    for row in sweep_lambda(n, loop, level, lambdas):
        print(f"  {row.lambda_over_R:8.2f} {row.gamma_formula:12.8f} {row.gamma_oracle:12.8f} "
              f"{row.gammaC:12.8f} {row.gammaR:10.1e} {row.delta:9.1e}")
