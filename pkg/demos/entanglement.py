"""Entanglement read off the star positions.

Two distinct stars make W-type states, three distinct stars GHZ-type ones.
Measures come from pair distances and the correlation factors.
"""

import math

import numpy as np

from stellar_berry.entangle import entanglement_report
from stellar_berry.stellar import directions_to_cartesian, find_stars

north = np.array([0.0, 0.0, 1.0])
cases = {
    "Bell": np.array([north, -north]),
    "GHZ": directions_to_cartesian(np.full(3, math.pi / 2), np.arange(3) * 2 * math.pi / 3),
    "W": np.array([north, north, -north]),
    "product": np.array([north] * 3),
    "random n=3": find_stars(np.random.default_rng(1).normal(size=4) + 0j).cartesian,
}
for name, stars in cases.items():
    for row in entanglement_report(stars):
        note = " (by convention)" if row.flagged else ""
        print(f"{name:>11}: n_s={row.diversity} {row.classification:>9} {row.measure_name:>15} = {row.value:.10f}{note}")
