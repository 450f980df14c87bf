"""Shared oracles and generators for the test suite."""

import math

import numpy as np

from stellar_berry.berry import LoopTrajectory
from stellar_berry.stellar import StarSet, directions_to_cartesian

# criterion id -> (passed, detail), filled by test_acceptance.py
ACCEPTANCE = {}


def random_unit(rng, size=None):
    shape = (3,) if size is None else (*np.atleast_1d(size), 3)
    v = rng.normal(size=shape)
    return v / np.linalg.norm(v, axis=-1, keepdims=True)


def random_state(rng, n):
    return rng.normal(size=n + 1) + 1j * rng.normal(size=n + 1)


def random_rotation(rng):
    q, r = np.linalg.qr(rng.normal(size=(3, 3)))
    q = q * np.sign(np.diag(r))
    if np.linalg.det(q) < 0:
        q[:, 0] = -q[:, 0]
    return q


def coherent(n, theta, phi):
    """Spin coherent state pointing at (theta, phi), amplitudes low to high J + m."""
    p = np.arange(n + 1)
    binom = np.array([math.comb(n, k) for k in p], dtype=float)
    return np.sqrt(binom) * np.cos(theta / 2) ** p * (np.sin(theta / 2) * np.exp(1j * phi)) ** (n - p)


def stars_from(points):
    return StarSet.from_cartesian(np.asarray(points, dtype=float))


def wrapped_diff(a, b):
    return abs((a - b + math.pi) % (2 * math.pi) - math.pi)


def qubit_tensor(amps):
    """Symmetric n-qubit state from Dicke amplitudes; bit 0 is spin up."""
    n = len(amps) - 1
    psi = np.zeros(2**n, complex)
    for idx in range(2**n):
        p = n - bin(idx).count("1")
        psi[idx] = amps[p] / math.sqrt(math.comb(n, p))
    return (psi / np.linalg.norm(psi)).reshape((2,) * n)


def hyperdeterminant_tangle(a):
    d1 = (a[0, 0, 0]**2 * a[1, 1, 1]**2 + a[0, 0, 1]**2 * a[1, 1, 0]**2
          + a[0, 1, 0]**2 * a[1, 0, 1]**2 + a[1, 0, 0]**2 * a[0, 1, 1]**2)
    d2 = (a[0, 0, 0] * a[1, 1, 1] * a[0, 1, 1] * a[1, 0, 0] + a[0, 0, 0] * a[1, 1, 1] * a[1, 0, 1] * a[0, 1, 0]
          + a[0, 0, 0] * a[1, 1, 1] * a[1, 1, 0] * a[0, 0, 1] + a[0, 1, 1] * a[1, 0, 0] * a[1, 0, 1] * a[0, 1, 0]
          + a[0, 1, 1] * a[1, 0, 0] * a[1, 1, 0] * a[0, 0, 1] + a[1, 0, 1] * a[0, 1, 0] * a[1, 1, 0] * a[0, 0, 1])
    d3 = a[0, 0, 0] * a[1, 1, 0] * a[1, 0, 1] * a[0, 1, 1] + a[1, 1, 1] * a[0, 0, 1] * a[0, 1, 0] * a[1, 0, 0]
    return 4 * abs(d1 - 2 * d2 + 4 * d3)


def common_circle_loop(kind, n_steps=2000):
    """Two stars on one shared latitude (or longitude) circle moving along it."""
    t = np.linspace(0, 2 * math.pi, n_steps + 1)
    if kind == "latitude":
        theta = 1.0 + 0.3 * np.sin(t)
        phis = [t + 0.4 * np.sin(2 * t), 2.0 + t + 0.3 * np.cos(t) - 0.3]
        pos = np.stack([directions_to_cartesian(theta, p) for p in phis], axis=1)
    else:
        phi = t
        thetas = [1.0 + 0.5 * np.sin(t), 2.0 + 0.4 * np.cos(2 * t)]
        pos = np.stack([directions_to_cartesian(th, phi) for th in thetas], axis=1)
    pos[-1] = pos[0]
    return LoopTrajectory.from_positions(pos)
