"""Two-mode interacting boson model along adiabatic parameter loops.

Hamiltonian in the Fock basis ``|k, n - k>`` (``k`` bosons in mode ``a``)::

    H = (R sin(theta)/4) (e^{-i varphi} a^dag b + e^{i varphi} b^dag a)
        + (R cos(theta)/4) (a^dag a - b^dag b) + (lambda/4) (a^dag a - b^dag b)^2

which equals ``(R/2) B.J + lambda J_z^2`` with ``B`` the unit vector at
``(theta, varphi)``.  At ``lambda = 0`` level ``k`` (0-based from the ground
state) is the Dicke state with ``k`` stars on ``B`` and ``n - k`` on ``-B``.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field, replace

import numpy as np

from .berry import LoopTrajectory, berry_phase, berry_phase_oracle
from .errors import DiscontinuityError, InvalidInputError, StellarError
from .geometry import loop_solid_angle, wrap_angle
from .stellar import MAX_STARS, SpinState, directions_to_cartesian

__all__ = [
    "BosonParams",
    "ControlLoop",
    "EigenTrack",
    "SweepRow",
    "TrackingWarning",
    "build_hamiltonian",
    "eigensystem_track",
    "sweep_row",
    "sweep_lambda",
    "lambda_zero_reference",
    "magnetic_number",
]


class TrackingWarning(UserWarning):
    """Eigenstate tracking came close to a level crossing."""


@dataclass(frozen=True)
class BosonParams:
    n: int
    R: float = 1.0
    theta: float = math.pi / 3
    varphi: float = 0.0
    lam: float = 0.0

    def __post_init__(self):
        if not 1 <= int(self.n) <= MAX_STARS or int(self.n) != self.n:
            raise InvalidInputError(f"boson number must be an integer in [1, {MAX_STARS}], got {self.n}")
        if not self.R > 0:
            raise InvalidInputError(f"R must be positive, got {self.R}")


@dataclass(frozen=True)
class ControlLoop:
    """Closed schedule of ``(theta, varphi)`` at fixed ``R`` and ``lambda``."""

    schedule: np.ndarray
    R: float = 1.0
    lam: float = 0.0

    def __post_init__(self):
        sched = np.asarray(self.schedule, dtype=float)
        if sched.ndim != 2 or sched.shape[1] != 2 or sched.shape[0] < 3:
            raise InvalidInputError("schedule must be an (N + 1, 2) array with N >= 2")
        if not np.all(np.isfinite(sched)):
            raise InvalidInputError("schedule contains non-finite values")
        first = directions_to_cartesian(*sched[0])
        last = directions_to_cartesian(*sched[-1])
        if np.max(np.abs(first - last)) > 1e-12:
            raise InvalidInputError("control loop is not closed")
        if not self.R > 0:
            raise InvalidInputError(f"R must be positive, got {self.R}")
        object.__setattr__(self, "schedule", sched)

    @classmethod
    def latitude(cls, theta: float = math.pi / 3, n_steps: int = 2000, R: float = 1.0, lam: float = 0.0,
                 phi_start: float = 0.0, phi_end: float = 2.0 * math.pi) -> "ControlLoop":
        """Constant-``theta`` loop, ``varphi`` uniform over ``n_steps`` steps."""
        if n_steps < 2:
            raise InvalidInputError("need at least 2 steps")
        phis = np.linspace(phi_start, phi_end, n_steps + 1)
        return cls(np.column_stack([np.full_like(phis, theta), phis]), R, lam)

    @property
    def n_steps(self) -> int:
        return self.schedule.shape[0] - 1

    def with_lambda(self, lam: float) -> "ControlLoop":
        return replace(self, lam=float(lam))

    def field_directions(self) -> np.ndarray:
        return directions_to_cartesian(self.schedule[:, 0], self.schedule[:, 1])

    def params(self, n: int, t: int) -> BosonParams:
        theta, varphi = self.schedule[t]
        return BosonParams(n, self.R, float(theta), float(varphi), self.lam)


def _hamiltonians(n: int, R: float, lam: float, theta, varphi) -> np.ndarray:
    theta = np.atleast_1d(np.asarray(theta, dtype=float))
    varphi = np.atleast_1d(np.asarray(varphi, dtype=float))
    k = np.arange(n + 1)
    jz2 = 2 * k - n
    h = np.zeros((theta.size, n + 1, n + 1), dtype=complex)
    diag = (R * np.cos(theta)[:, None] / 4.0) * jz2 + (lam / 4.0) * jz2**2
    h[:, k, k] = diag
    kk = k[:-1]
    off = (R * np.sin(theta)[:, None] / 4.0) * np.exp(-1j * varphi)[:, None] * np.sqrt((kk + 1) * (n - kk))
    h[:, kk + 1, kk] = off
    h[:, kk, kk + 1] = off.conj()
    return h


def build_hamiltonian(p: BosonParams) -> np.ndarray:
    """Hermitian ``(n + 1) x (n + 1)`` matrix in the Fock basis ``k = 0..n``."""
    h = _hamiltonians(int(p.n), p.R, p.lam, p.theta, p.varphi)[0]
    assert np.array_equal(h, h.conj().T)
    return h


@dataclass(frozen=True)
class EigenTrack:
    """One eigenstate followed continuously around a control loop."""

    level: int
    states: np.ndarray  # (N + 1, n + 1)
    energies: np.ndarray
    min_gap: float
    min_overlap: float

    def spin_states(self) -> list[SpinState]:
        return [SpinState(v) for v in self.states]


def eigensystem_track(loop: ControlLoop, n: int, level: int, min_overlap: float = 0.9) -> EigenTrack:
    """Diagonalize along ``loop`` and follow ``level`` by maximal overlap.

    ``level`` is the 0-based energy index at the first schedule point.

    Raises
    ------
    DiscontinuityError
        If the best overlap between consecutive steps drops below ``min_overlap``.
    """
    if not 0 <= level <= n:
        raise InvalidInputError(f"level {level} out of range for n={n}")
    hs = _hamiltonians(n, loop.R, loop.lam, loop.schedule[:, 0], loop.schedule[:, 1])
    evals, evecs = np.linalg.eigh(hs)
    steps = hs.shape[0]
    idx = np.empty(steps, dtype=int)
    idx[0] = level
    worst = 1.0
    for t in range(1, steps):
        ov = np.abs(evecs[t].conj().T @ evecs[t - 1][:, idx[t - 1]])
        best = int(np.argmax(ov))
        if ov[best] < min_overlap:
            raise DiscontinuityError(f"eigenstate tracking lost at step {t} (overlap {ov[best]:.3g})", step=t)
        worst = min(worst, float(ov[best]))
        idx[t] = best
    rows = np.arange(steps)
    states = evecs[rows, :, idx]
    energies = evals[rows, idx]
    gaps = np.full(steps, np.inf)
    if n >= 1:
        below = np.where(idx > 0, energies - evals[rows, np.maximum(idx - 1, 0)], np.inf)
        above = np.where(idx < n, evals[rows, np.minimum(idx + 1, n)] - energies, np.inf)
        gaps = np.minimum(below, above)
    min_gap = float(np.min(gaps))
    if min_gap < 1e-6 * loop.R:
        warnings.warn(f"level {level} comes within {min_gap:.3e} of a neighbour", TrackingWarning, stacklevel=2)
    return EigenTrack(level, states, energies, min_gap, worst)


def magnetic_number(n: int, level: int) -> float:
    """Magnetic quantum number along the field of ``level`` (0-based from the ground state)."""
    return level - n / 2.0


@dataclass(frozen=True)
class SweepRow:
    """One ``lambda`` point of a Berry phase sweep.

    Phases are mod-2pi representatives in ``(-pi, pi]``; ``delta`` is the
    wrapped formula/oracle discrepancy.  Invalid rows carry NaN phases and
    the failure message in ``error``.
    """

    lambda_over_R: float
    gamma_formula: float
    gamma_oracle: float
    gamma0: float
    gammaC: float
    gammaR: float
    gammaA: float
    min_gap: float
    valid: bool
    level: int
    magnetic_number: float
    delta: float = math.nan
    error: str = field(default="", repr=False)

    COLUMNS = ("lambda_over_R", "gamma_formula", "gamma_oracle", "gamma0", "gammaC", "gammaR", "gammaA",
               "min_gap", "valid", "level", "magnetic_number", "delta")

    def as_dict(self) -> dict:
        return {c: getattr(self, c) for c in self.COLUMNS}


def _invalid_row(lam_over_r, level, n, min_gap, message) -> SweepRow:
    nan = math.nan
    return SweepRow(lam_over_r, nan, nan, nan, nan, nan, nan, min_gap, False, level,
                    magnetic_number(n, level), nan, message)


def sweep_row(n: int, loop: ControlLoop, level: int, min_overlap: float = 0.9) -> SweepRow:
    """Track one level around ``loop`` and compare the star formula with the oracle."""
    lam_over_r = loop.lam / loop.R
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", TrackingWarning)
            track = eigensystem_track(loop, n, level, min_overlap)
    except StellarError as exc:
        return _invalid_row(lam_over_r, level, n, math.nan, str(exc))
    if track.min_gap < 1e-8 * loop.R:
        return _invalid_row(lam_over_r, level, n, track.min_gap, "level degeneracy on the loop")
    try:
        star_loop = LoopTrajectory.from_states(track.states)
        parts = berry_phase(star_loop)
        oracle = berry_phase_oracle(track.states)
    except StellarError as exc:
        return _invalid_row(lam_over_r, level, n, track.min_gap, str(exc))
    formula = wrap_angle(parts.gamma_total)
    return SweepRow(
        lambda_over_R=lam_over_r,
        gamma_formula=formula,
        gamma_oracle=oracle,
        gamma0=wrap_angle(parts.gamma_0),
        gammaC=parts.gamma_C,
        gammaR=parts.gamma_R,
        gammaA=parts.gamma_A,
        min_gap=track.min_gap,
        valid=True,
        level=level,
        magnetic_number=magnetic_number(n, level),
        delta=abs(wrap_angle(formula - oracle)),
    )


def sweep_lambda(n: int, loop: ControlLoop, level: int, lambdas, min_overlap: float = 0.9) -> list[SweepRow]:
    """One :class:`SweepRow` per entry of ``lambdas`` (absolute values), in input order."""
    return [sweep_row(n, loop.with_lambda(lam), level, min_overlap) for lam in lambdas]


def lambda_zero_reference(n: int, m: int, loop: ControlLoop) -> float:
    """Closed-form target ``(n - 2m) Omega_u`` for level ``m`` at ``lambda = 0``.

    ``Omega_u`` is the accumulated solid angle of the field-direction loop.
    """
    return (n - 2 * m) * loop_solid_angle(loop.field_directions())
