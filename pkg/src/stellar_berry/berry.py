"""Berry phases of closed loops from Majorana star trajectories.

The phase splits as ``gamma = gamma_0 + gamma_C``:

* ``gamma_0 = -1/2 sum_i Omega_i`` with ``Omega_i`` the solid angle swept by
  star ``i``;
* ``gamma_C = 1/2 oint sum_{i<j} beta_ij Omega(du_ij)``, the correlation phase,
  further split into relative (``gamma_R``) and absolute (``gamma_A``) parts.

Loops are sampled at ``N + 1`` points with the last sample equal to the first
as a star multiset.  Integrands are evaluated at step midpoints.  The
correlation term is accumulated as ``-(dN^2/dd_ij)/N^2 * u_i x u_j . d(u_j - u_i)``
so coincident stars contribute a finite (zero) amount instead of 0/0.

:func:`berry_phase_oracle` computes the same phase from the states alone via
the product of consecutive overlaps.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.optimize import linear_sum_assignment

from .correlation import beta_over_distance
from .errors import DiscontinuityError, InvalidInputError, InvalidStateError
from .geometry import DEGENERATE_TOL, path_solid_angle_steps, wrap_angle
from .stellar import SpinState, StarSet, cartesian_to_angles, directions_to_cartesian, find_star_positions

__all__ = [
    "DEFAULT_CONTINUITY_BOUND",
    "LoopTrajectory",
    "PairPhase",
    "PhaseBreakdown",
    "RigidPairAngle",
    "match_stars",
    "match_loop",
    "gamma_zero",
    "gamma_correlation",
    "gamma_relative_absolute",
    "rigid_body_pair_angle",
    "berry_phase",
    "berry_phase_oracle",
    "rotated_constellation_loop",
    "field_constellation",
    "spin_in_field_loop",
    "random_smooth_positions",
]

DEFAULT_CONTINUITY_BOUND = 0.2

# relative azimuths are undefined within this angle of coincidence
RELATIVE_FRAME_TOL = 1e-6
# azimuth differentials are unusable within this distance of a pole
POLE_TOL = 1e-5


def _positions_of(stars) -> np.ndarray:
    if isinstance(stars, StarSet):
        return stars.cartesian
    return np.asarray(stars, dtype=float)


def match_stars(prev, nxt, continuity_bound: float = DEFAULT_CONTINUITY_BOUND, step=None) -> np.ndarray:
    """Permutation aligning ``nxt`` with ``prev``.

    Solves the assignment problem on chordal distances, so ``nxt[perm[k]]``
    is the star that continues ``prev[k]``.

    Raises
    ------
    DiscontinuityError
        If any matched star moved farther than ``continuity_bound`` (chordal).
    """
    a = _positions_of(prev)
    b = _positions_of(nxt)
    if a.shape != b.shape:
        raise InvalidInputError(f"star counts differ: {a.shape[0]} vs {b.shape[0]}")
    cost = np.linalg.norm(a[:, None, :] - b[None, :, :], axis=-1)
    if _identity_is_optimal(cost):
        perm = np.arange(a.shape[0])
    else:
        rows, cols = linear_sum_assignment(cost)
        perm = cols[np.argsort(rows)]
    worst = float(np.max(cost[np.arange(a.shape[0]), perm]))
    if worst > continuity_bound:
        where = "" if step is None else f" at step {step}"
        raise DiscontinuityError(
            f"star moved {worst:.3g} (chordal) > continuity bound {continuity_bound}{where}", step=step
        )
    return perm


@dataclass(frozen=True)
class LoopTrajectory:
    """A closed, sampled loop of star constellations.

    Attributes
    ----------
    positions : ndarray, shape (N + 1, n, 3)
        Star positions per sample.  After matching, ``positions[:, k]`` is the
        path of one star.
    states : ndarray or None, shape (N + 1, n + 1)
        Optional amplitude vectors the stars came from.
    matched : bool
        True once star identities are aligned across samples.
    closing_permutation : ndarray or None
        ``positions[-1][k]`` continues into ``positions[0][closing_permutation[k]]``.
    """

    positions: np.ndarray
    states: np.ndarray | None = None
    matched: bool = False
    closing_permutation: np.ndarray | None = None

    def __post_init__(self):
        pos = np.asarray(self.positions, dtype=float)
        if pos.ndim != 3 or pos.shape[2] != 3:
            raise InvalidInputError("positions must have shape (samples, stars, 3)")
        if pos.shape[0] < 3:
            raise InvalidInputError("a loop needs at least 3 samples")
        object.__setattr__(self, "positions", pos)
        if self.states is not None:
            st = np.asarray(self.states, dtype=complex)
            if st.shape != (pos.shape[0], pos.shape[1] + 1):
                raise InvalidInputError("states must have shape (samples, n + 1)")
            object.__setattr__(self, "states", st)

    @property
    def n_samples(self) -> int:
        return self.positions.shape[0]

    @property
    def n_stars(self) -> int:
        return self.positions.shape[1]

    def star_set(self, t: int) -> StarSet:
        return StarSet.from_cartesian(self.positions[t])

    def reversed(self) -> "LoopTrajectory":
        perm = None
        if self.closing_permutation is not None:
            perm = np.argsort(self.closing_permutation)
        states = None if self.states is None else self.states[::-1]
        return replace(self, positions=self.positions[::-1].copy(), states=states, closing_permutation=perm)

    @classmethod
    def from_positions(cls, positions, states=None, match: bool = True,
                       continuity_bound: float = DEFAULT_CONTINUITY_BOUND) -> "LoopTrajectory":
        loop = cls(np.asarray(positions, dtype=float), states)
        return match_loop(loop, continuity_bound) if match else loop

    @classmethod
    def from_star_sets(cls, star_sets, states=None, match: bool = True,
                       continuity_bound: float = DEFAULT_CONTINUITY_BOUND) -> "LoopTrajectory":
        sets = list(star_sets)
        sizes = {s.n for s in sets}
        if len(sizes) != 1:
            raise InvalidInputError(f"samples have differing star counts {sorted(sizes)}")
        pos = np.stack([s.cartesian for s in sets])
        return cls.from_positions(pos, states, match, continuity_bound)

    @classmethod
    def from_states(cls, states, tol: float = 1e-10, match: bool = True,
                    continuity_bound: float = DEFAULT_CONTINUITY_BOUND) -> "LoopTrajectory":
        """Star loop of a sampled state loop (stars found in one batched pass)."""
        amps = [s.amplitudes if isinstance(s, SpinState) else np.asarray(s, complex) for s in states]
        if len({a.shape for a in amps}) != 1:
            raise InvalidInputError("samples have differing dimensions")
        amps = np.stack(amps)
        positions, _ = find_star_positions(amps, tol=tol)
        return cls.from_positions(positions, amps, match, continuity_bound)


def _identity_is_optimal(cost: np.ndarray) -> np.ndarray:
    """True where every diagonal entry is its row minimum (batched over the leading axis).

    The sum of row minima bounds every assignment from below, so the identity
    is then an optimal assignment.
    """
    diag = np.diagonal(cost, axis1=-2, axis2=-1)
    return np.all(diag <= cost.min(axis=-1), axis=-1)


def match_loop(loop: LoopTrajectory, continuity_bound: float = DEFAULT_CONTINUITY_BOUND) -> LoopTrajectory:
    """Align star identities along the loop and find the closing permutation."""
    pos = loop.positions.copy()
    # fast path: steps already aligned as given need no assignment solve
    cost = np.linalg.norm(pos[:-1, :, None, :] - pos[1:, None, :, :], axis=-1)
    aligned = _identity_is_optimal(cost)
    aligned &= np.diagonal(cost, axis1=1, axis2=2).max(axis=-1) <= continuity_bound
    bad = np.flatnonzero(~aligned)
    start = int(bad[0]) + 1 if bad.size else pos.shape[0]
    for t in range(start, pos.shape[0]):
        perm = match_stars(pos[t - 1], pos[t], continuity_bound, step=t)
        pos[t] = pos[t][perm]
    # positions[-1][k] continues into positions[0][closing[k]]
    back = match_stars(pos[-1], pos[0], continuity_bound, step=pos.shape[0] - 1)
    return replace(loop, positions=pos, matched=True, closing_permutation=back)


def _require_matched(loop: LoopTrajectory):
    if not loop.matched or loop.closing_permutation is None:
        raise InvalidStateError("loop star identities are not matched; call match_loop first")


def _extended(loop: LoopTrajectory) -> np.ndarray:
    """Positions with the closing sample appended, shape ``(N + 2, n, 3)``."""
    _require_matched(loop)
    pos = loop.positions
    closing = pos[0][loop.closing_permutation]
    return np.concatenate([pos, closing[None]], axis=0)


def _midpoints_and_steps(ext: np.ndarray):
    mids = ext[1:] + ext[:-1]
    norms = np.linalg.norm(mids, axis=-1, keepdims=True)
    mids = mids / norms
    return mids, np.diff(ext, axis=0)


@dataclass(frozen=True)
class PairPhase:
    """Contribution of one star pair to the correlation phase."""

    i: int
    j: int
    gamma_C: float
    gamma_R: float | None = None
    gamma_A: float | None = None
    degenerate: bool = False


@dataclass(frozen=True)
class PhaseBreakdown:
    """Berry phase of a loop and its components (accumulated, not reduced)."""

    gamma_total: float
    gamma_0: float
    gamma_C: float
    gamma_R: float | None = None
    gamma_A: float | None = None
    per_star_solid_angles: tuple = ()
    per_pair: tuple = field(default=(), repr=False)

    @property
    def gamma_total_mod(self) -> float:
        return wrap_angle(self.gamma_total)

    @property
    def degenerate_pairs(self) -> tuple:
        return tuple((p.i, p.j) for p in self.per_pair if p.degenerate)

    def wrapped(self) -> dict:
        """Mod-2pi representatives in ``(-pi, pi]`` of every phase."""
        out = {"gamma_total": self.gamma_total, "gamma_0": self.gamma_0, "gamma_C": self.gamma_C}
        if self.gamma_R is not None:
            out["gamma_R"] = self.gamma_R
            out["gamma_A"] = self.gamma_A
        return {k: wrap_angle(v) for k, v in out.items()}


def gamma_zero(loop: LoopTrajectory):
    """``gamma_0 = -1/2 sum_i Omega_i`` and the per-star solid angles.

    With a non-trivial closing permutation each ``Omega_i`` is the open-path
    part of its permutation cycle; the sum over a cycle is its closed solid
    angle.
    """
    ext = _extended(loop)
    per_step = path_solid_angle_steps(ext)
    omegas = per_step.sum(axis=0)
    return float(-0.5 * omegas.sum()), [float(x) for x in omegas]


def _pair_indices(n: int):
    return np.triu_indices(n, k=1)


def _correlation_kernel(ext: np.ndarray):
    """Midpoints, steps and ``beta/d`` at the midpoints of every step."""
    mids, du = _midpoints_and_steps(ext)
    return mids, du, beta_over_distance(mids)


def _gamma_correlation(ext: np.ndarray, kernel):
    n = ext.shape[1]
    mids, du, bod = kernel
    cross = np.cross(mids[:, :, None, :], mids[:, None, :, :])
    ddu = du[:, None, :, :] - du[:, :, None, :]
    inc = bod * np.einsum("sijk,sijk->sij", cross, ddu)
    iu, ju = _pair_indices(n)
    per_pair = 0.5 * inc[:, iu, ju].sum(axis=0)
    ledger = [(int(i), int(j), float(v)) for i, j, v in zip(iu, ju, per_pair)]
    return float(per_pair.sum()), ledger


def gamma_correlation(loop: LoopTrajectory):
    """Correlation phase ``gamma_C`` and its per-pair contributions.

    Returns ``(gamma_C, [(i, j, gamma_C_ij), ...])``.
    """
    ext = _extended(loop)
    if ext.shape[1] < 2:
        return 0.0, []
    return _gamma_correlation(ext, _correlation_kernel(ext))


def _split_numerators(ext: np.ndarray, mids: np.ndarray, du: np.ndarray):
    """Per-step pieces of the split ``Omega(du_ij) d_ij = num_ij + d_ij * abs_ij``.

    Positions are the normalized step midpoints; azimuth increments are the
    exact wrapped differences of the sampled azimuths, so stars rotating
    together about the z axis give ``num = 0`` exactly.
    ``num_ij = d_ij (dphi'_{i(j)} + dphi'_{j(i)})`` carries the relative
    evolution and ``abs_ij = cos(theta_i) dphi_i + cos(theta_j) dphi_j`` the
    absolute one.  Returns ``(num, absolute, on_axis)`` where ``on_axis``
    marks stars too close to a pole for an azimuth increment.
    """
    x, y, z = mids[..., 0], mids[..., 1], mids[..., 2]
    rho_sq = x * x + y * y
    sample_rho_sq = ext[..., 0] ** 2 + ext[..., 1] ** 2
    on_axis = (rho_sq < POLE_TOL**2) | (np.minimum(sample_rho_sq[1:], sample_rho_sq[:-1]) < POLE_TOL**2)
    safe = np.where(on_axis, 1.0, rho_sq)
    _, phi = cartesian_to_angles(ext)
    dphi = np.where(on_axis, 0.0, wrap_angle(np.diff(phi, axis=0)))
    dz = du[..., 2]
    # sin(phi_i - phi_j) * rho_i * rho_j
    sin_rr = y[..., :, None] * x[..., None, :] - x[..., :, None] * y[..., None, :]
    # (s_i dtheta_j - s_j dtheta_i) sin(phi_i - phi_j), with s dtheta = -dz
    tilt = (-dz[..., None, :] / safe[..., None, :] + dz[..., :, None] / safe[..., :, None]) * sin_rr
    num = (z[..., :, None] - z[..., None, :]) * (dphi[..., None, :] - dphi[..., :, None]) + tilt
    absolute = z[..., :, None] * dphi[..., :, None] + z[..., None, :] * dphi[..., None, :]
    return num, absolute, on_axis


def _gamma_relative_absolute(ext: np.ndarray, kernel):
    n = ext.shape[1]
    mids, du, bod = kernel
    d = np.clip(1.0 - np.einsum("sia,sja->sij", mids, mids), 0.0, 2.0)
    num, absolute, on_axis = _split_numerators(ext, mids, du)
    axis_pair = np.any(on_axis[:, :, None] | on_axis[:, None, :], axis=0)
    coincident = np.any(d <= RELATIVE_FRAME_TOL**2 / 2.0, axis=0)
    # beta * (dphi' sum) = (beta/d) * num stays finite when stars meet
    rel = 0.5 * np.sum(bod * num, axis=0)
    ab = 0.5 * np.sum(bod * d * absolute, axis=0)
    rel = np.where(axis_pair, 0.0, rel)
    ab = np.where(axis_pair, 0.0, ab)
    pairs = []
    for i, j in itertools.combinations(range(n), 2):
        pairs.append(PairPhase(i, j, float(rel[i, j] + ab[i, j]), float(rel[i, j]), float(ab[i, j]),
                               bool(axis_pair[i, j] or coincident[i, j])))
    iu, ju = _pair_indices(n)
    return float(rel[iu, ju].sum()), float(ab[iu, ju].sum()), pairs


def gamma_relative_absolute(loop: LoopTrajectory):
    """Split of ``gamma_C`` into relative and absolute star-pair evolutions.

    ``gamma_R_ij = 1/2 oint beta_ij (dphi'_{i(j)} + dphi'_{j(i)})`` and
    ``gamma_A_ij = 1/2 oint beta_ij (cos theta_i dphi_i + cos theta_j dphi_j)``,
    with ``phi'`` the relative azimuths of :func:`relative_coordinates`.
    Pairs that come within ``RELATIVE_FRAME_TOL`` of coinciding are flagged
    (their contribution is the finite coincident limit).  Pairs with a star
    within ``POLE_TOL`` of a pole have no azimuth differential; they are
    flagged and excluded from both parts.

    Returns ``(gamma_R, gamma_A, [PairPhase, ...])``.
    """
    ext = _extended(loop)
    if ext.shape[1] < 2:
        return 0.0, 0.0, []
    return _gamma_relative_absolute(ext, _correlation_kernel(ext))


@dataclass(frozen=True)
class RigidPairAngle:
    """Accumulated pair solid angle of a rigid loop and its decompositions.

    ``value`` integrates the vector form.  ``relative + absolute`` is the
    decomposition with denominator ``1 - u_i.u_j``; ``literal_value`` is the
    alternative ``(Omega'_i + Omega'_j)/(1 + u_i.u_j) - [(Omega_i + Omega_j) mod 2pi]``.
    """

    value: float
    relative: float
    absolute: float
    residual: float
    literal_value: float
    literal_residual: float
    degenerate: bool


def rigid_body_pair_angle(loop: LoopTrajectory, i: int, j: int, rigid_tol: float = 1e-8) -> RigidPairAngle:
    """Pair solid angle ``Omega(u_ij) = oint Omega(du_ij)`` for a rigid pair.

    Raises
    ------
    InvalidInputError
        If ``d_ij`` varies by more than ``rigid_tol`` along the loop.
    """
    ext = _extended(loop)
    n = ext.shape[1]
    if i == j or not (0 <= i < n and 0 <= j < n):
        raise InvalidInputError(f"invalid pair ({i}, {j}) for n={n}")
    d_samples = 1.0 - np.einsum("sa,sa->s", ext[:, i], ext[:, j])
    if np.ptp(d_samples) > rigid_tol:
        raise InvalidInputError(f"pair ({i}, {j}) is not rigid: d_ij varies by {np.ptp(d_samples):.3e}")

    mids, du = _midpoints_and_steps(ext)
    d_mid = 1.0 - np.einsum("sa,sa->s", mids[:, i], mids[:, j])
    cross = np.cross(mids[:, i], mids[:, j])
    vec = np.einsum("sa,sa->s", cross, du[:, j] - du[:, i])
    safe = d_mid > DEGENERATE_TOL
    value = float(np.sum(np.where(safe, vec / np.where(safe, d_mid, 1.0), 0.0)))

    num, absolute, on_axis = _split_numerators(ext[:, [i, j]], mids[:, [i, j]], du[:, [i, j]])
    on_axis = bool(np.any(on_axis))
    rel_steps = np.where(safe, num[:, 0, 1] / np.where(safe, d_mid, 1.0), 0.0)
    rel = 0.0 if on_axis else float(rel_steps.sum())
    ab = 0.0 if on_axis else float(absolute[:, 0, 1].sum())
    degenerate = on_axis or bool(np.any(~safe))

    cos_rel = 1.0 - float(np.mean(d_samples))
    own = path_solid_angle_steps(ext[:, [i, j]]).sum()
    # literal form: (Omega'_i + Omega'_j) / (1 + u_i.u_j), Omega' = (1 - cos theta') * relative winding
    literal_rel = 0.0 if 1.0 + cos_rel <= DEGENERATE_TOL else (1.0 - cos_rel) * rel / (1.0 + cos_rel)
    literal = literal_rel - math.fmod(float(own), 2.0 * math.pi)
    return RigidPairAngle(
        value=value,
        relative=rel,
        absolute=ab,
        residual=abs(value - (rel + ab)),
        literal_value=literal,
        literal_residual=abs(value - literal),
        degenerate=degenerate,
    )


def berry_phase(loop: LoopTrajectory, split: bool = True) -> PhaseBreakdown:
    """Berry phase ``gamma_0 + gamma_C`` of a matched loop with full ledger."""
    g0, omegas = gamma_zero(loop)
    ext = _extended(loop)
    gc, gr, ga, pairs = 0.0, None, None, ()
    if ext.shape[1] >= 2:
        kernel = _correlation_kernel(ext)
        gc, ledger = _gamma_correlation(ext, kernel)
        if split:
            gr, ga, split_pairs = _gamma_relative_absolute(ext, kernel)
            pairs = tuple(replace(p, gamma_C=c) for p, (_, _, c) in zip(split_pairs, ledger))
        else:
            pairs = tuple(PairPhase(i, j, c) for i, j, c in ledger)
    elif split:
        gr, ga = 0.0, 0.0
    return PhaseBreakdown(
        gamma_total=g0 + gc,
        gamma_0=g0,
        gamma_C=gc,
        gamma_R=gr,
        gamma_A=ga,
        per_star_solid_angles=tuple(omegas),
        per_pair=pairs,
    )


def berry_phase_oracle(states, min_overlap: float = 1e-6) -> float:
    """Berry phase from the product of consecutive overlaps around the chain.

    ``gamma = -arg(<psi_0|psi_1> <psi_1|psi_2> ... <psi_{N}|psi_0>)``, in
    ``(-pi, pi]``.  The wrap-around overlap is always included, so the list
    may either repeat its first state at the end (with any phase) or leave the
    closure implicit.  Independent of the phase of every individual state.
    """
    vecs = [s.amplitudes if isinstance(s, SpinState) else np.asarray(s, dtype=complex) for s in states]
    if len(vecs) < 3:
        raise InvalidInputError("the overlap product needs at least 3 states")
    vecs = [v / np.linalg.norm(v) for v in vecs]
    product = 1.0 + 0.0j
    for t in range(len(vecs)):
        ov = np.vdot(vecs[t], vecs[(t + 1) % len(vecs)])
        if abs(ov) < min_overlap:
            raise DiscontinuityError(f"vanishing overlap {abs(ov):.3e} at step {t}", step=t)
        product *= ov / abs(ov)
    return wrap_angle(-np.angle(product))


def rotated_constellation_loop(stars, n_steps: int, axis=(0.0, 0.0, 1.0), angle: float = 2.0 * math.pi,
                               with_states: bool = False) -> LoopTrajectory:
    """Loop that rigidly rotates a constellation about ``axis``.

    ``n_steps + 1`` samples; the last equals the first when ``angle`` is a
    multiple of ``2 pi``.
    """
    pts = _positions_of(stars)
    if n_steps < 2:
        raise InvalidInputError("need at least 2 steps")
    k = np.asarray(axis, dtype=float)
    k = k / np.linalg.norm(k)
    angles = np.linspace(0.0, angle, n_steps + 1)
    c = np.cos(angles)[:, None, None]
    s = np.sin(angles)[:, None, None]
    kv = np.cross(k, pts)[None]
    kd = (pts @ k)[None, :, None] * k
    rotated = pts[None] * c + kv * s + kd * (1.0 - c)
    rotated /= np.linalg.norm(rotated, axis=-1, keepdims=True)
    if angle % (2.0 * math.pi) == 0.0:
        rotated[-1] = rotated[0]
    states = None
    if with_states:
        from .stellar import state_from_stars

        states = np.stack([state_from_stars(StarSet.from_cartesian(p)).amplitudes for p in rotated])
    return LoopTrajectory.from_positions(rotated, states)


def field_constellation(n: int, m: float, theta, phi) -> np.ndarray:
    """Stars of ``|J, m>`` quantized along direction ``(theta, phi)``.

    ``J + m`` stars sit at the direction and ``J - m`` at its antipode.
    Array-valued angles give shape ``(..., n, 3)``.
    """
    up = n / 2.0 + m
    if abs(up - round(up)) > 1e-12 or not 0 <= round(up) <= n:
        raise InvalidInputError(f"m={m} is not a level of spin {n / 2}")
    up = int(round(up))
    u = directions_to_cartesian(theta, phi)[..., None, :]
    sign = np.where(np.arange(n) < up, 1.0, -1.0)[:, None]
    return sign * u


def spin_in_field_loop(n: int, m: float, theta: float, n_steps: int,
                       phi_start: float = 0.0, phi_end: float = 2.0 * math.pi) -> LoopTrajectory:
    """Constellation of ``|J, m>`` carried around a latitude loop of the field."""
    phis = np.linspace(phi_start, phi_end, n_steps + 1)
    pos = field_constellation(n, m, np.full_like(phis, theta), phis)
    if (phi_end - phi_start) % (2.0 * math.pi) == 0.0:
        pos[-1] = pos[0]
    return LoopTrajectory.from_positions(pos)


def random_smooth_positions(n: int, n_steps: int, rng, n_modes: int = 2, amplitude: float = 0.5) -> np.ndarray:
    """Closed, smooth star paths from random base points plus Fourier wiggles.

    Returns shape ``(n_steps + 1, n, 3)`` with the last sample equal to the
    first.  ``rng`` is a :class:`numpy.random.Generator`.
    """
    if n < 1 or n_steps < 2:
        raise InvalidInputError("need n >= 1 and n_steps >= 2")
    base = rng.normal(size=(n, 3))
    coef = amplitude * rng.normal(size=(2, n_modes, n, 3)) / np.arange(1, n_modes + 1)[None, :, None, None]
    t = np.linspace(0.0, 1.0, n_steps + 1)
    k = np.arange(1, n_modes + 1)
    cos = np.cos(2.0 * math.pi * np.outer(t, k))
    sin = np.sin(2.0 * math.pi * np.outer(t, k))
    pts = base[None] + np.einsum("tk,kna->tna", cos, coef[0]) + np.einsum("tk,kna->tna", sin, coef[1])
    pts /= np.linalg.norm(pts, axis=-1, keepdims=True)
    pts[-1] = pts[0]
    return pts
