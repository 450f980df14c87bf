"""Majorana stellar representation of spin-J / symmetric multiqubit states.

A spin-J state ``sum_m C_m |J, m>`` with ``n = 2J`` is stored as a complex
amplitude vector of length ``n + 1`` indexed by ``p = J + m`` (the number of
bosons in mode ``a``).  Its Majorana stars are the roots ``x_k`` of

    sum_k (-1)^k C_{n/2-k} / sqrt((n-k)! k!) x^(n-k) = 0

mapped to the sphere by ``x = tan(theta/2) exp(i phi)``.  A star at the north
pole (``theta = 0``) corresponds to ``x = 0`` and a star at the south pole to a
root at infinity, i.e. a vanishing leading coefficient.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidInputError, NumericalFailureError, ResourceLimitError

__all__ = [
    "MAX_STARS",
    "Direction",
    "SpinState",
    "StarSet",
    "majorana_polynomial",
    "find_stars",
    "find_star_positions",
    "state_from_stars",
    "generic_state_stars",
    "directions_to_cartesian",
    "cartesian_to_angles",
]

MAX_STARS = 60

# sqrt(k!) for k = 0..MAX_STARS; 60! ~ 8e81 is comfortably inside float64.
_SQRT_FACTORIAL = np.sqrt(np.array([float(math.factorial(k)) for k in range(MAX_STARS + 1)]))

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class Direction:
    """A point on the unit sphere given by polar angle ``theta`` and azimuth ``phi``.

    ``phi`` is stored in ``[0, 2*pi)``; at the poles it is set to 0.
    """

    theta: float
    phi: float = 0.0

    def __post_init__(self):
        theta = float(self.theta)
        phi = float(self.phi)
        if not (math.isfinite(theta) and math.isfinite(phi)):
            raise InvalidInputError(f"non-finite direction ({theta}, {phi})")
        if theta < 0.0 or theta > math.pi:
            raise InvalidInputError(f"theta={theta} outside [0, pi]")
        phi = phi % TWO_PI
        if phi >= TWO_PI:  # -tiny % 2pi can round up to 2pi
            phi = 0.0
        if theta == 0.0 or theta == math.pi:
            phi = 0.0
        object.__setattr__(self, "theta", theta)
        object.__setattr__(self, "phi", phi)

    @classmethod
    def from_cartesian(cls, vec) -> "Direction":
        theta, phi = cartesian_to_angles(np.asarray(vec, dtype=float))
        return cls(float(theta), float(phi))

    @property
    def cartesian(self) -> np.ndarray:
        st = math.sin(self.theta)
        return np.array([st * math.cos(self.phi), st * math.sin(self.phi), math.cos(self.theta)])

    @property
    def stereographic(self) -> complex:
        """``tan(theta/2) exp(i phi)``; ``inf`` at the south pole."""
        if self.theta == math.pi:
            return complex(math.inf, 0.0)
        return math.tan(self.theta / 2.0) * complex(math.cos(self.phi), math.sin(self.phi))

    def antipode(self) -> "Direction":
        return Direction(math.pi - self.theta, self.phi + math.pi)


@dataclass(frozen=True)
class SpinState:
    """Amplitudes ``C_m`` of a spin-n/2 state, stored low-to-high in ``J + m``.

    Unnormalized input is accepted; use :meth:`normalized` when unit norm
    matters.
    """

    amplitudes: np.ndarray

    def __post_init__(self):
        amps = np.array(self.amplitudes, dtype=complex).reshape(-1)
        if amps.size < 2:
            raise InvalidInputError("a spin state needs at least two amplitudes (n >= 1)")
        if amps.size - 1 > MAX_STARS:
            raise ResourceLimitError(f"n={amps.size - 1} exceeds the supported limit n <= {MAX_STARS}")
        if not np.all(np.isfinite(amps)):
            raise InvalidInputError("amplitudes contain non-finite values")
        if not np.any(amps != 0):
            raise InvalidInputError("the zero vector is not a state")
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)

    @property
    def n(self) -> int:
        return self.amplitudes.size - 1

    @property
    def spin(self) -> float:
        return self.n / 2.0

    def amplitude(self, m: float) -> complex:
        """Amplitude ``C_m`` for magnetic number ``m`` in ``[-n/2, n/2]``."""
        p = m + self.n / 2.0
        if abs(p - round(p)) > 1e-12 or not 0 <= round(p) <= self.n:
            raise InvalidInputError(f"m={m} is not a level of spin {self.spin}")
        return complex(self.amplitudes[int(round(p))])

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def normalized(self) -> "SpinState":
        return SpinState(self.amplitudes / self.norm())

    def overlap(self, other: "SpinState") -> complex:
        """``<self|other>`` of the normalized states."""
        return complex(np.vdot(self.amplitudes, other.amplitudes) / (self.norm() * other.norm()))

    @classmethod
    def dicke(cls, n: int, m: float) -> "SpinState":
        """The basis state ``|J=n/2, m>``."""
        amps = np.zeros(n + 1, dtype=complex)
        p = m + n / 2.0
        if abs(p - round(p)) > 1e-12 or not 0 <= round(p) <= n:
            raise InvalidInputError(f"m={m} is not a level of spin {n / 2}")
        amps[int(round(p))] = 1.0
        return cls(amps)


@dataclass(frozen=True)
class StarSet:
    """The Majorana constellation of a state.

    Star order is bookkeeping only; coincident stars are kept as repeats.
    ``infinity_count`` records how many stars came from roots at infinity
    (they sit at the south pole).
    """

    stars: tuple
    infinity_count: int = 0
    residuals: np.ndarray | None = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        stars = tuple(s if isinstance(s, Direction) else Direction(*s) for s in self.stars)
        if not stars:
            raise InvalidInputError("a star set needs at least one star")
        object.__setattr__(self, "stars", stars)

    def __len__(self):
        return len(self.stars)

    def __iter__(self):
        return iter(self.stars)

    def __getitem__(self, k):
        return self.stars[k]

    @property
    def n(self) -> int:
        return len(self.stars)

    @property
    def cartesian(self) -> np.ndarray:
        """Star positions as an ``(n, 3)`` array."""
        return np.array([s.cartesian for s in self.stars])

    @property
    def angles(self) -> np.ndarray:
        """``(n, 2)`` array of ``(theta, phi)``."""
        return np.array([(s.theta, s.phi) for s in self.stars])

    @classmethod
    def from_cartesian(cls, points, infinity_count: int = 0) -> "StarSet":
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        return cls(tuple(Direction.from_cartesian(p) for p in pts), infinity_count)

    @classmethod
    def from_angles(cls, angles) -> "StarSet":
        return cls(tuple(Direction(float(t), float(p)) for t, p in np.atleast_2d(angles)))

    def permuted(self, perm) -> "StarSet":
        return StarSet(tuple(self.stars[k] for k in perm), self.infinity_count)


def directions_to_cartesian(theta, phi) -> np.ndarray:
    """Vectorized ``(theta, phi) -> (x, y, z)``; output has a trailing axis of 3."""
    theta = np.asarray(theta, dtype=float)
    phi = np.asarray(phi, dtype=float)
    st = np.sin(theta)
    return np.stack([st * np.cos(phi), st * np.sin(phi), np.cos(theta)], axis=-1)


def cartesian_to_angles(vec):
    """Vectorized ``(x, y, z) -> (theta, phi)`` with ``phi`` in ``[0, 2*pi)``.

    Input vectors need not be normalized.
    """
    vec = np.asarray(vec, dtype=float)
    rho = np.hypot(vec[..., 0], vec[..., 1])
    theta = np.arctan2(rho, vec[..., 2])
    phi = np.mod(np.arctan2(vec[..., 1], vec[..., 0]), TWO_PI)
    return theta, phi


def _as_state(state) -> SpinState:
    return state if isinstance(state, SpinState) else SpinState(state)


def majorana_polynomial(state) -> np.ndarray:
    """Coefficients of the Majorana polynomial, highest degree first.

    ``coeffs[k] = (-1)^k C_{n/2-k} / sqrt((n-k)! k!)`` multiplies ``x^(n-k)``,
    so the array can be handed to ``np.polyval`` directly.
    """
    state = _as_state(state)
    n = state.n
    k = np.arange(n + 1)
    signs = np.where(k % 2 == 0, 1.0, -1.0)
    # C_{n/2-k} lives at index n-k of the low-to-high amplitude vector
    return signs * state.amplitudes[::-1] / (_SQRT_FACTORIAL[n - k] * _SQRT_FACTORIAL[k])


def _polish(coeffs: np.ndarray, roots: np.ndarray) -> np.ndarray:
    """One Newton step per root, kept only where it lowers the residual."""
    if roots.size == 0:
        return roots
    dcoeffs = np.polyder(coeffs)
    p = np.polyval(coeffs, roots)
    dp = np.polyval(dcoeffs, roots)
    with np.errstate(divide="ignore", invalid="ignore"):
        trial = roots - p / dp
    ok = np.isfinite(trial) & (np.abs(np.polyval(coeffs, trial)) < np.abs(p))
    return np.where(ok, trial, roots)


def _relative_residuals(coeffs: np.ndarray, roots: np.ndarray) -> np.ndarray:
    if roots.size == 0:
        return np.zeros(0)
    powers = np.abs(roots)[:, None] ** np.arange(coeffs.size - 1, -1, -1)[None, :]
    scale = powers @ np.abs(coeffs)
    return np.abs(np.polyval(coeffs, roots)) / scale


def _roots_to_stars(coeffs: np.ndarray, tol: float, max_residual: float):
    """Root-solve a highest-first coefficient vector into star directions.

    Returns ``(directions, infinity_count, residuals)``.
    """
    if not tol > 0:
        raise InvalidInputError(f"tol must be positive, got {tol}")
    n = coeffs.size - 1
    scale = np.max(np.abs(coeffs))
    if scale == 0:
        raise InvalidInputError("the zero vector has no stars")
    small = np.abs(coeffs) < tol * scale

    lead = 0
    while small[lead]:
        lead += 1
    trail = 0
    while small[n - trail]:
        trail += 1
    core = coeffs[lead:coeffs.size - trail]
    degree = core.size - 1

    if degree > 0:
        companion = np.diag(np.ones(degree - 1, dtype=complex), -1)
        companion[0, :] = -core[1:] / core[0]
        try:
            finite = np.linalg.eigvals(companion)
        except np.linalg.LinAlgError as exc:  # pragma: no cover - LAPACK failure
            raise NumericalFailureError(f"companion eigen-solve failed: {exc}") from exc
        finite = _polish(core, finite)
        residuals = _relative_residuals(core, finite)
        if not np.all(np.isfinite(finite)) or np.any(residuals > max_residual):
            raise NumericalFailureError(
                f"root finder did not converge (max relative residual {np.max(residuals):.3e})",
                residuals=residuals,
            )
    else:
        finite = np.zeros(0, dtype=complex)
        residuals = np.zeros(0)

    finite = np.concatenate([finite, np.zeros(trail, dtype=complex)])
    residuals = np.concatenate([residuals, np.zeros(trail + lead)])

    theta = 2.0 * np.arctan(np.abs(finite))
    phi = np.angle(finite)
    stars = [Direction(float(t), float(p)) for t, p in zip(theta, phi)]
    stars.extend(Direction(math.pi, 0.0) for _ in range(lead))
    return tuple(stars), lead, residuals


def find_stars(state, tol: float = 1e-10, max_residual: float = 1e-8) -> StarSet:
    """Majorana stars of a spin state.

    Parameters
    ----------
    state : SpinState or array_like
        Amplitudes low-to-high in ``J + m``; normalization is irrelevant.
    tol : float
        Coefficients below ``tol * max|coeff|`` count as zero.  Each vanishing
        leading coefficient puts one star at the south pole; each vanishing
        trailing coefficient puts one at the north pole.
    max_residual : float
        Largest accepted relative polynomial residual of a root.

    Returns
    -------
    StarSet
        ``n`` stars; finite roots first, then the ``infinity_count`` stars at
        the south pole.
    """
    coeffs = majorana_polynomial(state)
    stars, lead, residuals = _roots_to_stars(coeffs, tol, max_residual)
    return StarSet(stars, lead, residuals)


def _horner(coeffs: np.ndarray, x: np.ndarray) -> np.ndarray:
    """Row-wise polynomial values: ``coeffs`` is ``(B, k)`` highest first, ``x`` is ``(B, r)``."""
    out = np.zeros(x.shape, dtype=np.result_type(coeffs, x))
    for k in range(coeffs.shape[1]):
        out = out * x + coeffs[:, k:k + 1]
    return out


def find_star_positions(states, tol: float = 1e-10, max_residual: float = 1e-8):
    """Batched :func:`find_stars` returning Cartesian positions only.

    Parameters
    ----------
    states : array_like, shape (T, n + 1)
        One amplitude vector per row.
    tol, max_residual : float
        As in :func:`find_stars`.

    Returns
    -------
    positions : ndarray, shape (T, n, 3)
        Stars in the same order :func:`find_stars` uses.
    infinity_counts : ndarray, shape (T,)
        Stars at the south pole per row.
    """
    if not tol > 0:
        raise InvalidInputError(f"tol must be positive, got {tol}")
    amps = np.asarray(states, dtype=complex)
    if amps.ndim != 2 or amps.shape[1] < 2:
        raise InvalidInputError("states must have shape (T, n + 1) with n >= 1")
    n = amps.shape[1] - 1
    if n > MAX_STARS:
        raise ResourceLimitError(f"n={n} exceeds the supported maximum {MAX_STARS}")
    if not np.all(np.isfinite(amps)):
        raise InvalidInputError("amplitudes must be finite")
    k = np.arange(n + 1)
    signs = np.where(k % 2 == 0, 1.0, -1.0)
    coeffs = signs * amps[:, ::-1] / (_SQRT_FACTORIAL[n - k] * _SQRT_FACTORIAL[k])
    scale = np.max(np.abs(coeffs), axis=1, keepdims=True)
    if np.any(scale == 0):
        raise InvalidInputError("the zero vector has no stars")
    big = np.abs(coeffs) >= tol * scale
    lead = np.argmax(big, axis=1)
    trail = np.argmax(big[:, ::-1], axis=1)

    out = np.empty((amps.shape[0], n, 3))
    north = directions_to_cartesian(0.0, 0.0)
    south = directions_to_cartesian(math.pi, 0.0)
    for lo, tr in {(int(a), int(b)) for a, b in zip(lead, trail)}:
        rows = np.flatnonzero((lead == lo) & (trail == tr))
        degree = n - lo - tr
        if degree > 0:
            core = coeffs[rows, lo:n + 1 - tr]
            companion = np.zeros((rows.size, degree, degree), dtype=complex)
            companion[:, np.arange(1, degree), np.arange(degree - 1)] = 1.0
            companion[:, 0, :] = -core[:, 1:] / core[:, :1]
            roots = np.linalg.eigvals(companion)
            # one guarded Newton step, as in the single-state path
            p = _horner(core, roots)
            dcore = core[:, :-1] * np.arange(degree, 0, -1)
            with np.errstate(divide="ignore", invalid="ignore"):
                trial = roots - p / _horner(dcore, roots)
                ok = np.isfinite(trial) & (np.abs(_horner(core, trial)) < np.abs(p))
            roots = np.where(ok, trial, roots)
            residuals = np.abs(_horner(core, roots)) / _horner(np.abs(core), np.abs(roots))
            if not np.all(np.isfinite(roots)) or np.any(residuals > max_residual):
                raise NumericalFailureError(
                    f"root finder did not converge (max relative residual {np.max(residuals):.3e})",
                    residuals=residuals,
                )
            out[rows, :degree] = directions_to_cartesian(2.0 * np.arctan(np.abs(roots)), np.angle(roots))
        out[rows, degree:degree + tr] = north
        out[rows, degree + tr:] = south
    return out, lead


def state_from_stars(stars) -> SpinState:
    """Normalized spin state whose constellation is ``stars``.

    Expands ``prod_k (cos(theta_k/2) a^dag + sin(theta_k/2) e^{i phi_k} b^dag)``
    by polynomial convolution.
    """
    if not isinstance(stars, StarSet):
        stars = StarSet(tuple(stars))
    n = stars.n
    if n > MAX_STARS:
        raise ResourceLimitError(f"n={n} exceeds the supported limit n <= {MAX_STARS}")
    # poly[p] = coefficient of (a^dag)^p (b^dag)^(n-p)
    poly = np.array([1.0 + 0.0j])
    for s in stars:
        half = s.theta / 2.0
        factor = np.array([math.sin(half) * complex(math.cos(s.phi), math.sin(s.phi)), math.cos(half)])
        poly = np.convolve(poly, factor)
        poly /= np.max(np.abs(poly))
    p = np.arange(n + 1)
    amps = poly * _SQRT_FACTORIAL[p] * _SQRT_FACTORIAL[n - p]
    return SpinState(amps / np.linalg.norm(amps))


def generic_state_stars(amplitudes, tol: float = 1e-10, max_residual: float = 1e-8) -> StarSet:
    """The ``d - 1`` stars of a generic ``d``-dimensional state ``(C_1, ..., C_d)``.

    Uses ``sum_l (-1)^l C_{d-l} y^(d-1-l) / sqrt((d-1-l)! l!) = 0``, which is
    the spin-(d-1)/2 polynomial with ``C_m`` placed at ``J + m = m - 1``.
    """
    amps = np.asarray(amplitudes, dtype=complex).reshape(-1)
    if amps.size < 2:
        raise InvalidInputError("a generic state needs dimension >= 2")
    return find_stars(SpinState(amps), tol=tol, max_residual=max_residual)
