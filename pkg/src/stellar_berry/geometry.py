"""Spherical geometry kernel: solid angles, pair solid angles, relative frames.

Orientation: ``phi`` increases counterclockwise seen from the north pole, so
a counterclockwise polar-cap loop has positive solid angle.  Accumulated
angles are never reduced mod 4*pi here.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DegeneratePairError, InvalidInputError
from .stellar import Direction, StarSet, cartesian_to_angles

__all__ = [
    "DEGENERATE_TOL",
    "SphericalStep",
    "RelativeFrame",
    "wrap_angle",
    "diagonal_connection_increment",
    "loop_solid_angle",
    "path_solid_angle_steps",
    "pair_solid_angle_increment",
    "pair_solid_angle_increment_spherical",
    "rotation_to_pole",
    "relative_coordinates",
    "relative_azimuth",
    "weighted_pair_increment",
]

# pairs closer than this (in d_ij = 1 - cos angle) count as coincident
DEGENERATE_TOL = 1e-14


def wrap_angle(x):
    """Map angles into ``(-pi, pi]``."""
    y = np.mod(np.asarray(x, dtype=float) + np.pi, 2.0 * np.pi) - np.pi
    y = np.where(y == -np.pi, np.pi, y)
    return float(y) if np.ndim(y) == 0 else y


@dataclass(frozen=True)
class SphericalStep:
    """One sampled step between two directions, with ``dphi`` unwrapped."""

    u_prev: Direction
    u_next: Direction
    dtheta: float
    dphi: float

    @classmethod
    def between(cls, u_prev: Direction, u_next: Direction) -> "SphericalStep":
        return cls(
            u_prev,
            u_next,
            u_next.theta - u_prev.theta,
            wrap_angle(u_next.phi - u_prev.phi),
        )

    @property
    def theta_mid(self) -> float:
        return self.u_prev.theta + 0.5 * self.dtheta

    @property
    def phi_mid(self) -> float:
        return self.u_prev.phi + 0.5 * self.dphi

    @property
    def midpoint(self) -> Direction:
        return Direction(self.theta_mid, self.phi_mid)


@dataclass(frozen=True)
class RelativeFrame:
    """Coordinates of a companion star in the frame that puts the anchor at +z.

    ``degenerate`` is set when the companion sits on the frame's axis (equal or
    antipodal to the anchor), where the azimuth carries no information and is
    reported as 0.
    """

    theta_prime: float
    phi_prime: float
    degenerate: bool = False


def diagonal_connection_increment(step: SphericalStep) -> float:
    """``Im <u|du> = (1 - cos theta) / 2 * dphi`` at the step midpoint."""
    return 0.5 * (1.0 - math.cos(step.theta_mid)) * step.dphi


def _as_points(path) -> np.ndarray:
    if isinstance(path, np.ndarray) and path.ndim == 2 and path.shape[1] == 3:
        return path.astype(float)
    return np.array([p.cartesian if isinstance(p, Direction) else np.asarray(p, float) for p in path])


def path_solid_angle_steps(points: np.ndarray) -> np.ndarray:
    """Per-step ``(1 - cos theta_mid) dphi`` along consecutive samples.

    ``points`` has shape ``(T, ..., 3)``; the result has shape ``(T-1, ...)``.
    No closure step is added.
    """
    theta, phi = cartesian_to_angles(points)
    dphi = wrap_angle(np.diff(phi, axis=0))
    theta_mid = 0.5 * (theta[1:] + theta[:-1])
    return (1.0 - np.cos(theta_mid)) * dphi


def loop_solid_angle(path) -> float:
    """Accumulated solid angle ``oint (1 - cos theta) dphi`` of a closed path.

    Parameters
    ----------
    path : sequence of Direction or (T, 3) array
        At least three samples.  If the last sample differs from the first a
        closing step is added.
    """
    pts = _as_points(path)
    if pts.shape[0] < 3:
        raise InvalidInputError("a loop needs at least 3 samples")
    if not np.allclose(pts[0], pts[-1], atol=1e-12, rtol=0.0):
        pts = np.vstack([pts, pts[:1]])
    return float(np.sum(path_solid_angle_steps(pts)))


def pair_solid_angle_increment(u_i, u_j, du_i, du_j) -> float:
    """Vector form ``u_i x u_j . (du_j - du_i) / d_ij``.

    Raises :class:`DegeneratePairError` for coincident stars; use
    :func:`weighted_pair_increment` there.
    """
    a = u_i.cartesian if isinstance(u_i, Direction) else np.asarray(u_i, float)
    b = u_j.cartesian if isinstance(u_j, Direction) else np.asarray(u_j, float)
    d = 1.0 - float(a @ b)
    if d <= DEGENERATE_TOL:
        raise DegeneratePairError("pair solid angle undefined for coincident stars")
    return float(np.cross(a, b) @ (np.asarray(du_j, float) - np.asarray(du_i, float))) / d


def pair_solid_angle_increment_spherical(u_i: Direction, u_j: Direction,
                                         step_i: SphericalStep, step_j: SphericalStep) -> float:
    """Spherical-coordinate form of the pair solid angle increment.

    Positions are taken from ``u_i``/``u_j`` and differentials from the steps:

        [(c_i - c_j)(dphi_j - dphi_i) + (s_i dtheta_j - s_j dtheta_i) sin(phi_i - phi_j)]
        / (1 - cos theta') + c_i dphi_i + c_j dphi_j
    """
    ci, si = math.cos(u_i.theta), math.sin(u_i.theta)
    cj, sj = math.cos(u_j.theta), math.sin(u_j.theta)
    dphi = u_i.phi - u_j.phi
    cos_rel = ci * cj + si * sj * math.cos(dphi)
    denom = 1.0 - cos_rel
    if denom <= DEGENERATE_TOL:
        raise DegeneratePairError("pair solid angle undefined for coincident stars")
    relative = ((ci - cj) * (step_j.dphi - step_i.dphi)
                + (si * step_j.dtheta - sj * step_i.dtheta) * math.sin(dphi)) / denom
    return relative + ci * step_i.dphi + cj * step_j.dphi


def rotation_to_pole(u: Direction) -> np.ndarray:
    """Rotation ``T = R_y(theta) R_z(phi)`` taking ``u`` to the north pole."""
    ct, st = math.cos(u.theta), math.sin(u.theta)
    cp, sp = math.cos(u.phi), math.sin(u.phi)
    ry = np.array([[ct, 0.0, -st], [0.0, 1.0, 0.0], [st, 0.0, ct]])
    rz = np.array([[cp, sp, 0.0], [-sp, cp, 0.0], [0.0, 0.0, 1.0]])
    return ry @ rz


def relative_azimuth(theta_a, phi_a, theta_c, phi_c):
    """Vectorized relative polar angle and azimuth of companion ``c`` seen from anchor ``a``.

    Returns ``(theta_prime, phi_prime, sin_theta_prime_sq)``; broadcasting
    applies to all inputs.
    """
    ca, sa = np.cos(theta_a), np.sin(theta_a)
    cc, sc = np.cos(theta_c), np.sin(theta_c)
    delta = phi_a - phi_c
    x = -cc * sa + sc * ca * np.cos(delta)
    y = -sc * np.sin(delta)
    z = ca * cc + sa * sc * np.cos(delta)
    theta_prime = np.arccos(np.clip(z, -1.0, 1.0))
    phi_prime = np.arctan2(y, x)
    return theta_prime, phi_prime, x * x + y * y


def relative_coordinates(anchor: Direction, companion: Direction, tol: float = 1e-12) -> RelativeFrame:
    """Companion coordinates in the frame rotated by :func:`rotation_to_pole` (anchor)."""
    theta_prime, phi_prime, rho_sq = relative_azimuth(anchor.theta, anchor.phi,
                                                      companion.theta, companion.phi)
    theta_prime = float(theta_prime)
    if rho_sq <= tol * tol:
        return RelativeFrame(theta_prime, 0.0, True)
    return RelativeFrame(theta_prime, float(phi_prime) % (2.0 * math.pi), False)


def weighted_pair_increment(stars, i: int, j: int, du_i, du_j, beta_over_d: float) -> float:
    """``(beta_ij / d_ij) * u_i x u_j . (du_j - du_i)``, finite at ``d_ij = 0``."""
    pts = stars.cartesian if isinstance(stars, StarSet) else np.asarray(stars, float)
    cross = np.cross(pts[i], pts[j])
    return float(beta_over_d * (cross @ (np.asarray(du_j, float) - np.asarray(du_i, float))))
