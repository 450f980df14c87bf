import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from stellar_berry.errors import DegeneratePairError, InvalidInputError
from stellar_berry.geometry import (
    RelativeFrame,
    SphericalStep,
    diagonal_connection_increment,
    loop_solid_angle,
    pair_solid_angle_increment,
    pair_solid_angle_increment_spherical,
    path_solid_angle_steps,
    relative_coordinates,
    rotation_to_pole,
    weighted_pair_increment,
    wrap_angle,
)
from stellar_berry.stellar import Direction, directions_to_cartesian
from tests.helpers import random_rotation, random_unit


def latitude(theta, n=2000, turns=1.0):
    phis = np.linspace(0, 2 * math.pi * turns, n + 1)
    return directions_to_cartesian(np.full_like(phis, theta), phis)


def small_circle(center, radius, n=4000):
    """Counterclockwise circle of angular radius ``radius`` around ``center``."""
    c = center / np.linalg.norm(center)
    a = np.cross(c, [1.0, 0.0, 0.0] if abs(c[0]) < 0.9 else [0.0, 1.0, 0.0])
    a /= np.linalg.norm(a)
    b = np.cross(c, a)
    t = np.linspace(0, 2 * math.pi, n + 1)[:, None]
    return math.cos(radius) * c + math.sin(radius) * (np.cos(t) * a + np.sin(t) * b)


def test_wrap_angle_range():
    assert wrap_angle(math.pi) == math.pi
    assert wrap_angle(-math.pi) == math.pi
    assert wrap_angle(3 * math.pi) == pytest.approx(math.pi)
    x = np.linspace(-20, 20, 1001)
    w = wrap_angle(x)
    assert np.all((w > -math.pi) & (w <= math.pi))
    assert np.allclose(np.cos(w), np.cos(x)) and np.allclose(np.sin(w), np.sin(x))


# -- solid angles --------------------------------------------------------------


@pytest.mark.parametrize("theta", [0.3, math.pi / 3, math.pi / 2, 2.5])
def test_cap_solid_angle(theta):
    assert loop_solid_angle(latitude(theta)) == pytest.approx(2 * math.pi * (1 - math.cos(theta)), abs=1e-12)


def test_solid_angle_orientation_and_winding():
    up = loop_solid_angle(latitude(1.0))
    down = loop_solid_angle(latitude(1.0)[::-1])
    assert down == pytest.approx(-up)
    # accumulated, not reduced mod 4 pi
    assert loop_solid_angle(latitude(2.0, 6000, turns=3.0)) == pytest.approx(3 * up / (1 - math.cos(1.0)) * (1 - math.cos(2.0)))


def test_solid_angle_adds_closing_step():
    pts = latitude(1.0, 3000)
    assert loop_solid_angle(pts[:-1]) == pytest.approx(loop_solid_angle(pts), abs=1e-12)


def test_solid_angle_accepts_directions():
    pts = [Direction(1.0, p) for p in np.linspace(0, 2 * math.pi, 400)]
    assert loop_solid_angle(pts) == pytest.approx(2 * math.pi * (1 - math.cos(1.0)), abs=1e-12)


def test_solid_angle_rejects_short_paths():
    with pytest.raises(InvalidInputError):
        loop_solid_angle(latitude(1.0, 1))


def test_small_circle_solid_angle_is_rotation_invariant(rng):
    # mod 4 pi the enclosed area does not depend on where the circle sits
    for _ in range(10):
        radius = rng.uniform(0.2, 1.2)
        center = random_unit(rng)
        got = loop_solid_angle(small_circle(center, radius))
        expect = 2 * math.pi * (1 - math.cos(radius))
        assert wrapped_4pi(got - expect) < 1e-5


def wrapped_4pi(x):
    return abs((x + 2 * math.pi) % (4 * math.pi) - 2 * math.pi)


def test_path_steps_additive(rng):
    pts = small_circle(random_unit(rng), 0.7, 1000)
    steps = path_solid_angle_steps(pts)
    assert steps.shape == (1000,)
    assert np.sum(steps[:400]) + np.sum(steps[400:]) == pytest.approx(np.sum(steps))
    assert np.sum(path_solid_angle_steps(pts[:401])) == pytest.approx(np.sum(steps[:400]))


def test_diagonal_connection_is_half_solid_angle():
    pts = latitude(1.2, 500)
    dirs = [Direction.from_cartesian(p) for p in pts]
    total = sum(diagonal_connection_increment(SphericalStep.between(a, b)) for a, b in zip(dirs, dirs[1:]))
    assert total == pytest.approx(0.5 * loop_solid_angle(pts), abs=1e-12)


def test_spherical_step_wraps_azimuth():
    step = SphericalStep.between(Direction(1.0, 2 * math.pi - 0.01), Direction(1.0, 0.01))
    assert step.dphi == pytest.approx(0.02)


# -- pair increments -----------------------------------------------------------


def pair_step(rng, size=1e-5):
    u = random_unit(rng, 2)
    du = size * rng.normal(size=(2, 3))
    du -= np.sum(du * u, axis=1, keepdims=True) * u  # tangent
    return u, du


def test_vector_and_spherical_forms_agree(rng):
    worst = 0.0
    for _ in range(1000):
        u, du = pair_step(rng)
        start = [Direction.from_cartesian(v) for v in u]
        end = [Direction.from_cartesian(v + dv) for v, dv in zip(u, du)]
        steps = [SphericalStep.between(a, b) for a, b in zip(start, end)]
        mids = [s.midpoint for s in steps]
        # both forms on the same finite step, evaluated at its midpoint
        vec = pair_solid_angle_increment(mids[0], mids[1], end[0].cartesian - start[0].cartesian,
                                         end[1].cartesian - start[1].cartesian)
        sph = pair_solid_angle_increment_spherical(mids[0], mids[1], steps[0], steps[1])
        worst = max(worst, abs(vec - sph))
    assert worst < 1e-9


def test_pair_increment_rejects_coincident(rng):
    u = random_unit(rng)
    d = Direction.from_cartesian(u)
    with pytest.raises(DegeneratePairError):
        pair_solid_angle_increment(u, u, np.zeros(3), np.zeros(3))
    step = SphericalStep.between(d, d)
    with pytest.raises(DegeneratePairError):
        pair_solid_angle_increment_spherical(d, d, step, step)


def test_pair_increment_antisymmetric_and_rotation_invariant(rng):
    for _ in range(20):
        u, du = pair_step(rng, 1e-3)
        base = pair_solid_angle_increment(u[0], u[1], du[0], du[1])
        assert pair_solid_angle_increment(u[1], u[0], du[1], du[0]) == pytest.approx(base, abs=1e-15)
        r = random_rotation(rng)
        rot = pair_solid_angle_increment(r @ u[0], r @ u[1], r @ du[0], r @ du[1])
        assert rot == pytest.approx(base, rel=1e-10, abs=1e-15)


def test_common_rotation_gives_only_axis_terms(rng):
    # two stars turned together about z: the relative part vanishes
    u = random_unit(rng, 2)
    dphi = 1e-4
    du = dphi * np.cross([0.0, 0.0, 1.0], u)
    expect = (u[0, 2] + u[1, 2]) * dphi
    assert pair_solid_angle_increment(u[0], u[1], du[0], du[1]) == pytest.approx(expect, rel=1e-12)


def test_weighted_increment_identity(rng):
    u, du = pair_step(rng, 1e-3)
    d = 1 - u[0] @ u[1]
    w = weighted_pair_increment(u, 0, 1, du[0], du[1], beta_over_d=0.7)
    assert w == pytest.approx(0.7 * d * pair_solid_angle_increment(u[0], u[1], du[0], du[1]))
    # finite and zero at coincidence
    assert weighted_pair_increment(np.array([u[0], u[0]]), 0, 1, du[0], du[1], 0.7) == 0.0


# -- relative frames -----------------------------------------------------------


def test_rotation_to_pole(rng):
    for v in random_unit(rng, 50):
        d = Direction.from_cartesian(v)
        t = rotation_to_pole(d)
        assert np.allclose(t @ t.T, np.eye(3), atol=1e-14)
        assert np.linalg.det(t) == pytest.approx(1.0)
        assert np.allclose(t @ v, [0, 0, 1], atol=1e-14)


def test_relative_coordinates_match_rotation(rng):
    for _ in range(50):
        a, c = (Direction.from_cartesian(v) for v in random_unit(rng, 2))
        frame = relative_coordinates(a, c)
        expect = Direction.from_cartesian(rotation_to_pole(a) @ c.cartesian)
        assert not frame.degenerate
        assert frame.theta_prime == pytest.approx(expect.theta, abs=1e-12)
        assert wrap_angle(frame.phi_prime - expect.phi) == pytest.approx(0.0, abs=1e-10)
        assert 0 <= frame.phi_prime < 2 * math.pi


def test_relative_polar_angle_symmetric(rng):
    a, c = (Direction.from_cartesian(v) for v in random_unit(rng, 2))
    assert relative_coordinates(a, c).theta_prime == pytest.approx(relative_coordinates(c, a).theta_prime)


def test_relative_coordinates_degenerate_cases(rng):
    d = Direction.from_cartesian(random_unit(rng))
    same = relative_coordinates(d, d)
    assert same == RelativeFrame(same.theta_prime, 0.0, True)
    assert same.theta_prime == pytest.approx(0.0, abs=1e-7)
    anti = relative_coordinates(d, Direction.from_cartesian(-d.cartesian))
    assert anti.degenerate and anti.theta_prime == pytest.approx(math.pi, abs=1e-7)


def test_relative_coordinates_pole_anchor():
    north = Direction(0.0, 0.0)
    c = Direction(0.8, 1.9)
    frame = relative_coordinates(north, c)
    assert frame.theta_prime == pytest.approx(0.8)
    assert frame.phi_prime == pytest.approx(1.9)


@settings(max_examples=50, deadline=None)
@given(st.floats(0.05, math.pi - 0.05), st.floats(0, 2 * math.pi), st.floats(0.05, math.pi - 0.05), st.floats(0, 2 * math.pi))
def test_relative_polar_angle_is_inter_star_angle(ta, pa, tc, pc):
    a, c = Direction(ta, pa), Direction(tc, pc)
    cos_angle = float(np.clip(a.cartesian @ c.cartesian, -1, 1))
    assert math.cos(relative_coordinates(a, c).theta_prime) == pytest.approx(cos_angle, abs=1e-12)
