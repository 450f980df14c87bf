import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from stellar_berry.errors import InvalidInputError, ResourceLimitError
from stellar_berry.stellar import (
    Direction,
    SpinState,
    StarSet,
    find_stars,
    find_star_positions,
    generic_state_stars,
    majorana_polynomial,
    state_from_stars,
)
from tests.helpers import coherent, random_state


def fidelity(a, b):
    a = np.asarray(a, complex)
    b = np.asarray(b, complex)
    return abs(np.vdot(a, b)) / (np.linalg.norm(a) * np.linalg.norm(b))


def sorted_points(stars):
    pts = stars.cartesian if isinstance(stars, StarSet) else np.asarray(stars)
    return pts[np.lexsort(np.round(pts, 6).T[::-1])]


# -- Direction / SpinState ----------------------------------------------------


def test_direction_canonical_azimuth():
    assert Direction(0.0, 1.3).phi == 0.0
    assert Direction(math.pi, -2.0).phi == 0.0
    assert Direction(1.0, -0.5).phi == pytest.approx(2 * math.pi - 0.5)
    assert 0.0 <= Direction(1.0, -1e-300).phi < 2 * math.pi


def test_direction_unit_norm(rng):
    for theta, phi in rng.uniform([0, -10], [math.pi, 10], size=(200, 2)):
        assert abs(np.linalg.norm(Direction(theta, phi).cartesian) - 1.0) < 1e-12


def test_direction_rejects_bad_theta():
    with pytest.raises(InvalidInputError):
        Direction(-0.1, 0.0)
    with pytest.raises(InvalidInputError):
        Direction(float("nan"), 0.0)


def test_direction_cartesian_round_trip(rng):
    for v in rng.normal(size=(50, 3)):
        d = Direction.from_cartesian(v)
        assert np.allclose(d.cartesian, v / np.linalg.norm(v), atol=1e-14)


def test_spin_state_validation():
    with pytest.raises(InvalidInputError):
        SpinState([0.0, 0.0])
    with pytest.raises(InvalidInputError):
        SpinState([1.0])
    with pytest.raises(ResourceLimitError):
        SpinState(np.ones(62))
    s = SpinState([3.0, 4.0j])
    assert s.n == 1 and s.spin == 0.5
    assert s.amplitude(0.5) == 4.0j
    assert s.normalized().norm() == pytest.approx(1.0)


# -- Majorana polynomial ------------------------------------------------------


def test_polynomial_spin_half_root_is_stereographic():
    theta, phi = 1.1, 2.5
    coeffs = majorana_polynomial([math.sin(theta / 2) * np.exp(1j * phi), math.cos(theta / 2)])
    root = np.roots(coeffs)[0]
    assert abs(root - math.tan(theta / 2) * np.exp(1j * phi)) < 1e-14


def test_polynomial_ghz_cube_roots():
    coeffs = majorana_polynomial(np.array([1, 0, 0, 1]) / math.sqrt(2))
    # proportional to x^3 - 1
    assert np.allclose(coeffs / coeffs[0], [1, 0, 0, -1])
    assert coeffs[0] == pytest.approx(1 / math.sqrt(6) / math.sqrt(2))


def test_polynomial_highest_weight():
    coeffs = majorana_polynomial([0, 0, 1])
    assert np.allclose(coeffs, [1 / math.sqrt(2), 0, 0])


def test_polynomial_sign_pattern(rng):
    amps = random_state(rng, 5)
    coeffs = majorana_polynomial(amps)
    for k in range(6):
        expect = (-1) ** k * amps[5 - k] / math.sqrt(math.factorial(5 - k) * math.factorial(k))
        assert abs(coeffs[k] - expect) < 1e-15


# -- find_stars ---------------------------------------------------------------


def test_highest_weight_all_north():
    for n in (1, 4, 9):
        stars = find_stars(SpinState.dicke(n, n / 2))
        assert stars.n == n
        assert all(s.theta == 0.0 for s in stars)


def test_lowest_weight_all_south():
    stars = find_stars(SpinState.dicke(5, -2.5))
    assert stars.infinity_count == 5
    assert all(s.theta == math.pi for s in stars)


def test_ghz_equatorial_triple():
    stars = find_stars(np.array([1, 0, 0, 1]) / math.sqrt(2))
    assert np.allclose([s.theta for s in stars], math.pi / 2, atol=1e-12)
    phis = sorted(s.phi for s in stars)
    assert np.allclose(phis, [0, 2 * math.pi / 3, 4 * math.pi / 3], atol=1e-12)


def test_w_dicke_two_north_one_south():
    stars = find_stars(SpinState.dicke(3, 0.5))
    thetas = sorted(s.theta for s in stars)
    assert thetas == [0.0, 0.0, math.pi]
    assert stars.infinity_count == 1


def test_stars_are_zeros_of_antipodal_coherent_overlap(rng):
    # independent characterization: <-u|psi> = 0 at every star u
    for n in range(1, 11):
        psi = random_state(rng, n)
        psi /= np.linalg.norm(psi)
        for s in find_stars(psi):
            anti = coherent(n, math.pi - s.theta, s.phi + math.pi)
            assert abs(np.vdot(anti / np.linalg.norm(anti), psi)) < 1e-9


def test_stereographic_consistency(rng):
    for n in (2, 5, 8):
        amps = random_state(rng, n)
        stars = find_stars(amps)
        roots = np.roots(majorana_polynomial(amps))
        for s in stars:
            assert np.min(np.abs(roots - s.stereographic)) < 1e-8 * max(1.0, abs(s.stereographic))


def test_degree_bookkeeping_with_both_poles():
    amps = np.array([0, 0.3, 0.5j, 0.2, 0])
    stars = find_stars(amps)
    assert stars.n == 4
    assert stars.infinity_count == 1
    assert sum(s.theta == 0.0 for s in stars) == 1
    assert sum(s.theta == math.pi for s in stars) == 1
    assert fidelity(state_from_stars(stars).amplitudes, amps) > 1 - 1e-12


def test_find_stars_rejects_bad_tol():
    with pytest.raises(InvalidInputError):
        find_stars([1.0, 1.0], tol=0.0)


def test_simple_root_stability(rng):
    amps = random_state(rng, 6)
    base = sorted_points(find_stars(amps))
    eps = 1e-10 * (rng.normal(size=7) + 1j * rng.normal(size=7))
    moved = sorted_points(find_stars(amps + eps))
    assert np.max(np.linalg.norm(base - moved, axis=1)) < 1e-6


# -- state_from_stars ---------------------------------------------------------


def test_single_star_state():
    theta, phi = 0.7, 4.0
    amps = state_from_stars([(theta, phi)]).amplitudes
    assert np.allclose(amps, [math.sin(theta / 2) * np.exp(1j * phi), math.cos(theta / 2)])


def test_equatorial_triple_gives_ghz():
    stars = StarSet.from_angles([(math.pi / 2, 0), (math.pi / 2, 2 * math.pi / 3), (math.pi / 2, 4 * math.pi / 3)])
    amps = state_from_stars(stars).amplitudes
    assert fidelity(amps, [1, 0, 0, 1]) > 1 - 1e-14


def test_antipodal_pair_gives_m_zero():
    amps = state_from_stars([(0.0, 0.0), (math.pi, 0.0)]).amplitudes
    assert fidelity(amps, [0, 1, 0]) > 1 - 1e-14


def test_coincident_stars_give_coherent_state(rng):
    for _ in range(10):
        theta, phi = rng.uniform(0, math.pi), rng.uniform(0, 2 * math.pi)
        amps = state_from_stars([(theta, phi)] * 6).amplitudes
        assert fidelity(amps, coherent(6, theta, phi)) > 1 - 1e-12


def test_state_from_stars_matches_symmetrized_tensor_product(rng):
    # brute force: symmetrize the n-qubit product state, read off Dicke components
    n = 4
    pts = rng.normal(size=(n, 3))
    stars = StarSet.from_cartesian(pts)
    qubits = [np.array([math.cos(s.theta / 2), math.sin(s.theta / 2) * np.exp(1j * s.phi)]) for s in stars]
    full = np.zeros(2**n, complex)
    for perm in itertools.permutations(range(n)):
        v = np.array([1.0 + 0j])
        for k in perm:
            v = np.kron(v, qubits[k])
        full += v
    dicke = np.zeros(n + 1, complex)
    for idx in range(2**n):
        ups = n - bin(idx).count("1")  # bit 0 = up
        dicke[ups] += full[idx] / math.sqrt(math.comb(n, ups))
    assert fidelity(dicke, state_from_stars(stars).amplitudes) > 1 - 1e-12


def test_round_trip_random_states(rng):
    for _ in range(200):
        n = int(rng.integers(1, 11))
        amps = random_state(rng, n)
        back = state_from_stars(find_stars(amps)).amplitudes
        assert fidelity(amps, back) > 1 - 1e-8


@settings(max_examples=60, deadline=None)
@given(st.lists(st.tuples(st.floats(0, math.pi), st.floats(0, 2 * math.pi)), min_size=1, max_size=8))
def test_stars_round_trip_multiset(angles):
    stars = StarSet.from_angles(angles)
    again = find_stars(state_from_stars(stars))
    assert again.n == stars.n
    # compare states rather than clustered star positions
    assert fidelity(state_from_stars(again).amplitudes, state_from_stars(stars).amplitudes) > 1 - 1e-8


# -- generic states -----------------------------------------------------------


def test_generic_qubit_star_is_bloch_vector():
    c1, c2 = 0.6, 0.8j
    star = generic_state_stars([c1, c2])[0]
    # C_1 is the J+m = 0 slot, C_2 the J+m = 1 slot
    bloch = np.array([2 * (np.conj(c2) * c1).real, 2 * (np.conj(c2) * c1).imag, abs(c2) ** 2 - abs(c1) ** 2])
    assert np.allclose(star.cartesian, bloch, atol=1e-12)


def test_generic_basis_vector_single_pole():
    stars = generic_state_stars([1, 0, 0, 0])
    assert stars.n == 3
    thetas = {s.theta for s in stars}
    assert len(thetas) == 1 and thetas <= {0.0, math.pi}


def test_generic_equal_amplitudes_round_trip():
    amps = np.ones(3) / math.sqrt(3)
    stars = generic_state_stars(amps)
    assert stars.n == 2
    assert fidelity(state_from_stars(stars).amplitudes, amps) > 1 - 1e-12


def test_batched_positions_match_single_state_path(rng):
    for n in (1, 2, 5, 9):
        amps = np.array([random_state(rng, n) for _ in range(30)])
        amps[3, :min(2, n)] = 0  # stars at the north pole
        amps[4, -1] = 0  # one at the south pole
        amps[5, 1:] = 0  # all at the south pole
        pos, infinite = find_star_positions(amps)
        for a, p, m in zip(amps, pos, infinite):
            ref = find_stars(a)
            assert np.allclose(p, ref.cartesian, atol=1e-12)
            assert m == ref.infinity_count
