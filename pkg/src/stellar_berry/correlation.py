"""Pair distances, the normalization N_n^2 and the correlation factors beta_ij.

The normalization of ``prod_k a^dag_{u_k} |0>`` is a multilinear polynomial in
the pair products ``w_ij = u_i . u_j``:

    N_n^2 = (n+1)!/2^n * sum_k D^n_k / (2k+1)!!

where ``D^n_k`` sums, over every way of picking ``k`` disjoint pairs, the
product of their ``w_ij``.  Writing ``w_ij = 1 - d_ij`` turns it into a
polynomial in the formal distances ``d_ij``; its partial derivatives give the
correlation factors ``beta_ij = -(d_ij / N^2) dN^2/dd_ij``.

All matching sums are computed with one dynamic program over vertex subsets:
``f[S]`` is the matching polynomial (in a size counter ``t``) of the subset
``S``, built from the lowest vertex of ``S`` outward.  ``f[V]`` yields every
``D^n_k`` and ``f[V - {i, j}]`` yields every ``(D^{n-2}_k)'_{ij}`` at once.
The DP is exponential in ``n``; star counts are limited to
``MAX_CORRELATION_STARS``.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidInputError, ResourceLimitError
from .stellar import StarSet

__all__ = [
    "MAX_CORRELATION_STARS",
    "MAX_PERMANENT_STARS",
    "PairDistanceMatrix",
    "NormalizationReport",
    "pair_distances",
    "symmetric_function_d",
    "normalization_sq",
    "normalization_sq_from_distances",
    "normalization_sq_permanent",
    "normalization_report",
    "norm_sq_pair_derivative",
    "norm_sq_gradient",
    "beta",
    "beta_matrix",
    "beta_over_distance",
    "gram_matrix",
    "permanent",
]

MAX_CORRELATION_STARS = 12
MAX_PERMANENT_STARS = 12

# floats held by one DP pass (2^n subsets * rows * (n/2 + 1)); about 80 MB
_DP_BUDGET = 10_000_000


def _double_factorial(m: int) -> int:
    return math.prod(range(m, 0, -2)) if m > 0 else 1


def _prefactor(n: int) -> float:
    return math.factorial(n + 1) / 2.0**n


@dataclass(frozen=True)
class PairDistanceMatrix:
    """Symmetric matrix of star distances ``d_ij = 1 - u_i . u_j``."""

    d: np.ndarray

    def __post_init__(self):
        d = np.array(self.d, dtype=float)
        if d.ndim != 2 or d.shape[0] != d.shape[1]:
            raise InvalidInputError("distance matrix must be square")
        d.setflags(write=False)
        object.__setattr__(self, "d", d)

    @property
    def n(self) -> int:
        return self.d.shape[0]

    def __getitem__(self, ij):
        return self.d[ij]


@dataclass(frozen=True)
class NormalizationReport:
    """Closed-form ``N_n^2`` next to the permanent expression ``n! perm(G)``."""

    value: float
    permanent_value: float
    ratio: float


def _positions(stars) -> np.ndarray:
    if isinstance(stars, StarSet):
        return stars.cartesian
    pts = np.asarray(stars, dtype=float)
    if pts.ndim != 2 or pts.shape[1] != 3:
        raise InvalidInputError("stars must be a StarSet or an (n, 3) array")
    return pts


def _check_size(n: int):
    if n < 1:
        raise InvalidInputError("need at least one star")
    if n > MAX_CORRELATION_STARS:
        raise ResourceLimitError(
            f"n={n} exceeds the matching-enumeration limit n <= {MAX_CORRELATION_STARS}"
        )


def pair_distances(stars) -> PairDistanceMatrix:
    """``d_ij = 1 - u_i . u_j``, computed as ``|u_i - u_j|^2 / 2``.

    The chord form is exact zero for coincident stars and keeps relative
    accuracy for nearby ones.  Clipped to [0, 2].
    """
    u = _positions(stars)
    diff = u[:, None, :] - u[None, :, :]
    d = np.clip(0.5 * np.einsum("ija,ija->ij", diff, diff), 0.0, 2.0)
    np.fill_diagonal(d, 0.0)
    return PairDistanceMatrix(d)


def _subset_matching_polynomials(w: np.ndarray) -> list:
    """Matching polynomials of every vertex subset.

    ``w`` has shape ``(B, n, n)``.  Returns a list indexed by bitmask whose
    entries have shape ``(B, n//2 + 1)``; entry ``[.., k]`` is the sum over
    ``k``-matchings inside the subset of the product of ``w`` over the pairs.
    """
    batch, n, _ = w.shape
    kmax = n // 2
    f = [None] * (1 << n)
    empty = np.zeros((batch, kmax + 1))
    empty[:, 0] = 1.0
    f[0] = empty
    for mask in range(1, 1 << n):
        low = (mask & -mask).bit_length() - 1
        rest = mask ^ (1 << low)
        acc = f[rest].copy()
        partners = rest
        while partners:
            bit = partners & -partners
            v = bit.bit_length() - 1
            acc[:, 1:] += w[:, low, v][:, None] * f[rest ^ bit][:, :-1]
            partners ^= bit
        f[mask] = acc
    return f


def _norm_and_gradient(u: np.ndarray, want_gradient: bool = True):
    """Batched ``N^2`` and ``dN^2/dd_ij`` for positions of shape ``(B, n, 3)``.

    The gradient is taken with respect to the formal distances, holding every
    other ``d_pq`` fixed.
    """
    batch, n, _ = u.shape
    _check_size(n)
    w = np.einsum("bia,bja->bij", u, u)
    return _norm_and_gradient_from_weights(w, want_gradient)


def _norm_and_gradient_from_weights(w: np.ndarray, want_gradient: bool = True):
    batch, n, _ = w.shape
    _check_size(n)
    pref = _prefactor(n)
    kmax = n // 2
    full = (1 << n) - 1
    inv_odd = np.array([1.0 / _double_factorial(2 * k + 1) for k in range(kmax + 1)])
    inv_odd_shift = np.array([1.0 / _double_factorial(2 * k + 3) for k in range(kmax + 1)])

    norm = np.empty(batch)
    grad = np.zeros((batch, n, n)) if want_gradient else None
    chunk = max(16, _DP_BUDGET // ((1 << n) * (kmax + 1)))
    for start in range(0, batch, chunk):
        sl = slice(start, min(start + chunk, batch))
        f = _subset_matching_polynomials(w[sl])
        norm[sl] = pref * (f[full] @ inv_odd)
        if want_gradient:
            for i, j in itertools.combinations(range(n), 2):
                sub = f[full ^ (1 << i) ^ (1 << j)]
                val = -pref * (sub @ inv_odd_shift)
                grad[sl, i, j] = val
                grad[sl, j, i] = val
    return norm, grad


def symmetric_function_d(distances, k: int) -> float:
    """``D^n_k``: sum over ``k`` disjoint pairs of the product of ``1 - d_ij``.

    ``distances`` may be a :class:`PairDistanceMatrix`, a square array of
    formal distances, or a :class:`StarSet`.
    """
    if isinstance(distances, StarSet):
        distances = pair_distances(distances)
    d = distances.d if isinstance(distances, PairDistanceMatrix) else np.asarray(distances, float)
    n = d.shape[0]
    _check_size(n)
    if not 0 <= k <= n // 2:
        raise InvalidInputError(f"k={k} outside [0, {n // 2}]")
    f = _subset_matching_polynomials((1.0 - d)[None])
    return float(f[(1 << n) - 1][0, k])


def normalization_sq(stars) -> float:
    """Closed-form ``N_n^2 = (n+1)!/2^n sum_k D^n_k/(2k+1)!!``."""
    u = _positions(stars)
    norm, _ = _norm_and_gradient(u[None], want_gradient=False)
    return float(norm[0])


def normalization_sq_from_distances(distances) -> float:
    """``N_n^2`` evaluated on an arbitrary (formal) distance matrix.

    The entries need not come from points on a sphere, which is what makes
    finite differences in a single ``d_ij`` meaningful.
    """
    d = distances.d if isinstance(distances, PairDistanceMatrix) else np.asarray(distances, float)
    norm, _ = _norm_and_gradient_from_weights((1.0 - d)[None], want_gradient=False)
    return float(norm[0])


def norm_sq_gradient(stars) -> np.ndarray:
    """Matrix of ``dN^2/dd_ij`` (zero diagonal)."""
    u = _positions(stars)
    _, grad = _norm_and_gradient(u[None])
    return grad[0]


def norm_sq_pair_derivative(stars, i: int, j: int) -> float:
    """``dN_n^2/dd_ij = -(n+1)!/2^n sum_k (D^{n-2}_k)'_ij / (2k+3)!!``.

    The primed symmetric function runs over the stars other than ``i`` and
    ``j``.  Passing a :class:`PairDistanceMatrix` evaluates the derivative at
    arbitrary formal distances instead of at a star configuration.
    """
    if i == j:
        raise InvalidInputError("pair derivative needs i != j")
    if isinstance(stars, PairDistanceMatrix):
        _, grad = _norm_and_gradient_from_weights((1.0 - stars.d)[None])
    else:
        _, grad = _norm_and_gradient(_positions(stars)[None])
    n = grad.shape[1]
    if not (0 <= i < n and 0 <= j < n):
        raise InvalidInputError(f"pair ({i}, {j}) out of range for n={n}")
    return float(grad[0, i, j])


def beta_over_distance(positions: np.ndarray) -> np.ndarray:
    """Batched ``beta_ij / d_ij = -(dN^2/dd_ij) / N^2``.

    ``positions`` has shape ``(..., n, 3)``; the result has shape
    ``(..., n, n)`` and stays finite for coincident stars.
    """
    u = np.asarray(positions, dtype=float)
    lead = u.shape[:-2]
    n = u.shape[-2]
    flat = u.reshape(-1, n, 3)
    norm, grad = _norm_and_gradient(flat)
    out = -grad / norm[:, None, None]
    return out.reshape(*lead, n, n)


def beta_matrix(stars) -> np.ndarray:
    """All correlation factors ``beta_ij`` as a symmetric matrix."""
    u = _positions(stars)
    d = pair_distances(u).d
    bod = beta_over_distance(u)
    out = d * bod
    out[d == 0.0] = 0.0
    np.fill_diagonal(out, 0.0)
    return out


def beta(stars, i: int, j: int, normalization: str = "closed") -> float:
    """Correlation factor ``beta_ij = -(d_ij / N^2) dN^2/dd_ij``; 0 when ``d_ij = 0``.

    ``normalization="permanent"`` divides by the permanent expression
    ``n! perm(G)`` instead, with the derivative rescaled by the constant
    ``n! perm(G) / N^2`` of the all-coincident constellation.  The two agree
    exactly when the permanent is a configuration-independent multiple of the
    closed form.
    """
    if i == j:
        raise InvalidInputError("beta needs i != j")
    u = _positions(stars)
    n = u.shape[0]
    if not (0 <= i < n and 0 <= j < n):
        raise InvalidInputError(f"pair ({i}, {j}) out of range for n={n}")
    d = pair_distances(u).d[i, j]
    if d == 0.0:
        return 0.0
    if normalization == "closed":
        return float(d * beta_over_distance(u)[i, j])
    if normalization == "permanent":
        scale = _reference_ratio(n)
        deriv = scale * norm_sq_pair_derivative(u, i, j)
        return float(-d * deriv / normalization_sq_permanent(u))
    raise InvalidInputError(f"unknown normalization {normalization!r}")


def _reference_ratio(n: int) -> float:
    """``n! perm(G) / N^2`` for ``n`` stars stacked at the north pole."""
    ref = np.tile([0.0, 0.0, 1.0], (n, 1))
    return normalization_sq_permanent(ref) / normalization_sq(ref)


def gram_matrix(stars) -> np.ndarray:
    """Single-star overlaps ``G_ij = <u_i|u_j>``."""
    if not isinstance(stars, StarSet):
        stars = StarSet.from_cartesian(stars)
    ang = stars.angles
    half = ang[:, 0] / 2.0
    c = np.cos(half)
    s = np.sin(half)
    phase = np.exp(1j * (ang[None, :, 1] - ang[:, None, 1]))
    return np.outer(c, c) + np.outer(s, s) * phase


def permanent(a: np.ndarray) -> complex:
    """Permanent by Ryser's formula with Gray-code updates, ``O(2^n n)``."""
    a = np.asarray(a, dtype=complex)
    n = a.shape[0]
    if n == 0:
        return 1.0 + 0.0j
    row_sums = np.zeros(n, dtype=complex)
    total = 0.0 + 0.0j
    gray_prev = 0
    for k in range(1, 1 << n):
        gray = k ^ (k >> 1)
        changed = gray ^ gray_prev
        col = changed.bit_length() - 1
        if gray & changed:
            row_sums += a[:, col]
        else:
            row_sums -= a[:, col]
        gray_prev = gray
        sign = -1.0 if (n - bin(gray).count("1")) % 2 else 1.0
        total += sign * np.prod(row_sums)
    return total


def normalization_sq_permanent(stars) -> float:
    """``n!`` times the permanent of the star Gram matrix.

    This is the permanent expression for ``N_n^2`` taken literally.  It is
    proportional to :func:`normalization_sq` with the fixed ratio ``1/n!``
    between the two, which cancels in every ``beta_ij``.
    """
    if not isinstance(stars, StarSet):
        stars = StarSet.from_cartesian(stars)
    n = stars.n
    if n > MAX_PERMANENT_STARS:
        raise ResourceLimitError(f"permanent oracle limited to n <= {MAX_PERMANENT_STARS}, got {n}")
    value = math.factorial(n) * permanent(gram_matrix(stars))
    if abs(value.imag) > 1e-10 * max(1.0, abs(value.real)):
        raise InvalidInputError(f"permanent has imaginary residue {value.imag:.3e}")
    return float(value.real)


def normalization_report(stars) -> NormalizationReport:
    value = normalization_sq(stars)
    perm_value = normalization_sq_permanent(stars)
    return NormalizationReport(value=value, permanent_value=perm_value, ratio=value / perm_value)
