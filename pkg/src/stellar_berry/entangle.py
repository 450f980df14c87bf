"""Entanglement measures of symmetric multiqubit states from star geometry.

A symmetric ``n``-qubit state is a spin ``n/2`` state, so its Majorana stars
classify it: one distinct star means a product state, two distinct stars the
W class, ``n`` distinct stars the GHZ class.  The measures below are written
in terms of star distances ``d_ij``, the correlation factors ``beta_ij`` and
the closed-form normalization ``N_n^2``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

from .correlation import beta_matrix, normalization_sq
from .errors import ClassificationError, InvalidInputError
from .stellar import StarSet

__all__ = [
    "DEFAULT_CLUSTER_TOL",
    "EntanglementReport",
    "star_clusters",
    "diversity_degree",
    "classify",
    "concurrence_two",
    "concurrence_w",
    "three_tangle",
    "product_measure",
    "entanglement_report",
]

DEFAULT_CLUSTER_TOL = 1e-6  # radians


@dataclass(frozen=True)
class EntanglementReport:
    """One entanglement measure evaluated on one state.

    ``flagged`` marks values that hold by convention rather than by
    evaluation (the product measure of a separable state).
    """

    n: int
    diversity: int
    classification: str
    measure_name: str
    value: float
    flagged: bool = False


def _positions(stars) -> np.ndarray:
    if isinstance(stars, StarSet):
        return stars.cartesian
    pts = np.asarray(stars, dtype=float)
    if pts.ndim != 2 or pts.shape[1] != 3:
        raise InvalidInputError("stars must be a StarSet or an (n, 3) array")
    return pts


def _angles_between(u: np.ndarray) -> np.ndarray:
    # chord-based angle keeps accuracy for nearly coincident stars
    chord = np.linalg.norm(u[:, None, :] - u[None, :, :], axis=-1)
    return 2.0 * np.arcsin(np.clip(chord / 2.0, 0.0, 1.0))


def star_clusters(stars, cluster_tol: float = DEFAULT_CLUSTER_TOL) -> np.ndarray:
    """Single-linkage cluster label of every star (angular threshold ``cluster_tol``)."""
    if not cluster_tol > 0:
        raise InvalidInputError("cluster_tol must be positive")
    u = _positions(stars)
    adjacency = csr_matrix(_angles_between(u) <= cluster_tol)
    _, labels = connected_components(adjacency, directed=False)
    return labels


def diversity_degree(stars, cluster_tol: float = DEFAULT_CLUSTER_TOL) -> int:
    """Number of distinct star positions."""
    return int(star_clusters(stars, cluster_tol).max()) + 1


def classify(n: int, diversity: int) -> str:
    """Class label from the diversity degree."""
    if diversity == 1:
        return "separable"
    if diversity == n and n >= 3:
        return "GHZ"
    if diversity == 2:
        return "W"
    return f"n_s={diversity}"


def _distinct_positions(stars, cluster_tol: float):
    u = _positions(stars)
    labels = star_clusters(u, cluster_tol)
    centers = []
    counts = []
    for lab in range(labels.max() + 1):
        members = u[labels == lab]
        c = members.sum(axis=0)
        centers.append(c / np.linalg.norm(c))
        counts.append(len(members))
    return np.array(centers), np.array(counts)


def _distance(a: np.ndarray, b: np.ndarray) -> float:
    diff = a - b
    return float(np.clip(0.5 * diff @ diff, 0.0, 2.0))


def _require_n(u: np.ndarray, n: int, name: str):
    if u.shape[0] != n:
        raise InvalidInputError(f"{name} needs n={n} stars, got {u.shape[0]}")


def concurrence_two(stars) -> float:
    """Two-qubit concurrence ``C = d_12 / (2 N_2^2)``, equal to ``d / (4 - d)``."""
    u = _positions(stars)
    _require_n(u, 2, "concurrence_two")
    d = _distance(u[0], u[1])
    return d / (2.0 * normalization_sq(u))


def concurrence_w(stars, cluster_tol: float = DEFAULT_CLUSTER_TOL) -> float:
    """Pairwise concurrence ``C_12 = 2 d_12 / (3 N_3^2)`` of a three-qubit W-class state.

    ``d_12`` is the distance between the doubled star and the single one.

    Raises
    ------
    ClassificationError
        If the stars do not form exactly two distinct positions.
    """
    u = _positions(stars)
    _require_n(u, 3, "concurrence_w")
    centers, _ = _distinct_positions(u, cluster_tol)
    if centers.shape[0] != 2:
        raise ClassificationError(f"W-class concurrence needs 2 distinct stars, found {centers.shape[0]}")
    d = _distance(centers[0], centers[1])
    return 2.0 * d / (3.0 * normalization_sq(u))


def three_tangle(stars) -> float:
    """Three-tangle ``tau = (2/3) beta_12 beta_13 beta_23 N_3^2``."""
    u = _positions(stars)
    _require_n(u, 3, "three_tangle")
    b = beta_matrix(u)
    return float(2.0 / 3.0 * b[0, 1] * b[0, 2] * b[1, 2] * normalization_sq(u))


def product_measure(stars, cluster_tol: float = DEFAULT_CLUSTER_TOL):
    """Product of distances between distinct stars over ``N_n^{2(n_s - 1)}``.

    Experimental.  Returns ``(value, n_s)``.  A separable state (``n_s = 1``)
    has no distinct pairs; it is assigned 0 rather than the empty product.
    """
    u = _positions(stars)
    centers, _ = _distinct_positions(u, cluster_tol)
    ns = centers.shape[0]
    if ns == 1:
        return 0.0, 1
    prod = 1.0
    for a, b in itertools.combinations(range(ns), 2):
        prod *= _distance(centers[a], centers[b])
    return prod / normalization_sq(u) ** (ns - 1), ns


def entanglement_report(stars, cluster_tol: float = DEFAULT_CLUSTER_TOL) -> list[EntanglementReport]:
    """Every measure that applies to the star set's size and class."""
    u = _positions(stars)
    n = u.shape[0]
    ns = diversity_degree(u, cluster_tol)
    label = classify(n, ns)
    out = []
    if n == 2:
        out.append(EntanglementReport(n, ns, label, "concurrence", concurrence_two(u)))
    if n == 3:
        out.append(EntanglementReport(n, ns, label, "three-tangle", three_tangle(u)))
        if ns == 2:
            out.append(EntanglementReport(n, ns, label, "W-concurrence", concurrence_w(u, cluster_tol)))
    value, _ = product_measure(u, cluster_tol)
    out.append(EntanglementReport(n, ns, label, "product-measure", value, flagged=ns == 1))
    return out
