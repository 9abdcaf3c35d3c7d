"""Gauss quadrature rules matched to input distributions, and tensor grids.

Nodes and weights come from the symmetric tridiagonal Jacobi matrix of the
orthogonal-polynomial three-term recurrence (Golub-Welsch): eigenvalues
are the nodes and squared first eigenvector components are the weights.
Both polynomial families are set up against probability measures, so the
weights of every rule sum to one exactly and a k-point rule integrates
polynomials up to degree 2k-1 exactly.

Tensor grids flatten in row-major order over (axis 1, ..., axis d) with
the last axis varying fastest; every module in this package shares that
single convention.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np
from scipy.linalg import eigh_tridiagonal

from .distributions import Distribution, Normal, Uniform
from .errors import (
    AxisOutOfRangeError,
    EmptyAxesError,
    InvalidOrderError,
    UnsupportedDistributionError,
)

MAX_RULE_ORDER = 64


def _frozen(array: np.ndarray) -> np.ndarray:
    array = np.array(array, dtype=float)
    array.setflags(write=False)
    return array


@dataclass(frozen=True)
class QuadratureRule1D:
    """Nodes (ascending) and positive weights summing to one."""

    nodes: np.ndarray
    weights: np.ndarray
    distribution: Distribution

    @property
    def order(self) -> int:
        return len(self.nodes)


def gauss_rule(dist: Distribution, k: int) -> QuadratureRule1D:
    """k-point Gauss rule for the probability measure of `dist`.

    Normal(mu, sigma): probabilists' Gauss-Hermite nodes x_j mapped to
    u_j = mu + sigma * x_j.  Uniform(a, b): Gauss-Legendre nodes on [-1, 1]
    mapped affinely to [a, b], weights normalized to the probability
    measure.
    """
    if int(k) != k or not 1 <= k <= MAX_RULE_ORDER:
        raise InvalidOrderError(f"quadrature order must be in [1, {MAX_RULE_ORDER}], got {k}")
    k = int(k)
    if isinstance(dist, Normal):
        # He_{n+1} = x He_n - n He_{n-1}: Jacobi off-diagonal sqrt(n).
        off_diagonal = np.sqrt(np.arange(1, k, dtype=float))
    elif isinstance(dist, Uniform):
        # Monic Legendre: b_n^2 = n^2 / (4 n^2 - 1).
        n = np.arange(1, k, dtype=float)
        off_diagonal = n / np.sqrt(4.0 * n * n - 1.0)
    else:
        raise UnsupportedDistributionError(f"no quadrature rule for {type(dist).__name__}")

    standard_nodes, eigenvectors = eigh_tridiagonal(np.zeros(k), off_diagonal)
    weights = eigenvectors[0] ** 2  # orthonormal columns: sums to 1 exactly
    nodes = dist.from_standard(standard_nodes)
    return QuadratureRule1D(_frozen(nodes), _frozen(weights), dist)


@dataclass(frozen=True)
class TensorGrid:
    """Full tensor product of per-axis 1D rules."""

    axes: tuple[QuadratureRule1D, ...]

    @property
    def dim(self) -> int:
        return len(self.axes)

    @property
    def axis_sizes(self) -> tuple[int, ...]:
        return tuple(rule.order for rule in self.axes)

    @property
    def total_points(self) -> int:
        return int(np.prod(self.axis_sizes))

    @property
    def distributions(self) -> tuple[Distribution, ...]:
        return tuple(rule.distribution for rule in self.axes)

    @cached_property
    def joint_weights(self) -> np.ndarray:
        """Product weight per flattened grid point."""
        acc = np.ones(1)
        for rule in self.axes:
            acc = np.multiply.outer(acc, rule.weights).ravel()
        return _frozen(acc)

    def input_vector(self, axis: int) -> np.ndarray:
        return grid_input_vector(self, axis)

    def points(self) -> np.ndarray:
        """All grid points as an array of shape (total_points, dim)."""
        return np.column_stack([self.input_vector(j) for j in range(self.dim)])


def tensor_grid(rules) -> TensorGrid:
    rules = tuple(rules)
    if not rules:
        raise EmptyAxesError("a tensor grid needs at least one axis")
    return TensorGrid(rules)


def grid_for(distributions, k: int) -> TensorGrid:
    """Convenience: one k-point rule per distribution."""
    return tensor_grid([gauss_rule(dist, k) for dist in distributions])


def grid_input_vector(grid: TensorGrid, axis: int) -> np.ndarray:
    """Coordinate of `axis` at every flattened grid point (length total_points).

    With the last axis varying fastest, axis j repeats each node
    prod(k_m for m > j) times and tiles the pattern prod(k_m for m < j)
    times; the vector contains exactly k_j distinct values.
    """
    if not 0 <= axis < grid.dim:
        raise AxisOutOfRangeError(f"axis {axis} out of range for {grid.dim} axes")
    sizes = grid.axis_sizes
    repeats = int(np.prod(sizes[axis + 1:], initial=1))
    tiles = int(np.prod(sizes[:axis], initial=1))
    return _frozen(np.tile(np.repeat(grid.axes[axis].nodes, repeats), tiles))
