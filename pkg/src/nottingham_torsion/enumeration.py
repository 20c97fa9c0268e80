"""Vectorized machinery for orbit computations over a whole character type.

Acting by u is linear on basis values: (u . chi)(E_j) = sum_i M(u)[j, i] chi(E_i)
where row j of M(u) is the exponent vector of 1 + u^j.  Characters of one
type are indexed by mixed-radix rank, so an action becomes an integer
permutation of ``range(space.size)`` and orbits a graph-component problem.
"""

from __future__ import annotations

import math

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

from .characters import Character, coordinate_ranges, type_violation, WrongType
from .units import basis_indices, decompose_batch, mul_batch


class BudgetExceeded(RuntimeError):
    def __init__(self, needed: int, budget: int, what: str = "action evaluations"):
        super().__init__(f"{needed} {what} requested, budget is {budget}")
        self.needed = needed
        self.budget = budget


class CharacterSpace:
    """All characters of type <b0, m>, ranked lexicographically by basis values."""

    def __init__(self, p: int, m: int, b0: int = 2):
        why = type_violation(p, b0, m)
        if why is not None:
            raise WrongType(f"<{b0},{m}> is not a break sequence for p={p}: {why}")
        self.p, self.m, self.b0 = p, m, b0
        self.q = p * p
        self.basis = basis_indices(p, m)
        self.ranges = coordinate_ranges(p, b0, m)
        self.radices = [len(r) for r in self.ranges]
        self.size = math.prod(self.radices)
        strides, s = [], 1
        for r in reversed(self.radices):
            strides.append(s)
            s *= r
        self.strides = np.array(strides[::-1], dtype=np.int64)
        self.lut = np.full((len(self.basis), self.q), -1, dtype=np.int64)
        for k, vals in enumerate(self.ranges):
            self.lut[k, list(vals)] = np.arange(len(vals))
        self._vectors = None

    @property
    def dim(self) -> int:
        return len(self.basis)

    @property
    def vectors(self) -> np.ndarray:
        """(size, dim) array of basis values, row i is the character of rank i."""
        if self._vectors is None:
            grids = np.meshgrid(*[np.array(r, dtype=np.int64) for r in self.ranges], indexing="ij")
            self._vectors = np.stack([g.reshape(-1) for g in grids], axis=1)
        return self._vectors

    def index(self, vecs: np.ndarray) -> np.ndarray:
        """Ranks of the given basis-value rows; raises if any row leaves the type."""
        digits = self.lut[np.arange(self.dim), vecs % self.q]
        if np.any(digits < 0):
            bad = vecs[np.any(digits < 0, axis=-1)][0]
            raise ValueError(f"vector {bad.tolist()} is not of type <{self.b0},{self.m}>")
        return digits @ self.strides

    def character(self, i: int) -> Character:
        return Character.from_vector(self.p, self.m, self.vectors[int(i)])

    def index_of(self, chi: Character) -> int:
        if (chi.p, chi.bound) != (self.p, self.m):
            raise ValueError("character has different parameters")
        return int(self.index(np.array([chi.vector()], dtype=np.int64))[0])


def quotient_size(p: int, precision: int) -> int:
    return p ** (precision - 2)


def quotient_batch(p: int, precision: int, start: int, stop: int) -> np.ndarray:
    """Coefficient rows of the quotient elements with ranks start..stop-1.

    Rank i has a_k = (i // p^(k-1)) % p, so a_1 varies fastest.
    """
    idx = np.arange(start, stop, dtype=np.int64)
    out = np.zeros((len(idx), precision), dtype=np.int64)
    out[:, 1] = 1
    for k in range(1, precision - 1):
        out[:, k + 1] = (idx // p ** (k - 1)) % p
    return out


def elements_batch(elements) -> np.ndarray:
    return np.array([u.series.coeffs for u in elements], dtype=np.int64)


def action_matrices(u: np.ndarray, p: int, m: int) -> np.ndarray:
    """(batch, d, d) integer matrices M with act(u, chi) = M @ chi mod p^2."""
    n = m + 1
    if u.shape[1] < n:
        raise ValueError(f"elements known to t^{u.shape[1]}, need t^{n}")
    ut = u[:, :n]
    basis = basis_indices(p, m)
    out = np.empty((u.shape[0], len(basis), len(basis)), dtype=np.int64)
    power = np.zeros_like(ut)
    power[:, 0] = 1
    row = 0
    for j in range(1, m + 1):
        power = mul_batch(power, ut, p)
        if j % p:
            w = power.copy()
            w[:, 0] = 1
            out[:, row, :] = decompose_batch(w, p, m)
            row += 1
    return out


def kernel_vectors(u: np.ndarray, p: int, m: int) -> np.ndarray:
    """(batch, d) exponent vectors of u(t)/t.

    Elements known only to t^(m+1) are lifted with a zero t^(m+1) coefficient;
    that changes u/t by a factor in U_m, which moves chi(u/t) only inside pZ
    when b0 < m, so the value mod p is lift-independent.
    """
    need = m + 2
    if u.shape[1] < need:
        u = np.pad(u, ((0, 0), (0, need - u.shape[1])))
    return decompose_batch(u[:, 1:need], p, m)


class Partition:
    """Set partition of range(n), labelled by the smallest member of each block."""

    def __init__(self, n: int, labels: np.ndarray | None = None):
        self.n = n
        self.labels = np.arange(n, dtype=np.int64) if labels is None else labels

    def join(self, a: np.ndarray, b: np.ndarray) -> Partition:
        """Merge the blocks of a[i] and b[i] for every i, in place."""
        if len(a) == 0:
            return self
        src = np.concatenate([np.asarray(a, dtype=np.int64), np.arange(self.n)])
        dst = np.concatenate([np.asarray(b, dtype=np.int64), self.labels])
        self.labels = _components(self.n, src, dst)
        return self

    def merge(self, other: Partition) -> Partition:
        """Finest common coarsening; associative and order-independent."""
        if other.n != self.n:
            raise ValueError("partitions of different sets")
        return Partition(self.n, self.labels).join(np.arange(self.n), other.labels)

    @property
    def count(self) -> int:
        return int(np.count_nonzero(self.labels == np.arange(self.n)))

    def blocks(self) -> dict[int, np.ndarray]:
        order = np.argsort(self.labels, kind="stable")
        lab = self.labels[order]
        cuts = np.flatnonzero(np.diff(lab)) + 1
        return {int(chunk[0]): chunk for chunk in np.split(order, cuts)}

    def refines(self, other: Partition) -> bool:
        """Every block of self lies inside one block of other."""
        return bool(np.all(other.labels == other.labels[self.labels]))

    def __eq__(self, other):
        if not isinstance(other, Partition):
            return NotImplemented
        return self.n == other.n and np.array_equal(self.labels, other.labels)


def _components(n: int, src: np.ndarray, dst: np.ndarray) -> np.ndarray:
    graph = coo_matrix((np.ones(len(src), dtype=np.int8), (src, dst)), shape=(n, n))
    _, comp = connected_components(graph, directed=False)
    rep = np.full(comp.max() + 1, n, dtype=np.int64)
    np.minimum.at(rep, comp, np.arange(n, dtype=np.int64))
    return rep[comp]


def partition_from_keys(keys) -> Partition:
    """Group indices with equal keys (any hashable per element)."""
    first: dict = {}
    labels = np.empty(len(keys), dtype=np.int64)
    for i, k in enumerate(keys):
        labels[i] = first.setdefault(k, i)
    return Partition(len(keys), labels)
