"""Coordinates of principal units on the basis E_j = 1 + t^j (p does not divide j).

Every principal unit z factors as a convergent product of powers E_j^{c_j}.
Modulo U_{bound+1}, c_j is determined modulo p^e where e counts the degrees
j, pj, p^2 j, ... that are <= bound.  Exponents are kept modulo p^min(e, 2):
every character into Z/p^2 kills p^2-th powers, and a character of break
sequence <b0, m> kills 1 + t^(m+1) F_p[[t]].
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .fpseries import FpSeries, mul, neg_binomial_row, pow_int, valuation


def basis_indices(p: int, bound: int) -> list[int]:
    return [j for j in range(1, bound + 1) if j % p]


def exponent_modulus(p: int, bound: int, j: int, n: int = 2) -> int:
    """p^min(e, n), e = number of k = p^v j with k <= bound."""
    e, k = 0, j
    while k <= bound and e < n:
        e, k = e + 1, k * p
    return p**e


def exponent_moduli(p: int, bound: int, n: int = 2) -> np.ndarray:
    return np.array([exponent_modulus(p, bound, j, n) for j in basis_indices(p, bound)], dtype=np.int64)


def basis_unit(p: int, j: int, precision: int) -> FpSeries:
    """E_j = 1 + t^j."""
    return FpSeries.from_terms(p, {0: 1, j: 1}, precision)


@dataclass(frozen=True)
class UnitExponents:
    p: int
    bound: int
    exps: dict[int, int] = field(default_factory=dict)
    n: int = 2

    def __post_init__(self):
        clean = {}
        for j, c in self.exps.items():
            j = int(j)
            if j % self.p == 0 or not 1 <= j <= self.bound:
                raise ValueError(f"index {j} is not a basis index for p={self.p}, bound={self.bound}")
            c %= exponent_modulus(self.p, self.bound, j, self.n)
            if c:
                clean[j] = c
        object.__setattr__(self, "exps", dict(sorted(clean.items())))

    def __getitem__(self, j: int) -> int:
        return self.exps.get(j, 0)

    def __add__(self, other: UnitExponents) -> UnitExponents:
        if (self.p, self.bound) != (other.p, other.bound):
            raise ValueError("exponent vectors live on different bases")
        keys = set(self.exps) | set(other.exps)
        return UnitExponents(self.p, self.bound, {j: self[j] + other[j] for j in keys})

    def __hash__(self):
        return hash((self.p, self.bound, tuple(self.exps.items())))

    def vector(self) -> tuple[int, ...]:
        return tuple(self[j] for j in basis_indices(self.p, self.bound))

    def to_dict(self) -> dict:
        return {"p": self.p, "bound": self.bound, "exps": {str(j): c for j, c in self.exps.items()}}

    @classmethod
    def from_dict(cls, d: dict) -> UnitExponents:
        return cls(int(d["p"]), int(d["bound"]), {int(j): int(c) for j, c in d["exps"].items()})

    def to_json(self) -> str:
        return json.dumps(self.to_dict())


def _divide_by_power(w: list[int], k: int, a: int, p: int) -> list[int]:
    """w * (1 + t^k)^(-a), in place on a coefficient list."""
    n = len(w)
    row = neg_binomial_row(a, p, (n - 1) // k + 1)
    # descending degrees so every read sees the undivided coefficients
    for d in range(n - 1, k - 1, -1):
        s = w[d]
        for i in range(1, d // k + 1):
            c = row[i]
            if c:
                s += c * w[d - i * k]
        w[d] = s % p
    return w


def decompose(z: FpSeries, bound: int) -> UnitExponents:
    """Exponents c_j with z = prod E_j^{c_j} modulo U_{bound+1}, reduced as in ``exponent_modulus``.

    Peels degree k = p^v j at a time: the current t^k coefficient a is removed
    by dividing by (1 + t^k)^a = E_j^{a p^v}, which adds a p^v to c_j.
    For v >= 2 the factor is still divided out but contributes nothing mod p^2.
    """
    p = z.p
    if z[0] != 1:
        raise ValueError("not a principal unit (constant term must be 1)")
    if z.precision < bound + 1:
        raise ValueError(f"precision {z.precision} too small for bound {bound}")
    q = p * p
    w = list(z.coeffs[: bound + 1])
    exps: dict[int, int] = {}
    for k in range(1, bound + 1):
        a = w[k]
        if not a:
            continue
        v = valuation(k, p)
        if v < 2:
            j = k // p**v
            exps[j] = (exps.get(j, 0) + a * p**v) % q
        _divide_by_power(w, k, a, p)
    return UnitExponents(p, bound, exps)


def recompose(e: UnitExponents, precision: int) -> FpSeries:
    """prod E_j^{c_j} at the given precision, factors in increasing j."""
    if precision < e.bound + 1:
        raise ValueError(f"precision {precision} too small for bound {e.bound}")
    out = FpSeries.one(e.p, precision)
    for j, c in e.exps.items():
        out = mul(out, pow_int(basis_unit(e.p, j, precision), c))
    return out


# -- batched versions over numpy arrays; used by the orbit enumerations ------


def mul_batch(a: np.ndarray, b: np.ndarray, p: int) -> np.ndarray:
    """Row-wise truncated products of two (batch, N) coefficient arrays."""
    n = a.shape[1]
    out = np.zeros_like(a)
    for i in range(n):
        col = a[:, i : i + 1]
        if col.any():
            out[:, i:] += col * b[:, : n - i]
    return out % p


def decompose_batch(w: np.ndarray, p: int, bound: int) -> np.ndarray:
    """Vectorized ``decompose``: rows of ``w`` are principal units.

    Returns an int64 array (batch, len(basis_indices(p, bound))) of exponents,
    reduced as in ``decompose``.
    """
    w = np.array(w[:, : bound + 1], dtype=np.int64) % p
    if w.shape[1] < bound + 1:
        raise ValueError(f"precision {w.shape[1]} too small for bound {bound}")
    if np.any(w[:, 0] != 1):
        raise ValueError("not a principal unit (constant term must be 1)")
    basis = basis_indices(p, bound)
    col = {j: i for i, j in enumerate(basis)}
    n = bound + 1
    out = np.zeros((w.shape[0], len(basis)), dtype=np.int64)
    # table[a, i] = coefficient of x^i in (1 + x)^(-a)
    table = np.array([neg_binomial_row(a, p, n) for a in range(p)], dtype=np.int64)
    for k in range(1, bound + 1):
        a = w[:, k].copy()
        if not a.any():
            continue
        v = valuation(k, p)
        if v < 2:
            out[:, col[k // p**v]] += a * p**v
        coef = table[a]  # (batch, n)
        for d in range(n - 1, k - 1, -1):
            s = w[:, d].copy()
            for i in range(1, d // k + 1):
                s += coef[:, i] * w[:, d - i * k]
            w[:, d] = s % p
    return out % exponent_moduli(p, bound)
