"""Truncated power series over the prime field F_p.

A series is known modulo t^N, where N is its ``precision``.  Coefficients
are stored densely as canonical residues in {0, ..., p-1}; binary
operations truncate to the smaller of the two precisions.
"""

from __future__ import annotations

import json
from functools import lru_cache
from math import comb


class ModulusMismatch(ValueError):
    pass


@lru_cache(maxsize=None)
def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    d = 3
    while d * d <= n:
        if n % d == 0:
            return False
        d += 2
    return True


def inv_mod(a: int, p: int) -> int:
    """Inverse of ``a`` modulo ``p``; raises ZeroDivisionError for a = 0."""
    a %= p
    if a == 0:
        raise ZeroDivisionError(f"0 has no inverse mod {p}")
    return pow(a, -1, p)


def binom_residue(alpha: int, k: int, p: int) -> int:
    """C(n, k) mod p for any integer n congruent to ``alpha`` mod p.

    Only meaningful for 0 <= k < p, where the value does not depend on the
    chosen lift (Lucas).
    """
    if not 0 <= k < p:
        raise ValueError(f"binomial of a residue needs 0 <= k < p, got k={k}, p={p}")
    num = 1
    for i in range(k):
        num = num * (alpha - i) % p
    fact = 1
    for i in range(2, k + 1):
        fact = fact * i % p
    return num * inv_mod(fact, p) % p


def valuation(n: int, p: int) -> int:
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


class FpSeries:
    """Immutable element of F_p[[t]] / (t^N)."""

    __slots__ = ("p", "coeffs")

    def __init__(self, p: int, coeffs, precision: int | None = None, check: bool = True):
        if check:
            if not is_prime(p):
                raise ValueError(f"modulus {p} is not prime")
            coeffs = [int(c) % p for c in coeffs]
            if precision is None:
                precision = len(coeffs)
            if precision < 1:
                raise ValueError("precision must be positive")
            if len(coeffs) > precision:
                coeffs = coeffs[:precision]
            else:
                coeffs = coeffs + [0] * (precision - len(coeffs))
        self.p = p
        self.coeffs = tuple(coeffs)

    @classmethod
    def _raw(cls, p, coeffs):
        return cls(p, coeffs, check=False)

    @classmethod
    def zero(cls, p: int, precision: int) -> FpSeries:
        return cls(p, [], precision)

    @classmethod
    def one(cls, p: int, precision: int) -> FpSeries:
        return cls(p, [1], precision)

    @classmethod
    def monomial(cls, p: int, degree: int, precision: int, coeff: int = 1) -> FpSeries:
        c = [0] * precision
        if degree < precision:
            c[degree] = coeff % p
        return cls(p, c, precision)

    @classmethod
    def from_terms(cls, p: int, terms: dict[int, int], precision: int) -> FpSeries:
        c = [0] * precision
        for deg, a in terms.items():
            if deg < precision:
                c[deg] = (c[deg] + a) % p
        return cls(p, c, precision)

    @property
    def precision(self) -> int:
        return len(self.coeffs)

    def __getitem__(self, i: int) -> int:
        return self.coeffs[i] if 0 <= i < len(self.coeffs) else 0

    def __len__(self):
        return len(self.coeffs)

    def __eq__(self, other):
        if not isinstance(other, FpSeries):
            return NotImplemented
        return self.p == other.p and self.coeffs == other.coeffs

    def __hash__(self):
        return hash((self.p, self.coeffs))

    def __repr__(self):
        return f"FpSeries(p={self.p}, {self.to_str()})"

    def to_str(self, var: str = "t") -> str:
        terms = []
        for i, c in enumerate(self.coeffs):
            if not c:
                continue
            mono = "" if i == 0 else (var if i == 1 else f"{var}^{i}")
            if not mono:
                terms.append(str(c))
            else:
                terms.append(mono if c == 1 else f"{c}*{mono}")
        body = " + ".join(terms) if terms else "0"
        return f"{body} + O({var}^{self.precision})"

    def truncate(self, precision: int) -> FpSeries:
        if precision > self.precision:
            raise ValueError(f"cannot raise precision from {self.precision} to {precision}")
        return FpSeries._raw(self.p, self.coeffs[:precision])

    def valuation(self) -> int | None:
        """Index of the first nonzero coefficient, or None for the zero series."""
        for i, c in enumerate(self.coeffs):
            if c:
                return i
        return None

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def __add__(self, other):
        return add(self, other)

    def __sub__(self, other):
        return sub(self, other)

    def __neg__(self):
        p = self.p
        return FpSeries._raw(p, tuple((-c) % p for c in self.coeffs))

    def __mul__(self, other):
        if isinstance(other, int):
            p = self.p
            return FpSeries._raw(p, tuple(c * other % p for c in self.coeffs))
        return mul(self, other)

    __rmul__ = __mul__

    def __pow__(self, e: int):
        return pow_int(self, e)

    def __call__(self, g: FpSeries) -> FpSeries:
        return compose(self, g)

    def to_dict(self) -> dict:
        return {"p": self.p, "precision": self.precision, "coeffs": list(self.coeffs)}

    @classmethod
    def from_dict(cls, d: dict) -> FpSeries:
        return cls(int(d["p"]), [int(c) for c in d["coeffs"]], int(d["precision"]))

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_json(cls, s: str) -> FpSeries:
        return cls.from_dict(json.loads(s))


def _check(a: FpSeries, b: FpSeries) -> int:
    if a.p != b.p:
        raise ModulusMismatch(f"moduli differ: {a.p} vs {b.p}")
    return min(a.precision, b.precision)


def add(a: FpSeries, b: FpSeries) -> FpSeries:
    n = _check(a, b)
    p = a.p
    return FpSeries._raw(p, tuple((x + y) % p for x, y in zip(a.coeffs[:n], b.coeffs[:n])))


def sub(a: FpSeries, b: FpSeries) -> FpSeries:
    n = _check(a, b)
    p = a.p
    return FpSeries._raw(p, tuple((x - y) % p for x, y in zip(a.coeffs[:n], b.coeffs[:n])))


def _mul_lists(x, y, n, p):
    out = [0] * n
    for i, xi in enumerate(x[:n]):
        if xi:
            for j in range(n - i):
                yj = y[j]
                if yj:
                    out[i + j] += xi * yj
    return tuple(c % p for c in out)


def mul(a: FpSeries, b: FpSeries) -> FpSeries:
    n = _check(a, b)
    return FpSeries._raw(a.p, _mul_lists(a.coeffs, b.coeffs, n, a.p))


def compose(f: FpSeries, g: FpSeries) -> FpSeries:
    """f(g(t)) by Horner's rule; g must have zero constant term."""
    n = _check(f, g)
    if g.coeffs[0] != 0:
        raise ValueError("inner series must have zero constant term")
    p = f.p
    gc = g.coeffs[:n]
    # t^k divides g^k, so coefficients of f beyond degree n-1 never contribute
    acc = [0] * n
    for k in range(n - 1, -1, -1):
        acc = list(_mul_lists(acc, gc, n, p))
        acc[0] = (acc[0] + f.coeffs[k]) % p
    return FpSeries._raw(p, tuple(acc))


def mul_inverse(z: FpSeries) -> FpSeries:
    p = z.p
    c0 = z.coeffs[0]
    if c0 == 0:
        raise ZeroDivisionError("series with zero constant term is not invertible")
    n = z.precision
    inv0 = inv_mod(c0, p)
    w = [0] * n
    w[0] = inv0
    zc = z.coeffs
    for k in range(1, n):
        s = 0
        for i in range(1, k + 1):
            if zc[i]:
                s += zc[i] * w[k - i]
        w[k] = (-s * inv0) % p
    return FpSeries._raw(p, tuple(w))


def pow_int(z: FpSeries, e: int) -> FpSeries:
    """z^e by square-and-multiply in the truncated ring.

    Negative exponents go through ``mul_inverse`` first.
    """
    if e < 0:
        return pow_int(mul_inverse(z), -e)
    result = FpSeries.one(z.p, z.precision)
    base = z
    while e:
        if e & 1:
            result = mul(result, base)
        e >>= 1
        if e:
            base = mul(base, base)
    return result


@lru_cache(maxsize=None)
def neg_binomial_row(a: int, p: int, length: int) -> tuple[int, ...]:
    """Coefficients of (1 + x)^(-a) mod p, x^0 .. x^(length-1)."""
    if a == 0:
        return (1,) + (0,) * (length - 1)
    return tuple(comb(a + i - 1, i) * (-1) ** i % p for i in range(length))
