"""The Nottingham group over F_p.

Elements are series u(t) = t(1 + a_1 t + a_2 t^2 + ...) under composition,
stored modulo t^N.  Besides the group law this module carries the map

    Phi: u = t(1 + alpha t + beta t^2 + ...) -> (alpha, beta)

onto (F_p x F_p, (+)) with (a, b) (+) (c, d) = (a + c, b + d + 2ac), the
subsets N(x1, x2) cut out by (x1/x2) alpha - C(alpha, 2) + beta = 0, and the
elements g(k) = t(1 + k t^2) indexing their cosets.
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass

from .fpseries import FpSeries, ModulusMismatch, binom_residue, compose, inv_mod

INFINITE_DEPTH = math.inf


class NottinghamElement:
    __slots__ = ("series",)

    def __init__(self, series: FpSeries):
        if series.precision < 2:
            raise ValueError("Nottingham elements need precision >= 2")
        if series[0] != 0 or series[1] != 1:
            raise ValueError("element must have the form t + O(t^2)")
        self.series = series

    @classmethod
    def from_unit_coeffs(cls, p: int, alphas, precision: int) -> NottinghamElement:
        """t(1 + alphas[0] t + alphas[1] t^2 + ...) modulo t^precision."""
        return cls(FpSeries(p, [0, 1, *alphas], precision))

    @classmethod
    def identity(cls, p: int, precision: int) -> NottinghamElement:
        return cls(FpSeries(p, [0, 1], precision))

    @property
    def p(self) -> int:
        return self.series.p

    @property
    def precision(self) -> int:
        return self.series.precision

    @property
    def alphas(self) -> tuple[int, ...]:
        """Coefficients of u(t)/t - 1, i.e. a_1, a_2, ... up to the precision."""
        return self.series.coeffs[2:]

    def unit_part(self) -> FpSeries:
        """u(t)/t, known one degree less precisely than u."""
        return FpSeries._raw(self.p, self.series.coeffs[1:])

    def truncate(self, precision: int) -> NottinghamElement:
        return NottinghamElement(self.series.truncate(precision))

    def __eq__(self, other):
        if not isinstance(other, NottinghamElement):
            return NotImplemented
        return self.series == other.series

    def __hash__(self):
        return hash(self.series)

    def __repr__(self):
        return f"NottinghamElement(p={self.p}, {self.series.to_str()})"

    def __matmul__(self, other):
        return compose_elems(self, other)

    def to_dict(self) -> dict:
        return {**self.series.to_dict(), "kind": "nottingham"}

    @classmethod
    def from_dict(cls, d: dict) -> NottinghamElement:
        if d.get("kind", "nottingham") != "nottingham":
            raise ValueError(f"expected kind 'nottingham', got {d['kind']!r}")
        return cls(FpSeries.from_dict(d))

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_json(cls, s: str) -> NottinghamElement:
        return cls.from_dict(json.loads(s))


def g(k: int, p: int, precision: int) -> NottinghamElement:
    """The coset representative t(1 + k t^2)."""
    return NottinghamElement.from_unit_coeffs(p, [0, k], precision)


def compose_elems(u: NottinghamElement, v: NottinghamElement) -> NottinghamElement:
    """u o v, i.e. u(v(t))."""
    return NottinghamElement(compose(u.series, v.series))


def comp_inverse(u: NottinghamElement) -> NottinghamElement:
    # u(t + c t^d) = u(t) + c t^d + O(t^(d+1)), so the inverse can be
    # corrected one degree at a time.
    p, n = u.p, u.precision
    v = [0, 1] + [0] * (n - 2)
    for d in range(2, n):
        err = compose(u.series, FpSeries._raw(p, tuple(v)))[d]
        v[d] = (v[d] - err) % p
    return NottinghamElement(FpSeries._raw(p, tuple(v)))


def depth(u: NottinghamElement):
    """Largest d with u = t mod t^(d+1); INFINITE_DEPTH if u = t to full precision."""
    for i, c in enumerate(u.alphas, start=1):
        if c:
            return i
    return INFINITE_DEPTH


def order_in_quotient(u: NottinghamElement, N: int | None = None) -> int:
    """Order of u in the finite quotient modulo t^N by iterated composition."""
    if N is None:
        N = u.precision
    if not 2 <= N <= u.precision:
        raise ValueError(f"need 2 <= N <= precision ({u.precision}), got {N}")
    base = u.truncate(N)
    ident = NottinghamElement.identity(u.p, N)
    cur = base
    bound = u.p ** (N - 2)
    for k in range(1, bound + 1):
        if cur == ident:
            return k
        cur = compose_elems(cur, base)
    raise AssertionError("order exceeds the size of the quotient")  # unreachable


@dataclass(frozen=True)
class PhiImage:
    a: int
    b: int
    p: int

    def __post_init__(self):
        object.__setattr__(self, "a", self.a % self.p)
        object.__setattr__(self, "b", self.b % self.p)

    def __add__(self, other):
        return oplus(self, other)

    def inverse(self) -> PhiImage:
        a, b, p = self.a, self.b, self.p
        return PhiImage(-a, -b + 2 * a * a, p)

    def as_tuple(self) -> tuple[int, int]:
        return (self.a, self.b)


def phi(u: NottinghamElement) -> PhiImage:
    if u.precision < 4:
        raise ValueError("phi reads the t^2 and t^3 coefficients; need precision >= 4")
    return PhiImage(u.series[2], u.series[3], u.p)


def oplus(x: PhiImage, y: PhiImage) -> PhiImage:
    if x.p != y.p:
        raise ModulusMismatch(f"moduli differ: {x.p} vs {y.p}")
    return PhiImage(x.a + y.a, x.b + y.b + 2 * x.a * y.a, x.p)


def coset_index(u: NottinghamElement, x1: int, x2: int) -> int:
    """The k with u in N(x1, x2) g(k): (x1/x2) alpha - C(alpha, 2) + beta."""
    p = u.p
    if x2 % p == 0:
        raise ValueError("x2 must be nonzero mod p")
    alpha, beta = phi(u).as_tuple()
    return (x1 * inv_mod(x2, p) * alpha - binom_residue(alpha, 2, p) + beta) % p


def in_coset_set(u: NottinghamElement, x1: int, x2: int) -> bool:
    """Membership in N(x1, x2); only alpha and beta enter the congruence."""
    return coset_index(u, x1, x2) == 0


def enumerate_quotient(p: int, N: int):
    """All p^(N-2) representatives of the quotient modulo t^N, a_1 varying fastest."""
    if N < 2:
        raise ValueError("N must be >= 2")
    for digits in itertools.product(range(p), repeat=N - 2):
        yield NottinghamElement.from_unit_coeffs(p, digits[::-1], N)
