"""Continuous characters U_1 -> Z/p^2 Z.

A character is stored by its values on the basis E_j = 1 + t^j, p not
dividing j, j <= bound; it vanishes on 1 + t^(bound+1) F_p[[t]].  The
Nottingham group acts by precomposition, (u . chi)(f) = chi(f o u), which
satisfies act(u o v, chi) = act(u, act(v, chi)).
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass, field

from .fpseries import FpSeries, inv_mod, is_prime, mul
from .nottingham import NottinghamElement
from .units import basis_indices, decompose


class NotSurjective(ValueError):
    pass


class WrongType(ValueError):
    pass


class Character:
    __slots__ = ("p", "bound", "coeffs")

    def __init__(self, p: int, bound: int, coeffs: dict[int, int] | None = None):
        if not is_prime(p):
            raise ValueError(f"modulus {p} is not prime")
        if bound < 1:
            raise ValueError("bound must be positive")
        q = p * p
        clean = {}
        for j, c in (coeffs or {}).items():
            j = int(j)
            if j % p == 0 or not 1 <= j <= bound:
                raise ValueError(f"index {j} is not a basis index for p={p}, bound={bound}")
            if c % q:
                clean[j] = c % q
        self.p = p
        self.bound = bound
        self.coeffs = dict(sorted(clean.items()))

    @classmethod
    def from_vector(cls, p: int, bound: int, values) -> Character:
        return cls(p, bound, dict(zip(basis_indices(p, bound), (int(v) for v in values))))

    def __getitem__(self, j: int) -> int:
        return self.coeffs.get(j, 0)

    def vector(self) -> tuple[int, ...]:
        return tuple(self[j] for j in basis_indices(self.p, self.bound))

    def __eq__(self, other):
        if not isinstance(other, Character):
            return NotImplemented
        return (self.p, self.bound, self.coeffs) == (other.p, other.bound, other.coeffs)

    def __hash__(self):
        return hash((self.p, self.bound, tuple(self.coeffs.items())))

    def __repr__(self):
        return f"Character(p={self.p}, bound={self.bound}, {self.coeffs})"

    def to_dict(self) -> dict:
        return {"p": self.p, "bound": self.bound, "coeffs": {str(j): c for j, c in self.coeffs.items()}}

    @classmethod
    def from_dict(cls, d: dict) -> Character:
        return cls(int(d["p"]), int(d["bound"]), {int(j): int(c) for j, c in d["coeffs"].items()})

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_json(cls, s: str) -> Character:
        return cls.from_dict(json.loads(s))


def evaluate(chi: Character, z: FpSeries) -> int:
    if z.p != chi.p:
        raise ValueError(f"moduli differ: {z.p} vs {chi.p}")
    e = decompose(z, chi.bound)
    return sum(c * chi[j] for j, c in e.exps.items()) % (chi.p * chi.p)


def act(u: NottinghamElement, chi: Character) -> Character:
    """The character f -> chi(f o u)."""
    if u.p != chi.p:
        raise ValueError(f"moduli differ: {u.p} vs {chi.p}")
    n = chi.bound + 1
    if u.precision < n:
        raise ValueError(f"element precision {u.precision} too small for bound {chi.bound}")
    us = u.series.truncate(n)
    one = FpSeries.one(chi.p, n)
    out = {}
    power = one
    for j in range(1, chi.bound + 1):
        power = mul(power, us)
        if j % chi.p:
            out[j] = evaluate(chi, one + power)
    return Character(chi.p, chi.bound, out)


@dataclass(frozen=True)
class BreakSequence:
    b0: int
    b1: int

    def __str__(self):
        return f"<{self.b0},{self.b1}>"

    def as_tuple(self) -> tuple[int, int]:
        return (self.b0, self.b1)


def type_violation(p: int, b0: int, b1: int) -> str | None:
    """The first admissibility condition that <b0, b1> fails, or None."""
    if b0 < 1 or b1 < 1:
        return "breaks must be positive integers"
    if math.gcd(p, b0) != 1:
        return f"gcd(p, b0) = 1 fails: p={p} divides b0={b0}"
    if b1 < p * b0:
        return f"b1 >= p*b0 fails: {b1} < {p}*{b0} = {p * b0}"
    if b1 > p * b0 and math.gcd(p, b1) != 1:
        return f"b1 > p*b0 forces gcd(p, b1) = 1, but p={p} divides b1={b1}"
    return None


def validate_type(p: int, b0: int, b1: int) -> bool:
    return type_violation(p, b0, b1) is None


def break_sequence(chi: Character) -> BreakSequence:
    """<b0, b1> from the basis values.

    chi(U_b) is generated by p^v chi(E_j) over p^v j >= b, so b0 is the largest
    index carrying a unit and b1 = max(largest nonzero index, p * b0); the
    second term comes from E_{b0}^p = 1 + t^(p b0).
    """
    p = chi.p
    units = [j for j, c in chi.coeffs.items() if c % p]
    if not units:
        raise NotSurjective(f"{chi!r} has no invertible value, so it is not onto Z/{p * p}")
    b0 = max(units)
    b1 = max(max(chi.coeffs), p * b0)
    bs = BreakSequence(b0, b1)
    why = type_violation(p, b0, b1)
    if why is not None:  # pragma: no cover - the max rule cannot produce this
        raise AssertionError(f"computed break sequence {bs} is inadmissible: {why}")
    return bs


@dataclass(frozen=True)
class StandardExpansion:
    p: int
    m: int
    x1: int
    x2: int
    a: dict[int, int] = field(default_factory=dict)

    def __getitem__(self, j: int) -> int:
        return self.a.get(j, 0)


def standard_expansion(chi: Character) -> StandardExpansion:
    """x1, x2 = residues of chi(E_1), chi(E_2); a_j = the p-parts, divided by p."""
    bs = break_sequence(chi)
    if bs.b0 != 2:
        raise WrongType(f"standard expansion needs type <2,m>, got {bs}")
    p = chi.p
    a = {}
    for j, c in chi.coeffs.items():
        if j > 2 and c % p:  # pragma: no cover - excluded by b0 = 2
            raise AssertionError("unit value above index 2")
        if c // p:
            a[j] = c // p
    return StandardExpansion(p, bs.b1, chi[1] % p, chi[2] % p, a)


@dataclass(frozen=True)
class Indicator:
    case: str  # "m0": m = 0 mod p, "mid": m != 0, 1 mod p, "m1": m = 1 mod p
    values: tuple[int, ...]

    @property
    def last(self) -> int:
        return self.values[-1]

    def to_dict(self) -> dict:
        return {"case": self.case, "values": list(self.values)}

    @classmethod
    def from_dict(cls, d: dict) -> Indicator:
        return cls(d["case"], tuple(int(v) for v in d["values"]))


def indicator_case(p: int, m: int) -> str:
    if m % p == 0:
        return "m0"
    if m % p == 1:
        return "m1"
    return "mid"


def indicator(chi: Character) -> Indicator:
    """Complete invariant of weak equivalence for type <2,m>."""
    e = standard_expansion(chi)
    p, m, x1, x2 = e.p, e.m, e.x1, e.x2
    case = indicator_case(p, m)
    ix2 = inv_mod(x2, p)
    if case == "m0":
        # a^p = a on F_p, kept literal for readability against the definition
        q = (x1 * ix2 - pow(e[m - 1], p, p) * inv_mod((m - 1) * pow(x2, p, p), p)) % p
        return Indicator(case, (x2, q))
    am = e[m]
    if case == "mid":
        q = (x1 * ix2 - e[m - 1] * inv_mod((m - 1) * am, p)) % p
        return Indicator(case, (x2, am, q))
    return Indicator(case, (x2, am))


def indicator_1m(chi: Character) -> Indicator:
    """Indicator for type <1,m> over F_p (the trace is the identity here)."""
    bs = break_sequence(chi)
    if bs.b0 != 1:
        raise WrongType(f"indicator_1m needs type <1,m>, got {bs}")
    p, m = chi.p, bs.b1
    a0 = chi[1] % p

    def a(j):
        return chi[j] // p

    ia0 = inv_mod(a0, p)
    if m == p:
        return Indicator("m0", (a0, a(p - 1) * pow(ia0, p - 1, p) % p))
    if m % p == 1:
        return Indicator("m1", (a0, a(m), 0))
    return Indicator("mid", (a0, a(m), a0 * a(m - 1) * inv_mod(a(m), p) % p))


def coordinate_ranges(p: int, b0: int, m: int) -> list[tuple[int, ...]]:
    """Allowed basis values, index by index, for characters of type <b0, m>."""
    q = p * p
    ranges = []
    for j in basis_indices(p, m):
        if j < b0:
            vals = range(q)
        elif j == b0:
            vals = [c for c in range(q) if c % p]
        elif j == m:
            vals = range(p, q, p)
        else:
            vals = range(0, q, p)
        ranges.append(tuple(vals))
    return ranges


def count_characters(p: int, b0: int, m: int) -> int:
    return math.prod(len(r) for r in coordinate_ranges(p, b0, m))


def enumerate_characters(p: int, m: int, b0: int = 2):
    """Every character of type <b0, m>, lexicographic in the basis values."""
    why = type_violation(p, b0, m)
    if why is not None:
        raise WrongType(f"<{b0},{m}> is not a break sequence for p={p}: {why}")
    target = BreakSequence(b0, m)
    for values in itertools.product(*coordinate_ranges(p, b0, m)):
        chi = Character.from_vector(p, m, values)
        if break_sequence(chi) == target:
            yield chi


def random_character(p: int, m: int, rng, b0: int = 2) -> Character:
    """Uniform sample from the characters of type <b0, m>."""
    return Character.from_vector(p, m, [rng.choice(r) for r in coordinate_ranges(p, b0, m)])
