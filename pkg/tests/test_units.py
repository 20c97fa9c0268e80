import itertools
import random

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nottingham_torsion.fpseries import FpSeries, compose, mul, mul_inverse
from nottingham_torsion.units import (
    UnitExponents,
    basis_indices,
    basis_unit,
    decompose,
    decompose_batch,
    mul_batch,
    recompose,
)

from conftest import PRIMES, series


def U(p, exps, bound):
    return UnitExponents(p, bound, exps)


class TestExamples:
    def test_frobenius_power(self):
        assert decompose(FpSeries(3, [1, 0, 0, 1]), 3) == U(3, {1: 3}, 3)

    def test_product_of_basis_units(self):
        assert decompose(FpSeries(3, [1, 1, 1, 1]), 3) == U(3, {1: 1, 2: 1}, 3)

    def test_one(self):
        assert decompose(FpSeries.one(5, 8), 7).exps == {}
        assert recompose(U(5, {}, 7), 8) == FpSeries.one(5, 8)

    def test_negative_contribution(self):
        z = FpSeries(3, [1, 2, 0])
        e = decompose(z, 2)
        assert e == U(3, {1: 2, 2: 2}, 2)
        assert recompose(e, 3) == z

    def test_recompose(self):
        assert recompose(U(3, {1: 3}, 3), 4) == FpSeries(3, [1, 0, 0, 1])

    def test_rejects_non_units(self):
        with pytest.raises(ValueError):
            decompose(FpSeries(3, [2, 1, 0]), 2)
        with pytest.raises(ValueError):
            decompose(FpSeries(3, [1, 1]), 2)

    def test_exponents_validate_indices(self):
        with pytest.raises(ValueError):
            U(3, {3: 1}, 5)
        with pytest.raises(ValueError):
            U(3, {7: 1}, 5)
        assert U(3, {1: 10, 2: 9}, 5).exps == {1: 1}

    def test_json(self):
        e = U(5, {1: 7, 3: 20}, 6)
        assert UnitExponents.from_dict(e.to_dict()) == e


def _oracle(p, bound):
    """Map each unit mod t^(bound+1) to its exponent vector, found by search.

    E_j^c only depends on c modulo p^(e_j), e_j = #{v : p^v j <= bound}, and
    the products over these ranges hit each unit exactly once.
    """
    basis = basis_indices(p, bound)
    spans = []
    for j in basis:
        e, k = 0, j
        while k <= bound:
            e, k = e + 1, k * p
        spans.append(p ** min(e, 2))
    powers = {
        j: [FpSeries.one(p, bound + 1)] + [None] * (span - 1) for j, span in zip(basis, spans)
    }
    for j, span in zip(basis, spans):
        for c in range(1, span):
            powers[j][c] = mul(powers[j][c - 1], basis_unit(p, j, bound + 1))
    table = {}
    for cs in itertools.product(*(range(s) for s in spans)):
        z = FpSeries.one(p, bound + 1)
        for j, c in zip(basis, cs):
            z = mul(z, powers[j][c])
        table[z.coeffs] = cs
    assert len(table) == p**bound
    return basis, spans, table


@pytest.mark.parametrize("p, bound", [(3, 7), (5, 5), (7, 3)])
def test_decompose_matches_search_oracle(p, bound):
    basis, spans, table = _oracle(p, bound)
    for coeffs, cs in table.items():
        e = decompose(FpSeries(p, coeffs), bound)
        assert tuple(e[j] % s for j, s in zip(basis, spans)) == cs


class TestProperties:
    @settings(max_examples=300, deadline=None)
    @given(st.data())
    def test_round_trip(self, data):
        p = data.draw(st.sampled_from(PRIMES))
        bound = data.draw(st.integers(1, 11))
        z = data.draw(series(p, bound + 1, unit=True))
        e = decompose(z, bound)
        back = recompose(e, bound + 1)
        assert decompose(back, bound) == e
        # the quotient z / back is a product of p^2-th powers, which exist below t^(bound+1) only when bound >= p^2
        assert decompose(z * mul_inverse(back), bound).exps == {}
        if bound < p * p:
            assert back == z

    @settings(max_examples=300, deadline=None)
    @given(st.data())
    def test_multiplicative(self, data):
        p = data.draw(st.sampled_from(PRIMES))
        bound = data.draw(st.integers(1, 11))
        z = data.draw(series(p, bound + 1, unit=True))
        w = data.draw(series(p, bound + 1, unit=True))
        assert decompose(z * w, bound) == decompose(z, bound) + decompose(w, bound)

    @settings(max_examples=200, deadline=None)
    @given(st.data())
    def test_support_and_range(self, data):
        p = data.draw(st.sampled_from(PRIMES))
        bound = data.draw(st.integers(1, 11))
        z = data.draw(series(p, bound + 1, unit=True))
        e = decompose(z, bound)
        assert all(j % p and 1 <= j <= bound and 0 < c < p * p for j, c in e.exps.items())

    def test_frobenius_scales_exponents(self, rng):
        # z(t^p) = z^p, so exponents of z^p are p times those of z
        p, bound = 3, 11
        for _ in range(50):
            z = FpSeries(p, [1] + [rng.randrange(p) for _ in range(bound)])
            ez = decompose(z, bound)
            tp = FpSeries.monomial(p, p, bound + 1)
            lhs = decompose(compose(z, tp), bound)
            assert lhs == U(p, {j: p * c for j, c in ez.exps.items()}, bound)

    def test_exponent_modulus(self):
        from nottingham_torsion.units import exponent_modulus

        # p = 3, bound = 11: 1, 3, 9 | 2, 6 | 4 | 5 | 7 | 8 | 10 | 11
        assert [exponent_modulus(3, 11, j) for j in basis_indices(3, 11)] == [9, 9, 3, 3, 3, 3, 3, 3]
        assert U(3, {4: 5}, 11).exps == {4: 2}


@pytest.mark.parametrize("p", PRIMES)
def test_batch_matches_scalar(p):
    rng = random.Random(p)
    bound = 11
    rows = np.array([[1] + [rng.randrange(p) for _ in range(bound)] for _ in range(200)], dtype=np.int64)
    got = decompose_batch(rows, p, bound)
    for row, vec in zip(rows, got):
        assert tuple(vec) == decompose(FpSeries(p, row.tolist()), bound).vector()

    other = np.array([[rng.randrange(p) for _ in range(bound + 1)] for _ in range(200)], dtype=np.int64)
    prod = mul_batch(rows, other, p)
    for a, b, c in zip(rows, other, prod):
        assert FpSeries(p, a.tolist()) * FpSeries(p, b.tolist()) == FpSeries(p, c.tolist())


def test_batch_rejects_non_units():
    with pytest.raises(ValueError):
        decompose_batch(np.array([[2, 1, 0]]), 3, 2)
