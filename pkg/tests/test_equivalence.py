import random

import numpy as np
import pytest

from nottingham_torsion.characters import Character, WrongType, act, random_character, standard_expansion
from nottingham_torsion.enumeration import (
    BudgetExceeded,
    CharacterSpace,
    action_matrices,
    quotient_batch,
    quotient_size,
)
from nottingham_torsion.equivalence import (
    ClassReport,
    d_weak_closed_form,
    find_strict_witness,
    strict_classes_1m,
    strict_classes_bruteforce,
    strict_edge,
    strict_edge_strong,
    strict_partition,
    strict_relation_is_closed,
    strict_via_coset,
    weak_equiv_indicator,
    weak_orbits_bruteforce,
    weak_partition,
)
from nottingham_torsion.fpseries import binom_residue
from nottingham_torsion.nottingham import NottinghamElement, coset_index, g, in_coset_set


def E(p, alphas, n):
    return NottinghamElement.from_unit_coeffs(p, alphas, n)


class TestClosedForm:
    @pytest.mark.parametrize("p, m, d", [(3, 6, 6), (3, 7, 4), (3, 8, 12), (5, 10, 20), (5, 11, 16), (5, 12, 80)])
    def test_values(self, p, m, d):
        assert d_weak_closed_form(p, m) == d

    def test_invalid(self):
        with pytest.raises(WrongType):
            d_weak_closed_form(3, 9)


class TestWeak:
    def test_indicator_examples(self):
        chi = Character(3, 7, {2: 1, 7: 3})
        assert weak_equiv_indicator(chi, chi)
        assert not weak_equiv_indicator(chi, Character(3, 7, {2: 1, 7: 6}))
        u = E(3, [2, 1, 0, 1, 2, 2], 8)
        assert weak_equiv_indicator(chi, act(u, chi))

    def test_indicator_needs_same_parameters(self):
        with pytest.raises(WrongType):
            weak_equiv_indicator(Character(3, 7, {2: 1, 7: 3}), Character(3, 8, {2: 1, 8: 3}))

    @pytest.mark.parametrize("m, count", [(6, 6), (7, 4), (8, 12)])
    def test_bruteforce(self, m, count):
        r = weak_orbits_bruteforce(3, m)
        assert r.ok and r.weak_count == count
        assert sum(w.size for w in r.weak_classes) == r.total
        assert len({w.indicator for w in r.weak_classes}) == count

    def test_generators_give_full_orbits(self):
        space = CharacterSpace(3, 6)
        assert weak_partition(space, "standard") == weak_partition(space, "full")

    def test_threads_agree(self):
        space = CharacterSpace(3, 7)
        assert weak_partition(space, "full", threads=1) == weak_partition(space, "full", threads=3)

    def test_budget(self):
        with pytest.raises(BudgetExceeded):
            weak_orbits_bruteforce(3, 7, budget=100)


class TestStrictEdge:
    def test_examples(self):
        chi = Character(3, 7, {2: 1, 7: 3})
        assert strict_edge(chi, NottinghamElement.identity(3, 8))
        assert strict_edge(chi, E(3, [1], 8))
        assert not strict_edge(chi, g(1, 3, 8))

    def test_matches_closed_formula(self):
        """chi(u/t) = x1 alpha + x2 (beta - C(alpha, 2)) mod p."""
        rng = random.Random(3)
        for p, ms in [(3, [6, 7, 8, 10, 11]), (5, [10, 11, 12, 13, 16])]:
            for _ in range(300):
                m = rng.choice(ms)
                chi = random_character(p, m, rng)
                u = E(p, [rng.randrange(p) for _ in range(m - 1)], m + 1)
                e = standard_expansion(chi)
                alpha, beta = u.series[2], u.series[3]
                val = (e.x1 * alpha + e.x2 * (beta - binom_residue(alpha, 2, p))) % p
                assert strict_edge(chi, u) == (val == 0) == (coset_index(u, e.x1, e.x2) == 0)

    def test_strong_needs_more_precision(self):
        chi = Character(3, 7, {2: 1, 7: 3})
        with pytest.raises(ValueError):
            strict_edge_strong(chi, E(3, [1], 8))
        assert strict_edge_strong(chi, NottinghamElement.identity(3, 9))


class TestStrict:
    @pytest.mark.parametrize("m, weak", [(6, 6), (7, 4), (8, 12)])
    def test_bounds(self, m, weak):
        r = strict_classes_bruteforce(3, m)
        assert r.ok
        assert r.weak_count == weak
        assert weak <= r.strict_count <= 3 * weak
        assert sum(s.size for s in r.strict_classes) == r.total
        splits = np.bincount([s.parent for s in r.strict_classes])
        assert splits.max() <= 3

    def test_criteria_agree(self):
        space = CharacterSpace(3, 7)
        assert strict_partition(space, "mod_p") == strict_partition(space, "mod_p2")

    def test_relation_closed(self):
        assert strict_relation_is_closed(3, 6)
        assert strict_relation_is_closed(3, 7, criterion="mod_p2")

    def test_unknown_criterion(self):
        with pytest.raises(ValueError):
            strict_partition(CharacterSpace(3, 7), "mod_p3")

    @pytest.mark.parametrize("m", [6, 7])
    def test_matches_coset_orbits_exhaustive(self, m):
        """Strict class of chi = {act(u, chi) : u in N(x1, x2)}, for every chi of the type."""
        p, q = 3, 9
        space = CharacterSpace(p, m)
        rows = quotient_batch(p, m + 1, 0, quotient_size(p, m + 1))
        images = np.einsum("bjk,nk->nbj", action_matrices(rows, p, m), space.vectors) % q
        alpha, beta = rows[:, 2], rows[:, 3]
        x1, x2 = space.vectors[:, 0] % p, space.vectors[:, 1] % p
        r = x1 * np.array([pow(int(x), -1, p) for x in x2])
        inside = (r[:, None] * alpha[None, :] - alpha * (alpha - 1) * pow(2, -1, p) + beta[None, :]) % p == 0
        part = strict_partition(space)
        for i in range(space.size):
            reached = set(space.index(images[i][inside[i]]).tolist())
            block = set(np.flatnonzero(part.labels == part.labels[i]).tolist())
            assert reached == block

    def test_via_coset_scalar(self):
        rng = random.Random(11)
        space = CharacterSpace(3, 7)
        part = strict_partition(space)
        weak = weak_partition(space)
        for _ in range(40):
            i = rng.randrange(space.size)
            chi = space.character(i)
            assert strict_via_coset(chi, chi)
            for j in np.flatnonzero(weak.labels == weak.labels[i])[:12]:
                psi = space.character(int(j))
                same = part.labels[i] == part.labels[j]
                u = find_strict_witness(chi, psi)
                assert (u is not None) == same
                if u is not None:
                    e = standard_expansion(chi)
                    assert in_coset_set(u, e.x1, e.x2) and act(u, chi) == psi

    def test_g_k_can_leave_the_strict_class(self):
        chi = Character(3, 6, {1: 0, 2: 1})
        found = False
        for k in (1, 2):
            psi = act(g(k, 3, 7), chi)
            assert weak_equiv_indicator(chi, psi)
            if not strict_via_coset(chi, psi):
                found = True
        assert found

    def test_budget(self):
        with pytest.raises(BudgetExceeded):
            strict_classes_bruteforce(3, 7, budget=1000)
        with pytest.raises(BudgetExceeded):
            strict_via_coset(Character(3, 7, {2: 1, 7: 3}), Character(3, 7, {2: 1, 7: 3}), budget=10)


class TestOneM:
    @pytest.mark.parametrize("m, classes, total", [(3, 6, 18), (4, 4, 36), (5, 12, 108)])
    def test_theorem(self, m, classes, total):
        r = strict_classes_1m(3, m)
        assert r.ok
        assert (r.strict_count, r.total) == (classes, total)
        assert r.method == "both"


class TestReport:
    def test_json_round_trip(self):
        r = strict_classes_bruteforce(3, 7)
        back = ClassReport.from_dict(r.to_dict())
        assert back.to_dict() == r.to_dict()
        assert ClassReport.from_dict(__import__("json").loads(r.to_json())).strict_count == r.strict_count

    def test_csv(self):
        r = weak_orbits_bruteforce(3, 7)
        assert ClassReport.CSV_HEADER.split(",") == ["p", "m", "case", "weak_count", "strict_count", "lower_bound", "upper_bound"]
        assert r.csv_row() == "3,7,m1,4,,4,12"

    def test_issue_reporting(self):
        r = weak_orbits_bruteforce(3, 6)
        d = r.to_dict()
        assert d["ok"] and d["issues"] == []
        assert d["weak_classes"][0]["indicator"]["case"] == "m0"
