"""Named verification suites: each check yields a pass/fail line with a witness on failure."""

from __future__ import annotations

import itertools
import random
import time
from dataclasses import dataclass, field

from .characters import (
    Character,
    act,
    break_sequence,
    indicator,
    random_character,
    standard_expansion,
    validate_type,
)
from .enumeration import BudgetExceeded, CharacterSpace
from .equivalence import (
    DEFAULT_BUDGET,
    d_weak_closed_form,
    realizable_indicators,
    strict_classes_1m,
    strict_classes_bruteforce,
    strict_partition,
    weak_orbits_bruteforce,
)
from .nottingham import (
    NottinghamElement,
    PhiImage,
    comp_inverse,
    compose_elems,
    coset_index,
    enumerate_quotient,
    g,
    in_coset_set,
    oplus,
    phi,
)

DEFAULT_SEED = 20180101
# characters per type above which enumeration needs an explicit opt-in
LARGE_TYPE = 10**6


@dataclass
class Check:
    name: str
    passed: bool
    detail: str = ""
    witness: object = None
    skipped: bool = False

    def line(self) -> str:
        tag = "SKIP" if self.skipped else ("PASS" if self.passed else "FAIL")
        out = f"{tag} {self.name}"
        if self.detail:
            out += f": {self.detail}"
        if not self.passed and self.witness is not None:
            out += f" [witness: {self.witness}]"
        return out

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "status": "skip" if self.skipped else ("pass" if self.passed else "fail"),
            "detail": self.detail,
            "witness": None if self.witness is None else str(self.witness),
        }


@dataclass
class SuiteOptions:
    p: int | None = None
    seed: int = DEFAULT_SEED
    budget: int = DEFAULT_BUDGET
    threads: int = 1
    samples: int = 1000
    allow_large: bool = False
    ms: list[int] | None = field(default=None)


def valid_ms(p: int, upto: int, b0: int = 2) -> list[int]:
    return [m for m in range(1, upto + 1) if validate_type(p, b0, m)]


def _too_large(p, m, b0, opts) -> bool:
    return not opts.allow_large and CharacterSpace(p, m, b0).size > LARGE_TYPE


def suite_corollary_weak_counts(opts: SuiteOptions):
    p = opts.p or 3
    for m in opts.ms or valid_ms(p, 3 * p + 2):
        expected = d_weak_closed_form(p, m)
        found = len(realizable_indicators(p, m))
        yield Check(f"indicator-count p={p} m={m}", found == expected, f"{found} realizable indicators, closed form {expected}")
        if _too_large(p, m, 2, opts):
            yield Check(f"weak-orbits p={p} m={m}", True, "needs --allow-large", skipped=True)
            continue
        t0 = time.perf_counter()
        try:
            r = weak_orbits_bruteforce(p, m, opts.budget, threads=opts.threads)
        except BudgetExceeded as e:
            yield Check(f"weak-orbits p={p} m={m}", True, str(e), skipped=True)
            continue
        dt = time.perf_counter() - t0
        yield Check(
            f"weak-orbits p={p} m={m}",
            r.weak_count == expected and r.ok,
            f"{r.weak_count} orbits among {r.total} characters, closed form {expected} ({dt:.2f}s)",
            None if r.ok else r.issues[0].witness,
        )


def suite_theorem_indicator(opts: SuiteOptions):
    p = opts.p or 3
    for m in opts.ms or [m for m in valid_ms(p, 3 * p + 2) if not _too_large(p, m, 2, opts)]:
        r = weak_orbits_bruteforce(p, m, opts.budget, threads=opts.threads)
        bad = [i for i in r.issues if i.check == "indicator-theorem"]
        yield Check(
            f"indicator-theorem p={p} m={m}",
            not bad,
            f"{r.weak_count} orbits, {len({w.indicator for w in r.weak_classes})} indicator values",
            bad[0].witness if bad else None,
        )


def suite_theorem_strict_bounds(opts: SuiteOptions):
    p = opts.p or 3
    for m in opts.ms or [m for m in valid_ms(p, 3 * p - 1) if not _too_large(p, m, 2, opts)]:
        r = strict_classes_bruteforce(p, m, "mod_p", opts.budget, opts.threads)
        lo, hi = r.weak_count, p * r.weak_count
        splits = [0] * len(r.weak_classes)
        for s in r.strict_classes:
            splits[s.parent] += 1
        yield Check(
            f"strict-bounds p={p} m={m}",
            lo <= r.strict_count <= hi and r.ok,
            f"weak={r.weak_count} strict={r.strict_count} bracket=[{lo},{hi}] max split={max(splits)}",
            None if r.ok else r.issues[0].message,
        )


def _random_element(p: int, precision: int, rng) -> NottinghamElement:
    return NottinghamElement.from_unit_coeffs(p, [rng.randrange(p) for _ in range(precision - 2)], precision)


def _coarse_arm(arm: str, p: int, m: int, chi: Character, u: NottinghamElement):
    """(holds, description) for one lemma arm on one (chi, u)."""
    q = p * p
    e = standard_expansion(chi)
    psi = act(u, chi)
    alpha = u.series[2]
    if arm == "a":
        ok = psi[1] % p == (e.x1 + alpha * e.x2) % p and psi[2] % p == e.x2
        return ok, f"psi(E1)={psi[1]}, psi(E2)={psi[2]}, x1={e.x1}, x2={e.x2}, alpha={alpha}"
    if arm == "b":
        return psi[m] == p * e[m] % q, f"psi(E_m)={psi[m]}, a_m={e[m]}"
    if arm == "c":
        want = p * (e[m - 1] + (m - 1) * alpha * e[m]) % q
        return psi[m - 1] == want, f"psi(E_m-1)={psi[m - 1]}, expected {want}"
    # m = 2p: eta^p = (m-1) alpha, and Frobenius is the identity on F_p
    eta = (m - 1) * alpha % p
    want = p * (e[m - 1] + eta * e.x2) % q
    return psi[m - 1] == want, f"psi(E_m-1)={psi[m - 1]}, expected {want}"


COARSE_ARMS = {
    "a": lambda p, m: True,
    "b": lambda p, m: m % p != 0,
    "c": lambda p, m: m % p not in (0, 1),
    "d": lambda p, m: m == 2 * p,
}


def suite_lemma_coarse(opts: SuiteOptions):
    ps = [opts.p] if opts.p else [3, 5]
    rng = random.Random(opts.seed)
    for p in ps:
        ms = valid_ms(p, 3 * p + 2)
        for arm, applies in COARSE_ARMS.items():
            arm_ms = [m for m in ms if applies(p, m)]
            failure = None
            for _ in range(opts.samples):
                m = rng.choice(arm_ms)
                chi = random_character(p, m, rng)
                u = _random_element(p, m + 1, rng)
                ok, why = _coarse_arm(arm, p, m, chi, u)
                if not ok:
                    failure = (chi, u, why)
                    break
            yield Check(
                f"lemma-coarse ({arm}) p={p}",
                failure is None,
                f"{opts.samples} random pairs over m in {arm_ms}",
                failure,
            )
        failure = None
        for _ in range(opts.samples):
            m = rng.choice(ms)
            chi = random_character(p, m, rng)
            u = _random_element(p, m + 1, rng)
            psi = act(u, chi)
            if break_sequence(psi) != break_sequence(chi) or indicator(psi) != indicator(chi):
                failure = (chi, u)
                break
        yield Check(f"indicator-invariance p={p}", failure is None, f"{opts.samples} random pairs", failure)


def suite_prop_phi(opts: SuiteOptions):
    p = opts.p or 3
    quot = list(enumerate_quotient(p, 4))
    bad = None
    for u, v in itertools.product(quot, quot):
        if phi(compose_elems(u, v)) != oplus(phi(u), phi(v)):
            bad = (u, v)
            break
    yield Check(f"phi-homomorphism p={p}", bad is None, f"{len(quot) ** 2} pairs", bad)

    pairs = [PhiImage(a, b, p) for a in range(p) for b in range(p)]
    zero = PhiImage(0, 0, p)
    bad = None
    for x, y in itertools.product(pairs, pairs):
        if oplus(x, y) != oplus(y, x) or oplus(x, zero) != x or oplus(x, x.inverse()) != zero:
            bad = (x, y)
            break
        for z in pairs:
            if oplus(oplus(x, y), z) != oplus(x, oplus(y, z)):
                bad = (x, y, z)
                break
        if bad:
            break
    yield Check(f"oplus-abelian-group p={p}", bad is None, f"{len(pairs)} elements", bad)

    bad = None
    for x1, x2 in itertools.product(range(p), range(1, p)):
        for u in quot:
            hits = [k for k in range(p) if in_coset_set(compose_elems(u, comp_inverse(g(k, p, 4))), x1, x2)]
            if hits != [coset_index(u, x1, x2)]:
                bad = (x1, x2, u, hits)
                break
            if phi(u) == zero and not in_coset_set(u, x1, x2):
                bad = (x1, x2, u, "kernel element outside N(x1,x2)")
                break
        if bad:
            break
    yield Check(f"coset-partition p={p}", bad is None, f"{p * (p - 1)} choices of (x1, x2) x {len(quot)} elements", bad)

    rng = random.Random(opts.seed)
    bad = None
    for _ in range(opts.samples):
        x1, x2 = rng.randrange(p), rng.randrange(1, p)
        u = _random_element(p, 6, rng)
        if not in_coset_set(u, x1, x2):
            continue
        w = _random_element(p, 6, rng)
        if not in_coset_set(compose_elems(compose_elems(w, u), comp_inverse(w)), x1, x2):
            bad = (x1, x2, u, w)
            break
    yield Check(f"coset-conjugation-invariance p={p}", bad is None, f"{opts.samples} random draws", bad)


def suite_lemma_lubin_criterion(opts: SuiteOptions):
    p = opts.p or 3
    for m in opts.ms or [m for m in valid_ms(p, 3 * p - 2) if not _too_large(p, m, 2, opts)]:
        space = CharacterSpace(p, m, 2)
        a = strict_partition(space, "mod_p", opts.threads)
        b = strict_partition(space, "mod_p2", opts.threads)
        yield Check(f"lubin-criterion p={p} m={m}", a == b, f"{a.count} classes mod p, {b.count} classes mod p^2")


def suite_thm_1m(opts: SuiteOptions):
    p = opts.p or 3
    for m in opts.ms or valid_ms(p, p + 2, b0=1):
        r = strict_classes_1m(p, m, opts.budget, opts.threads)
        yield Check(
            f"thm-1m p={p} m={m}",
            r.ok,
            f"{r.strict_count} strict classes among {r.total} characters",
            None if r.ok else r.issues[0].witness,
        )


SUITES = {
    "corollary-weak-counts": suite_corollary_weak_counts,
    "theorem-indicator": suite_theorem_indicator,
    "theorem-strict-bounds": suite_theorem_strict_bounds,
    "lemma-coarse": suite_lemma_coarse,
    "prop-phi": suite_prop_phi,
    "lemma-lubin-criterion": suite_lemma_lubin_criterion,
    "thm-1m": suite_thm_1m,
}


def run_suite(name: str, opts: SuiteOptions | None = None) -> list[Check]:
    if name not in SUITES:
        raise KeyError(f"unknown suite {name!r}; choose from {', '.join(SUITES)}")
    return list(SUITES[name](opts or SuiteOptions()))
