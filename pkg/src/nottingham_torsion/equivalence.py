"""Weak and strict equivalence of characters of type <2,m> (and <1,m>).

chi ~ psi (weak) when psi = act(u, chi) for some u; chi ~= psi (strict) when
additionally chi(u(t)/t) = 0, which for Z/p^2 values may be tested mod p.
Weak classes are orbits and are computed from a generating set; strict
classes are the components of the relation over the whole finite quotient
that acts on the type.
"""

from __future__ import annotations

import itertools
import json
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .characters import (
    Character,
    Indicator,
    WrongType,
    break_sequence,
    coordinate_ranges,
    evaluate,
    indicator,
    indicator_1m,
    indicator_case,
    standard_expansion,
    type_violation,
)
from .enumeration import (
    BudgetExceeded,
    CharacterSpace,
    Partition,
    action_matrices,
    elements_batch,
    kernel_vectors,
    partition_from_keys,
    quotient_batch,
    quotient_size,
)
from .fpseries import FpSeries
from .nottingham import NottinghamElement
from .units import basis_indices

log = logging.getLogger(__name__)

DEFAULT_BUDGET = 10**8
# upper bound on ints materialized per (batch x characters x dim) image block
_BLOCK = 2_000_000

CRITERIA = ("mod_p", "mod_p2")


def d_weak_closed_form(p: int, m: int) -> int:
    """Number of weak classes of type <2,m>."""
    why = type_violation(p, 2, m)
    if why is not None:
        raise WrongType(f"<2,{m}> is not a break sequence for p={p}: {why}")
    if m % p == 0:
        return p * (p - 1)
    if m % p == 1:
        return (p - 1) ** 2
    return p * (p - 1) ** 2


def weak_equiv_indicator(chi: Character, psi: Character) -> bool:
    if (chi.p, break_sequence(chi)) != (psi.p, break_sequence(psi)):
        raise WrongType("characters are not of the same type")
    return indicator(chi) == indicator(psi)


def realizable_indicators(p: int, m: int) -> set[Indicator]:
    """Indicator values reached by characters of type <2,m>.

    The indicator reads only x1, x2, a_(m-1), a_m, so it suffices to range over
    those coordinates with the remaining basis values zero and the p-parts of
    x1, x2 dropped.
    """
    why = type_violation(p, 2, m)
    if why is not None:
        raise WrongType(f"<2,{m}> is not a break sequence for p={p}: {why}")
    basis = basis_indices(p, m)
    ranges = dict(zip(basis, coordinate_ranges(p, 2, m)))
    free = [j for j in sorted({1, 2, m - 1, m}) if j in ranges]
    choices = []
    for j in free:
        vals = ranges[j]
        choices.append([v for v in vals if v < p] if j <= 2 else vals)
    found = set()
    for vals in itertools.product(*choices):
        found.add(indicator(Character(p, m, dict(zip(free, vals)))))
    return found


def _unit_part_for(u: NottinghamElement, bound: int) -> FpSeries:
    z = u.unit_part()
    if z.precision < bound + 1:
        # lift by zeros; see enumeration.kernel_vectors for why this is safe mod p
        z = FpSeries(u.p, z.coeffs, bound + 1)
    return z


def strict_edge(chi: Character, u: NottinghamElement) -> bool:
    """chi(u(t)/t) = 0 mod p."""
    return evaluate(chi, _unit_part_for(u, chi.bound)) % chi.p == 0


def strict_edge_strong(chi: Character, u: NottinghamElement) -> bool:
    """u(t)/t in ker chi, i.e. chi(u(t)/t) = 0 mod p^2."""
    if u.precision < chi.bound + 2:
        raise ValueError(f"need the element to t^{chi.bound + 2} to test u/t in ker chi")
    return evaluate(chi, u.unit_part()) == 0


# -- reports ------------------------------------------------------------------


@dataclass
class WeakClass:
    representative: Character
    size: int
    indicator: Indicator | None = None


@dataclass
class StrictClass:
    representative: Character
    size: int
    parent: int


@dataclass
class VerificationIssue:
    check: str
    message: str
    witness: tuple[Character, ...] = ()

    def to_dict(self) -> dict:
        return {"check": self.check, "message": self.message, "witness": [c.to_dict() for c in self.witness]}


@dataclass
class ClassReport:
    p: int
    m: int
    b0: int = 2
    method: str = "brute_force"
    criterion: str | None = None
    total: int = 0
    weak_count: int | None = None
    strict_count: int | None = None
    weak_classes: list[WeakClass] = field(default_factory=list)
    strict_classes: list[StrictClass] = field(default_factory=list)
    issues: list[VerificationIssue] = field(default_factory=list)

    CSV_HEADER = "p,m,case,weak_count,strict_count,lower_bound,upper_bound"

    @property
    def ok(self) -> bool:
        return not self.issues

    @property
    def case(self) -> str:
        return indicator_case(self.p, self.m)

    def bounds(self) -> tuple[int, int] | None:
        if self.b0 != 2:
            return None
        d = d_weak_closed_form(self.p, self.m)
        return d, self.p * d

    def csv_row(self) -> str:
        lo, hi = self.bounds() or ("", "")
        cells = [self.p, self.m, self.case, self.weak_count, self.strict_count, lo, hi]
        return ",".join("" if c is None else str(c) for c in cells)

    def to_dict(self) -> dict:
        lo, hi = self.bounds() or (None, None)
        return {
            "p": self.p,
            "m": self.m,
            "type": [self.b0, self.m],
            "case": self.case,
            "method": self.method,
            "criterion": self.criterion,
            "total": self.total,
            "weak_count": self.weak_count,
            "strict_count": self.strict_count,
            "lower_bound": lo,
            "upper_bound": hi,
            "weak_classes": [
                {
                    "indicator": None if w.indicator is None else w.indicator.to_dict(),
                    "size": w.size,
                    "representative": w.representative.to_dict(),
                }
                for w in self.weak_classes
            ],
            "strict_classes": [
                {"representative": s.representative.to_dict(), "size": s.size, "parent": s.parent}
                for s in self.strict_classes
            ],
            "ok": self.ok,
            "issues": [i.to_dict() for i in self.issues],
        }

    def to_json(self, **kw) -> str:
        return json.dumps(self.to_dict(), **kw)

    @classmethod
    def from_dict(cls, d: dict) -> ClassReport:
        return cls(
            p=d["p"],
            m=d["m"],
            b0=d["type"][0],
            method=d["method"],
            criterion=d["criterion"],
            total=d["total"],
            weak_count=d["weak_count"],
            strict_count=d["strict_count"],
            weak_classes=[
                WeakClass(
                    Character.from_dict(w["representative"]),
                    w["size"],
                    None if w["indicator"] is None else Indicator.from_dict(w["indicator"]),
                )
                for w in d["weak_classes"]
            ],
            strict_classes=[
                StrictClass(Character.from_dict(s["representative"]), s["size"], s["parent"])
                for s in d["strict_classes"]
            ],
            issues=[
                VerificationIssue(i["check"], i["message"], tuple(Character.from_dict(c) for c in i["witness"]))
                for i in d["issues"]
            ],
        )


# -- brute-force partitions -----------------------------------------------------


def standard_generators(p: int, m: int) -> list[NottinghamElement]:
    """t(1 + t^k), 1 <= k <= m, known to t^(m+1)."""
    gens = []
    for k in range(1, m + 1):
        alphas = [0] * (k - 1) + [1]
        gens.append(NottinghamElement.from_unit_coeffs(p, alphas, m + 1))
    return gens


def _check_budget(needed: int, budget: int):
    if needed > budget:
        raise BudgetExceeded(needed, budget)


def _edges(space: CharacterSpace, rows: np.ndarray, criterion: str | None):
    p, q, m = space.p, space.q, space.m
    vecs = space.vectors
    mats = action_matrices(rows, p, m)
    images = np.einsum("nk,bjk->bnj", vecs, mats) % q
    tgt = space.index(images.reshape(-1, space.dim)).reshape(len(rows), space.size)
    src = np.broadcast_to(np.arange(space.size), tgt.shape)
    if criterion is None:
        return src.ravel(), tgt.ravel()
    values = kernel_vectors(rows, p, m) @ vecs.T % q
    keep = values % p == 0 if criterion == "mod_p" else values == 0
    return src[keep], tgt[keep]


def _batch_len(space: CharacterSpace) -> int:
    return max(1, _BLOCK // (space.size * space.dim))


def _partition_over(space, row_source, n_rows: int, criterion, threads: int) -> Partition:
    """Join chi to act(u, chi) for every row u (subject to the criterion)."""
    step = _batch_len(space)
    chunks = [(s, min(s + step, n_rows)) for s in range(0, n_rows, step)]

    def work(bounds):
        part = Partition(space.size)
        for s, e in bounds:
            part.join(*_edges(space, row_source(s, e), criterion))
        return part

    if threads <= 1 or len(chunks) < 2:
        return work(chunks)
    shards = [chunks[i::threads] for i in range(threads)]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        parts = list(pool.map(work, shards))
    out = parts[0]
    for other in parts[1:]:
        out = out.merge(other)
    return out


def weak_partition(space: CharacterSpace, generators: str = "standard", threads: int = 1) -> Partition:
    p, m = space.p, space.m
    if generators == "standard":
        rows = elements_batch(standard_generators(p, m))
        return _partition_over(space, lambda s, e: rows[s:e], len(rows), None, threads)
    if generators == "full":
        n = quotient_size(p, m + 1)
        return _partition_over(space, lambda s, e: quotient_batch(p, m + 1, s, e), n, None, threads)
    raise ValueError(f"unknown generator set {generators!r}")


def strict_partition(space: CharacterSpace, criterion: str = "mod_p", threads: int = 1) -> Partition:
    """Components of {(chi, act(u, chi)) : strict edge} over the quotient acting on the type.

    The action only sees u modulo t^(m+1); the mod-p^2 criterion also reads the
    t^(m+1) coefficient, so it ranges over the quotient modulo t^(m+2).
    """
    if criterion not in CRITERIA:
        raise ValueError(f"criterion must be one of {CRITERIA}")
    p, m = space.p, space.m
    prec = m + 1 if criterion == "mod_p" else m + 2
    n = quotient_size(p, prec)
    return _partition_over(space, lambda s, e: quotient_batch(p, prec, s, e), n, criterion, threads)


def strict_relation_is_closed(p: int, m: int, b0: int = 2, criterion: str = "mod_p") -> bool:
    """True when the directed strict edges already form an equivalence relation.

    For each chi the distinct direct targets must exhaust its component.
    """
    space = CharacterSpace(p, m, b0)
    prec = m + 1 if criterion == "mod_p" else m + 2
    n = quotient_size(p, prec)
    src_all, tgt_all = [], []
    step = _batch_len(space)
    for s in range(0, n, step):
        src, tgt = _edges(space, quotient_batch(p, prec, s, min(s + step, n)), criterion)
        src_all.append(src)
        tgt_all.append(tgt)
    src = np.concatenate(src_all)
    tgt = np.concatenate(tgt_all)
    pairs = np.unique(src * space.size + tgt)
    direct = np.bincount(pairs // space.size, minlength=space.size)
    part = Partition(space.size).join(src, tgt)
    block_size = np.bincount(part.labels, minlength=space.size)[part.labels]
    return bool(np.array_equal(direct, block_size))


def _indicator_keys(space: CharacterSpace, fn) -> list:
    return [fn(Character.from_vector(space.p, space.m, v)) for v in space.vectors]


def _partition_witness(space, a: Partition, b: Partition) -> tuple[Character, Character] | None:
    """A pair together in exactly one of the two partitions, or None if equal."""
    for part, other in ((a, b), (b, a)):
        bad = np.flatnonzero(other.labels != other.labels[part.labels])
        if len(bad):
            i = int(bad[0])
            return space.character(int(part.labels[i])), space.character(i)
    return None


def _weak_classes(space: CharacterSpace, part: Partition, with_indicator: bool) -> list[WeakClass]:
    out = []
    for rep, members in part.blocks().items():
        chi = space.character(rep)
        out.append(WeakClass(chi, len(members), indicator(chi) if with_indicator else None))
    return out


def weak_orbits_bruteforce(
    p: int,
    m: int,
    budget: int = DEFAULT_BUDGET,
    generators: str = "standard",
    threads: int = 1,
) -> ClassReport:
    """Weak classes of type <2,m> as orbits, checked against the indicator and closed form."""
    space = CharacterSpace(p, m, 2)
    n_gens = m if generators == "standard" else quotient_size(p, m + 1)
    _check_budget(space.size * n_gens, budget)
    log.info("weak orbits p=%d m=%d: %d characters, %d elements", p, m, space.size, n_gens)
    part = weak_partition(space, generators, threads)
    report = ClassReport(p, m, 2, "both", None, space.size, part.count)
    report.weak_classes = _weak_classes(space, part, True)

    expected = d_weak_closed_form(p, m)
    if part.count != expected:
        report.issues.append(
            VerificationIssue("corollary-weak-count", f"brute force found {part.count} orbits, closed form gives {expected}")
        )
    by_ind = partition_from_keys(_indicator_keys(space, indicator))
    witness = _partition_witness(space, part, by_ind)
    if witness is not None:
        report.issues.append(
            VerificationIssue("indicator-theorem", "orbit membership and indicator equality disagree", witness)
        )
    return report


def _strict_report(space: CharacterSpace, criterion: str, budget: int, threads: int):
    p, m, b0 = space.p, space.m, space.b0
    prec = m + 1 if criterion == "mod_p" else m + 2
    _check_budget(space.size * (quotient_size(p, prec) + m), budget)
    log.info("strict classes p=%d m=%d (%s): %d characters", p, m, criterion, space.size)
    weak = weak_partition(space, "standard", threads)
    strict = strict_partition(space, criterion, threads)

    report = ClassReport(p, m, b0, "brute_force", criterion, space.size, weak.count, strict.count)
    report.weak_classes = _weak_classes(space, weak, b0 == 2)
    parent_of = {w.representative: i for i, w in enumerate(report.weak_classes)}
    for rep, members in strict.blocks().items():
        parent = parent_of[space.character(int(weak.labels[rep]))]
        report.strict_classes.append(StrictClass(space.character(rep), len(members), parent))

    if not strict.refines(weak):
        report.issues.append(
            VerificationIssue("refinement", "a strict class meets two weak orbits", _partition_witness(space, strict, weak) or ())
        )
    splits = np.bincount([s.parent for s in report.strict_classes], minlength=len(report.weak_classes))
    if splits.max(initial=0) > p:
        worst = int(splits.argmax())
        report.issues.append(
            VerificationIssue(
                "split-bound",
                f"weak class {worst} splits into {int(splits[worst])} > p strict classes",
                (report.weak_classes[worst].representative,),
            )
        )
    if not weak.count <= strict.count <= p * weak.count:
        report.issues.append(
            VerificationIssue("strict-bounds", f"strict count {strict.count} outside [{weak.count}, {p * weak.count}]")
        )
    return report, weak, strict


def strict_classes_bruteforce(
    p: int,
    m: int,
    criterion: str = "mod_p",
    budget: int = DEFAULT_BUDGET,
    threads: int = 1,
    b0: int = 2,
) -> ClassReport:
    """Strict classes of type <b0,m>, with the weak orbits they refine."""
    return _strict_report(CharacterSpace(p, m, b0), criterion, budget, threads)[0]


def find_strict_witness(chi: Character, psi: Character, budget: int = DEFAULT_BUDGET) -> NottinghamElement | None:
    """Some u in N(x1, x2) with act(u, chi) = psi, x1, x2 read from chi."""
    e = standard_expansion(chi)
    p, m, q = chi.p, chi.bound, chi.p**2
    if (psi.p, psi.bound) != (p, m):
        raise WrongType("characters have different parameters")
    prec = m + 1
    n = quotient_size(p, prec)
    _check_budget(n, budget)
    r = e.x1 * pow(e.x2, -1, p)
    src = np.array(chi.vector(), dtype=np.int64)
    dst = np.array(psi.vector(), dtype=np.int64)
    step = 4096
    for s in range(0, n, step):
        rows = quotient_batch(p, prec, s, min(s + step, n))
        alpha, beta = rows[:, 2], rows[:, 3]
        inside = (r * alpha - alpha * (alpha - 1) * pow(2, -1, p) + beta) % p == 0
        rows = rows[inside]
        if not len(rows):
            continue
        images = action_matrices(rows, p, m) @ src % q
        hit = np.flatnonzero(np.all(images == dst, axis=1))
        if len(hit):
            return NottinghamElement(FpSeries(p, rows[hit[0]].tolist(), prec))
    return None


def strict_via_coset(chi: Character, psi: Character, budget: int = DEFAULT_BUDGET) -> bool:
    return find_strict_witness(chi, psi, budget) is not None


def strict_classes_1m(p: int, m: int, budget: int = DEFAULT_BUDGET, threads: int = 1) -> ClassReport:
    """Strict classes of type <1,m> by brute force, compared with the <1,m> indicator."""
    space = CharacterSpace(p, m, 1)
    report, _, strict = _strict_report(space, "mod_p", budget, threads)
    report.method = "both"
    by_ind = partition_from_keys(_indicator_keys(space, indicator_1m))
    witness = _partition_witness(space, strict, by_ind)
    if witness is not None:
        report.issues.append(VerificationIssue("thm-1m", "strict classes and indicator fibres disagree", witness))
    return report
