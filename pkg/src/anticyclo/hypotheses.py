"""Machine verdicts for the congruence-transfer hypotheses.

Each check returns HOLDS / FAILS / UNKNOWN with per-place evidence.  A
sufficient one-sided criterion that comes back inconclusive yields UNKNOWN,
never FAILS; FAILS is reserved for exact witnesses (a visible residual
fixed vector, a divisibility that is plainly there).
"""

from __future__ import annotations

from dataclasses import dataclass
from math import lcm

from .eigenforms import (
    EigenformRecord,
    check_congruence,
    congruence_witness_primes,
    CongruenceVerdict,
)
from .errors import NotDivisible
from .padic import LocalRing
from .quadfield import (
    INERT,
    LevelFactorization,
    QuadFieldContext,
    check_ghh,
    factor_level,
    trial_factor,
)

HOLDS = "HOLDS"
FAILS = "FAILS"
UNKNOWN = "UNKNOWN"

SQUARE = "SQUARE"
RELAXED = "RELAXED"


def worst(verdicts) -> str:
    vs = list(verdicts)
    if FAILS in vs:
        return FAILS
    if UNKNOWN in vs:
        return UNKNOWN
    return HOLDS


@dataclass(frozen=True)
class HypothesisItem:
    name: str
    subject: str  # form label or form label + place
    verdict: str
    evidence: tuple[str, ...]
    place: str | None = None

    def to_json_dict(self) -> dict:
        out = {"name": self.name, "subject": self.subject, "verdict": self.verdict,
               "evidence": list(self.evidence)}
        if self.place is not None:
            out["place"] = self.place
        return out


@dataclass(frozen=True)
class NtildeClassification:
    """Prime blocks of a level jump N' -> N: inert-new (N1~), inert-shared
    (N2~), split (N3~), with the witness refinements M1/M2/M3."""

    N: int
    N_prime: int
    n1: int
    n2: int
    n3: int
    roles: tuple[tuple[int, str], ...]
    m1: int = 1
    m2: int = 1
    m3: int = 1

    def primes(self, role: str) -> list[int]:
        return [q for q, r in self.roles if r == role]

    def m3_primes(self) -> list[int]:
        return [q for q, _ in trial_factor(self.m3)]

    def to_json_dict(self) -> dict:
        return {"N": self.N, "N_prime": self.N_prime,
                "N1_tilde": self.n1, "N2_tilde": self.n2, "N3_tilde": self.n3,
                "M1": self.m1, "M2": self.m2, "M3": self.m3,
                "roles": [{"q": q, "role": r} for q, r in self.roles]}


def classify_ntilde(N: int, N_prime: int, ctx: QuadFieldContext,
                    witness_primes=()) -> NtildeClassification:
    """Partition the primes of the level jump: N1~ inert new, N2~ inert shared
    with N', N3~ split dividing N/N'; M_j are the sub-products over primes
    where the two coefficient tables disagree mod pi."""
    if N % N_prime:
        raise NotDivisible(f"N' = {N_prime} does not divide N = {N}")
    jump = N // N_prime
    witness = set(witness_primes)
    n1 = n2 = n3 = 1
    m = [1, 1, 1]
    roles = []
    for q, _e in trial_factor(N):
        if jump % q:
            continue
        s = ctx.splitting_of(q)
        if s == 1:
            roles.append((q, "N3"))
            n3 *= q
            if q in witness:
                m[2] *= q
        elif N_prime % q == 0:
            roles.append((q, "N2"))
            n2 *= q
            if q in witness:
                m[1] *= q
        else:
            roles.append((q, "N1"))
            n1 *= q
            if q in witness:
                m[0] *= q
    return NtildeClassification(N, N_prime, n1, n2, n3, tuple(roles),
                                m[0], m[1], m[2])


def check_unit_condition(record: EigenformRecord, cls: NtildeClassification,
                         ring: LocalRing, prec: int = 4) -> HypothesisItem:
    """(1+q-b_q)(1+q+b_q) over N1~ times (q-b_q)(q+b_q) over N2~ must be a unit."""
    evidence = []
    product = ring.one(prec)
    for q in cls.primes("N1"):
        b = record.a_padic(q, ring, prec)
        qq = ring.from_int(q, prec)
        one = ring.one(prec)
        factor = (one + qq - b) * (one + qq + b)
        evidence.append(f"N1~ factor at {q}: valuation {factor.valuation()}")
        product = product * factor
    for q in cls.primes("N2"):
        b = record.a_padic(q, ring, prec)
        qq = ring.from_int(q, prec)
        factor = (qq - b) * (qq + b)
        evidence.append(f"N2~ factor at {q}: valuation {factor.valuation()}")
        product = product * factor
    v = product.valuation()
    ok = isinstance(v, int) and v == 0
    if not evidence:
        evidence.append("empty product = 1")
    return HypothesisItem("unit", record.label, HOLDS if ok else FAILS,
                          tuple(evidence))


def check_div(record: EigenformRecord, fact: LevelFactorization,
              p: int) -> HypothesisItem:
    """When N- is nontrivial, p must not divide (q-1)q(q+1) for any q | N."""
    if fact.N_minus == 1:
        return HypothesisItem("div", record.label, HOLDS,
                              ("vacuous: N- = 1",))
    bad = [q for q, _e, _c in fact.classification
           if ((q - 1) * q * (q + 1)) % p == 0]
    if bad:
        return HypothesisItem("div", record.label, FAILS,
                              tuple(f"p = {p} divides (q-1)q(q+1) at q = {q}" for q in bad))
    return HypothesisItem("div", record.label, HOLDS,
                          (f"p = {p} divides no (q-1)q(q+1), q | {fact.N}",))


def check_sqfree(record: EigenformRecord, fact: LevelFactorization) -> HypothesisItem:
    if fact.N_minus == 1:
        return HypothesisItem("sq-fr", record.label, HOLDS, ("vacuous: N- = 1",))
    square = [q for q, e, _c in fact.classification if e > 1]
    if square:
        return HypothesisItem("sq-fr", record.label, FAILS,
                              tuple(f"q^2 | N at q = {q}" for q in square))
    return HypothesisItem("sq-fr", record.label, HOLDS,
                          (f"N = {fact.N} is square-free",))


def check_h0(record: EigenformRecord, ctx: QuadFieldContext,
             minus_primes, prec: int = 4) -> tuple[HypothesisItem, ...]:
    """Per-place sufficient criteria for vanishing of the fixed points at
    w | p N1- N2-.

    p (split, good): holds when 1 + p - a_p is a unit.  Inert good q: holds
    when (1+q)^2 - a_q^2 is a unit, fails when it is not (a visible Frobenius
    fixed vector).  Inert multiplicative q: needs q^2 - 1 a unit plus p not
    dividing the Tate-parameter valuation; without that auxiliary datum the
    verdict stays UNKNOWN.  Additive primes are UNKNOWN outright.
    """
    ring = ctx.ring
    p = ctx.p
    items = []

    def item(place, verdict, *ev):
        items.append(HypothesisItem("H0", record.label, verdict, tuple(ev),
                                    place=place))

    ap = record.a_padic(p, ring, prec)
    quantity = ring.from_int(1 + p, prec) - ap
    v = quantity.valuation()
    if isinstance(v, int) and v == 0:
        item(f"w|{p}", HOLDS, "1 + p - a_p is a unit (valuation 0)")
    else:
        item(f"w|{p}", UNKNOWN,
             f"1 + p - a_p has valuation {v}: criterion NOT_VERIFIED")
    for q in sorted(set(minus_primes)):
        e = 0
        n = record.level
        while n % q == 0:
            n //= q
            e += 1
        if e == 0:
            aq = record.a_padic(q, ring, prec)
            qq = ring.from_int(q + 1, prec)
            val = (qq - aq) * (qq + aq)
            v = val.valuation()
            if isinstance(v, int) and v == 0:
                item(f"w|{q}", HOLDS, f"(1+q)^2 - a_q^2 is a unit at q = {q}")
            else:
                item(f"w|{q}", FAILS,
                     f"(1+q)^2 - a_q^2 = 0 mod pi at q = {q}: residual Frobenius "
                     "fixed vector")
        elif e == 1:
            if (q * q - 1) % p == 0:
                item(f"w|{q}", FAILS,
                     f"p | q^2 - 1 at q = {q}: mu_p lies in the quadratic "
                     "extension and the Tate curve has rational p-torsion")
                continue
            tv = record.tate_valuation(q)
            if tv is None:
                item(f"w|{q}", UNKNOWN,
                     f"q^2 - 1 is a unit at q = {q} but the Tate-parameter "
                     "valuation is unavailable: a split-extension p-torsion "
                     "point cannot be excluded")
            elif tv % p == 0:
                item(f"w|{q}", FAILS,
                     f"p | ord_q(j-denominator) = {tv}: Tate p-torsion descends")
            else:
                item(f"w|{q}", HOLDS,
                     f"q^2 - 1 a unit and p does not divide ord_q(j-denominator) = {tv}")
        else:
            item(f"w|{q}", UNKNOWN, f"additive reduction at q = {q}: undecided")
    return tuple(items)


def choose_common_level(n1: int, n2: int, strategy: str = RELAXED,
                        witness_primes=()) -> int:
    """SQUARE: least common multiple with every exponent rounded up to even.
    RELAXED: plain lcm with q^2 forced only at the witness primes."""
    N = lcm(n1, n2)
    out = 1
    for q, e in trial_factor(N):
        if strategy == SQUARE:
            out *= q ** (e + (e % 2))
        elif strategy == RELAXED:
            out *= q ** max(e, 2 if q in set(witness_primes) else 0)
        else:
            raise ValueError(f"unknown strategy {strategy!r}")
    return out


@dataclass(frozen=True)
class HypothesisReport:
    f1: str
    f2: str
    context: dict
    strategy: str
    common_level: int
    items: tuple[HypothesisItem, ...]
    congruence: CongruenceVerdict
    factorizations: dict
    classifications: dict
    witness_primes: tuple[int, ...]

    def verdict(self, name: str, subject: str | None = None) -> str:
        vs = [i.verdict for i in self.items
              if i.name == name and (subject is None or i.subject == subject)]
        return worst(vs) if vs else UNKNOWN

    def overall(self) -> str:
        base = worst(i.verdict for i in self.items)
        if self.congruence.holds is False:
            return FAILS
        if self.congruence.holds is None:
            return worst([base, UNKNOWN])
        return base

    def to_json_dict(self) -> dict:
        return {
            "f1": self.f1,
            "f2": self.f2,
            "context": self.context,
            "strategy": self.strategy,
            "common_level": self.common_level,
            "hypotheses": [i.to_json_dict() for i in self.items],
            "congruence": self.congruence.to_json_dict(),
            "factorizations": {k: v.to_json_dict() for k, v in self.factorizations.items()},
            "classifications": {k: v.to_json_dict() for k, v in self.classifications.items()},
            "witness_primes": list(self.witness_primes),
            "overall": self.overall(),
        }


def hypothesis_report(f1: EigenformRecord, f2: EigenformRecord,
                      ctx: QuadFieldContext, strategy: str = RELAXED,
                      prec: int = 1) -> HypothesisReport:
    """Run every finitely-decidable hypothesis for a form pair."""
    fact1 = factor_level(f1.level, ctx.disc, ctx.p)
    fact2 = factor_level(f2.level, ctx.disc, ctx.p)
    witness = tuple(congruence_witness_primes(f1, f2, ctx.p))
    N = choose_common_level(f1.level, f2.level, strategy, witness)
    cls1 = classify_ntilde(N, f1.level, ctx, witness)
    cls2 = classify_ntilde(N, f2.level, ctx, witness)
    congruence = check_congruence(f1, f2, ctx.p, prec, common_level=N)
    minus_primes = set(fact1.primes(INERT)) | set(fact2.primes(INERT))
    items = []
    for record, fact, cls in ((f1, fact1, cls1), (f2, fact2, cls2)):
        ok, reason = check_ghh(fact)
        items.append(HypothesisItem("GHH", record.label, HOLDS if ok else FAILS,
                                    (reason,)))
        items.append(check_div(record, fact, ctx.p))
        items.append(check_sqfree(record, fact))
        items.append(check_unit_condition(record, cls, ctx.ring))
        items.extend(check_h0(record, ctx, minus_primes))
    return HypothesisReport(
        f1=f1.label,
        f2=f2.label,
        context=ctx.to_json_dict(),
        strategy=strategy,
        common_level=N,
        items=tuple(items),
        congruence=congruence,
        factorizations={f1.label: fact1, f2.label: fact2},
        classifications={f1.label: cls1, f2.label: cls2},
        witness_primes=witness,
    )
