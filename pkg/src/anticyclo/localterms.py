"""Local correction terms at primes of K.

For a split rational prime q with primes l, l-bar above it, the correction
attached to an eigenform is the series P_l(q^{-1} (1+T)^u) where P_l is the
Euler polynomial on inertia invariants and gamma_l = gamma0^u is the
Frobenius of l in the anticyclotomic tower.  Its lambda-invariant is the
contribution of l to the transfer identities; mu is always zero (asserted).

Inert primes have trivial anticyclotomic Frobenius, so their "terms" are
the constant Euler evaluations that feed the unit condition; they never
contribute lambda.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import isqrt

from . import series as iw
from .eigenforms import Coefficient, EigenformRecord, coeff_to_padic
from .errors import (
    AnticycloError,
    NotCoprime,
    PIsLevel,
    PrecisionExhausted,
    PreconditionFailed,
    SearchExhausted,
)
from .padic import PadicNumber, padic_log, teichmuller_part
from .quadfield import QuadFieldContext
from .series import CERTAIN, IwasawaElement, MuLambda

GOOD = "GOOD"
MULTIPLICATIVE = "MULTIPLICATIVE"
ADDITIVE = "ADDITIVE"

DEFAULT_DEGREE = 64
SAFETY_DEGREE_MARGIN = 8


@dataclass(frozen=True)
class EulerPolynomial:
    q: int
    reduction: str
    coeffs: tuple[Coefficient, ...]  # X^0, X^1, ... ; [1,-a_q,q] / [1,-a_q] / [1]
    warnings: tuple[str, ...] = ()

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def evaluate(self, x: PadicNumber) -> PadicNumber:
        ring = x.ring
        acc = ring.zero(x.prec)
        for c in reversed(self.coeffs):
            acc = acc * x + coeff_to_padic(c, ring, x.prec)
        return acc


def euler_poly(record: EigenformRecord, q: int, p: int | None = None,
               fact=None) -> EulerPolynomial:
    """Euler polynomial of the form at q, classified by the exact power of q
    in the form's own level."""
    if p is not None and q == p:
        raise PIsLevel("no Euler polynomial is taken at q = p")
    if fact is not None and fact.N % q == 0 and fact.exponent(q) == 0:
        raise NotCoprime(f"q = {q} inconsistent with the supplied factorization")
    e = 0
    n = record.level
    while n % q == 0:
        n //= q
        e += 1
    warnings = ()
    if e == 0:
        aq = record.a(q)
        return EulerPolynomial(q, GOOD, (1, _neg(aq, record), q))
    if e == 1:
        aq = record.a(q)
        if isinstance(aq, int) and aq not in (1, -1):
            warnings = (f"multiplicative a_{q} = {aq} is not +-1",)
        return EulerPolynomial(q, MULTIPLICATIVE, (1, _neg(aq, record)), warnings)
    return EulerPolynomial(q, ADDITIVE, (1,))


def _neg(c: Coefficient, record: EigenformRecord) -> Coefficient:
    from .eigenforms import coeff_times_sign

    ring = record.embedding.ring() if record.embedding else None
    return coeff_times_sign(c, -1, ring)


@dataclass(frozen=True)
class FrobeniusExponent:
    q: int
    u: PadicNumber
    vp_u: int
    generator: tuple[int, int]  # (x, y): alpha = (x + y sqrt(d))/2, N(alpha) = q^h
    sign_convention: str
    certainty: str


def _norm_equation(q: int, h: int, d: int):
    """Smallest-y solution of x^2 - d y^2 = 4 q^h with (x, y) not both
    divisible by q, x > 0, y > 0."""
    target = 4 * q ** h
    ymax = isqrt(target // (-d)) + 1
    for y in range(1, ymax + 1):
        t = target + d * y * y
        if t < 0:
            break
        x = isqrt(t)
        if x * x != t or x == 0:
            continue
        if x % q == 0 and y % q == 0:
            continue
        return x, y
    raise SearchExhausted(
        f"no primitive generator of norm {q}^{h} found below y <= {ymax}")


def frobenius_exponent(q: int, ctx: QuadFieldContext,
                       prec: int | None = None) -> FrobeniusExponent:
    """Exponent u with gamma_l = gamma0^u for a prime l above the split q.

    gamma0 is normalized so that its logarithm coordinate is log(1+p); only
    v_p(u) and the unit class of u influence any invariant downstream, and
    replacing l by its conjugate flips u's sign, which is harmless.
    """
    if q == ctx.p:
        raise PIsLevel("q = p carries no anticyclotomic Frobenius exponent")
    if ctx.splitting_of(q) != 1:
        raise PreconditionFailed(f"q = {q} is not split in Q(sqrt({ctx.disc}))")
    ring = ctx.ring
    M = prec if prec is not None else ctx.prec
    x, y = _norm_equation(q, ctx.h, ctx.disc)
    root = ctx.split_root.with_precision(min(M, ctx.split_root.prec))
    half = ring.from_int(2, M).inverse()
    alpha = (ring.from_int(x, M) + ring.from_int(y, M) * root) * half
    alpha_bar = (ring.from_int(x, M) - ring.from_int(y, M) * root) * half
    beta = alpha / alpha_bar
    principal = beta / teichmuller_part(beta)
    log_beta = padic_log(principal)
    if log_beta.is_zero():
        raise PrecisionExhausted(
            f"log of the Frobenius unit at q = {q} vanishes to precision {log_beta.prec}")
    lam0 = padic_log(ring.from_int(1 + ctx.p, M))
    u = log_beta / (ring.from_int(ctx.h, M) * lam0)
    v = u.valuation()
    if v % ring.e:
        raise AnticycloError(f"exponent valuation {v} not divisible by e = {ring.e}")
    return FrobeniusExponent(
        q=q,
        u=u,
        vp_u=v // ring.e,
        generator=(x, y),
        sign_convention="alpha over alpha-bar at the fixed root branch",
        certainty=CERTAIN,
    )


@dataclass(frozen=True)
class LocalTerm:
    q: int
    kind: str  # SPLIT | INERT
    reduction: str
    series: IwasawaElement
    invariants: MuLambda | None
    vp_u: int | None
    lam_contribution: int | None  # summed over all primes of K above q
    value_at_zero: PadicNumber
    source: str
    notes: tuple[str, ...] = ()


def local_term(P: EulerPolynomial, frob: FrobeniusExponent, q: int,
               degree: int = DEFAULT_DEGREE, prec: int | None = None,
               source: str = "") -> LocalTerm:
    """P(q^{-1} (1+T)^u) with its mu/lambda, for a split prime q.

    The working degree is raised to p^{v_p(u)} * deg(P) + margin so that the
    lambda-invariant is always within the truncation window.
    """
    ring = frob.u.ring
    need = ring.p ** frob.vp_u * max(P.degree, 1) + SAFETY_DEGREE_MARGIN
    D = max(degree, need)
    supported = iw.binomial_max_prec(frob.u, D)
    M = min(prec if prec is not None else supported, supported)
    floor_prec = ring.e * (frob.vp_u + 2)
    if M < floor_prec:
        raise PrecisionExhausted(
            f"exponent precision at q = {q} supports only M = {supported}, below "
            f"the floor {floor_prec} needed to resolve the invariants")
    qinv = ring.from_int(q, frob.u.prec).inverse()
    # sum_j P_j q^{-j} (1+T)^{j u}
    total: IwasawaElement | None = None
    for j, cj in enumerate(P.coeffs):
        scalar = coeff_to_padic(cj, ring, M) * qinv ** j
        if j == 0:
            part = iw.constant(ring, scalar, D)
        else:
            exp = frob.u * ring.from_int(j, frob.u.prec)
            part = iw.binomial_series(exp, D, M).scalar_mul(scalar)
        total = part if total is None else total + part
    ml = iw.mu_lambda(total)
    notes = []
    if ml.certainty == CERTAIN:
        if ml.mu != 0:
            raise AnticycloError(
                f"local term at q = {q} has mu = {ml.mu} != 0: this breaks a "
                "structural invariant and indicates a bug")
        lam_contribution = 2 * ml.lam
    else:
        notes.append("invariants are precision-limited; contribution unknown")
        lam_contribution = None
    return LocalTerm(
        q=q,
        kind="SPLIT",
        reduction=P.reduction,
        series=total,
        invariants=ml,
        vp_u=frob.vp_u,
        lam_contribution=lam_contribution,
        value_at_zero=total.constant_term(),
        source=source,
        notes=tuple(notes),
    )


def inert_term(record: EigenformRecord, P: EulerPolynomial, q: int,
               ctx: QuadFieldContext, degree: int = DEFAULT_DEGREE,
               prec: int | None = None, source: str = "") -> LocalTerm:
    """Constant term attached to an inert prime: the anticyclotomic Frobenius
    of (q) is trivial, so the degree-2 norm convention evaluates the Euler
    factor of Frob_{q^2} at q^{-2}.  lambda is always 0 here."""
    ring = ctx.ring
    M = prec if prec is not None else ctx.prec
    qq = ring.from_int(q, M)
    qinv2 = (qq * qq).inverse()
    if P.reduction == GOOD:
        aq = record.a_padic(q, ring, M)
        a_q2 = aq * aq - qq - qq  # a_{q^2} = a_q^2 - 2q
        value = ring.one(M) - a_q2 * qinv2 + qq * qq * qinv2 * qinv2
    elif P.reduction == MULTIPLICATIVE:
        aq = record.a_padic(q, ring, M)
        value = ring.one(M) - aq * aq * qinv2
    else:
        value = ring.one(M)
    series = iw.constant(ring, value, degree)
    v = value.valuation()
    notes = ()
    if not isinstance(v, int) or v > 0:
        notes = (f"inert Euler value at q = {q} is not a unit (feeds the unit condition)",)
    return LocalTerm(
        q=q,
        kind="INERT",
        reduction=P.reduction,
        series=series,
        invariants=None,
        vp_u=None,
        lam_contribution=0,
        value_at_zero=value,
        source=source,
        notes=notes,
    )


@dataclass(frozen=True)
class LambdaRow:
    q: int
    kind: str
    reduction: str
    vp_u: int | None
    lam_per_prime: int | None
    primes_above: int
    contribution: int | None
    certainty: str
    mu: int | None = 0

    def to_json_dict(self) -> dict:
        return {
            "q": self.q,
            "class": self.kind,
            "reduction": self.reduction,
            "u_valuation": self.vp_u,
            "mu": self.mu,
            "lambda": self.lam_per_prime,
            "primes_above": self.primes_above,
            "contribution": self.contribution,
            "certainty": self.certainty,
        }


@dataclass(frozen=True)
class LambdaTable:
    form_label: str
    rows: tuple[LambdaRow, ...]

    def total(self) -> int | None:
        """Sum over all primes of K above the listed rational primes; None
        propagates any unknown row."""
        out = 0
        for row in self.rows:
            if row.contribution is None:
                return None
            out += row.contribution
        return out

    def row_for(self, q: int) -> LambdaRow:
        for row in self.rows:
            if row.q == q:
                return row
        raise KeyError(q)

    def to_json_dict(self) -> dict:
        return {"form": self.form_label,
                "rows": [r.to_json_dict() for r in self.rows],
                "total": self.total()}


def lambda_table(record: EigenformRecord, primes, ctx: QuadFieldContext,
                 degree: int = DEFAULT_DEGREE, prec: int | None = None,
                 require_split: bool = False) -> LambdaTable:
    """Per-prime local lambda data for a form over the listed rational primes."""
    rows = []
    for q in sorted(set(primes)):
        s = ctx.splitting_of(q)
        if s == 0:
            raise NotCoprime(f"q = {q} ramifies in K")
        P = euler_poly(record, q, p=ctx.p)
        if s == 1:
            frob = frobenius_exponent(q, ctx, prec=prec)
            lt = local_term(P, frob, q, degree=degree, prec=prec, source=record.label)
            ml = lt.invariants
            rows.append(LambdaRow(
                q=q, kind="SPLIT", reduction=P.reduction, vp_u=lt.vp_u,
                lam_per_prime=None if ml.certainty != CERTAIN else ml.lam,
                primes_above=2,
                contribution=lt.lam_contribution,
                certainty=ml.certainty,
                mu=ml.mu if ml.certainty == CERTAIN else None,
            ))
        else:
            if require_split:
                raise PreconditionFailed(
                    f"q = {q} is inert but this sum only admits split primes")
            lt = inert_term(record, P, q, ctx, degree=degree, prec=prec,
                            source=record.label)
            rows.append(LambdaRow(
                q=q, kind="INERT", reduction=P.reduction, vp_u=None,
                lam_per_prime=0, primes_above=1, contribution=0,
                certainty=CERTAIN, mu=None,
            ))
    return LambdaTable(record.label, tuple(rows))


def sum_local_lambdas(record: EigenformRecord, primes, ctx: QuadFieldContext,
                      degree: int = DEFAULT_DEGREE, prec: int | None = None):
    """Total lambda over all primes of K above `primes`, with the per-prime
    table; the total is None when any row is precision-limited."""
    table = lambda_table(record, primes, ctx, degree=degree, prec=prec)
    return table.total(), table
