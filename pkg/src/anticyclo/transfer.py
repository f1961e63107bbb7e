"""Headline identity evaluation: algebraic and analytic lambda transfer,
main-conjecture propagation, Heegner congruence constants and the mu = 0
certificate pipeline.

lambda(Sel) and lambda(L) are abstract nonnegative integers supplied by the
caller (or synthesized by tests); this engine never claims to compute them
from first principles.  What it does compute are the local correction sums,
and it refuses to emit a transferred value unless every gating hypothesis
verdict HOLDS or was explicitly overridden.
"""

from __future__ import annotations

import importlib.resources
from dataclasses import dataclass

from . import localterms as lt
from .eigenforms import (
    EigenformRecord,
    check_congruence,
    check_partial_eisenstein,
    load_form,
    twist,
)
from .errors import (
    HypothesisNotMet,
    NegativeResult,
    ParityViolation,
    PreconditionFailed,
    UnknownLocalTerm,
)
from .hypotheses import (
    HOLDS,
    RELAXED,
    SQUARE,
    UNKNOWN,
    HypothesisReport,
    NtildeClassification,
    classify_ntilde,
    hypothesis_report,
)
from .localterms import LambdaTable, euler_poly
from .padic import PadicNumber
from .quadfield import SPLIT, QuadFieldContext, trial_factor

ALGEBRAIC = "ALGEBRAIC"
ANALYTIC = "ANALYTIC"
PROPAGATED = "PROPAGATED"
CONFLICT = "CONFLICT"
CONGRUENT = "CONGRUENT"
NOT_CONGRUENT = "NOT_CONGRUENT"

RULE_ALGEBRAIC = ("algebraic transfer: lambda(dual Selmer, f2) = lambda(dual Selmer, f1)"
                  " + sum over primes of K above the split level primes of the local"
                  " lambda corrections for f1 minus the same sum for f2")
RULE_ANALYTIC = ("analytic transfer: 2 lambda(L, f2) = 2 lambda(L, f1) + sum over"
                 " split level-jump primes of the local lambda corrections for f1"
                 " minus the same sum for f2; the difference of sums must be even")
RULE_IMC_STEP = ("main-conjecture propagation step: for each form the split-level"
                 " correction sum equals the level-jump correction sum, because"
                 " additive primes carry coefficient 0 and a unit local term")


def sigma0_primes(f1: EigenformRecord, f2: EigenformRecord,
                  report: HypothesisReport) -> list[int]:
    """Primes dividing N1+ * N2+ (always split by construction)."""
    out = set()
    for fact in report.factorizations.values():
        out.update(fact.primes(SPLIT))
    return sorted(out)


def _require(report: HypothesisReport, names, labels, overrides) -> list[str]:
    failures = []
    for name in names:
        if name in overrides:
            continue
        for label in labels:
            v = report.verdict(name, label)
            if v != HOLDS:
                failures.append(f"({name}) is {v} for {label}")
    if report.congruence.holds is False and "cong" not in overrides:
        failures.append("coefficient congruence fails: witnesses "
                        f"{list(report.congruence.witnesses)}")
    return failures


def _sum_or_raise(table: LambdaTable) -> int:
    total = table.total()
    if total is None:
        raise UnknownLocalTerm(
            f"local table for {table.form_label} contains a precision-limited row")
    return total


def transfer_algebraic(lambda_in: int, f_from: EigenformRecord, f_to: EigenformRecord,
                       ctx: QuadFieldContext, *, assert_fg_mu: bool = False,
                       report: HypothesisReport | None = None,
                       tables: dict[str, LambdaTable] | None = None,
                       overrides=(), degree: int = lt.DEFAULT_DEGREE,
                       prec: int | None = None):
    """Transfer lambda of the dual Selmer group from f_from to f_to.

    Requires (H0) to HOLD for both forms and the finite-generation + mu = 0
    input to be asserted for the source form.
    """
    if lambda_in < 0:
        raise NegativeResult("lambda input must be nonnegative")
    if not assert_fg_mu and "fg" not in overrides:
        raise HypothesisNotMet(
            "finite generation and mu = 0 of the source dual Selmer group must "
            "be asserted (--assert-fg)")
    if report is None:
        report = hypothesis_report(f_from, f_to, ctx)
    failures = _require(report, ["GHH", "H0"], [f_from.label, f_to.label], overrides)
    if failures:
        raise HypothesisNotMet("; ".join(failures))
    sigma0 = sigma0_primes(f_from, f_to, report)
    if tables is None:
        tables = {
            rec.label: lt.lambda_table(rec, sigma0, ctx, degree=degree, prec=prec,
                                       require_split=True)
            for rec in (f_from, f_to)
        }
    sum_from = _sum_or_raise(tables[f_from.label])
    sum_to = _sum_or_raise(tables[f_to.label])
    lambda_out = lambda_in + sum_from - sum_to
    if lambda_out < 0:
        raise NegativeResult(
            f"transferred lambda {lambda_out} < 0: inconsistent inputs "
            f"(lambda_in={lambda_in}, sums {sum_from} vs {sum_to})")
    detail = {
        "rule": RULE_ALGEBRAIC,
        "sigma0": sigma0,
        "lambda_in": lambda_in,
        "sum_from": sum_from,
        "sum_to": sum_to,
        "lambda_out": lambda_out,
    }
    return lambda_out, detail, report, tables


def transfer_analytic(lambda_in: int, f_from: EigenformRecord, f_to: EigenformRecord,
                      ctx: QuadFieldContext, *, assert_alpha_unit: bool = False,
                      assert_mu: bool = False, strategy: str = RELAXED,
                      common_level: int | None = None,
                      report: HypothesisReport | None = None,
                      tables: dict[str, LambdaTable] | None = None,
                      overrides=(), degree: int = lt.DEFAULT_DEGREE,
                      prec: int | None = None):
    """Transfer lambda of the Heegner-type L-function from f_from to f_to.

    Requires (div), (sq-fr) and (unit) to HOLD for both forms, plus the
    assertion that alpha(f_from) is a unit and mu(L(f_from)) = 0.  The
    correction-sum difference must be even (each split prime contributes
    twice); an odd difference signals inconsistent inputs.
    """
    if lambda_in < 0:
        raise NegativeResult("lambda input must be nonnegative")
    if (not assert_alpha_unit or not assert_mu) and "alpha-mu" not in overrides:
        raise HypothesisNotMet(
            "alpha(f_from) unit and mu(L(f_from)) = 0 must be asserted "
            "(--assert-alpha-unit --assert-mu)")
    if report is None:
        report = hypothesis_report(f_from, f_to, ctx, strategy=strategy)
    failures = _require(report, ["GHH", "div", "sq-fr", "unit"],
                        [f_from.label, f_to.label], overrides)
    if failures:
        raise HypothesisNotMet("; ".join(failures))
    N = common_level if common_level is not None else report.common_level
    cls_from = classify_ntilde(N, f_from.level, ctx, report.witness_primes)
    cls_to = classify_ntilde(N, f_to.level, ctx, report.witness_primes)
    if tables is None:
        tables = {}
        for rec, cls in ((f_from, cls_from), (f_to, cls_to)):
            primes = cls.primes("N3")
            tables[rec.label] = lt.lambda_table(rec, primes, ctx, degree=degree,
                                                prec=prec, require_split=True)
    sum_from = _sum_or_raise(tables[f_from.label])
    sum_to = _sum_or_raise(tables[f_to.label])
    diff = sum_from - sum_to
    if diff % 2:
        raise ParityViolation(
            f"correction-sum difference {diff} is odd: 2*lambda cannot match "
            "(inconsistent inputs or an unknown local term)")
    lambda_out = lambda_in + diff // 2
    if lambda_out < 0:
        raise NegativeResult(
            f"transferred lambda {lambda_out} < 0: inconsistent inputs")
    detail = {
        "rule": RULE_ANALYTIC,
        "common_level": N,
        "ntilde_from": cls_from.to_json_dict(),
        "ntilde_to": cls_to.to_json_dict(),
        "lambda_in": lambda_in,
        "sum_from": sum_from,
        "sum_to": sum_to,
        "parity_even": True,
        "lambda_out": lambda_out,
    }
    return lambda_out, detail, report, tables


@dataclass(frozen=True)
class ImcOutcome:
    status: str  # PROPAGATED | CONFLICT
    lambda_sel_out: int | None
    lambda_L_out: int | None
    failing_equation: str | None
    detail: dict

    def to_json_dict(self) -> dict:
        return {
            "status": self.status,
            "lambda_sel_f2": self.lambda_sel_out,
            "lambda_L_f2": self.lambda_L_out,
            "failing_equation": self.failing_equation,
            "detail": self.detail,
        }


def imc_propagate(f1: EigenformRecord, f2: EigenformRecord, ctx: QuadFieldContext,
                  lambda_sel1: int, lambda_L1: int, *,
                  assert_full_equality_f1: bool = False,
                  assert_one_inclusion_f2: bool = False,
                  assert_alpha_unit: bool = False, assert_mu: bool = False,
                  strategy: str = SQUARE,
                  report: HypothesisReport | None = None,
                  tables_sigma0: dict[str, LambdaTable] | None = None,
                  tables_ntilde: dict[str, LambdaTable] | None = None,
                  overrides=(), degree: int = lt.DEFAULT_DEGREE,
                  prec: int | None = None) -> ImcOutcome:
    """Propagate the full main-conjecture equality from f1 to f2.

    Mirrors the proof chain: validate lambda(Sel, f1) = 2 lambda(L, f1), run
    both transfers, check that the split-level sum agrees with the level-jump
    sum for each form, and compare the two transferred values.
    """
    if not (assert_full_equality_f1 and assert_one_inclusion_f2) \
            and "imc-flags" not in overrides:
        raise HypothesisNotMet(
            "the full equality for f1 and one inclusion for f2 must be asserted")
    if not (assert_alpha_unit and assert_mu) and "alpha-mu" not in overrides:
        raise HypothesisNotMet(
            "alpha(f1) unit and mu(L(f1)) = 0 must be asserted for propagation")
    if report is None:
        report = hypothesis_report(f1, f2, ctx, strategy=strategy)
    failures = _require(report, ["GHH", "H0", "div", "sq-fr", "unit"],
                        [f1.label, f2.label], overrides)
    if failures:
        raise HypothesisNotMet("; ".join(failures))
    detail: dict = {"lambda_sel_f1": lambda_sel1, "lambda_L_f1": lambda_L1,
                    "rule": RULE_IMC_STEP}
    if lambda_sel1 != 2 * lambda_L1:
        return ImcOutcome(CONFLICT, None, None,
                          f"input validation: lambda(Sel, f1) = {lambda_sel1} != "
                          f"2 lambda(L, f1) = {2 * lambda_L1}", detail)
    # full equality for f1 with mu(L) = 0 pins down cotorsion and mu(Sel) = 0,
    # which is exactly the algebraic-side assertion
    lambda_sel2, alg_detail, report, tables_sigma0 = transfer_algebraic(
        lambda_sel1, f1, f2, ctx, assert_fg_mu=True, report=report,
        tables=tables_sigma0, overrides=overrides, degree=degree, prec=prec)
    lambda_L2, ana_detail, report, tables_ntilde = transfer_analytic(
        lambda_L1, f1, f2, ctx, assert_alpha_unit=True, assert_mu=True,
        strategy=strategy, report=report, tables=tables_ntilde,
        overrides=overrides, degree=degree, prec=prec)
    detail["algebraic"] = alg_detail
    detail["analytic"] = ana_detail
    # proof step: for each form, the split-level sum equals the level-jump sum
    for rec in (f1, f2):
        s_sigma = tables_sigma0[rec.label].total()
        s_n3 = tables_ntilde[rec.label].total()
        if s_sigma != s_n3:
            return ImcOutcome(
                CONFLICT, None, None,
                f"{RULE_IMC_STEP}; violated for {rec.label}: split-level sum "
                f"{s_sigma} != level-jump sum {s_n3}", detail)
    if lambda_sel2 != 2 * lambda_L2:
        return ImcOutcome(
            CONFLICT, lambda_sel2, lambda_L2,
            f"transferred invariants disagree: lambda(Sel, f2) = {lambda_sel2} "
            f"!= 2 lambda(L, f2) = {2 * lambda_L2}", detail)
    return ImcOutcome(PROPAGATED, lambda_sel2, lambda_L2, None, detail)


# ---------------------------------------------------------------------------
# Heegner congruence constants


@dataclass(frozen=True)
class HeegnerFactor:
    kind: str
    q: int
    description: str
    valuation: object
    value: str  # decimal string of the canonical representative

    def to_json_dict(self) -> dict:
        return {"kind": self.kind, "q": self.q, "description": self.description,
                "valuation": repr(self.valuation), "value": self.value}


@dataclass(frozen=True)
class HeegnerConstants:
    form: str
    factors: tuple[HeegnerFactor, ...]
    normalized_product: PadicNumber  # product with the p-factor cleared by p^2
    p_power: int  # the cleared power: value = normalized * p^p_power
    alpha_exact: int | None  # 1 when N- = 1, None when only asserted
    notes: tuple[str, ...]

    def to_json_dict(self) -> dict:
        return {
            "form": self.form,
            "factors": [f.to_json_dict() for f in self.factors],
            "normalized_product": str(self.normalized_product.lift()),
            "normalized_valuation": repr(self.normalized_product.valuation()),
            "p_power": self.p_power,
            "alpha": self.alpha_exact,
            "notes": list(self.notes),
        }


def heegner_constants(record: EigenformRecord, cls: NtildeClassification,
                      ctx: QuadFieldContext, prec: int = 6,
                      n_minus: int | None = None) -> HeegnerConstants:
    """Itemized congruence constant attached to one form: the inert Euler
    factors (N1~/N2~ shapes), the Euler values at the M3 witness primes, and
    the p-factor (1 - b_p/p + 1/p)^2 normalized by p^2 to stay integral."""
    ring = ctx.ring
    factors = []
    notes = []
    product = ring.one(prec)
    for q in cls.primes("N1"):
        b = record.a_padic(q, ring, prec)
        qinv = ring.from_int(q, prec).inverse()
        one = ring.one(prec)
        val = (one + qinv - b * qinv) * (one + qinv + b * qinv)
        factors.append(_factor("inert-new", q, "(1 + 1/q - b_q/q)(1 + 1/q + b_q/q)", val))
        product = product * val
    for q in cls.primes("N2"):
        b = record.a_padic(q, ring, prec)
        qinv = ring.from_int(q, prec).inverse()
        one = ring.one(prec)
        val = (one - b * qinv) * (one + b * qinv)
        factors.append(_factor("inert-shared", q, "(1 - b_q/q)(1 + b_q/q)", val))
        product = product * val
    for q in cls.m3_primes():
        P = euler_poly(record, q, p=ctx.p)
        qinv = ring.from_int(q, prec).inverse()
        v0 = P.evaluate(qinv)
        val = v0 * v0
        shape = "(1 - b_q/q + 1/q)^2" if P.reduction == "GOOD" else \
            ("(1 - b_q/q)^2" if P.reduction == "MULTIPLICATIVE" else "1")
        factors.append(_factor("witness-split", q, f"Euler value squared: {shape}", val))
        vv = val.valuation()
        if not isinstance(vv, int) or vv > 0:
            notes.append(f"witness factor at q = {q} has positive valuation: "
                         "it forces both sides of the congruence to 0")
        product = product * val
    bp = record.a_padic(ctx.p, ring, prec)
    pfac = ring.from_int(ctx.p + 1, prec) - bp
    pfac2 = pfac * pfac
    factors.append(_factor("p-factor", ctx.p,
                           "(1 - b_p/p + 1/p)^2 cleared by p^2: (p + 1 - b_p)^2",
                           pfac2))
    product = product * pfac2
    alpha = None
    if n_minus == 1:
        alpha = 1
        notes.append("N- = 1 so alpha = 1 exactly")
    else:
        notes.append("alpha is a Petersson ratio: only its unit class can be asserted")
    return HeegnerConstants(record.label, tuple(factors), product, -2, alpha,
                            tuple(notes))


def _factor(kind, q, desc, val: PadicNumber) -> HeegnerFactor:
    v = val.valuation()
    return HeegnerFactor(kind, q, desc, v,
                         str(val.lift()) if (isinstance(v, int) and v >= 0)
                         or not isinstance(v, int) else f"pi^{v} unit")


@dataclass(frozen=True)
class HeegnerComparison:
    verdict: str  # CONGRUENT | NOT_CONGRUENT | UNKNOWN
    constants: tuple[HeegnerConstants, HeegnerConstants]
    reason: str

    def to_json_dict(self) -> dict:
        return {"verdict": self.verdict, "reason": self.reason,
                "sides": [c.to_json_dict() for c in self.constants]}


def compare_heegner(f1: EigenformRecord, f2: EigenformRecord, ctx: QuadFieldContext,
                    strategy: str = RELAXED, prec: int = 6,
                    report: HypothesisReport | None = None) -> HeegnerComparison:
    """Compare the computable congruence constants of the two forms mod pi.

    The actual congruence statement carries the formal-group logarithms of
    the Heegner points, which are out of reach here; what is compared is the
    product of constants multiplying them, with both sides normalized by the
    same power of p.  UNKNOWN when an alpha cannot be pinned to 1 exactly or
    an inert factor fails to be a unit.
    """
    if report is None:
        report = hypothesis_report(f1, f2, ctx, strategy=strategy)
    sides = []
    for rec in (f1, f2):
        cls = report.classifications[rec.label]
        n_minus = report.factorizations[rec.label].N_minus
        sides.append(heegner_constants(rec, cls, ctx, prec=prec, n_minus=n_minus))
    c1, c2 = sides
    if c1.alpha_exact != 1 or c2.alpha_exact != 1:
        return HeegnerComparison(UNKNOWN, (c1, c2),
                                 "alpha not exactly 1 on at least one side")
    for c in sides:
        for f in c.factors:
            if f.kind in ("inert-new", "inert-shared") and f.valuation != 0:
                return HeegnerComparison(
                    UNKNOWN, (c1, c2),
                    f"inert factor at q = {f.q} on {c.form} is not a unit")
    diff = c1.normalized_product - c2.normalized_product
    v = diff.valuation()
    congruent = not isinstance(v, int) or v >= 1
    return HeegnerComparison(
        CONGRUENT if congruent else NOT_CONGRUENT, (c1, c2),
        "normalized constants agree mod pi" if congruent
        else f"normalized constants differ: valuation of difference = {v}")


# ---------------------------------------------------------------------------
# mu = 0 certificates


@dataclass(frozen=True)
class TransferReport:
    """Everything a transfer run produced, ready for serialization: the gating
    hypothesis report, the local-term tables, the transferred value(s) and the
    per-step rule citations.  A transferred value appears only when every
    required hypothesis verdict HOLDS or was explicitly overridden (overrides
    are recorded in the inputs block)."""

    mode: str
    status: str
    inputs: dict
    hypotheses: HypothesisReport | None = None
    tables: dict | None = None
    transfer: dict | None = None
    lambda_out: int | None = None
    imc: ImcOutcome | None = None
    heegner: HeegnerComparison | None = None
    certificate: "MuCertificate | None" = None

    def to_json_dict(self) -> dict:
        out = {"mode": self.mode, "status": self.status, "inputs": self.inputs}
        if self.hypotheses is not None:
            out["hypotheses"] = self.hypotheses.to_json_dict()
        if self.tables is not None:
            out["tables"] = {k: t.to_json_dict() for k, t in self.tables.items()}
        if self.transfer is not None:
            out["transfer"] = self.transfer
        if self.lambda_out is not None:
            out["lambda_out"] = self.lambda_out
        if self.imc is not None:
            out["imc"] = self.imc.to_json_dict()
        if self.heegner is not None:
            out["heegner"] = self.heegner.to_json_dict()
        if self.certificate is not None:
            out["certificate"] = self.certificate.to_json_dict()
        return out


def run_transfer(mode: str, f1: EigenformRecord, f2: EigenformRecord | None,
                 ctx: QuadFieldContext, *, lambda_in: int = 0,
                 lambda_sel: int = 0, lambda_l: int = 0,
                 assert_fg: bool = False, assert_alpha_unit: bool = False,
                 assert_mu: bool = False, assert_imc_full_f1: bool = False,
                 assert_imc_one_inclusion_f2: bool = False,
                 strategy: str | None = None, overrides=(),
                 degree: int = lt.DEFAULT_DEGREE, prec: int | None = None,
                 chi: int | None = None, decomposition=None,
                 side: str = ALGEBRAIC) -> TransferReport:
    """Orchestrate one transfer-identity evaluation into a TransferReport."""
    inputs = {
        "f1": f1.label, "f2": f2.label if f2 else None,
        "disc": ctx.disc, "prime": ctx.p, "precision": ctx.prec,
        "degree": degree, "strategy": strategy or RELAXED,
        "asserts": {
            "fg": assert_fg, "alpha_unit": assert_alpha_unit, "mu": assert_mu,
            "imc_full_f1": assert_imc_full_f1,
            "imc_one_inclusion_f2": assert_imc_one_inclusion_f2,
        },
        "overrides": list(overrides),
    }
    if mode == "mu-cert":
        cert = mu_certificate(f1, chi, decomposition, ctx, side=side)
        return TransferReport("mu-cert", "OK", inputs, certificate=cert)
    if f2 is None:
        raise HypothesisNotMet(f"mode {mode} needs a second form")
    report = hypothesis_report(f1, f2, ctx, strategy=strategy or RELAXED)
    if mode == "algebraic":
        lam, detail, report, tables = transfer_algebraic(
            lambda_in, f1, f2, ctx, assert_fg_mu=assert_fg, report=report,
            overrides=overrides, degree=degree, prec=prec)
        return TransferReport("algebraic", "OK", inputs, hypotheses=report,
                              tables=tables, transfer=detail, lambda_out=lam)
    if mode == "analytic":
        lam, detail, report, tables = transfer_analytic(
            lambda_in, f1, f2, ctx, assert_alpha_unit=assert_alpha_unit,
            assert_mu=assert_mu, strategy=strategy or RELAXED, report=report,
            overrides=overrides, degree=degree, prec=prec)
        return TransferReport("analytic", "OK", inputs, hypotheses=report,
                              tables=tables, transfer=detail, lambda_out=lam)
    if mode == "imc":
        outcome = imc_propagate(
            f1, f2, ctx, lambda_sel, lambda_l,
            assert_full_equality_f1=assert_imc_full_f1,
            assert_one_inclusion_f2=assert_imc_one_inclusion_f2,
            assert_alpha_unit=assert_alpha_unit, assert_mu=assert_mu,
            strategy=strategy or SQUARE, report=report, overrides=overrides,
            degree=degree, prec=prec)
        return TransferReport("imc", outcome.status, inputs, hypotheses=report,
                              imc=outcome)
    if mode == "heegner":
        comparison = compare_heegner(f1, f2, ctx, strategy=strategy or RELAXED,
                                     report=report)
        return TransferReport("heegner", comparison.verdict, inputs,
                              hypotheses=report, heegner=comparison)
    raise ValueError(f"unknown transfer mode {mode!r}")


_REFERENCE = {
    5: ("11a.2", "form_11a.json"),
    3: ("19.a2", "form_19a.json"),
}


def _load_reference(p: int) -> tuple[str, EigenformRecord]:
    curve, fname = _REFERENCE[p]
    path = importlib.resources.files("anticyclo.data") / fname
    with importlib.resources.as_file(path) as fp:
        return curve, load_form(fp)


@dataclass(frozen=True)
class MuCertificate:
    side: str
    p: int
    form: str
    chi_disc: int
    reference_curve: str
    reference_form: str
    conclusion: str
    rule: str
    evidence: tuple[str, ...]
    congruence: dict

    def to_json_dict(self) -> dict:
        return {
            "side": self.side,
            "p": self.p,
            "form": self.form,
            "chi_disc": self.chi_disc,
            "reference_curve": self.reference_curve,
            "reference_form": self.reference_form,
            "conclusion": self.conclusion,
            "rule": self.rule,
            "evidence": list(self.evidence),
            "congruence": self.congruence,
        }


def mu_certificate(record: EigenformRecord, chi_disc: int, decomposition,
                   ctx: QuadFieldContext, side: str = ALGEBRAIC) -> MuCertificate:
    """Certificate that the relevant mu-invariant of the form vanishes.

    Preconditions (checked in order, first failure refuses): p in {3, 5};
    chi quadratic with chi(p) = -1; partial Eisenstein descent of the form by
    (chi, chi, N1, N2, N0); every prime of N * cond(chi) split in K (so the
    inert part is trivial); 11 and 19 split in K.
    """
    p = ctx.p
    if side not in (ALGEBRAIC, ANALYTIC):
        raise ValueError(f"unknown side {side!r}")
    if p not in _REFERENCE:
        raise PreconditionFailed(f"p = {p} is outside the supported set {{3, 5}}")
    from .quadfield import is_fundamental_discriminant, kronecker

    if chi_disc == 1 or not is_fundamental_discriminant(chi_disc):
        raise PreconditionFailed(f"chi must be a nontrivial quadratic character "
                                 f"(got discriminant {chi_disc})")
    if kronecker(chi_disc, p) != -1:
        raise PreconditionFailed(f"chi(p) = {kronecker(chi_disc, p)} != -1")
    n1, n2, n0 = decomposition
    descent = check_partial_eisenstein(record, chi_disc, chi_disc, n1, n2, n0, p)
    if not descent.holds:
        raise PreconditionFailed(
            f"partial Eisenstein descent fails at {list(descent.witnesses)[:4]}")
    cond = abs(chi_disc)
    evidence = [f"partial Eisenstein descent by (chi, chi, {n1}, {n2}, {n0}) "
                f"verified over {descent.checked_primes} primes"]
    for q, _e in trial_factor(record.level * cond):
        if q == p:
            raise PreconditionFailed(f"p = {p} divides N * cond(chi)")
        if ctx.splitting_of(q) != 1:
            raise PreconditionFailed(
                f"prime q = {q} of N * cond(chi) is not split in K: the inert "
                "part must be trivial")
    evidence.append(f"all primes of N * cond(chi) = {record.level * cond} split in K")
    for q in (11, 19):
        if ctx.splitting_of(q) != 1:
            raise PreconditionFailed(f"{q} does not split in K")
    evidence.append("11 and 19 split in K")
    curve, reference = _load_reference(p)
    g = twist(reference, chi_disc)
    ref_descent = check_partial_eisenstein(
        g, chi_disc, chi_disc, reference.level, 1, g.level // reference.level, p)
    evidence.append(
        f"reference twist {g.label} has the same descent pattern: {ref_descent.holds}")
    if not ref_descent.holds:
        raise PreconditionFailed("reference twist lost its Eisenstein descent "
                                 "(inconsistent character data)")
    congruence = check_congruence(record, g, p, 1)
    if congruence.holds is False:
        raise PreconditionFailed(
            f"coefficients of the form and the reference twist disagree at "
            f"{list(congruence.witnesses)[:4]}")
    if side == ALGEBRAIC:
        conclusion = "mu(dual Selmer) = 0"
        rule = ("imprimitive lambda-correction identity for dual Selmer groups of "
                "residually isomorphic forms, anchored at the Eisenstein reference "
                "twist whose mu-invariant vanishes")
    else:
        conclusion = "mu(anticyclotomic Heegner-type L-function) = 0"
        rule = ("lambda-transfer identity for anticyclotomic Heegner-type "
                "L-functions, anchored at the reference twist: its alpha is 1 and "
                "its mu-invariant vanishes")
        evidence.append("reference has trivial inert level part, so alpha = 1 and "
                        "the divisibility and unit conditions are vacuous")
    return MuCertificate(
        side=side,
        p=p,
        form=record.label,
        chi_disc=chi_disc,
        reference_curve=curve,
        reference_form=reference.label,
        conclusion=conclusion,
        rule=rule,
        evidence=tuple(evidence),
        congruence=congruence.to_json_dict(),
    )
