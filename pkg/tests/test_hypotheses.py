import pytest

from anticyclo.eigenforms import EigenformRecord
from anticyclo.errors import NotDivisible
from anticyclo.hypotheses import (
    FAILS,
    HOLDS,
    RELAXED,
    SQUARE,
    UNKNOWN,
    NtildeClassification,
    check_div,
    check_h0,
    check_sqfree,
    check_unit_condition,
    choose_common_level,
    classify_ntilde,
    hypothesis_report,
)
from anticyclo.padic import local_ring
from anticyclo.quadfield import (
    QuadFieldContext,
    factor_level,
    is_fundamental_discriminant,
    kronecker,
)

from conftest import make_synthetic_pair
from oracles import synth_eigen_coeffs


def find_disc(split=(), inert=(), avoid_h_divisible_by=None):
    for d in range(-3, -2000, -1):
        if not is_fundamental_discriminant(d):
            continue
        if any(d % q == 0 for q in (*split, *inert)):
            continue
        if all(kronecker(d, q) == 1 for q in split) and \
                all(kronecker(d, q) == -1 for q in inert):
            if avoid_h_divisible_by:
                from anticyclo.quadfield import class_number

                if class_number(d) % avoid_h_divisible_by == 0:
                    continue
            return d
    raise AssertionError("no discriminant found")


def test_classify_ntilde(ctx71):
    cls = classify_ntilde(36, 2, ctx71)  # 2 and 3 split in Q(sqrt(-71))
    assert (cls.n1, cls.n2, cls.n3) == (1, 1, 6)
    cls = classify_ntilde(2, 2, ctx71)
    assert (cls.n1, cls.n2, cls.n3) == (1, 1, 1)
    with pytest.raises(NotDivisible):
        classify_ntilde(4, 3, ctx71)


def test_classify_ntilde_inert_roles():
    ctx = QuadFieldContext.create(-7, 11, prec=8)  # 3, 5 inert; 2 split
    cls = classify_ntilde(900, 3, ctx)  # 900 = 2^2 * 3^2 * 5^2
    assert cls.n2 == 3  # shared inert prime
    assert cls.n1 == 5  # new inert prime
    assert cls.n3 == 2  # split jump prime
    roles = [q for q, _r in cls.roles]
    assert len(roles) == len(set(roles))  # partition: no prime in two classes


def test_ntilde_witness_refinement(ctx71):
    cls = classify_ntilde(36, 2, ctx71, witness_primes=(3,))
    assert cls.m3 == 3 and cls.m1 == cls.m2 == 1


def test_unit_condition(ctx71):
    ring = local_ring(5)
    rec0 = EigenformRecord("u0", 3, 2, tuple(synth_eigen_coeffs(3, lambda q: 0, 50)))
    # empty product = 1
    cls = NtildeClassification(3, 3, 1, 1, 1, ())
    assert check_unit_condition(rec0, cls, ring).verdict == HOLDS
    # b_q = 1 + q mod pi at an N1~ prime: q = 19, b = 0 = 20 mod 5 -> FAILS
    cls = NtildeClassification(3 * 19 ** 2, 3, 19, 1, 1, ((19, "N1"),))
    assert check_unit_condition(rec0, cls, ring).verdict == FAILS
    # q = 17: (1+17)^2 - 0 = 324 = 4 mod 5 -> HOLDS
    cls = NtildeClassification(3 * 17 ** 2, 3, 17, 1, 1, ((17, "N1"),))
    assert check_unit_condition(rec0, cls, ring).verdict == HOLDS
    # N2~ shape: (q - b)(q + b) with q = 5k: q = 15 is not prime; use q = 5? q must
    # be a prime different from p; q = 13, b = 0: 169 = 4 mod 5 -> HOLDS
    cls = NtildeClassification(3 * 13 ** 3, 3 * 13, 1, 13, 1, ((13, "N2"),))
    rec13 = EigenformRecord("u13", 39, 2,
                            tuple(synth_eigen_coeffs(39, lambda q: 0, 50)))
    assert check_unit_condition(rec13, cls, ring).verdict == HOLDS
    # b = 13 = 3 mod 5 makes q^2 - b^2 = 0 -> FAILS
    rec_bad = EigenformRecord("ub", 39, 2,
                              tuple(synth_eigen_coeffs(39, lambda q: 13 if q == 13 else 0, 50)))
    assert check_unit_condition(rec_bad, cls, ring).verdict == FAILS


def test_unit_factor_identity(rng):
    """(1+q-b)(1+q+b) == (1+q)^2 - b^2: engine's padic route vs exact ints."""
    ring = local_ring(7)
    for _ in range(200):
        q = rng.randrange(2, 10 ** 6)
        b = rng.randrange(-10 ** 3, 10 ** 3)
        lhs = ring.from_int(1 + q - b, 8) * ring.from_int(1 + q + b, 8)
        rhs = ring.from_int((1 + q) ** 2 - b * b, 8)
        assert (lhs - rhs).is_zero()


def test_check_div(form_11a):
    assert check_div(form_11a, factor_level(11, -7), 5).verdict == HOLDS  # N- = 1
    fact = factor_level(11, -20)  # kron(-20, 11) = -1: inert
    assert fact.N_minus == 11
    assert check_div(form_11a, fact, 5).verdict == FAILS  # 5 | q - 1 = 10
    assert check_div(form_11a, fact, 7).verdict == HOLDS


def test_check_sqfree():
    rec9 = EigenformRecord("s", 9, 2, tuple(synth_eigen_coeffs(9, lambda q: 0, 30)))
    fact9 = factor_level(9, -7)  # 3 inert: N- = 9
    assert check_sqfree(rec9, fact9).verdict == FAILS
    rec3 = EigenformRecord("s2", 3, 2, tuple(synth_eigen_coeffs(3, lambda q: 1, 30)))
    assert check_sqfree(rec3, factor_level(3, -7)).verdict == HOLDS  # square-free
    rec2 = EigenformRecord("s3", 2, 2, tuple(synth_eigen_coeffs(2, lambda q: 1, 30)))
    assert check_sqfree(rec2, factor_level(2, -7)).verdict == HOLDS  # vacuous


def test_check_h0_p_place(form_11a, ctx164_p5):
    # a_5(11a) = 1: 1 + 5 - 1 = 5 is not a unit -> NOT_VERIFIED
    items = check_h0(form_11a, ctx164_p5, [])
    assert items[0].verdict == UNKNOWN and "NOT_VERIFIED" in items[0].evidence[0]
    rec = EigenformRecord("h", 2, 2,
                          tuple(synth_eigen_coeffs(2, lambda q: 1 if q == 2 else 2, 50)))
    assert check_h0(rec, ctx164_p5, [])[0].verdict == HOLDS


def test_check_h0_inert_good():
    ctx = QuadFieldContext.create(-7, 11, prec=8)  # 5 inert in Q(sqrt(-7))
    rec = EigenformRecord("h2", 11, 2, tuple(synth_eigen_coeffs(11, lambda q: 1, 60)))
    items = check_h0(rec, ctx, [5])
    assert {i.place: i.verdict for i in items}["w|5"] == HOLDS  # 36-1 = 2 mod 11
    rec2 = EigenformRecord(
        "h3", 11, 2, tuple(synth_eigen_coeffs(11, lambda q: 6 if q == 5 else 1, 60)))
    items = check_h0(rec2, ctx, [5])
    assert {i.place: i.verdict for i in items}["w|5"] == FAILS  # 36 - 36 = 0


def test_check_h0_multiplicative_inert(form_19a):
    d5 = find_disc(split=(5,), inert=(19,), avoid_h_divisible_by=5)
    ctx5 = QuadFieldContext.create(d5, 5, prec=8)
    items = check_h0(form_19a, ctx5, [19])
    # 19^2 - 1 = 360 = 0 mod 5: mu_p in the quadratic extension -> FAILS
    assert {i.place: i.verdict for i in items}["w|19"] == FAILS
    d7 = find_disc(split=(7,), inert=(19,), avoid_h_divisible_by=7)
    ctx7 = QuadFieldContext.create(d7, 7, prec=8)
    items = check_h0(form_19a, ctx7, [19])
    # 360 = 3 mod 7 is a unit; ord_19(j-denominator) = 3 and 7 does not divide 3
    assert {i.place: i.verdict for i in items}["w|19"] == HOLDS
    stripped = EigenformRecord(form_19a.label, 19, 2, form_19a.an)
    items = check_h0(stripped, ctx7, [19])
    assert {i.place: i.verdict for i in items}["w|19"] == UNKNOWN


def test_check_h0_additive():
    ctx = QuadFieldContext.create(-7, 11, prec=8)
    rec = EigenformRecord("h4", 25, 2,
                          tuple(synth_eigen_coeffs(25, lambda q: 1, 60)))
    items = check_h0(rec, ctx, [5])
    assert {i.place: i.verdict for i in items}["w|5"] == UNKNOWN


def test_choose_common_level():
    assert choose_common_level(11, 11, SQUARE) == 121
    assert choose_common_level(11, 19, SQUARE) == 11 ** 2 * 19 ** 2
    assert choose_common_level(12, 18, SQUARE) == 36  # lcm = 2^2 3^2 already square
    assert choose_common_level(11, 19, RELAXED) == 209
    assert choose_common_level(11, 19, RELAXED, witness_primes=(11,)) == 11 ** 2 * 19


def test_choose_common_level_square_properties(rng):
    from math import isqrt

    for _ in range(200):
        n1 = rng.randrange(1, 500)
        n2 = rng.randrange(1, 500)
        N = choose_common_level(n1, n2, SQUARE)
        assert N % n1 == 0 and N % n2 == 0
        assert isqrt(N) ** 2 == N


def test_hypothesis_report_synthetic(ctx71):
    a, b = make_synthetic_pair(1)
    rep = hypothesis_report(a, b, ctx71, strategy=SQUARE)
    assert rep.overall() == HOLDS
    assert rep.congruence.holds is True
    assert rep.common_level == 36
    assert rep.to_json_dict()["overall"] == HOLDS
