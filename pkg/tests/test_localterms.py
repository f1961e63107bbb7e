import pytest

from anticyclo import series as iw
from anticyclo.errors import PIsLevel, PreconditionFailed
from anticyclo.localterms import (
    ADDITIVE,
    GOOD,
    MULTIPLICATIVE,
    EulerPolynomial,
    FrobeniusExponent,
    euler_poly,
    frobenius_exponent,
    inert_term,
    lambda_table,
    local_term,
    sum_local_lambdas,
)
from anticyclo.padic import AtLeast, padic_log, teichmuller_part
from anticyclo.quadfield import QuadFieldContext
from anticyclo.series import CERTAIN

from oracles import newton_polygon_first_min, weierstrass_division_oracle


def synth_frob(ring, q, m, unit=3, prec=12):
    u = ring.from_int(ring.p ** m * unit, prec)
    return FrobeniusExponent(q, u, m, (0, 0), "synthetic", CERTAIN)


def test_euler_poly_classes(form_11a):
    P = euler_poly(form_11a, 2, p=5)
    assert P.reduction == GOOD and P.coeffs == (1, 2, 2)
    P = euler_poly(form_11a, 11, p=5)
    assert P.reduction == MULTIPLICATIVE and P.coeffs == (1, -1)
    from anticyclo.eigenforms import stabilize_fcheck

    rec44 = stabilize_fcheck(form_11a, 44, minus_part=1)
    P = euler_poly(rec44, 2, p=5)
    assert P.reduction == ADDITIVE and P.coeffs == (1,)
    with pytest.raises(PIsLevel):
        euler_poly(form_11a, 5, p=5)


def test_frobenius_exponent_worked_example():
    """K = Q(sqrt(-7)), q = 2: the norm equation returns (1, 1), so the
    generator is (1 + sqrt(-7))/2 of norm 2."""
    ctx = QuadFieldContext.create(-7, 11, prec=12)
    fe = frobenius_exponent(2, ctx)
    assert fe.generator == (1, 1)
    ring = ctx.ring
    half = ring.from_int(2, 12).inverse()
    alpha = (ring.from_int(1, 12) + ctx.split_root) * half
    alpha_bar = (ring.from_int(1, 12) - ctx.split_root) * half
    beta = alpha / alpha_bar
    principal = beta / teichmuller_part(beta)
    # independent route: evaluate the binomial series of (1+T)^u at T = p
    bs = iw.binomial_series(fe.u, 40, 8)
    gamma0_to_u = ring.zero(8)
    power = ring.one(12)
    for c in bs.coeffs:
        gamma0_to_u = gamma0_to_u + c * power
        power = power * ring.from_int(11, 12)
    assert (gamma0_to_u - principal).is_zero()
    # log-additivity route
    lam0 = padic_log(ring.from_int(12, 12))
    assert (padic_log(principal) - fe.u * lam0).is_zero()


def test_frobenius_exponent_soak():
    """The defining identity gamma0^u = principal part of alpha/alpha-bar,
    checked by evaluating the binomial series at T = p across contexts with
    different class numbers and split primes."""
    from anticyclo.padic import teichmuller_part

    cases = [(-7, 11, [2, 23, 29, 37]), (-71, 5, [2, 3, 19, 29]),
             (-164, 5, [7, 11, 19]), (-84, 5, [11, 19])]
    checked = 0
    for d, p, qs in cases:
        ctx = QuadFieldContext.create(d, p, prec=12)
        ring = ctx.ring
        half = ring.from_int(2, 12).inverse()
        for q in qs:
            assert ctx.splitting_of(q) == 1
            fe = frobenius_exponent(q, ctx)
            x, y = fe.generator
            assert (x * x - d * y * y) == 4 * q ** ctx.h
            alpha = (ring.from_int(x, 12) + ring.from_int(y, 12) * ctx.split_root) * half
            alpha_bar = (ring.from_int(x, 12) - ring.from_int(y, 12) * ctx.split_root) * half
            beta = alpha / alpha_bar
            principal = beta / teichmuller_part(beta)
            # gamma0^(h*u) evaluated through the binomial series at T = p
            hu = fe.u * ring.from_int(ctx.h, 12)
            bs = iw.binomial_series(hu, 48, 6)
            value = ring.zero(6)
            power = ring.one(12)
            for c in bs.coeffs:
                value = value + c * power
                power = power * ring.from_int(p, 12)
            assert (value - principal).is_zero(), (d, p, q)
            checked += 1
    assert checked >= 12


def test_frobenius_exponent_preconditions():
    ctx = QuadFieldContext.create(-7, 11, prec=10)
    with pytest.raises(PreconditionFailed):
        frobenius_exponent(3, ctx)  # 3 inert in Q(sqrt(-7))
    with pytest.raises(PIsLevel):
        frobenius_exponent(11, ctx)


def test_local_term_unit_cases(z5):
    fe = synth_frob(z5, 7, 0)
    # additive: exactly 1
    lt = local_term(EulerPolynomial(7, ADDITIVE, (1,)), fe, 7, degree=16, prec=8)
    assert lt.invariants.as_pair() == (0, 0)
    assert lt.series.coeffs[0].lift() == 1
    assert all(c.is_zero() for c in lt.series.coeffs[1:])
    # multiplicative with unit constant term: a unit but not 1
    lt = local_term(EulerPolynomial(7, MULTIPLICATIVE, (1, -1)), fe, 7,
                    degree=16, prec=8)
    assert lt.invariants.as_pair() == (0, 0)
    assert not all(c.is_zero() for c in lt.series.coeffs[1:])


def test_local_term_lambda_one_example(z5):
    # q = 1 mod p with a_q = 1: constant term 1 - 1/q = 0 mod pi, linear
    # coefficient -u/q a unit when v_p(u) = 0
    fe = synth_frob(z5, 11, 0)
    lt = local_term(EulerPolynomial(11, MULTIPLICATIVE, (1, -1)), fe, 11,
                    degree=16, prec=8)
    assert lt.invariants.as_pair() == (0, 1)


def test_local_term_lambda_scales_with_up(z5):
    for m in (0, 1, 2):
        fe = synth_frob(z5, 11, m)
        lt = local_term(EulerPolynomial(11, MULTIPLICATIVE, (1, -1)), fe, 11,
                        degree=8, prec=8)
        assert lt.invariants.as_pair() == (0, 5 ** m)


def test_sign_invariance_and_division_oracle(z5, rng):
    for _ in range(30):
        q = rng.choice([11, 31, 41, 3, 13, 7])
        m = rng.randrange(0, 2)
        a = rng.randrange(-3, 4)
        kind = rng.choice([GOOD, MULTIPLICATIVE, ADDITIVE])
        P = {GOOD: EulerPolynomial(q, GOOD, (1, -a, q)),
             MULTIPLICATIVE: EulerPolynomial(q, MULTIPLICATIVE, (1, -a)),
             ADDITIVE: EulerPolynomial(q, ADDITIVE, (1,))}[kind]
        fe = synth_frob(z5, q, m, unit=rng.choice([1, 2, 3, 4, 6]))
        fe_neg = FrobeniusExponent(q, -fe.u, m, fe.generator, "conj", CERTAIN)
        lt = local_term(P, fe, q, degree=24, prec=8)
        lt_neg = local_term(P, fe_neg, q, degree=24, prec=8)
        assert lt.invariants.as_pair() == lt_neg.invariants.as_pair()
        assert lt.invariants.mu == 0
        # certify lambda by explicit Weierstrass division on the lifted series
        lifted = [c.lift() for c in lt.series.coeffs]
        M = lt.series.prec
        assert weierstrass_division_oracle(lifted, 5, M) == lt.invariants.as_pair()
        # Newton-polygon route agrees
        vals = [None if isinstance(c.valuation(), AtLeast) else c.valuation()
                for c in lt.series.coeffs]
        assert newton_polygon_first_min(vals) == lt.invariants.lam


def test_split_prime_product_identity(z5):
    """The product of the local terms at the two primes above a split q
    equals the expanded degree-4 substitution into the tensor Euler factor."""
    q, a = 3, -1
    fe = synth_frob(z5, q, 1, unit=2)
    P = EulerPolynomial(q, GOOD, (1, -a, q))
    D = 32
    lt_plus = local_term(P, fe, q, degree=D, prec=8)
    fe_neg = FrobeniusExponent(q, -fe.u, 1, fe.generator, "conj", CERTAIN)
    lt_minus = local_term(P, fe_neg, q, degree=D, prec=8)
    product = lt_plus.series * lt_minus.series
    # direct expansion: sum over (i, j) of P_i P_j q^{-(i+j)} (1+T)^{(i-j)u}
    ring = z5
    M = product.prec
    qinv = ring.from_int(q, 12).inverse()
    total = None
    for i, ci in enumerate(P.coeffs):
        for j, cj in enumerate(P.coeffs):
            scalar = ring.from_int(ci * cj, 12) * qinv ** (i + j)
            exp = fe.u * ring.from_int(i - j, 12)
            if (i - j) == 0:
                part = iw.constant(ring, scalar, D)
            else:
                part = iw.binomial_series(exp, D, M).scalar_mul(scalar)
            total = part if total is None else total + part
    for c1, c2 in zip(product.coeffs, total.coeffs):
        assert (c1 - c2).is_zero()


def test_good_term_factors_over_quadratic_extension(z5):
    """1 - aX + qX^2 = (1 - alpha X)(1 - beta X) over the residue-degree-2
    extension when a^2 - 4q is a non-residue; the lambda of the local term
    computed over Z_p must equal the sum of the lambdas of the two linear
    factors computed over the extension."""
    from anticyclo.padic import hensel_sqrt, local_ring

    p = 5
    for q, a, m in ((3, 1, 0), (7, 2, 0), (3, 1, 1), (13, 1, 1), (11, 3, 0),
                    (19, 1, 0), (29, 2, 1)):
        disc = a * a - 4 * q
        if disc % p == 0:
            continue
        euler = pow(disc % p, (p - 1) // 2, p)
        fe = synth_frob(z5, q, m, unit=2)
        P = EulerPolynomial(q, GOOD, (1, -a, q))
        lam_base = local_term(P, fe, q, degree=8, prec=10).invariants.lam
        if euler == 1:
            big = local_ring(p)
            s = hensel_sqrt(big.from_int(disc, 12))
        else:
            big = local_ring(p, f=2)
            r = big.nonresidue
            # sqrt(disc) = omega * sqrt(disc / r) with omega^2 = r
            inner = hensel_sqrt(big.from_int(disc, 12) *
                                big.from_int(r, 12).inverse())
            s = inner * big.from_coords((0, 1), 12)
        assert (s * s - big.from_int(disc, 12)).is_zero()
        half = big.from_int(2, 12).inverse()
        qinv = big.from_int(q, 12).inverse()
        u_big = big.from_int(p ** m * 2, 12)
        lam_parts = 0
        for sign in (1, -1):
            root = (big.from_int(a, 12) + s * big.from_int(sign, 12)) * half
            scalar = root * qinv
            D = 5 ** m * 2 + 8
            factor = iw.one(big, D, 8) - \
                iw.binomial_series(u_big, D, 8).scalar_mul(scalar)
            ml = iw.mu_lambda(factor)
            assert ml.certainty == CERTAIN and ml.mu == 0
            lam_parts += ml.lam
        assert lam_parts == lam_base, (q, a, m, lam_parts, lam_base)


def test_inert_term_is_point_count_factor(form_11a):
    ctx = QuadFieldContext.create(-7, 11, prec=10)
    # 3 is inert in Q(sqrt(-7)); good for the level-11 form
    P = euler_poly(form_11a, 3, p=11)
    t = inert_term(form_11a, P, 3, ctx)
    ring = ctx.ring
    qq = ring.from_int(3, 10)
    aq = ring.from_int(form_11a.a(3), 10)
    expected = ((qq + ring.one(10)) ** 2 - aq * aq) * (qq * qq).inverse() ** 1
    assert (t.value_at_zero - expected).is_zero()
    assert t.lam_contribution == 0


def test_lambda_table_and_sum(form_11a):
    ctx = QuadFieldContext.create(-164, 5, prec=12)
    total, table = sum_local_lambdas(form_11a, [7, 11, 19], ctx)
    assert total == sum(r.contribution for r in table.rows)
    assert all(r.kind == "SPLIT" for r in table.rows)
    assert total == table.total()
    # empty prime list
    total0, table0 = sum_local_lambdas(form_11a, [], ctx)
    assert total0 == 0 and table0.rows == ()
    with pytest.raises(PreconditionFailed):
        lambda_table(form_11a, [3], QuadFieldContext.create(-7, 11, prec=10),
                     require_split=True)


def test_constant_term_matches_euler_evaluation(form_11a):
    """P(q^{-1}) is the constant term of the split local term regardless of u."""
    ctx = QuadFieldContext.create(-164, 5, prec=12)
    for q in (7, 11, 19):
        fe = frobenius_exponent(q, ctx)
        P = euler_poly(form_11a, q, p=5)
        lt = local_term(P, fe, q)
        qinv = ctx.ring.from_int(q, 12).inverse()
        direct = P.evaluate(qinv)
        assert (lt.value_at_zero - direct).is_zero()
