import json

import pytest

from anticyclo.eigenforms import (
    BOTH_NONORDINARY,
    EigenformRecord,
    VadicCoefficient,
    WILES_ORDINARY,
    check_congruence,
    check_partial_eisenstein,
    load_form,
    stabilize_fcheck,
    sturm_bound,
    twist,
    validate,
)
from anticyclo.errors import (
    DecompositionInvalid,
    DivisibilityViolation,
    InvariantViolation,
    SchemaError,
)

from conftest import make_synthetic_pair
from oracles import eta_product_level11


def test_load_minimal_and_schema_errors(tmp_path):
    good = {"label": "11a", "level": 11, "weight": 2, "an": [1, -2, -1, 2, 1, 2]}
    rec = load_form(good)
    assert rec.label == "11a" and rec.a(2) == -2
    with pytest.raises(SchemaError):
        load_form({**good, "weight": 4})
    with pytest.raises(InvariantViolation):
        load_form({**good, "an": [2, -2, -1, 2, 1, 2]})
    with pytest.raises(SchemaError):
        load_form({**good, "an": [1, 2.5]})
    path = tmp_path / "f.json"
    path.write_text(json.dumps(good))
    assert load_form(path).level == 11


def test_reference_data_is_the_eta_product(form_11a):
    assert list(form_11a.an[:400]) == eta_product_level11(400)


def test_reference_data_hecke_valid(form_11a, form_19a):
    assert validate(form_11a) == []
    assert validate(form_19a) == []


def test_multiplicativity_violation_detected(form_11a):
    an = list(form_11a.an)
    an[5] += 1  # a_6 breaks a_2 * a_3
    bad = EigenformRecord("bad", 11, 2, tuple(an))
    assert any("a_2*a_3" in s or "a_3" in s for s in validate(bad))


def test_twist_rules(form_11a):
    tw = twist(form_11a, -7)
    assert tw.level == 11 * 49
    assert tw.a(7) == 0
    assert tw.a(2) == form_11a.a(2)  # kron(-7,2) = +1
    assert tw.a(3) == -form_11a.a(3)  # kron(-7,3) = -1
    assert twist(form_11a, 1) is form_11a
    back = twist(tw, -7)
    for q in (2, 3, 5, 13, 17, 23):
        assert back.a(q) == form_11a.a(q)
    assert validate(tw) == []


def test_stabilize(form_11a):
    st = stabilize_fcheck(form_11a, 11 * 4, minus_part=1)
    assert st.level == 44
    assert st.a(2) == 0 and st.a(4) == 0 and st.a(6) == 0
    assert st.a(3) == form_11a.a(3)
    assert st.a(33) == form_11a.a(33)
    assert stabilize_fcheck(form_11a, 11, minus_part=1) is form_11a
    with pytest.raises(DivisibilityViolation):
        stabilize_fcheck(form_11a, 11 * 3)


def test_sturm_bound():
    assert sturm_bound(11) == 2
    assert sturm_bound(1) == 1
    assert sturm_bound(19) == 4


def test_self_congruence(form_11a):
    v = check_congruence(form_11a, form_11a, 5, 1)
    assert v.holds is True
    assert v.witnesses == ()
    assert v.ap_rule == WILES_ORDINARY


def test_congruence_witness(form_11a):
    an = list(form_11a.an)
    an[12] += 1  # a_13
    bad = EigenformRecord("bad", 11, 2, tuple(an))
    v = check_congruence(form_11a, bad, 5, 1)
    assert v.holds is False and 13 in v.witnesses


def test_congruence_nonordinary_tag():
    a, _ = make_synthetic_pair(3)
    an = list(a.an)
    # force a_5 = 0 mod 5 on a clone pair -> both non-ordinary
    from oracles import synth_eigen_coeffs

    def ap(q):
        return 5 if q == 5 else a.a(q)

    c = EigenformRecord("c", 2, 2, tuple(synth_eigen_coeffs(2, ap, 200)))
    v = check_congruence(c, c, 5, 1)
    assert v.ap_rule == BOTH_NONORDINARY


def test_stabilization_congruence_mechanism(form_11a):
    """Zeroing the level-jump primes aligns two tables that were congruent
    away from them: afterwards every coefficient is congruent."""
    from oracles import synth_eigen_coeffs

    def ap_other(q):
        if q == 2:
            return 0  # additive prime of the level-44 partner
        return form_11a.a(q) + (5 if q % 7 == 3 else 0)

    other = EigenformRecord("partner", 44, 2,
                            tuple(synth_eigen_coeffs(44, ap_other, 1000)))
    direct = check_congruence(form_11a, other, 5, 1)
    assert direct.holds is not False  # differences live only at level primes
    N = 4 * 121
    f1 = stabilize_fcheck(form_11a, N, minus_part=1)
    f2 = stabilize_fcheck(other, N, minus_part=1)
    from anticyclo.eigenforms import coeff_to_padic
    from anticyclo.padic import local_ring

    ring = local_ring(5)
    for n in range(1, min(f1.bound, f2.bound) + 1):
        d = coeff_to_padic(f1.a(n), ring, 1) - coeff_to_padic(f2.a(n), ring, 1)
        assert d.is_zero(), n
    v = check_congruence(f1, f2, 5, 1, common_level=N)
    assert v.holds is True and v.witnesses == ()


def test_partial_eisenstein(form_11a, form_19a):
    v = check_partial_eisenstein(form_11a, 1, 1, 11, 1, 1, 5)
    assert v.holds and not v.witnesses
    v19 = check_partial_eisenstein(form_19a, 1, 1, 19, 1, 1, 3)
    assert v19.holds
    tw = twist(form_11a, -7)
    vt = check_partial_eisenstein(tw, -7, -7, 11, 1, 49, 5)
    assert vt.holds
    with pytest.raises(DecompositionInvalid):
        check_partial_eisenstein(form_11a, 1, 1, 11, 1, 7, 5)
    an = list(form_11a.an)
    an[12] += 1
    bad = EigenformRecord("bad", 11, 2, tuple(an))
    vb = check_partial_eisenstein(bad, 1, 1, 11, 1, 1, 5)
    assert not vb.holds and (13, "generic") in vb.witnesses


def test_digit_string_coefficients():
    vc = VadicCoefficient.parse("2,0,1", 5)
    assert vc.packed == 27 and vc.digits == 3
    assert vc.serialize(5) == "2,0,1"
    rec = load_form({
        "label": "emb", "level": 7, "weight": 2,
        "an": [1, "2,0,1", 3, "4,0,1"],
        "embedding": {"p": 5},
    }, validate_record=False)
    assert isinstance(rec.a(2), VadicCoefficient)
    assert rec.to_json_dict()["an"][1] == "2,0,1"
    with pytest.raises(SchemaError):
        VadicCoefficient.parse("7,0", 5)
    with pytest.raises(SchemaError):
        load_form({"label": "x", "level": 7, "weight": 2, "an": [1, "2,0"]})
