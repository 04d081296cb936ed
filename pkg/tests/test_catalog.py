"""Tests for the family catalog: loading, verification, constructions."""

import hashlib
import shutil
from pathlib import Path

import pytest
from gmpy2 import mpq
from hypothesis import given, settings, strategies as st

from jacsplit.catalog import (
    CONSTRUCTION_TABLE,
    BadReduction,
    ConstantMismatch,
    Correspondence,
    FactorizationFails,
    FamilyRecord,
    InvariantViolation,
    OnDiscriminantLocus,
    ParseError,
    SymmetryFails,
    build_construction,
    check_normalization_constants,
    cyclic_family,
    dickson,
    dickson_family,
    expected_kernel,
    load_catalog,
    load_weil_table,
    specialize,
    verify_factorization,
    verify_symmetry,
)
from jacsplit.fields import build_reduction, rat
from jacsplit.poly import MPoly, mp, poly_divrem, rational_mpoly

CATALOG = load_catalog()
BY_NAME = {r.name: r for r in CATALOG}
LITERAL = [r for r in CATALOG if r.kind == "pair"]


# ---------------------------------------------------------------------------
# loading


def test_catalog_has_eight_records():
    assert len(CATALOG) == 8
    assert [r.name for r in CATALOG] == [
        "f7", "f11", "f13", "f15", "f21", "f31", "cyclic-3", "dickson-3"]


def test_declared_invariant_data():
    expect = {
        "f7": (7, 2, "sigma", -1, mpq(1, 7)),
        "f11": (11, 3, "sigma", -1, mpq(1, 11)),
        "f13": (13, 3, "sigma", 1, mpq(1, 13)),
        "f15": (15, 4, "negsigma", 1, mpq(1, 15)),
        "f21": (21, 4, "sigma", -1, mpq(1)),
        "f31": (31, 8, "sigma", -1, mpq(1, 31)),
    }
    for rec in LITERAL:
        n, m, partner, sign, lead = expect[rec.name]
        assert rec.n == n
        assert rec.m == m
        assert rec.partner == partner
        assert rec.symmetry == sign
        assert rec.lead == rec.tower.coerce(lead)
        assert rec.f.degree("x") == n


def test_degree13_coefficient_anchor():
    rec = BY_NAME["f13"]
    b, a = rec.tower.gen(0), rec.tower.gen(1)
    expected = mp(rec.tower, [((9 * b - 39) * a - 6 * b + 24, {"t": 1})])
    assert rec.f.coeff("x", 11) == expected


def test_degree21_constant_coefficient_anchor():
    rec = BY_NAME["f21"]
    a = rec.tower.gen()
    assert rec.f.coeff("x", 0) == mp(rec.tower, [(4696767684 * a, {})])


def test_empty_path_is_a_parse_error():
    with pytest.raises(ParseError):
        load_catalog("")
    with pytest.raises(ParseError):
        load_catalog("   ")


def test_missing_directory_is_a_parse_error():
    with pytest.raises(ParseError):
        load_catalog("/nonexistent/fixture/dir")


def test_tampered_fixture_fails_checksum(tmp_path):
    src = Path(BY_NAME["f7"].source).parent
    for item in src.iterdir():
        shutil.copy(item, tmp_path / item.name)
    target = tmp_path / "f7.fix"
    text = target.read_text().replace("symmetry -1", "symmetry 1")
    target.write_text(text)
    with pytest.raises(ParseError, match="checksum"):
        load_catalog(tmp_path)


def test_truncated_fixture_is_a_parse_error(tmp_path):
    src = Path(BY_NAME["f7"].source).parent
    for item in src.iterdir():
        shutil.copy(item, tmp_path / item.name)
    (tmp_path / "f7.fix").write_text("no checksum here\n")
    with pytest.raises(ParseError, match="checksum"):
        load_catalog(tmp_path)


def _reseal(path):
    """Recompute the checksum header after an intentional edit."""
    lines = path.read_text().split("\n")
    body = "\n".join(lines[1:])
    digest = hashlib.sha256(body.encode()).hexdigest()
    path.write_text("checksum sha256:%s\n%s" % (digest, body))


def test_contradictory_degree_is_an_invariant_violation(tmp_path):
    src = Path(BY_NAME["f7"].source).parent
    for item in src.iterdir():
        shutil.copy(item, tmp_path / item.name)
    target = tmp_path / "f7.fix"
    target.write_text(target.read_text().replace("n 7", "n 9"))
    _reseal(target)
    with pytest.raises(InvariantViolation, match="degree"):
        load_catalog(tmp_path)


def test_contradictory_lead_is_an_invariant_violation(tmp_path):
    src = Path(BY_NAME["f7"].source).parent
    for item in src.iterdir():
        shutil.copy(item, tmp_path / item.name)
    target = tmp_path / "f7.fix"
    target.write_text(target.read_text().replace("lead 1/7", "lead 2/7"))
    _reseal(target)
    with pytest.raises(InvariantViolation, match="leading"):
        load_catalog(tmp_path)


def test_weil_tables_attached():
    assert sorted(BY_NAME["f7"].weil) == ["quadratic"]
    assert sorted(BY_NAME["f13"].weil) == ["quadratic"]
    for name in ("f11", "f15", "f21", "f31"):
        assert sorted(BY_NAME[name].weil) == ["linear", "quadratic"]
    genus_of = {(row[0], row[1]): row[2] for row in CONSTRUCTION_TABLE}
    for rec in LITERAL:
        for construction, (q, g, ws) in rec.weil.items():
            assert g == genus_of[(rec.name, construction)]
            assert len(ws) == g
            assert q >= 2


def test_kernel_cases_parsed():
    cases = {(c["construction"], c["p"]): c for c in BY_NAME["f15"].kernel_cases}
    lin = cases[("linear", 31)]
    assert lin["values"] == {"s": 1, "t": 0}
    assert lin["groups"] == {4: 4, 2: 6}
    quad = cases[("quadratic", 31)]
    assert quad["values"] == {"s1": 0, "s2": -1, "t": 0}
    assert quad["groups"] == {4: 9, 2: 10}
    assert not BY_NAME["f7"].kernel_cases


# ---------------------------------------------------------------------------
# factorization and symmetry


def test_factorization_of_all_literal_families():
    for rec in LITERAL:
        cofactor = verify_factorization(rec)
        assert cofactor.degree("x1") == rec.n - rec.A.degree("x1")


def test_degree7_cofactor_has_degree_four():
    assert verify_factorization(BY_NAME["f7"]).degree("x1") == 4


def test_factorization_failure_carries_remainder():
    rec = BY_NAME["f7"]
    broken = FamilyRecord(
        name=rec.name, kind=rec.kind, n=rec.n, tower=rec.tower, f=rec.f,
        A=rec.A + MPoly.const(rec.tower, rec.tower.one), partner=rec.partner,
        lead=rec.lead, symmetry=rec.symmetry, m=rec.m)
    with pytest.raises(FactorizationFails) as info:
        verify_factorization(broken)
    assert not info.value.remainder.is_zero()


def test_symmetry_signs():
    signs = {"f7": -1, "f11": -1, "f13": 1, "f15": 1, "f21": -1, "f31": -1}
    for rec in LITERAL:
        assert verify_symmetry(rec) == signs[rec.name]


def test_wrong_symmetry_sign_raises():
    rec = BY_NAME["f7"]
    flipped = FamilyRecord(
        name=rec.name, kind=rec.kind, n=rec.n, tower=rec.tower, f=rec.f,
        A=rec.A, partner=rec.partner, lead=rec.lead, symmetry=-rec.symmetry,
        m=rec.m)
    with pytest.raises(SymmetryFails):
        verify_symmetry(flipped)


def test_cyclic_family_declares_no_symmetry_sign():
    with pytest.raises(SymmetryFails, match="no symmetry sign"):
        verify_symmetry(cyclic_family(5))


# ---------------------------------------------------------------------------
# normalization constants


def test_normalization_constants_of_all_literal_families():
    for rec in LITERAL:
        report = check_normalization_constants(rec)
        assert report["kappa"] == rec.kappa
        assert report["lambda"] == rec.lam


def test_constant_anchors():
    assert BY_NAME["f7"].kappa == BY_NAME["f7"].tower.one
    assert BY_NAME["f21"].kappa == BY_NAME["f21"].tower.coerce(2)
    t7 = BY_NAME["f7"].tower
    assert BY_NAME["f7"].lam == (44 * t7.gen() + 502) / 277


def test_perturbed_constant_raises_with_both_sides():
    rec = BY_NAME["f7"]
    wrong = FamilyRecord(
        name=rec.name, kind=rec.kind, n=rec.n, tower=rec.tower, f=rec.f,
        A=rec.A, partner=rec.partner, lead=rec.lead, symmetry=rec.symmetry,
        m=rec.m, kappa=rec.tower.coerce(5), lam=rec.lam)
    with pytest.raises(ConstantMismatch) as info:
        check_normalization_constants(wrong)
    assert info.value.lhs != info.value.rhs


def test_parametric_families_have_no_constants():
    with pytest.raises(ValueError):
        check_normalization_constants(cyclic_family(3))


# ---------------------------------------------------------------------------
# parametric families


def test_dickson_small_values():
    assert dickson(0) == rational_mpoly([(2, {})])
    assert dickson(1) == rational_mpoly([(1, {"x": 1})])
    assert dickson(3) == rational_mpoly([(1, {"x": 3}), (-3, {"x": 1})])
    assert dickson(5) == rational_mpoly(
        [(1, {"x": 5}), (-5, {"x": 3}), (5, {"x": 1})])


def test_dickson_functional_equation():
    # D_n(z + 1/z) = z^n + 1/z^n, checked as polynomials in z after clearing
    for n in (2, 3, 7, 10):
        dn = dickson(n)
        z = rational_mpoly([(1, {"t": 1})])
        num = MPoly.zero(z.field)
        # evaluate D_n at (z^2 + 1)/z by homogenizing: z^n * D_n((z^2+1)/z)
        dense = dn.as_dense("x")
        for k, c in enumerate(dense):
            num = num + c * (z * z + 1) ** k * z ** (n - k)
        assert num == z ** (2 * n) + MPoly.const(z.field, 1)


def test_dickson_product_identity_all_odd_degrees():
    for n in range(3, 32, 2):
        rec = dickson_family(n)
        cofactor = verify_factorization(rec)
        assert cofactor.degree("x1") == n - 2


def test_dickson_symmetry_and_invariance():
    for n in (3, 5, 7, 13):
        assert verify_symmetry(dickson_family(n)) == 1


def test_dickson_index_range():
    with pytest.raises(ValueError):
        dickson_family(7, 0)
    with pytest.raises(ValueError):
        dickson_family(7, 4)
    with pytest.raises(ValueError):
        dickson_family(8)


def test_cyclic_product_identity():
    for n in (3, 5, 7):
        for e in range(1, n):
            rec = cyclic_family(n, e)
            cofactor = verify_factorization(rec)
            assert cofactor.degree("x1") == n - 1


def test_cyclic_exponent_range():
    with pytest.raises(ValueError):
        cyclic_family(5, 0)
    with pytest.raises(ValueError):
        cyclic_family(5, 5)
    with pytest.raises(ValueError):
        cyclic_family(4)


# ---------------------------------------------------------------------------
# constructions


def test_construction_table_genus_values():
    for name, kind, genus, dim, m, groups, _label in CONSTRUCTION_TABLE:
        rec = BY_NAME[name]
        corr = build_construction(rec, kind)
        assert corr.X.genus == genus
        assert corr.Y.genus == genus
        assert len(rec.parameters(kind)) == dim
        assert rec.m == m


def test_construction_parities():
    for rec in LITERAL:
        lin = build_construction(rec, "linear")
        assert lin.X.parity == "odd" and lin.X.degree == rec.n
        quad = build_construction(rec, "quadratic")
        assert quad.X.parity == "even" and quad.X.degree == 2 * rec.n


def test_degree7_linear_genus():
    assert build_construction(BY_NAME["f7"], "linear").X.genus == 3


def test_cyclic5_quadratic_model():
    corr = build_construction(cyclic_family(5), "quadratic")
    T = corr.field
    expected = mp(T, [(T.one, {"x1": 10}), (T.one, {"x1": 5, "s1": 1}),
                      (T.one, {"s2": 1})])
    assert corr.X.h == expected
    assert corr.X.genus == 4


def test_dickson5_linear_model():
    corr = build_construction(dickson_family(5), "linear")
    T = corr.field
    expected = mp(T, [(T.one, {"x1": 5}), (T.coerce(-5), {"x1": 3}),
                      (T.coerce(5), {"x1": 1}), (T.one, {"s": 1})])
    assert corr.X.h == expected
    assert corr.X.genus == 2


def test_unknown_construction_rejected():
    with pytest.raises(ValueError):
        build_construction(BY_NAME["f7"], "cubic")


def test_expected_kernel_groups_match_table():
    for name, kind, genus, _dim, m, groups, _label in CONSTRUCTION_TABLE:
        rec = BY_NAME[name]
        nu = rec.nu[kind] if rec.nu else None
        assert expected_kernel(m, genus, nu) == groups


def test_expected_kernel_formula():
    assert expected_kernel(2, 5) == {2: 5}
    assert expected_kernel(3, 7) == {3: 7}
    assert expected_kernel(4, 7, 10) == {4: 4, 2: 6}
    assert expected_kernel(8, 15, 25) == {8: 5, 4: 10, 2: 10}
    with pytest.raises(ValueError):
        expected_kernel(4, 7)
    with pytest.raises(ValueError):
        expected_kernel(4, 7, 20)


# ---------------------------------------------------------------------------
# specialization


def test_specialize_degree15_linear_example():
    rec = BY_NAME["f15"]
    corr = build_construction(rec, "linear")
    sp = specialize(corr, {"s": 1, "t": 0})
    T = rec.tower
    assert sp.X.h == mp(T, [(T.coerce(rat("1/15")), {"x1": 15}), (T.one, {})])
    red = build_reduction(T, 31, seed=1)
    assert red(T.gen()).canonical() == 18
    spr = specialize(corr, {"s": 1, "t": 0}, reduction=red)
    F = red.field
    assert spr.X.h == mp(F, [(F.coerce(29), {"x1": 15}), (F.one, {})])
    assert spr.X.genus == 7 and spr.Y.genus == 7


def test_specialize_degree21_linear_example():
    rec = BY_NAME["f21"]
    corr = build_construction(rec, "linear")
    red = build_reduction(rec.tower, 599, seed=0)
    spr = specialize(corr, {"s": 425}, reduction=red)
    assert spr.X.degree == 21 and spr.Y.degree == 21
    assert spr.field is red.field


def test_specialize_exact_keeps_kernel_divisibility():
    rec = BY_NAME["f7"]
    corr = build_construction(rec, "linear")
    sp = specialize(corr, {"s": 3, "t": 2})
    diff = sp.X.h.substitute({"x1": MPoly.var(rec.tower, "x1")}) - sp.Y.h
    # h_X(x1) - h_Y(x2) = f(x1) - g(x2) since the shared s cancels
    _, remainder = poly_divrem(diff, sp.A, "x1")
    assert remainder.is_zero()


def test_discriminant_locus_is_detected():
    corr = build_construction(cyclic_family(3), "linear")
    with pytest.raises(OnDiscriminantLocus, match="X"):
        specialize(corr, {"s": 0})
    rec = BY_NAME["f7"]
    with pytest.raises(OnDiscriminantLocus):
        specialize(build_construction(rec, "linear"), {"s": 0, "t": 0})


def test_bad_reduction_on_vanishing_denominator():
    rec = BY_NAME["f15"]
    corr = build_construction(rec, "linear")
    red = build_reduction(rec.tower, 5, seed=0)
    with pytest.raises(BadReduction):
        specialize(corr, {"s": 1, "t": 0}, reduction=red)


def test_specialize_rejects_wrong_parameters():
    corr = build_construction(BY_NAME["f7"], "linear")
    with pytest.raises(ValueError):
        specialize(corr, {"s": 1})
    with pytest.raises(ValueError):
        specialize(corr, {"s": 1, "t": 0, "s1": 2})


GOOD_PRIMES = (37, 43, 53, 67, 79)


@settings(max_examples=60, deadline=None)
@given(
    s=st.integers(min_value=-40, max_value=40),
    t=st.integers(min_value=-20, max_value=20),
    pidx=st.integers(min_value=0, max_value=len(GOOD_PRIMES) - 1),
)
def test_specialized_reduction_is_squarefree_or_flagged(s, t, pidx):
    rec = BY_NAME["f7"]
    corr = build_construction(rec, "linear")
    red = build_reduction(rec.tower, GOOD_PRIMES[pidx], seed=0)
    try:
        sp = specialize(corr, {"s": s, "t": t}, reduction=red)
    except (OnDiscriminantLocus, BadReduction):
        return
    assert sp.X.degree == 7 and sp.Y.degree == 7
    # the reduced pair still factors through the reduced kernel polynomial
    diff = sp.X.h - sp.Y.h.substitute({"x2": MPoly.var(sp.field, "x2")})
    _, remainder = poly_divrem(diff, sp.A, "x1")
    assert remainder.is_zero()


@settings(max_examples=40, deadline=None)
@given(
    s1=st.integers(min_value=-15, max_value=15),
    s2=st.integers(min_value=-15, max_value=15),
)
def test_quadratic_specialization_respects_shared_parameters(s1, s2):
    rec = BY_NAME["f7"]
    corr = build_construction(rec, "quadratic")
    try:
        sp = specialize(corr, {"s1": s1, "s2": s2, "t": 1})
    except OnDiscriminantLocus:
        return
    assert sp.X.degree == 14 and sp.X.genus == 6
    # h_X - h_Y = (f - g)(f + g + s1) is divisible by A in x1
    diff = sp.X.h - sp.Y.h
    _, remainder = poly_divrem(diff, sp.A, "x1")
    assert remainder.is_zero()
