"""
二次曲面束 Z = V(q0, q∞)：构造、恒等式与负对照
"""

import pytest

from conic_bundles.brauer import class_of, compare_by_specialization
from conic_bundles.covers import CoverSpec, apply_pgl2, build_cover, sextic_of
from conic_bundles.errors import DispatchError, InadmissibleError, InputError
from conic_bundles.exact_core import UVW, MPoly
from conic_bundles.models import CaseTag, SmoothnessCertificate, SmoothVerdict
from conic_bundles.quadform import TernaryForm
from conic_bundles.quadric_builder import (
    build_pencil,
    fiber_form,
    generic_fiber_symbol,
    homogenize,
    verify_minors,
    verify_pencil,
)

from conftest import CASES, random_cover


def test_case1_pencil_identities(cover_of):
    spec = cover_of("four_ovals")
    pencil = build_pencil(spec)
    assert pencil.case == CaseTag.RANK3
    assert (pencil.a, pencil.b) == (3, 3)
    report = verify_pencil(pencil, spec)
    assert report.passed, report.first_failure()
    assert pencil.A0.shape == (6, 6) and pencil.A0.is_symmetric()


def test_case1_minor_identities(cover_of):
    spec = cover_of("four_ovals")
    pencil = build_pencil(spec)
    report = verify_minors(fiber_form(pencil), pencil, spec)
    assert report.passed, report.first_failure()
    assert set(report.checks) >= {"minor_1", "minor_2", "minor_3", "normalized_delta"}


def test_case2_pencil_identities(cover_of):
    spec = cover_of("one_oval")
    pencil = build_pencil(spec)
    assert pencil.case == CaseTag.RANK2
    assert pencil.T2 is not None and pencil.N1 is not None
    assert verify_pencil(pencil, spec).passed
    report = verify_minors(fiber_form(pencil), pencil, spec)
    assert report.passed, report.first_failure()
    assert report.checks["gram_tail_singular"].passed


def test_fiber_form_at_rational_point(cover_of):
    spec = cover_of("four_ovals")
    pencil = build_pencil(spec)
    symbolic = fiber_form(pencil)
    at_point = fiber_form(pencil, (1, 2, 1))
    value = symbolic.bM[0, 0].evaluate((1, 2, 1))
    assert at_point.bM[0, 0] == value


def test_nonsquare_discriminant_needs_a_move(cover_of):
    with pytest.raises(DispatchError):
        build_pencil(cover_of("empty_curve"))


def test_swapped_triple_reaches_case1(load_fixture):
    q1, q2, q3 = load_fixture("two_non_nested").forms()
    n1, n2, n3 = apply_pgl2(q1, q2, q3, [0, 1, 1, 0])
    spec = build_cover(n1, n2, n3, seed=7)
    pencil = build_pencil(spec)
    assert (pencil.a, pencil.b) == (8, 1)
    assert verify_pencil(pencil, spec).passed


@pytest.fixture
def degenerate_spec():
    """M1 = M2 = M3 = diag(1, 1, -1)：Δ ≡ 0，W = -(t0 + t1)⁶"""
    q = TernaryForm.diagonal(1, 1, -1)
    certificate = SmoothnessCertificate(verdict=SmoothVerdict.SMOOTH, seed=0, attempts=1)
    return CoverSpec(q, q, q, MPoly.zero(UVW), sextic_of(q, q, q), certificate, False, 0, 1)


def test_negative_control_fails_separability(degenerate_spec):
    pencil = build_pencil(degenerate_spec, require_admissible=False)
    report = verify_pencil(pencil, degenerate_spec)
    assert report.checks["discriminant_identity"].passed
    assert not report.checks["separability_matches"].passed
    assert report.first_failure() == "separability_matches"


def test_negative_control_is_inadmissible(degenerate_spec):
    with pytest.raises(InadmissibleError) as info:
        build_pencil(degenerate_spec)
    assert info.value.exit_code == 2


def test_homogenize_pads_to_degree():
    t = MPoly.var("T", ("T",))
    form = homogenize(t * t + 1, 4)
    assert form.total_degree == 4 and form.is_homogeneous()


@pytest.mark.parametrize("name, expected", [("four_ovals", ["2", "3"]), ("one_oval", ["2", "3"])])
def test_generic_fiber_differs_by_class_ab(cover_of, name, expected):
    spec = cover_of(name)
    pencil = build_pencil(spec)
    symbols = generic_fiber_symbol(pencil, spec)
    same = compare_by_specialization(symbols.raw, symbols.simplified, spec, 6, seed=3)
    assert same.consistent and same.constant_diff == []
    diff = compare_by_specialization(symbols.raw, symbols.y_symbol, spec, 6, seed=3)
    assert diff.consistent
    assert diff.constant_diff == expected


def test_generic_fiber_symbol_checks_its_cover(cover_of, degenerate_spec):
    case1, case2 = cover_of("four_ovals"), cover_of("one_oval")
    with pytest.raises(InputError):
        generic_fiber_symbol(build_pencil(case1), case2)
    with pytest.raises(InadmissibleError):
        generic_fiber_symbol(build_pencil(degenerate_spec, require_admissible=False), degenerate_spec)


# ============================================
# 随机实例
# ============================================

@pytest.mark.parametrize("case", CASES)
@pytest.mark.parametrize("index", range(100))
def test_pencil_identities_on_random_covers(case, index):
    spec = random_cover(case, index)
    pencil = build_pencil(spec)
    assert pencil.case.value == case
    report = verify_pencil(pencil, spec)
    assert report.passed, report.first_failure()
    minors = verify_minors(fiber_form(pencil), pencil, spec)
    assert minors.passed, minors.first_failure()


@pytest.mark.parametrize("case", CASES)
@pytest.mark.parametrize("index", range(25))
def test_constant_difference_on_random_covers(case, index):
    spec = random_cover(case, index)
    pencil = build_pencil(spec)
    symbols = generic_fiber_symbol(pencil, spec)
    diff = compare_by_specialization(symbols.raw, symbols.y_symbol, spec, 25, seed=index)
    assert diff.consistent, diff.refutation
    assert diff.constant_diff == class_of(pencil.a, pencil.b).to_json()
