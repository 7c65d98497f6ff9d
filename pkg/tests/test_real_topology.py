"""
实拓扑：根隔离、符号差分布、卵形线构型、像区域与有理性判定
"""

import random
from fractions import Fraction
from functools import lru_cache

import pytest

from conic_bundles.covers import build_cover
from conic_bundles.errors import InputError
from conic_bundles.exact_core import TVAR, MPoly
from conic_bundles.instances import load_instance
from conic_bundles.models import Configuration, Verdict
from conic_bundles.real_topology import (
    count_real_roots,
    outside_contained,
    pi1_section_exists,
    quartic_topology,
    rationality_verdict,
    region_report,
    render_svg,
    sample_between,
    sign_at_root,
    signature_profile,
    sturm_isolate,
)
from conic_bundles.real_topology.region import cell_in_image, fiber_form_signature

from conftest import CASES, CORPUS, FIXTURES, random_cover


@pytest.fixture
def t():
    return MPoly.var("T", TVAR)


@lru_cache(maxsize=None)
def analysed(name: str):
    """(instance, spec, topology) 按实例缓存"""
    instance = load_instance(FIXTURES / f"{name}.json")
    spec = build_cover(*instance.forms(), seed=7)
    return instance, spec, quartic_topology(spec, seed=7)


# ============================================
# 根隔离
# ============================================

def test_isolate_three_real_roots(t):
    roots = sturm_isolate(t ** 3 - t)
    assert len(roots) == 3
    for interval, root in zip(roots, (-1, 0, 1)):
        assert interval.lo <= root <= interval.hi
    for left, right in zip(roots, roots[1:]):
        assert left.hi <= right.lo


def test_no_real_roots(t):
    assert sturm_isolate(t * t + 1) == []
    assert count_real_roots(t * t + 1) == 0


def test_isolation_needs_squarefree_input(t):
    with pytest.raises(InputError):
        sturm_isolate((t - 1) ** 2 * (t + 1))


def test_root_count_matches_dense_grid(t, root_oracle):
    p = (t * 3 - 1) * (t + 2) * (t - 5) * (t * t - 7)
    coeffs = [float(c) for c in p.to_poly("T").all_coeffs()]
    assert count_real_roots(p) == root_oracle(coeffs, -10.0, 10.0) == 5
    assert count_real_roots(p, Fraction(0), Fraction(3)) == 2


def test_sign_at_root(t):
    p = t * t - 2
    negative, positive = sturm_isolate(p)
    assert sign_at_root(p, positive, t - 1) == 1
    assert sign_at_root(p, negative, t - 1) == -1
    assert sign_at_root(p, positive, t * t - 2) == 0


def test_sample_between(t):
    left, right = sturm_isolate(t * t - 2)
    assert sample_between(left, right) == 0
    assert sample_between(None, left) < left.lo
    assert sample_between(right, None) > right.hi


# ============================================
# 符号差分布与截面
# ============================================

def test_signature_profile_four_ovals():
    _, spec, _ = analysed("four_ovals")
    profile = signature_profile(spec)
    assert len(profile.roots) == 6
    assert len(profile.intervals) == 6
    assert sum(iv.wraps_infinity for iv in profile.intervals) == 1
    assert pi1_section_exists(profile)


def test_negative_definite_interval_blocks_section():
    _, spec, _ = analysed("empty_curve")
    profile = signature_profile(spec)
    assert any(tuple(iv.signature) == (0, 0, 3) for iv in profile.intervals)
    assert not pi1_section_exists(profile)


# ============================================
# 卵形线构型
# ============================================

@pytest.mark.parametrize("name", CORPUS)
def test_configuration_matches_fixture(name):
    instance, _, topo = analysed(name)
    assert topo.configuration == Configuration(instance.expect["configuration"])
    assert topo.oval_count == instance.expect["oval_count"]


@pytest.mark.parametrize("name", CORPUS)
def test_oval_count_matches_grid_oracle(name, oval_oracle):
    _, spec, topo = analysed(name)
    assert topo.oval_count == oval_oracle(spec.delta)


@pytest.mark.parametrize("name", ["four_ovals", "two_nested"])
def test_topology_is_independent_of_sweep_direction(name):
    _, spec, topo = analysed(name)
    again = quartic_topology(spec, seed=8)
    assert (again.oval_count, again.configuration) == (topo.oval_count, topo.configuration)


def test_nested_ovals_have_depths():
    _, _, topo = analysed("two_nested")
    depths = sorted(o.depth for o in topo.ovals)
    assert depths == [0, 1]
    inner = next(o for o in topo.ovals if o.depth == 1)
    assert inner.parent is not None


# ============================================
# 像区域
# ============================================

def test_image_membership_at_points():
    _, spec, _ = analysed("four_ovals")
    assert cell_in_image(spec, (0, 0, 1))
    assert cell_in_image(spec, (1, 0, 0))
    assert not cell_in_image(spec, (3, 0, 2))
    assert fiber_form_signature(spec, (3, 0, 2)) == (0, 0, 3)
    assert fiber_form_signature(spec, (0, 0, 1)) == (1, 0, 2)


@pytest.mark.parametrize("name", CORPUS)
def test_region_laws_hold(name):
    _, spec, topo = analysed(name)
    report = region_report(spec, topo)
    assert report.boundary_law_holds, report.violations
    assert report.one_sign_violations == 0
    assert report.connectivity_law_holds
    assert len(report.ovals) == topo.oval_count
    assert outside_contained(report, topo) == report.outside_in_image


# ============================================
# 判定
# ============================================

@pytest.mark.parametrize("name", CORPUS)
def test_rationality_verdict(name):
    instance, spec, topo = analysed(name)
    report = region_report(spec, topo)
    verdict = rationality_verdict(spec, signature_profile(spec), topo, report)
    assert verdict.verdict == Verdict(instance.expect["verdict"])
    assert verdict.configuration == topo.configuration
    assert f"section_exists={str(verdict.section_exists).lower()}" in verdict.evidence
    assert f"outside_in_image={str(report.outside_in_image).lower()}" in verdict.evidence


def test_single_oval_is_left_open():
    _, spec, topo = analysed("one_oval")
    verdict = rationality_verdict(spec, signature_profile(spec), topo, region_report(spec, topo))
    assert verdict.verdict == Verdict.UNDETERMINED_SINGLE_OVAL


def test_render_svg():
    _, spec, topo = analysed("four_ovals")
    svg = render_svg(spec, topo, resolution=120)
    assert "<svg" in svg
    assert svg.rstrip().endswith("</svg>")


def test_render_svg_is_deterministic():
    _, spec, topo = analysed("two_nested")
    first = render_svg(spec, topo, resolution=80)
    second = render_svg(spec, topo, resolution=80)
    assert first == second
    assert "<dc:date>" not in first


# ============================================
# 随机实例
# ============================================

OVALS_OF = {
    Configuration.EMPTY: 0,
    Configuration.ONE_OVAL: 1,
    Configuration.TWO_NESTED: 2,
    Configuration.TWO_NON_NESTED: 2,
    Configuration.THREE_OVALS: 3,
    Configuration.FOUR_OVALS: 4,
}


@lru_cache(maxsize=None)
def random_analysed(case: str, index: int):
    spec = random_cover(case, index)
    return spec, quartic_topology(spec, seed=7)


@pytest.mark.parametrize("seed", range(10))
def test_root_count_matches_grid_on_random_polynomials(t, root_oracle, seed):
    rng = random.Random(seed)
    for _ in range(100):
        k = rng.randint(0, 6)
        roots = [Fraction(n, 2) + Fraction(1, 7) for n in rng.sample(range(-18, 18), k)]
        p = MPoly.const(Fraction(rng.choice([-3, -1, 2, 5]), rng.randint(1, 4)), TVAR)
        for r in roots:
            p = p * (t - r)
        for _ in range(rng.randint(0, (8 - k) // 2)):
            p = p * (t * t + Fraction(rng.randint(1, 9), rng.randint(1, 4)))
        if p.is_constant:
            assert count_real_roots(p) == 0
            continue
        coeffs = [float(c) for c in p.to_poly("T").all_coeffs()]
        assert count_real_roots(p) == root_oracle(coeffs, -10.0, 10.0) == k, roots
        assert len(sturm_isolate(p)) == k


@pytest.mark.parametrize("case", CASES)
@pytest.mark.parametrize("index", range(30))
def test_oval_count_matches_grid_on_random_covers(case, index, oval_oracle):
    spec, topo = random_analysed(case, index)
    try:
        coarse, fine = oval_oracle(spec.delta, 600), oval_oracle(spec.delta, 900)
    except AssertionError:
        pytest.skip("no affine chart misses the real curve")
    if coarse != fine:
        pytest.skip("grid oracle does not resolve this curve")
    assert topo.oval_count == fine
    assert OVALS_OF[topo.configuration] == topo.oval_count


def test_region_laws_on_random_covers():
    checks = 0
    for case in CASES:
        for index in range(25):
            spec, topo = random_analysed(case, index)
            report = region_report(spec, topo)
            assert report.boundary_law_holds, (case, index, report.violations)
            assert report.one_sign_violations == 0, (case, index)
            checks += report.one_sign_checks
    assert checks >= 100
