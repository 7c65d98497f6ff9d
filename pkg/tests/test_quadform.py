"""
三元二次型：对角化、符号差与两种规范化
"""

import random
from fractions import Fraction

import pytest

from conic_bundles.errors import DispatchError, InputError
from conic_bundles.exact_core import PolyMatrix
from conic_bundles.quadform import (
    CoordChange,
    TernaryForm,
    normalize_case1,
    normalize_case2,
    quartic_of,
    rank_disc,
    signature,
)

from conftest import CASES, random_cover, random_symmetric, random_unimodular


def test_form_from_entries_and_poly():
    q = TernaryForm.from_entries(1, 1, 0, 2, 0, -1)
    assert q((1, 1, 0)) == 5
    assert q((0, 0, 1)) == -1
    assert TernaryForm.from_poly(q.poly) == q


def test_form_rejects_asymmetric_matrix():
    with pytest.raises(InputError):
        TernaryForm(PolyMatrix.from_rows([[1, 2, 0], [0, 1, 0], [0, 0, 1]]))


def test_form_json_uses_rational_strings():
    q = TernaryForm.from_json({"m11": "3/6", "m12": 0, "m13": 0, "m22": 1, "m23": 0, "m33": -2})
    assert q.to_json()["m11"] == "1/2"
    with pytest.raises(InputError):
        TernaryForm.from_json({"m11": 1})


def test_signature():
    assert signature(TernaryForm.diagonal(1, -1, 0)) == (1, 1, 1)
    assert signature([[0, 1, 0], [1, 0, 0], [0, 0, 1]]) == (2, 0, 1)
    assert signature(TernaryForm.diagonal(-1, -2, -3)) == (0, 0, 3)


def test_rank_and_discriminant(load_fixture):
    q1, _, _ = load_fixture("four_ovals").forms()
    info = rank_disc(q1)
    assert info.rank == 3 and info.disc == 81 and info.disc_is_square

    q1, _, _ = load_fixture("empty_curve").forms()
    info = rank_disc(q1)
    assert info.disc == -2 and not info.disc_is_square

    q1, _, _ = load_fixture("one_oval").forms()
    assert rank_disc(q1).rank == 2


def test_case1_normalization(load_fixture):
    q1, _, _ = load_fixture("four_ovals").forms()
    a, b, change = normalize_case1(q1)
    assert (a, b) == (3, 3)
    assert q1.compose(change.g) == TernaryForm.diagonal(a, b, -a * b)


def test_case1_rejects_nonsquare_discriminant(load_fixture):
    q1, _, _ = load_fixture("empty_curve").forms()
    with pytest.raises(DispatchError):
        normalize_case1(q1)


def test_case2_normalization(load_fixture):
    q1, q2, q3 = load_fixture("one_oval").forms()
    a, b, change, q2n, q3n = normalize_case2(q1, q2, q3)
    assert (a, b) == (3, 3)
    assert q1.compose(change.g) == TernaryForm.diagonal(0, a, b)
    assert q2n.entry(0, 0) == -a * b
    # Δ 在规范化下乘以平方因子 c²
    c = change.scale2
    assert c == Fraction(-9)
    n1, n2, n3 = change.apply(q1, q2, q3)
    point = (1, 2, 3)
    original = change.pull_point(point)
    assert quartic_of(n1, n2, n3).evaluate(point) == c * c * quartic_of(q1, q2, q3).evaluate(original)


def test_case2_needs_rank_two(load_fixture):
    q1, q2, q3 = load_fixture("four_ovals").forms()
    with pytest.raises(DispatchError):
        normalize_case2(q1, q2, q3)


def test_coordinate_change_must_be_invertible():
    with pytest.raises(InputError):
        CoordChange(PolyMatrix.diag([1, 1, 0]))
    assert CoordChange.identity().is_identity()


# ============================================
# 随机实例上的不变量
# ============================================

def _random_invertible(rng: random.Random) -> PolyMatrix:
    while True:
        g = PolyMatrix.from_rows(
            [[Fraction(rng.randint(-4, 4), rng.randint(1, 3)) for _ in range(3)] for _ in range(3)]
        )
        if g.det() != 0:
            return g


@pytest.mark.parametrize("seed", range(20))
def test_signature_is_a_congruence_invariant(seed):
    rng = random.Random(seed)
    q = random_symmetric(rng)
    g = _random_invertible(rng)
    assert signature(q) == signature(q.compose(g))
    assert sum(signature(q)) == 3
    assert signature(q)[1] == 3 - rank_disc(q).rank


@pytest.mark.parametrize("seed", range(20))
def test_square_discriminant_survives_unimodular_change(seed):
    rng = random.Random(seed)
    q = random_symmetric(rng)
    g = random_unimodular(rng)
    before, after = rank_disc(q), rank_disc(q.compose(g))
    assert after.disc == before.disc
    assert after.disc_is_square == before.disc_is_square


@pytest.mark.parametrize("index", range(10))
def test_case1_normalization_on_random_forms(index):
    q1, _, _ = random_cover(CASES[0], index).forms
    a, b, change = normalize_case1(q1)
    assert q1.compose(change.g) == TernaryForm.diagonal(a, b, -a * b)


@pytest.mark.parametrize("index", range(10))
def test_case2_normalization_on_random_forms(index):
    q1, q2, q3 = random_cover(CASES[1], index).forms
    a, b, change, q2n, _ = normalize_case2(q1, q2, q3)
    assert q1.compose(change.g) == TernaryForm.diagonal(0, a, b)
    assert q2n.entry(0, 0) == -a * b
