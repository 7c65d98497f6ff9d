"""
精确核心：有理数、多项式与矩阵
"""

import random
from fractions import Fraction

import pytest

from conic_bundles.errors import InputError, SingularMatrixError
from conic_bundles.exact_core import (
    T01,
    TVAR,
    UVW,
    MPoly,
    PolyMatrix,
    adjugate_inverse,
    binary_is_separable,
    is_rational_square,
    rat_str,
    rational_sqrt,
    to_rat,
)
from conic_bundles.exact_core.poly import canonical_varset
from conic_bundles.exact_core.rat import simplest_between, squarefree_integer


def test_rational_literals():
    assert to_rat("3/4") == Fraction(3, 4)
    assert to_rat(" -2 ") == Fraction(-2)
    assert rat_str(Fraction(6, 3)) == "2"
    assert rat_str(Fraction(-1, 2)) == "-1/2"
    with pytest.raises(InputError):
        to_rat("three")
    with pytest.raises(InputError):
        to_rat(1.5)


def test_rational_squares():
    assert rational_sqrt("9/4") == Fraction(3, 2)
    assert rational_sqrt(2) is None
    assert rational_sqrt(-4) is None
    assert is_rational_square(0)
    assert not is_rational_square("1/2")


def test_square_class_representative():
    assert squarefree_integer("3/4") == 3
    assert squarefree_integer(-18) == -2
    assert squarefree_integer("1/9") == 1


def test_simplest_between():
    assert simplest_between(-1, 2) == 0
    assert simplest_between(Fraction(3, 2), Fraction(7, 2)) == 2
    assert simplest_between(Fraction(-7, 2), Fraction(-3, 2)) == -2


def test_polynomial_arithmetic():
    u, v, w = MPoly.gens(UVW)
    f = u * u - v * w
    assert f.evaluate((2, 3, 1)) == 1
    assert f.is_homogeneous() and f.total_degree == 2
    assert (f * f).total_degree == 4
    g = f.substitute({"u": v + w}, UVW)
    assert g.evaluate((0, 1, 1)) == 3
    assert f.partial({"w": 1}).evaluate((2, 3, 5)) == 1


def test_polynomial_json_form():
    u, v, w = MPoly.gens(UVW)
    f = u * u * 3 - w * w / 2
    payload = f.to_json()
    assert payload == {"(2,0,0)": "3", "(0,0,2)": "-1/2"}
    assert MPoly.from_json(payload, UVW) == f


def test_resultant_and_gcd():
    (t,) = MPoly.gens(TVAR)
    r = (t * t - 2).resultant(t - 1, "T")
    assert r.is_constant and r.constant_value == -1
    common = ((t - 1) * (t + 2)).gcd((t - 1) * (t - 3))
    assert common.total_degree == 1
    assert common.evaluate((1,)) == 0


def test_binary_form_separability():
    t0, t1 = MPoly.gens(T01)
    assert binary_is_separable(t0 * t1 * (t0 - t1))
    assert not binary_is_separable(t0 * t0 * t1)
    # [1:0] 处的重根只在 t0 = 1 的图上可见
    assert not binary_is_separable(t1 * t1 * (t0 + t1))


def test_matrix_determinant_and_inverse():
    m = PolyMatrix.from_rows([[2, 1, 0], [1, 2, 0], [0, 0, -1]])
    assert m.det() == -3
    inv = adjugate_inverse(m)
    assert (m @ inv) == PolyMatrix.identity(3)
    with pytest.raises(SingularMatrixError):
        adjugate_inverse(PolyMatrix.diag([1, 1, 0]))


def test_polynomial_matrix_determinant():
    t0, t1 = MPoly.gens(T01)
    m = PolyMatrix.from_rows([[t0, t1], [t1, t0]])
    assert m.det() == t0 * t0 - t1 * t1
    assert m.is_symmetric()


# ============================================
# 随机性质
# ============================================

def _random_rational(rng: random.Random, bound: int = 9) -> Fraction:
    return Fraction(rng.randint(-bound, bound), rng.randint(1, 5))


def _random_matrix(rng: random.Random, n: int = 4) -> PolyMatrix:
    return PolyMatrix.from_rows([[_random_rational(rng) for _ in range(n)] for _ in range(n)])


def _random_poly(rng: random.Random, varset, degree: int, terms: int = 6) -> MPoly:
    exponents = {}
    for _ in range(terms):
        exp = [0] * len(varset)
        for _ in range(rng.randint(0, degree)):
            exp[rng.randrange(len(varset))] += 1
        exponents[tuple(exp)] = _random_rational(rng)
    return MPoly.from_terms(exponents, varset)


@pytest.mark.parametrize("seed", range(20))
def test_determinant_is_multiplicative(seed):
    rng = random.Random(seed)
    a, b = _random_matrix(rng), _random_matrix(rng)
    assert (a @ b).det() == a.det() * b.det()


@pytest.mark.parametrize("seed", range(10))
def test_adjugate_law(seed):
    rng = random.Random(100 + seed)
    m = _random_matrix(rng)
    if seed % 2:
        # 奇异：第四行取前两行之和
        rows = m.rows()
        rows[3] = [x + y for x, y in zip(rows[0], rows[1])]
        m = PolyMatrix.from_rows(rows)
        assert m.det() == 0
    assert m @ m.adjugate() == PolyMatrix.identity(4).scale(m.det())


def test_json_form_is_canonical_on_random_polynomials():
    rng = random.Random(5)
    for _ in range(200):
        f = _random_poly(rng, UVW, degree=4)
        payload = f.to_json()
        again = MPoly.from_json(payload, UVW)
        assert again == f
        assert again.to_json() == payload
        assert list(payload) == list(again.to_json())


@pytest.mark.parametrize("seed", range(20))
def test_resultant_commutes_with_specialization(seed):
    rng = random.Random(200 + seed)
    varset = canonical_varset(("u", "T"))
    t = MPoly.var("T", varset)
    p = _random_poly(rng, varset, degree=2) + t ** 3
    q = _random_poly(rng, varset, degree=1) * _random_rational(rng) + t ** 2 * 2 + MPoly.var("u", varset) * t ** 2
    res = p.resultant(q, "T")
    for _ in range(5):
        r = _random_rational(rng)
        ps, qs = p.partial({"u": r}), q.partial({"u": r})
        if ps.degree("T") != p.degree("T") or qs.degree("T") != q.degree("T"):
            continue
        assert res.partial({"u": r}) == ps.resultant(qs, "T")
