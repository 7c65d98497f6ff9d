"""
Conic Bundles - Quadratic Forms
三元二次型：对称矩阵、秩与判别式、合同对角化、符号差、两种规范化
"""

import logging
from fractions import Fraction
from typing import Mapping, NamedTuple, Optional, Sequence

from .errors import DispatchError, InputError
from .exact_core import MPoly, PolyMatrix, UVW, rat_str, rational_sqrt, to_rat

logger = logging.getLogger(__name__)

_KEYS = ("m11", "m12", "m13", "m22", "m23", "m33")


# ============================================================
# TernaryForm
# ============================================================

class TernaryForm:
    """k[u,v,w] 中的二次型 Q(x) = x·M·xᵀ，M 对称有理"""

    __slots__ = ("matrix", "poly")

    def __init__(self, matrix: PolyMatrix):
        if matrix.shape != (3, 3) or matrix.varset is not None:
            raise InputError("ternary form needs a rational 3x3 matrix")
        if not matrix.is_symmetric():
            raise InputError("ternary form matrix must be symmetric")
        self.matrix = matrix
        self.poly = _poly_of(matrix)

    @classmethod
    def from_entries(cls, m11, m12, m13, m22, m23, m33) -> "TernaryForm":
        rows = [[m11, m12, m13], [m12, m22, m23], [m13, m23, m33]]
        return cls(PolyMatrix.from_rows([[to_rat(e) for e in r] for r in rows]))

    @classmethod
    def from_json(cls, payload: Mapping[str, object]) -> "TernaryForm":
        missing = [k for k in _KEYS if k not in payload]
        if missing:
            raise InputError(f"ternary form is missing entries {missing}")
        return cls.from_entries(*(payload[k] for k in _KEYS))

    @classmethod
    def from_poly(cls, poly: MPoly) -> "TernaryForm":
        """由齐次二次多项式恢复对称矩阵 (非对角项取系数的一半)"""
        poly = poly.lift(UVW)
        if poly.total_degree not in (-1, 2) or not poly.is_homogeneous():
            raise InputError(f"{poly} is not a quadratic form in u, v, w")
        terms = poly.terms
        rows = [[Fraction(0)] * 3 for _ in range(3)]
        for i in range(3):
            for j in range(i, 3):
                exp = [0, 0, 0]
                exp[i] += 1
                exp[j] += 1
                c = terms.get(tuple(exp), Fraction(0))
                if i == j:
                    rows[i][i] = c
                else:
                    rows[i][j] = rows[j][i] = c / 2
        return cls(PolyMatrix.from_rows(rows))

    @classmethod
    def diagonal(cls, d1, d2, d3) -> "TernaryForm":
        return cls(PolyMatrix.diag([to_rat(d1), to_rat(d2), to_rat(d3)]))

    # 基本运算 --------------------------------------------------------

    def __add__(self, other: "TernaryForm") -> "TernaryForm":
        return TernaryForm(self.matrix + other.matrix)

    def __sub__(self, other: "TernaryForm") -> "TernaryForm":
        return TernaryForm(self.matrix - other.matrix)

    def scale(self, c) -> "TernaryForm":
        return TernaryForm(self.matrix.scale(to_rat(c)))

    def compose(self, g: PolyMatrix) -> "TernaryForm":
        """坐标变换 x ↦ g·x 下的拉回，矩阵为 gᵀ M g"""
        return TernaryForm(g.T @ self.matrix @ g)

    def __call__(self, point: Sequence[object]) -> Fraction:
        return self.poly.evaluate([to_rat(c) for c in point])

    def entry(self, i: int, j: int) -> Fraction:
        return self.matrix[i, j]

    def __eq__(self, other) -> bool:
        return isinstance(other, TernaryForm) and self.matrix == other.matrix

    __hash__ = None

    def to_json(self) -> dict[str, str]:
        m = self.matrix
        values = (m[0, 0], m[0, 1], m[0, 2], m[1, 1], m[1, 2], m[2, 2])
        return {k: rat_str(v) for k, v in zip(_KEYS, values)}

    def __repr__(self) -> str:
        return f"TernaryForm({self.poly})"


def _poly_of(matrix: PolyMatrix) -> MPoly:
    u, v, w = MPoly.gens(UVW)
    xs = (u, v, w)
    total = MPoly.zero(UVW)
    for i in range(3):
        for j in range(3):
            c = matrix[i, j]
            if c:
                total = total + xs[i] * xs[j] * c
    return total


# ============================================================
# CoordChange
# ============================================================

class CoordChange:
    """规范化坐标变换：x ↦ g·x，外加 Case 2 中 Q2、Q3 的数乘"""

    __slots__ = ("g", "scale2", "scale3")

    def __init__(self, g: PolyMatrix, scale2=1, scale3=1):
        if g.shape != (3, 3) or g.varset is not None:
            raise InputError("coordinate change must be a rational 3x3 matrix")
        if g.det() == 0:
            raise InputError("coordinate change must be invertible")
        self.g = g
        self.scale2 = to_rat(scale2)
        self.scale3 = to_rat(scale3)

    @classmethod
    def identity(cls) -> "CoordChange":
        return cls(PolyMatrix.identity(3))

    def apply(self, q1: TernaryForm, q2: TernaryForm, q3: TernaryForm) -> tuple[TernaryForm, TernaryForm, TernaryForm]:
        return (
            q1.compose(self.g),
            q2.compose(self.g).scale(self.scale2),
            q3.compose(self.g).scale(self.scale3),
        )

    def pull_point(self, point: Sequence[object]) -> list[Fraction]:
        """新坐标下的点对应的原坐标 g·p"""
        col = PolyMatrix.from_rows([[to_rat(c)] for c in point])
        image = self.g @ col
        return [image[i, 0] for i in range(3)]

    def substitution(self) -> dict[str, MPoly]:
        """u,v,w ↦ g 的行与 (u,v,w) 的内积，供多项式拉回使用"""
        gens = MPoly.gens(UVW)
        return {
            name: sum((gens[j] * self.g[i, j] for j in range(3)), MPoly.zero(UVW))
            for i, name in enumerate(UVW)
        }

    def is_identity(self) -> bool:
        return self.g == PolyMatrix.identity(3) and self.scale2 == 1 and self.scale3 == 1

    def to_json(self) -> dict:
        return {"g": self.g.to_json(), "scale2": rat_str(self.scale2), "scale3": rat_str(self.scale3)}


# ============================================================
# 秩、判别式、对角化、符号差
# ============================================================

class RankDisc(NamedTuple):
    rank: int
    disc: Fraction
    disc_is_square: bool


def rank_disc(q: TernaryForm) -> RankDisc:
    """disc(Q) = -det(M)"""
    rank = q.matrix.rank()
    disc = -q.matrix.det()
    return RankDisc(rank, disc, rational_sqrt(disc) is not None)


def congruence_diagonalize(rows: Sequence[Sequence[object]]) -> tuple[list[Fraction], list[list[Fraction]]]:
    """对称有理矩阵的合同对角化：返回 d 与 g，使 gᵀ M g = diag(d)，零项排在最后"""
    n = len(rows)
    m = [[to_rat(x) for x in r] for r in rows]
    g = [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]

    def swap(i: int, j: int) -> None:
        if i == j:
            return
        m[i], m[j] = m[j], m[i]
        for r in m:
            r[i], r[j] = r[j], r[i]
        for r in g:
            r[i], r[j] = r[j], r[i]

    def add_to(target: int, source: int, factor: Fraction) -> None:
        # x_target ← x_target + factor·x_source 的合同变换
        for r in range(n):
            m[target][r] += factor * m[source][r]
        for r in range(n):
            m[r][target] += factor * m[r][source]
        for r in range(n):
            g[r][target] += factor * g[r][source]

    for k in range(n):
        pivot = next((i for i in range(k, n) if m[i][i] != 0), None)
        if pivot is None:
            pair = next(((i, j) for i in range(k, n) for j in range(i + 1, n) if m[i][j] != 0), None)
            if pair is None:
                break
            i, j = pair
            add_to(i, j, Fraction(1))
            pivot = i
        swap(k, pivot)
        for i in range(k + 1, n):
            if m[i][k] != 0:
                add_to(i, k, -m[i][k] / m[k][k])
    return [m[i][i] for i in range(n)], g


def diagonalize(q: TernaryForm) -> tuple[tuple[Fraction, Fraction, Fraction], CoordChange]:
    d, g = congruence_diagonalize(q.matrix.rows())
    return (d[0], d[1], d[2]), CoordChange(PolyMatrix.from_rows(g))


def signature(q) -> tuple[int, int, int]:
    """(n_plus, n_zero, n_minus)，接受 TernaryForm 或任意对称有理矩阵"""
    if isinstance(q, TernaryForm):
        rows = q.matrix.rows()
    elif isinstance(q, PolyMatrix):
        rows = q.rows()
    else:
        rows = q
    d, _ = congruence_diagonalize(rows)
    return (sum(1 for x in d if x > 0), sum(1 for x in d if x == 0), sum(1 for x in d if x < 0))


# ============================================================
# 两种规范化
# ============================================================

def normalize_case1(q1: TernaryForm) -> tuple[Fraction, Fraction, CoordChange]:
    """秩 3 且判别式为平方：Q1∘g = a u² + b v² - ab w²"""
    info = rank_disc(q1)
    if info.rank != 3:
        raise DispatchError("Case 1 needs Q1 of rank 3", {"rank": info.rank})
    if not info.disc_is_square:
        raise DispatchError("Case 1 hypothesis fails: disc(Q1) is not a square", {"disc": rat_str(info.disc)})
    (d1, d2, d3), change = diagonalize(q1)
    t = rational_sqrt(-d1 * d2 / d3)
    if t is None:
        raise DispatchError("disc(Q1) square but -ab/d3 is not", {"d": [rat_str(d1), rat_str(d2), rat_str(d3)]})
    g = change.g @ PolyMatrix.diag([1, 1, t])
    logger.debug("case 1 normalization a=%s b=%s", d1, d2)
    return d1, d2, CoordChange(g)


def normalize_case2(
    q1: TernaryForm, q2: TernaryForm, q3: TernaryForm
) -> tuple[Fraction, Fraction, CoordChange, TernaryForm, TernaryForm]:
    """秩 2：Q1∘g = a v² + b w²，根在 [1:0:0]；再缩放使 Q2'(1,0,0) = -ab"""
    info = rank_disc(q1)
    if info.rank != 2:
        raise DispatchError("Case 2 needs Q1 of rank 2", {"rank": info.rank})
    (d1, d2, _), change = diagonalize(q1)
    g0 = change.g
    # 把根向量 (第三列) 换到第一列
    perm = PolyMatrix.from_rows([[0, 1, 0], [0, 0, 1], [1, 0, 0]])
    g = g0 @ perm
    a, b = d1, d2
    lam = q2.compose(g).entry(0, 0)
    if lam == 0:
        raise DispatchError("Q2 vanishes at the vertex [1:0:0]: Delta is singular there", {"witness": ["1", "0", "0"]})
    c = -a * b / lam
    norm = CoordChange(g, scale2=c, scale3=c * c)
    _, q2n, q3n = norm.apply(q1, q2, q3)
    logger.debug("case 2 normalization a=%s b=%s lambda=%s", a, b, lam)
    return a, b, norm, q2n, q3n


def transform_triple(
    q1: TernaryForm, q2: TernaryForm, q3: TernaryForm, change: CoordChange
) -> tuple[TernaryForm, TernaryForm, TernaryForm]:
    return change.apply(q1, q2, q3)


def quartic_of(q1: TernaryForm, q2: TernaryForm, q3: TernaryForm) -> MPoly:
    """Δ = Q2² - Q1·Q3"""
    return q2.poly * q2.poly - q1.poly * q3.poly


def forms_from_json(payload: Mapping[str, object], keys: Sequence[str] = ("q1", "q2", "q3")) -> tuple[TernaryForm, ...]:
    try:
        return tuple(TernaryForm.from_json(payload[k]) for k in keys)
    except KeyError as exc:
        raise InputError(f"missing form {exc.args[0]!r}") from exc


def optional_form(payload: Mapping[str, object], key: str) -> Optional[TernaryForm]:
    return TernaryForm.from_json(payload[key]) if key in payload else None
