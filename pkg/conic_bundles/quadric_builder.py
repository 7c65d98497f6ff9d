"""
Conic Bundles - Quadric Pencil Builder
构造 P⁵ 中的二次曲面束 (A0, A∞) 并验证全部恒等式
"""

import logging
from fractions import Fraction
from typing import Optional, Sequence

from .brauer import FunctionSymbol
from .covers import CoverSpec, check_sextic_separable
from .errors import DispatchError, InadmissibleError, InputError
from .exact_core import MPoly, PolyMatrix, TVAR, UVW, X6, adjugate_inverse, binary_is_separable, rat_str
from .models import CaseTag, SmoothVerdict, VerificationReport
from .quadform import CoordChange, TernaryForm, normalize_case1, normalize_case2, quartic_of, rank_disc

logger = logging.getLogger(__name__)

_TS = ("T", "S")


class QuadricPencil:
    """Z = V(q0, q∞) ⊂ P⁵ 及其构造来源"""

    __slots__ = ("case", "a", "b", "A0", "Ainf", "change", "forms", "T2", "N1")

    def __init__(
        self,
        case: CaseTag,
        a: Fraction,
        b: Fraction,
        A0: PolyMatrix,
        Ainf: PolyMatrix,
        change: CoordChange,
        forms: tuple[TernaryForm, TernaryForm, TernaryForm],
        T2: Optional[PolyMatrix] = None,
        N1: Optional[PolyMatrix] = None,
    ):
        self.case = case
        self.a, self.b = a, b
        self.A0, self.Ainf = A0, Ainf
        self.change = change
        self.forms = forms
        self.T2, self.N1 = T2, N1

    @property
    def q0(self) -> MPoly:
        return form_of(self.A0)

    @property
    def qinf(self) -> MPoly:
        return form_of(self.Ainf)

    @property
    def delta(self) -> MPoly:
        """规范化坐标下的 Δ"""
        return quartic_of(*self.forms)

    def to_json(self) -> dict:
        payload = {
            "case": self.case.value,
            "a": rat_str(self.a),
            "b": rat_str(self.b),
            "A0": self.A0.to_json(),
            "Ainf": self.Ainf.to_json(),
            "change": self.change.to_json(),
            "normalized_forms": [q.to_json() for q in self.forms],
        }
        if self.T2 is not None:
            payload["T2"] = self.T2.to_json()
            payload["N1"] = self.N1.to_json()
        return payload


class FiberForm:
    """点 p 处的 B_p、Gram 矩阵 B_pᵀ A0 B_p 与指定子矩阵 bM"""

    __slots__ = ("point", "Bp", "gram", "bM")

    def __init__(self, point, Bp: PolyMatrix, gram: PolyMatrix, bM: PolyMatrix):
        self.point = point
        self.Bp = Bp
        self.gram = gram
        self.bM = bM


def form_of(matrix: PolyMatrix) -> MPoly:
    """x·A·xᵀ，x = (x0..x5)"""
    xs = MPoly.gens(X6)
    total = MPoly.zero(X6)
    n = matrix.shape[0]
    for i in range(n):
        for j in range(n):
            c = matrix[i, j]
            if c:
                total = total + xs[i] * xs[j] * c
    return total


def _zero_block(n: int, m: int) -> PolyMatrix:
    return PolyMatrix.zeros(n, m)


def _direct_sum(c, N: PolyMatrix) -> PolyMatrix:
    """c ⊕ N：左上角为 c 的 3×3 分块对角矩阵"""
    return PolyMatrix.block([
        [PolyMatrix.from_rows([[c]]), _zero_block(1, 2)],
        [_zero_block(2, 1), N],
    ])


def _upper_half(M: PolyMatrix) -> PolyMatrix:
    """满足 T + Tᵀ = 2M 的唯一上三角矩阵"""
    n = M.shape[0]
    rows = [[(M[i, j] if i == j else 2 * M[i, j]) if j >= i else 0 for j in range(n)] for i in range(n)]
    return PolyMatrix.from_rows(rows)


# ============================================================
# 构造
# ============================================================

def _require_admissible(spec: CoverSpec) -> None:
    if not spec.admissible:
        certificate = "smoothness" if spec.smooth.verdict != SmoothVerdict.SMOOTH else "separability"
        raise InadmissibleError(certificate, f"cover is not admissible ({certificate} certificate failed)")


def build_pencil(spec: CoverSpec, require_admissible: bool = True) -> QuadricPencil:
    """按 Q1 的秩分派到 Case 1 / Case 2"""
    if require_admissible:
        _require_admissible(spec)
    q1, q2, q3 = spec.forms
    info = rank_disc(q1)
    if info.rank == 3:
        return _build_case1(q1, q2, q3)
    if info.rank == 2:
        return _build_case2(q1, q2, q3)
    raise DispatchError(f"Q1 has rank {info.rank}; a smooth quartic needs rank >= 2", {"rank": info.rank})


def _build_case1(q1: TernaryForm, q2: TernaryForm, q3: TernaryForm) -> QuadricPencil:
    a, b, change = normalize_case1(q1)
    forms = change.apply(q1, q2, q3)
    M1, M2, M3 = (q.matrix for q in forms)
    ab = a * b
    M1inv = adjugate_inverse(M1)
    top_left = M1inv.scale(ab)
    top_right = -(M1inv @ M2)
    bottom_left = -(M2 @ M1inv)
    bottom_right = (M3 - M2 @ M1inv @ M2).scale(Fraction(-1) / ab)
    A0 = PolyMatrix.block([[top_left, top_right], [bottom_left, bottom_right]])
    I3, Z3 = PolyMatrix.identity(3), PolyMatrix.zeros(3)
    Ainf = PolyMatrix.block([[Z3, I3], [I3, Z3]])
    logger.info("case 1 pencil built (a=%s, b=%s)", a, b)
    return QuadricPencil(CaseTag.RANK3, a, b, A0, Ainf, change, forms)


def _build_case2(q1: TernaryForm, q2: TernaryForm, q3: TernaryForm) -> QuadricPencil:
    a, b, change, q2n, q3n = normalize_case2(q1, q2, q3)
    q1n = q1.compose(change.g)
    forms = (q1n, q2n, q3n)
    M2, M3 = q2n.matrix, q3n.matrix
    ab = a * b
    N1 = PolyMatrix.diag([a, b])
    N1inv = adjugate_inverse(N1)
    T2 = _upper_half(M2)
    zero_n1inv = _direct_sum(0, N1inv)
    top_left = _direct_sum(1, N1inv.scale(-ab))
    top_right = -(zero_n1inv @ T2.T)
    bottom_left = -(T2 @ zero_n1inv)
    bottom_right = (M3 + T2 @ _direct_sum(0, -N1inv) @ T2.T).scale(1 / ab)
    A0 = PolyMatrix.block([[top_left, top_right], [bottom_left, bottom_right]])
    I2 = PolyMatrix.identity(2)
    Ainf = PolyMatrix.block([
        [PolyMatrix.zeros(3), _direct_sum(0, I2)],
        [_direct_sum(0, I2), _direct_sum(2, PolyMatrix.zeros(2))],
    ])
    logger.info("case 2 pencil built (a=%s, b=%s)", a, b)
    return QuadricPencil(CaseTag.RANK2, a, b, A0, Ainf, change, forms, T2=T2, N1=N1)


# ============================================================
# 验证
# ============================================================

def pencil_discriminant(p: QuadricPencil) -> MPoly:
    """det(A0 - T·A∞)"""
    T = MPoly.var("T", TVAR)
    return (p.A0.lift(TVAR) - p.Ainf.scale(T)).det()


def sextic_in_T(p: QuadricPencil) -> MPoly:
    """det(M3 + 2T M2 + T² M1)，取规范化后的矩阵"""
    T = MPoly.var("T", TVAR)
    M1, M2, M3 = (q.matrix for q in p.forms)
    return (M3.lift(TVAR) + M2.scale(T * 2) + M1.scale(T * T)).det()


def homogenize(poly: MPoly, degree: int) -> MPoly:
    """把 T 的多项式齐次化为 (T, S) 上的 degree 次二元形式"""
    terms = {}
    for (d,), c in poly.lift(TVAR).terms.items():
        if d > degree:
            raise InputError(f"degree {d} exceeds {degree}")
        terms[(d, degree - d)] = c
    return MPoly.from_terms(terms, _TS)


def _leading_ratio(lhs: MPoly, rhs: MPoly) -> Optional[Fraction]:
    if rhs.is_zero or lhs.is_zero:
        return None
    top_r = max(rhs.terms)
    c_l = lhs.terms.get(top_r)
    if c_l is None:
        return None
    return c_l / rhs.terms[top_r]


def verify_pencil(p: QuadricPencil, spec: CoverSpec) -> VerificationReport:
    """判别式恒等式、可分性、q∞ 与 q0 在 Λ 上的限制等检查"""
    report = VerificationReport()

    # (i) det(A0 - T A∞) = c·det(M3 + 2T M2 + T² M1)
    lhs, rhs = pencil_discriminant(p), sextic_in_T(p)
    c = _leading_ratio(lhs, rhs)
    if c is None or c == 0:
        report.record("discriminant_identity", False, residual=lhs.to_json(), detail="no nonzero scalar")
    else:
        residual = lhs - rhs.scale(c)
        report.record("discriminant_identity", residual.is_zero, residual=residual.to_json(), detail=f"c={rat_str(c)}")

    # (ii) 可分性与 W 一致
    sep_pencil = (not lhs.is_zero) and binary_is_separable(homogenize(lhs, 6))
    sep_cover = check_sextic_separable(spec)
    report.record(
        "separability_matches",
        sep_pencil == sep_cover and sep_pencil,
        residual={"pencil": sep_pencil, "cover": sep_cover},
        detail=f"pencil={sep_pencil} cover={sep_cover}",
    )

    # (iii) q∞ 在 V(x3,x4,x5) 上恒为零
    zero_tail = {name: 0 for name in ("x3", "x4", "x5")}
    qinf_res = p.qinf.partial(zero_tail)
    report.record("qinf_vanishes_on_lambda", qinf_res.is_zero, residual=qinf_res.to_json())

    # (iv) q0 在 Λ 上为秩 3；Case 1 中等于 ab·M1⁻¹
    restriction = p.A0.submatrix(range(3), range(3))
    rank = restriction.rank()
    report.record("q0_restriction_rank3", rank == 3, residual={"rank": rank})
    if p.case == CaseTag.RANK3:
        expected = adjugate_inverse(p.forms[0].matrix).scale(p.a * p.b)
        diff = restriction - expected
        report.record("q0_restriction_block", diff.is_zero(), residual=diff.to_json())
        expected_qinf = sum(
            (MPoly.var(f"x{i}", X6) * MPoly.var(f"x{i + 3}", X6) * 2 for i in range(3)), MPoly.zero(X6)
        )
        qinf_diff = p.qinf - expected_qinf
        report.record("qinf_block_form", qinf_diff.is_zero, residual=qinf_diff.to_json())

    # 形式与矩阵的对偶、对称性
    report.record("matrices_symmetric", p.A0.is_symmetric() and p.Ainf.is_symmetric())
    sample = [1, -2, 3, 5, -7, 11]
    col = PolyMatrix.from_rows([[c] for c in sample])
    duality = [
        form.evaluate(sample) - (col.T @ matrix @ col)[0, 0]
        for form, matrix in ((p.q0, p.A0), (p.qinf, p.Ainf))
    ]
    report.record("form_matrix_duality", all(d == 0 for d in duality), residual=[rat_str(d) for d in duality])
    return report


# ============================================================
# 纤维形式
# ============================================================

def _point_entries(point: Optional[Sequence[object]]):
    if point is None:
        return MPoly.gens(UVW)
    return tuple(MPoly.const(c, UVW) for c in point)


def fiber_form(p: QuadricPencil, point: Optional[Sequence[object]] = None) -> FiberForm:
    """点 p 处的 B_p 与 Gram 矩阵；point 为 None 时按符号计算"""
    u, v, w = _point_entries(point)
    zero = MPoly.zero(UVW)
    if p.case == CaseTag.RANK3:
        rows = [
            [-v, -w, zero, zero],
            [u, zero, -w, zero],
            [zero, u, v, zero],
            [zero, zero, zero, u],
            [zero, zero, zero, v],
            [zero, zero, zero, w],
        ]
        bm_index = [1, 2, 3]
    else:
        one = MPoly.const(1, UVW)
        rows = [
            [one, zero, zero, zero],
            [zero, -w, -u * u, zero],
            [zero, v, zero, -u * u],
            [zero, zero, u * v, u * w],
            [zero, zero, v * v, v * w],
            [zero, zero, w * v, w * w],
        ]
        bm_index = [1, 2]
    Bp = PolyMatrix.from_rows(rows, UVW)
    gram = Bp.T @ p.A0.lift(UVW) @ Bp
    bM = gram.submatrix(bm_index, bm_index)
    if p.case == CaseTag.RANK2:
        bM = -bM
    return FiberForm(point, Bp, gram, bM)


def _leading_minor(m: PolyMatrix, i: int) -> MPoly:
    return MPoly.coerce(m.submatrix(range(i), range(i)).det(), UVW)


def verify_minors(f: FiberForm, p: QuadricPencil, spec: Optional[CoverSpec] = None) -> VerificationReport:
    """bM 的子式恒等式 (规范化坐标)"""
    report = VerificationReport()
    q1 = p.forms[0].poly
    delta = p.delta
    u, v, w = MPoly.gens(UVW)
    ab = p.a * p.b
    report.record("gram_symmetric", f.gram.is_symmetric())
    if p.case == CaseTag.RANK3:
        expected = [
            -(u * u - w * w * p.b),
            -(w * w * q1),
            -(w * w * delta) / ab,
        ]
        for i, target in enumerate(expected, start=1):
            residual = _leading_minor(f.bM, i) - target
            report.record(f"minor_{i}", residual.is_zero, residual=residual.to_json())
    else:
        top = MPoly.coerce(f.bM[0, 0], UVW) - q1
        report.record("bM_top_left_is_Q1", top.is_zero, residual=top.to_json())
        disc = -MPoly.coerce(f.bM.det(), UVW) - (-(v * v * delta) / ab)
        report.record("bM_discriminant", disc.is_zero, residual=disc.to_json())
        corner = MPoly.coerce(f.gram[0, 0], UVW) - 1
        off = [MPoly.coerce(f.gram[0, j], UVW) for j in range(1, 4)]
        block_ok = corner.is_zero and all(e.is_zero for e in off)
        report.record("gram_block_diagonal", block_ok, residual=corner.to_json())
        tail = MPoly.coerce(f.gram.submatrix([1, 2, 3], [1, 2, 3]).det(), UVW)
        report.record("gram_tail_singular", tail.is_zero, residual=tail.to_json())
        bm_det = MPoly.coerce(f.bM.det(), UVW)
        report.record("bM_nonsingular", not bm_det.is_zero)
    if spec is not None:
        # Δ' = scale2² · Δ∘g
        pulled = spec.delta.substitute(p.change.substitution(), UVW).scale(p.change.scale2 * p.change.scale2)
        frame = delta - pulled
        report.record("normalized_delta", frame.is_zero, residual=frame.to_json())
    return report


# ============================================================
# 一般纤维的符号
# ============================================================

class GenericFiberSymbols:
    """原始符号与化简后的目标形式"""

    __slots__ = ("raw", "simplified", "y_symbol", "constant")

    def __init__(self, raw: FunctionSymbol, simplified: FunctionSymbol, y_symbol: FunctionSymbol, constant: FunctionSymbol):
        self.raw = raw
        self.simplified = simplified
        self.y_symbol = y_symbol
        self.constant = constant

    def to_json(self) -> dict:
        return {
            "raw": self.raw.to_json(),
            "simplified": self.simplified.to_json(),
            "y_symbol": self.y_symbol.to_json(),
            "constant": self.constant.to_json(),
        }


def generic_fiber_symbol(p: QuadricPencil, spec: CoverSpec) -> GenericFiberSymbols:
    """从对角化读出 [(Bl_C Z)_η] 的原始符号，以及 (Q1, Δ) + (a, b)

    符号位于规范化坐标中；spec 须满足光滑与可分两个证书
    """
    _require_admissible(spec)
    expected_case = CaseTag.RANK3 if rank_disc(spec.q1).rank == 3 else CaseTag.RANK2
    if p.case != expected_case:
        raise InputError(f"pencil case {p.case.value} does not match the cover (expected {expected_case.value})")
    q1 = p.forms[0].poly
    delta = p.delta
    u, v, w = MPoly.gens(UVW)
    ab = p.a * p.b
    if p.case == CaseTag.RANK3:
        raw = FunctionSymbol([((u * u - w * w * p.b) * q1 * delta * ab, q1)])
    else:
        raw = FunctionSymbol([(-(v * v * delta) / ab, q1)])
    y_symbol = FunctionSymbol([(q1, delta)])
    constant = FunctionSymbol([(MPoly.const(p.a, UVW), MPoly.const(p.b, UVW))])
    return GenericFiberSymbols(raw, y_symbol + constant, y_symbol, constant)
