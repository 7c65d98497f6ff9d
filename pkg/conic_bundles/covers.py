"""
Conic Bundles - Double Covers
双覆盖数据：四次曲线 Δ、六次形式 W 及其证书
"""

import logging
from typing import Optional, Sequence

from .errors import InputError
from .exact_core import MPoly, PolyMatrix, T01, binary_is_separable, rat_str, to_rat
from .models import SmoothnessCertificate, SmoothVerdict
from .quadform import TernaryForm, quartic_of
from .smoothness import certify_quartic

logger = logging.getLogger(__name__)


class CoverSpec:
    """(Q1,Q2,Q3) 决定的 Δ̃ → P² 与 Γ → P¹"""

    __slots__ = ("q1", "q2", "q3", "delta", "W", "smooth", "separable", "seed", "max_retries")

    def __init__(
        self,
        q1: TernaryForm,
        q2: TernaryForm,
        q3: TernaryForm,
        delta: MPoly,
        W: MPoly,
        smooth: SmoothnessCertificate,
        separable: bool,
        seed: int,
        max_retries: int,
    ):
        self.q1, self.q2, self.q3 = q1, q2, q3
        self.delta = delta
        self.W = W
        self.smooth = smooth
        self.separable = separable
        self.seed = seed
        self.max_retries = max_retries

    @property
    def forms(self) -> tuple[TernaryForm, TernaryForm, TernaryForm]:
        return self.q1, self.q2, self.q3

    @property
    def admissible(self) -> bool:
        return self.smooth.verdict == SmoothVerdict.SMOOTH and self.separable

    def to_json(self) -> dict:
        return {
            "q1": self.q1.to_json(),
            "q2": self.q2.to_json(),
            "q3": self.q3.to_json(),
            "delta": self.delta.to_json(),
            "W": self.W.to_json(),
            "smooth": self.smooth.model_dump(mode="json"),
            "separable": self.separable,
        }


# ============================================================
# 构造
# ============================================================

def pencil_matrix(q1: TernaryForm, q2: TernaryForm, q3: TernaryForm, t: Optional[Sequence[object]] = None) -> PolyMatrix:
    """M(t) = t0² M1 + 2 t0 t1 M2 + t1² M3；t 为 None 时返回 T01 上的多项式矩阵"""
    if t is not None:
        t0, t1 = (to_rat(c) for c in t)
        return q1.matrix.scale(t0 * t0) + q2.matrix.scale(2 * t0 * t1) + q3.matrix.scale(t1 * t1)
    t0, t1 = MPoly.gens(T01)
    return q1.matrix.scale(t0 * t0) + q2.matrix.scale(t0 * t1 * 2) + q3.matrix.scale(t1 * t1)


def sextic_of(q1: TernaryForm, q2: TernaryForm, q3: TernaryForm) -> MPoly:
    """W(t0,t1) = det M(t)"""
    return pencil_matrix(q1, q2, q3).det()


def build_cover(
    q1: TernaryForm,
    q2: TernaryForm,
    q3: TernaryForm,
    seed: int = 0,
    max_retries: int = 8,
    certificate: Optional[SmoothnessCertificate] = None,
) -> CoverSpec:
    """计算 Δ 与 W 并执行两项证书；证书失败只记录，不抛出"""
    delta = quartic_of(q1, q2, q3)
    if delta.is_zero:
        raise InputError("Q2² - Q1·Q3 vanishes identically")
    W = sextic_of(q1, q2, q3)
    smooth = certificate or certify_quartic(delta, seed, max_retries)
    separable = (not W.is_zero) and binary_is_separable(W)
    logger.info("cover built: smooth=%s separable=%s", smooth.verdict.value, separable)
    return CoverSpec(q1, q2, q3, delta, W, smooth, separable, seed, max_retries)


def check_quartic_smooth(spec: CoverSpec, seed: Optional[int] = None) -> SmoothnessCertificate:
    return certify_quartic(spec.delta, spec.seed if seed is None else seed, spec.max_retries)


def check_sextic_separable(spec: CoverSpec) -> bool:
    if spec.W.is_zero:
        return False
    return binary_is_separable(spec.W)


# ============================================================
# 实点判定
# ============================================================

def gamma_real_nonempty(spec: CoverSpec) -> bool:
    """W 在 P¹(R) 上某处取非负值"""
    if spec.W.is_zero:
        return True
    chart = spec.W.partial({"t1": 1})
    if spec.W.evaluate((1, 0)) == 0:
        return True
    if not chart.is_constant and chart.to_poly("t0").count_roots() > 0:
        return True
    # 无实根：符号恒定，取 [1:0] 处的值
    return spec.W.evaluate((1, 0)) > 0


def deltatilde_real_over(spec: CoverSpec, p: Sequence[object]) -> bool:
    """Δ 上有理点 p 处 Δ̃ 的纤维是否有实点"""
    point = [to_rat(c) for c in p]
    if all(c == 0 for c in point):
        raise InputError("the zero vector is not a projective point")
    if spec.delta.evaluate(point) != 0:
        raise InputError(f"point {[rat_str(c) for c in point]} is not on Delta")
    v1 = spec.q1(point)
    if v1 > 0:
        return True
    if v1 < 0:
        return False
    if spec.q2(point) != 0:
        raise InputError("Q1 = 0 but Q2 != 0 on Delta")
    return spec.q3(point) >= 0


# ============================================================
# PGL2 作用
# ============================================================

def apply_pgl2(
    q1: TernaryForm, q2: TernaryForm, q3: TernaryForm, sub: Sequence[object]
) -> tuple[TernaryForm, TernaryForm, TernaryForm]:
    """(t0,t1) ↦ (α s0 + β s1, γ s0 + δ s1) 下的新三元组"""
    alpha, beta, gamma, delta = (to_rat(c) for c in sub)
    if alpha * delta - beta * gamma == 0:
        raise InputError("PGL2 substitution must be invertible")
    n1 = q1.scale(alpha * alpha) + q2.scale(2 * alpha * gamma) + q3.scale(gamma * gamma)
    n2 = q1.scale(alpha * beta) + q2.scale(alpha * delta + beta * gamma) + q3.scale(gamma * delta)
    n3 = q1.scale(beta * beta) + q2.scale(2 * beta * delta) + q3.scale(delta * delta)
    return n1, n2, n3


def transform_sextic(W: MPoly, sub: Sequence[object]) -> MPoly:
    alpha, beta, gamma, delta = (to_rat(c) for c in sub)
    s0, s1 = MPoly.gens(T01)
    return W.substitute({"t0": s0 * alpha + s1 * beta, "t1": s0 * gamma + s1 * delta}, T01)
