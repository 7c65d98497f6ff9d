"""
Conic Bundles - Sturm Root Isolation
基于 Sturm 计数的实根隔离与细化
"""

import logging
from fractions import Fraction
from typing import NamedTuple, Optional

from sympy import Poly

from ..errors import InputError
from ..exact_core import MPoly, rat_str, to_rat
from ..exact_core.rat import simplest_between, to_sympy_rational
from ..models import IntervalModel

logger = logging.getLogger(__name__)


class IsolatingInterval(NamedTuple):
    """(lo, hi) 内恰有一个实根，端点不是根"""
    lo: Fraction
    hi: Fraction

    @property
    def width(self) -> Fraction:
        return self.hi - self.lo

    @property
    def midpoint(self) -> Fraction:
        return (self.lo + self.hi) / 2

    def to_model(self) -> IntervalModel:
        return IntervalModel(lo=rat_str(self.lo), hi=rat_str(self.hi))


def _variable(p: MPoly) -> str:
    used = p.used_variables()
    if len(used) > 1:
        raise InputError(f"{p} is not univariate")
    return used[0] if used else p.varset[0]


def _as_poly(p: MPoly) -> Poly:
    return p.to_poly(_variable(p))


def _value(p: MPoly, x: Fraction) -> Fraction:
    return p.partial({_variable(p): x}).constant_value


def count_real_roots(p: MPoly, lo: Optional[Fraction] = None, hi: Optional[Fraction] = None) -> int:
    """闭区间 [lo, hi] 内的不同实根个数；None 表示无穷"""
    if p.is_zero:
        raise InputError("root count of the zero polynomial")
    if p.is_constant:
        return 0
    poly = _as_poly(p)
    inf = None if lo is None else to_sympy_rational(lo)
    sup = None if hi is None else to_sympy_rational(hi)
    return int(poly.count_roots(inf, sup))


def squarefree_part(p: MPoly) -> MPoly:
    if p.is_zero:
        raise InputError("squarefree part of the zero polynomial")
    if p.is_constant:
        return p
    return p.exquo(p.gcd(p.diff(_variable(p))))


def is_squarefree(p: MPoly) -> bool:
    if p.is_constant:
        return not p.is_zero
    return p.gcd(p.diff(_variable(p))).is_constant


def root_bound(p: MPoly) -> Fraction:
    """Cauchy 界：所有实根都在 (-B, B) 内"""
    coeffs = _as_poly(p).all_coeffs()
    lead = to_rat(coeffs[0])
    return 1 + max((abs(to_rat(c) / lead) for c in coeffs[1:]), default=Fraction(0))


def _nonroot_near(p: MPoly, mid: Fraction, lo: Fraction, hi: Fraction) -> Fraction:
    step = (hi - lo) / 8
    candidate = mid
    while _value(p, candidate) == 0:
        candidate = mid + step
        step /= 2
    return candidate


def sturm_isolate(p: MPoly) -> list[IsolatingInterval]:
    """无平方因子单变量多项式的全部实根，按升序给出隔离区间"""
    if p.is_zero:
        raise InputError("cannot isolate roots of the zero polynomial")
    if p.is_constant:
        return []
    if not is_squarefree(p):
        raise InputError(f"{p} is not squarefree")
    bound = root_bound(p)
    out: list[IsolatingInterval] = []
    stack = [(-bound, bound)]
    while stack:
        lo, hi = stack.pop()
        n = count_real_roots(p, lo, hi)
        if n == 0:
            continue
        if n == 1:
            out.append(IsolatingInterval(lo, hi))
            continue
        mid = _nonroot_near(p, (lo + hi) / 2, lo, hi)
        stack.append((mid, hi))
        stack.append((lo, mid))
    out.sort()
    logger.debug("isolated %d real root(s) of degree-%d polynomial", len(out), p.total_degree)
    return out


def refine(p: MPoly, interval: IsolatingInterval, width: Fraction) -> IsolatingInterval:
    """二分细化到宽度不超过 width (单根两端异号)"""
    lo, hi = interval
    s_lo = _value(p, lo)
    while hi - lo > width:
        mid = (lo + hi) / 2
        s_mid = _value(p, mid)
        if s_mid == 0:
            quarter = min(width, hi - lo) / 4
            return IsolatingInterval(mid - quarter, mid + quarter)
        if (s_mid > 0) == (s_lo > 0):
            lo, s_lo = mid, s_mid
        else:
            hi = mid
    return IsolatingInterval(lo, hi)


def sign_at_root(p: MPoly, interval: IsolatingInterval, q: MPoly) -> int:
    """q 在 p 的 (由 interval 隔离的) 实根处的符号"""
    if q.is_zero:
        return 0
    if q.is_constant:
        value = q.constant_value
        return (value > 0) - (value < 0)
    common = p.gcd(q)
    if not common.is_constant and count_real_roots(common, interval.lo, interval.hi) > 0:
        return 0
    current = interval
    while count_real_roots(q, current.lo, current.hi) > 0:
        current = refine(p, current, current.width / 2)
    value = _value(q, current.lo)
    return (value > 0) - (value < 0)


def sample_between(left: Optional[IsolatingInterval], right: Optional[IsolatingInterval]) -> Fraction:
    """两个相邻根之间的有理样本；None 表示无穷"""
    if left is None and right is None:
        return Fraction(0)
    if left is None:
        return Fraction(int(right.lo) - 1)
    if right is None:
        return Fraction(int(left.hi) + 1)
    if left.hi < right.lo:
        return simplest_between(left.hi, right.lo)
    return left.hi
