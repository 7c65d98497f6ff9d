"""
Conic Bundles - Rationals
有理数工具
"""

from fractions import Fraction
from typing import Union

from sympy import Rational, factorint, integer_nthroot
from sympy.polys.domains import QQ

from ..errors import InputError

Rat = Fraction
RatLike = Union[Fraction, int, str]


def to_rat(value) -> Fraction:
    """把 int / str / Fraction / sympy 有理数 / QQ 元素统一成 Fraction"""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise InputError(f"not a rational literal: {value!r}")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise InputError(f"bad rational literal {value!r}") from exc
    if isinstance(value, Rational):
        return Fraction(int(value.p), int(value.q))
    if hasattr(value, "numerator") and hasattr(value, "denominator"):
        return Fraction(int(value.numerator), int(value.denominator))
    raise InputError(f"not a rational literal: {value!r}")


def to_qq(value):
    r = to_rat(value)
    return QQ(r.numerator, r.denominator)


def to_sympy_rational(value) -> Rational:
    r = to_rat(value)
    return Rational(r.numerator, r.denominator)


def rat_str(value) -> str:
    """序列化为 "p/q"，分母为 1 时省略"""
    r = to_rat(value)
    return str(r.numerator) if r.denominator == 1 else f"{r.numerator}/{r.denominator}"


def is_rational_square(value) -> bool:
    return rational_sqrt(value) is not None


def rational_sqrt(value):
    """有理平方根；不是平方时返回 None"""
    r = to_rat(value)
    if r < 0:
        return None
    p, p_exact = integer_nthroot(r.numerator, 2)
    q, q_exact = integer_nthroot(r.denominator, 2)
    if p_exact and q_exact:
        return Fraction(int(p), int(q))
    return None


def squarefree_integer(value) -> int:
    """有理数平方类的无平方因子整数代表元 (p/q -> p*q 再去平方)"""
    r = to_rat(value)
    if r == 0:
        raise InputError("zero has no square class")
    n = r.numerator * r.denominator
    sign = -1 if n < 0 else 1
    core = 1
    for prime, exponent in factorint(abs(n)).items():
        if exponent % 2:
            core *= prime
    return sign * core


def simplest_between(lo, hi) -> Fraction:
    """开区间 (lo, hi) 内分母最小的有理数 (Stern-Brocot)"""
    lo, hi = to_rat(lo), to_rat(hi)
    if lo >= hi:
        raise InputError(f"empty interval ({lo}, {hi})")
    if lo < 0 < hi:
        return Fraction(0)
    if hi <= 0:
        return -simplest_between(-hi, -lo)
    fl = lo.numerator // lo.denominator
    if fl + 1 < hi:
        return Fraction(fl + 1)
    # lo 与 hi 之间没有整数：对小数部分递归取倒数
    frac_lo, frac_hi = lo - fl, hi - fl
    if frac_lo == 0:
        k = (1 / frac_hi).numerator // (1 / frac_hi).denominator + 1
        return fl + Fraction(1, k)
    return fl + 1 / simplest_between(1 / frac_hi, 1 / frac_lo)
