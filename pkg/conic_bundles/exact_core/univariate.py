"""
Conic Bundles - Univariate Tools
单变量多项式工具：gcd、导数、可分性、结式、判别式
"""

from typing import Optional, Union

from ..errors import InputError
from .poly import MPoly


def _single_variable(p: MPoly) -> str:
    used = p.used_variables()
    if len(used) > 1:
        raise InputError(f"{p} is not univariate")
    return used[0] if used else p.varset[0]


def _require_nonzero(p: MPoly) -> None:
    if p.is_zero:
        raise InputError("zero polynomial")


def derivative(p: MPoly) -> MPoly:
    _require_nonzero(p)
    return p.diff(_single_variable(p))


def uni_gcd(p: MPoly, q: MPoly) -> MPoly:
    """首一化的 gcd"""
    _require_nonzero(p)
    g = p.gcd(q)
    if g.is_zero:
        return g
    lead = g.to_poly(_single_variable(g)).LC() if not g.is_constant else g.constant_value
    return g / lead


def is_separable(p: MPoly, degree: Optional[int] = None) -> bool:
    """gcd(p, p') 为常数；给出 degree 时按二元形式处理 (无穷远处的根也计入)"""
    _require_nonzero(p)
    if degree is not None:
        name = _single_variable(p)
        deg = p.degree(name)
        if deg < degree - 1:
            # 无穷远处是重根
            return False
    if p.is_constant:
        return True
    return uni_gcd(p, derivative(p)).is_constant


def binary_is_separable(form: MPoly) -> bool:
    """二元齐次形式在两个仿射图上都无重根"""
    _require_nonzero(form)
    if not form.is_homogeneous():
        raise InputError(f"{form} is not a binary form")
    if len(form.varset) != 2:
        raise InputError(f"{form} is not in two variables")
    first, second = form.varset
    chart_a = form.partial({second: 1})
    chart_b = form.partial({first: 1})
    return _chart_squarefree(chart_a) and _chart_squarefree(chart_b)


def _chart_squarefree(p: MPoly) -> bool:
    if p.is_zero:
        return False
    if p.is_constant:
        return True
    return p.gcd(p.diff(_single_variable(p))).is_constant


def dehomogenize(form: MPoly, chart: str) -> MPoly:
    """在 chart 变量取 1 的仿射图上去齐次化"""
    return form.partial({chart: 1})


def resultant(p: MPoly, q: MPoly) -> MPoly:
    _require_nonzero(p)
    _require_nonzero(q)
    return p.resultant(q, _single_variable(p * q))


def discriminant(p: MPoly) -> MPoly:
    _require_nonzero(p)
    return p.discriminant(_single_variable(p))


def uni_tools(p: MPoly, op: str, other: Optional[MPoly] = None, degree: Optional[int] = None) -> Union[MPoly, bool]:
    """统一入口：gcd | derivative | is_separable | resultant | discriminant"""
    if op == "gcd":
        if other is None:
            raise InputError("gcd needs a second polynomial")
        return uni_gcd(p, other)
    if op == "derivative":
        return derivative(p)
    if op == "is_separable":
        if p.is_homogeneous() and len(p.varset) == 2 and len(p.used_variables()) >= 1 and degree is None:
            return binary_is_separable(p)
        return is_separable(p, degree)
    if op == "resultant":
        if other is None:
            raise InputError("resultant needs a second polynomial")
        return resultant(p, other)
    if op == "discriminant":
        return discriminant(p)
    raise InputError(f"unknown uni_tools op {op!r}")
