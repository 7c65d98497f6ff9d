"""
Conic Bundles - Brauer Classes
Br(Q)[2]：Hilbert 符号、四元数代数类、函数域符号的特化与剩余
"""

import logging
import random
from fractions import Fraction
from math import gcd
from typing import Iterable, NamedTuple, Optional, Sequence

from sympy import primefactors
from sympy.ntheory import is_quad_residue

from .covers import CoverSpec
from .errors import InputError, SamplingError
from .exact_core import MPoly, UVW, rat_str, rational_sqrt, to_rat
from .models import (
    BrauerClass2,
    ComparisonResult,
    LineConstancy,
    ResidueReport,
    SpecializationSample,
)
from .quadform import TernaryForm, diagonalize, rank_disc

logger = logging.getLogger(__name__)


# ============================================================
# 位与 Hilbert 符号
# ============================================================

class Place(NamedTuple):
    """Q 的位：prime 为 None 表示实位"""
    prime: Optional[int]

    @property
    def label(self) -> str:
        return "inf" if self.prime is None else str(self.prime)

    @classmethod
    def parse(cls, label: str) -> "Place":
        return cls(None) if label == "inf" else cls(int(label))


INFINITY = Place(None)


def _square_class_integer(x) -> int:
    """p/q 与 p·q 同属一个平方类"""
    r = to_rat(x)
    if r == 0:
        raise InputError("Hilbert symbol of zero")
    return r.numerator * r.denominator


def _split(n: int, p: int) -> tuple[int, int]:
    alpha = 0
    while n % p == 0:
        n //= p
        alpha += 1
    return alpha, n


def _legendre(unit: int, p: int) -> int:
    return 1 if is_quad_residue(unit % p, p) else -1


def hilbert(a, b, place: Place) -> int:
    """局部 Hilbert 符号 (a, b)_v ∈ {±1}"""
    x, y = _square_class_integer(a), _square_class_integer(b)
    if place.prime is None:
        return -1 if x < 0 and y < 0 else 1
    p = place.prime
    alpha, u = _split(x, p)
    beta, v = _split(y, p)
    if p == 2:
        def eps(z: int) -> int:
            return ((z - 1) // 2) % 2

        def omega(z: int) -> int:
            return ((z * z - 1) // 8) % 2

        exponent = eps(u) * eps(v) + alpha * omega(v) + beta * omega(u)
        return -1 if exponent % 2 else 1
    sign = -1 if (alpha * beta * ((p - 1) // 2)) % 2 else 1
    if beta % 2:
        sign *= _legendre(u, p)
    if alpha % 2:
        sign *= _legendre(v, p)
    return sign


def relevant_places(*values) -> list[Place]:
    """2、实位以及出现在分子分母中的素数"""
    primes = {2}
    for value in values:
        r = to_rat(value)
        primes.update(primefactors(abs(r.numerator)))
        primes.update(primefactors(r.denominator))
    return [Place(p) for p in sorted(primes)] + [INFINITY]


def class_of(a, b) -> BrauerClass2:
    """四元数代数 (a, b) 的类"""
    ramified = [v.label for v in relevant_places(a, b) if hilbert(a, b, v) == -1]
    cls = BrauerClass2.from_places(ramified)
    if len(cls.ramified) % 2:
        raise InputError(f"odd ramification set for ({a}, {b}): {cls.ramified}")
    return cls


HAMILTON = BrauerClass2.from_places(["2", "inf"])


def quadric_class(q: TernaryForm) -> BrauerClass2:
    """秩 3：二次曲线 q = 0 的类；秩 2：z² = q 的类"""
    rank = rank_disc(q).rank
    (d1, d2, d3), _ = diagonalize(q)
    if rank == 3:
        return class_of(-d1 * d3, -d2 * d3)
    if rank == 2:
        return class_of(d1, d2)
    raise InputError(f"quadric class needs rank 2 or 3, got {rank}")


# ============================================================
# 函数域符号
# ============================================================

class FunctionSymbol:
    """k(P²) 上若干四元数符号 (f_i, g_i) 之和，f_i、g_i 为偶数次齐次式"""

    __slots__ = ("terms",)

    def __init__(self, terms: Iterable[tuple[MPoly, MPoly]]):
        normalized = []
        for f, g in terms:
            f, g = MPoly.coerce(f, UVW), MPoly.coerce(g, UVW)
            for h in (f, g):
                if h.is_zero:
                    raise InputError("zero entry in a quaternion symbol")
                if not h.is_homogeneous() or h.total_degree % 2:
                    raise InputError(f"symbol entry {h} is not an even-degree form")
            normalized.append((f, g))
        self.terms = tuple(normalized)

    def __add__(self, other: "FunctionSymbol") -> "FunctionSymbol":
        return FunctionSymbol(self.terms + other.terms)

    def entries(self) -> list[MPoly]:
        return [h for pair in self.terms for h in pair]

    def defined_at(self, point: Sequence[int]) -> bool:
        return all(h.evaluate(point) != 0 for h in self.entries())

    def to_json(self) -> list[dict[str, str]]:
        return [{"f": str(f), "g": str(g)} for f, g in self.terms]

    def __repr__(self) -> str:
        return " + ".join(f"({f}, {g})" for f, g in self.terms)


def specialize(sym: FunctionSymbol, point: Sequence[object]) -> BrauerClass2:
    """在有理点处特化；点不得落在任何分量的零点上"""
    values = [to_rat(c) for c in point]
    total = BrauerClass2()
    for f, g in sym.terms:
        fv, gv = f.evaluate(values), g.evaluate(values)
        if fv == 0 or gv == 0:
            raise InputError(f"symbol is not defined at {[rat_str(c) for c in values]}")
        total = total + class_of(fv, gv)
    return total


def _sample_rng(seed: int, index: int) -> random.Random:
    return random.Random(seed * 1000003 + index)


def _primitive(point: Sequence[int]) -> tuple[int, ...]:
    g = 0
    for c in point:
        g = gcd(g, abs(c))
    return tuple(c // g for c in point) if g else tuple(point)


def _draw_point(rng: random.Random, height: int, avoid: Sequence[MPoly], tries: int = 200) -> tuple[int, ...]:
    for _ in range(tries):
        point = _primitive([rng.randint(-height, height) for _ in range(3)])
        if not any(point):
            continue
        if all(h.evaluate(point) != 0 for h in avoid):
            return point
    raise SamplingError(f"no valid sample point of height <= {height} after {tries} draws")


def _sample_record(point, c1: BrauerClass2, c2: BrauerClass2) -> SpecializationSample:
    return SpecializationSample(
        point=[str(c) for c in point],
        first=c1.to_json(),
        second=c2.to_json(),
        difference=(c1 + c2).to_json(),
    )


def compare_by_specialization(
    s1: FunctionSymbol,
    s2: FunctionSymbol,
    spec: Optional[CoverSpec],
    n: int,
    seed: int,
    height: int = 7,
) -> ComparisonResult:
    """在 n 个有理点上比较两个符号；差恒定则给出常数类，否则给出反例

    采样点避开两个符号的全部元素，给定 spec 时也避开其 Δ
    """
    avoid = s1.entries() + s2.entries() + ([spec.delta] if spec is not None else [])
    samples: list[SpecializationSample] = []
    for i in range(n):
        point = _draw_point(_sample_rng(seed, i), height, avoid)
        samples.append(_sample_record(point, specialize(s1, point), specialize(s2, point)))
    first = samples[0].difference if samples else []
    for record in samples:
        if record.difference != first:
            logger.info("specialization refutes a constant difference")
            return ComparisonResult(
                consistent=False,
                samples=len(samples),
                refutation=[samples[0], record],
            )
    return ComparisonResult(consistent=True, constant_diff=first, samples=len(samples), witnesses=samples[:3])


# ============================================================
# 剩余映射
# ============================================================

class ResidueClass:
    """k(P)^× / 平方 中的代表元 (已模 P 约化)"""

    __slots__ = ("divisor", "rep")

    def __init__(self, divisor: MPoly, rep: MPoly):
        self.divisor = divisor
        self.rep = rep

    @property
    def trivial(self) -> bool:
        return self.rep.is_constant and rational_sqrt(self.rep.constant_value) is not None

    def equals_modulo(self, other: MPoly) -> bool:
        return (self.rep - other).rem(self.divisor).is_zero

    def to_report(self, expected: Optional[MPoly] = None) -> ResidueReport:
        return ResidueReport(
            divisor=self.divisor.to_json(),
            representative=self.rep.to_json(),
            trivial=self.trivial,
            expected=expected.to_json() if expected is not None else None,
            matches_expected=self.equals_modulo(expected) if expected is not None else None,
        )


def _valuation(f: MPoly, P: MPoly) -> tuple[int, MPoly]:
    m = 0
    while not f.is_constant:
        q, r = f.divmod(P)
        if not r.is_zero:
            break
        f, m = q, m + 1
    return m, f


def tame_residue(sym: FunctionSymbol, P: MPoly) -> ResidueClass:
    """沿不可约 P 的剩余 (-1)^{mn} f^n g^{-m}，指数按平方类取奇偶"""
    P = P.lift(UVW)
    if P.is_constant:
        raise InputError("residue along a constant")
    rep = MPoly.const(1, UVW)
    for f, g in sym.terms:
        m, f0 = _valuation(f, P)
        n, g0 = _valuation(g, P)
        term = MPoly.const(-1 if (m * n) % 2 else 1, UVW)
        if n % 2:
            term = term * f0
        if m % 2:
            term = term * g0
        rep = (rep * term).rem(P)
    if rep.is_zero:
        raise InputError("residue representative vanishes along the divisor")
    return ResidueClass(P, rep)


# ============================================================
# 直线上的常值性
# ============================================================

def _line_basis(line: MPoly) -> tuple[tuple[int, ...], tuple[int, ...]]:
    coeffs = [line.terms.get(tuple(int(i == j) for j in range(3)), Fraction(0)) for i in range(3)]
    if line.total_degree != 1 or not line.is_homogeneous():
        raise InputError(f"{line} is not a linear form")
    denom = 1
    for c in coeffs:
        denom = denom * c.denominator // gcd(denom, c.denominator)
    a, b, c = (int(x * denom) for x in coeffs)
    if a:
        p, q = (-b, a, 0), (-c, 0, a)
    elif b:
        p, q = (1, 0, 0), (0, -c, b)
    else:
        p, q = (1, 0, 0), (0, 1, 0)
    return _primitive(p), _primitive(q)


def constant_class_along_line(
    sym: FunctionSymbol,
    line: MPoly,
    n: int,
    seed: int,
    delta: Optional[MPoly] = None,
    height: int = 7,
) -> LineConstancy:
    """在直线 ℓ 的 n 个有理点上特化，检验类是否恒定"""
    p, q = _line_basis(line.lift(UVW))
    avoid = sym.entries() + ([delta] if delta is not None else [])
    samples: list[SpecializationSample] = []
    for i in range(n):
        rng = _sample_rng(seed, i)
        for _ in range(200):
            s, t = rng.randint(-height, height), rng.randint(-height, height)
            if gcd(s, t) != 1:
                continue
            point = _primitive([s * p[k] + t * q[k] for k in range(3)])
            if any(point) and all(h.evaluate(point) != 0 for h in avoid):
                break
        else:
            raise SamplingError(f"no valid point on the line after 200 draws (sample {i})")
        cls = specialize(sym, point)
        samples.append(_sample_record(point, cls, BrauerClass2()))
    line_json = [rat_str(line.terms.get(tuple(int(i == j) for j in range(3)), 0)) for i in range(3)]
    first = samples[0].first if samples else []
    for record in samples:
        if record.first != first:
            return LineConstancy(line=line_json, consistent=False, samples=len(samples), refutation=[samples[0], record])
    return LineConstancy(line=line_json, consistent=True, cls=first, samples=len(samples))
