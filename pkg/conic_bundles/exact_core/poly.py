"""
Conic Bundles - Sparse Multivariate Polynomials
稀疏多元多项式 (QQ 系数, grlex 序)
"""

from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Mapping, Sequence, Union

from sympy import Poly, Symbol
from sympy.polys.domains import QQ
from sympy.polys.orderings import grlex
from sympy.polys.rings import PolyElement, PolyRing

from ..errors import InputError
from .rat import rat_str, to_qq, to_rat, to_sympy_rational

VarSet = tuple[str, ...]

UVW: VarSet = ("u", "v", "w")
T01: VarSet = ("t0", "t1")
X6: VarSet = ("x0", "x1", "x2", "x3", "x4", "x5")
TVAR: VarSet = ("T",)

# 变量的全局顺序：并集变量集按此排序
_GLOBAL_ORDER = ("u", "v", "w", "t0", "t1", "x0", "x1", "x2", "x3", "x4", "x5", "T", "S")


def canonical_varset(names: Iterable[str]) -> VarSet:
    """按全局顺序排列变量名 (去重)"""
    unique = set(names)

    def key(name: str):
        if name in _GLOBAL_ORDER:
            return (0, _GLOBAL_ORDER.index(name), name)
        return (1, 0, name)

    return tuple(sorted(unique, key=key))


@lru_cache(maxsize=None)
def ring_for(varset: VarSet) -> PolyRing:
    """变量集对应的 sympy 多项式环 (缓存)"""
    if not varset:
        raise InputError("empty variable set")
    return PolyRing([Symbol(name) for name in varset], QQ, grlex)


class MPoly:
    """QQ 上的稀疏多项式，规范形由 sympy PolyElement 保证"""

    __slots__ = ("_p", "varset")

    def __init__(self, element: PolyElement, varset: VarSet):
        self._p = element
        self.varset = varset

    # ------------------------------------------------------------------
    # 构造
    # ------------------------------------------------------------------

    @classmethod
    def zero(cls, varset: VarSet) -> "MPoly":
        return cls(ring_for(varset).zero, varset)

    @classmethod
    def const(cls, value, varset: VarSet) -> "MPoly":
        ring = ring_for(varset)
        return cls(ring.ground_new(to_qq(value)), varset)

    @classmethod
    def var(cls, name: str, varset: VarSet) -> "MPoly":
        if name not in varset:
            raise InputError(f"variable {name!r} not in {varset}")
        ring = ring_for(varset)
        return cls(ring.gens[varset.index(name)], varset)

    @classmethod
    def gens(cls, varset: VarSet) -> tuple["MPoly", ...]:
        return tuple(cls.var(name, varset) for name in varset)

    @classmethod
    def from_terms(cls, terms: Mapping[tuple[int, ...], object], varset: VarSet) -> "MPoly":
        ring = ring_for(varset)
        data = {}
        for exp, coeff in terms.items():
            if len(exp) != len(varset):
                raise InputError(f"exponent {exp} does not match {varset}")
            c = to_qq(coeff)
            if c:
                key = tuple(int(e) for e in exp)
                data[key] = data.get(key, QQ.zero) + c
        return cls(ring.from_dict({k: v for k, v in data.items() if v}), varset)

    @classmethod
    def from_json(cls, payload: Mapping[str, str], varset: VarSet) -> "MPoly":
        """解析 {"(2,0,0)": "2", ...} 形式的系数表"""
        terms = {}
        for key, value in payload.items():
            inner = key.strip().lstrip("(").rstrip(")")
            try:
                exp = tuple(int(part) for part in inner.split(",") if part.strip() != "")
            except ValueError as exc:
                raise InputError(f"bad exponent key {key!r}") from exc
            terms[exp] = to_rat(value)
        return cls.from_terms(terms, varset)

    @classmethod
    def coerce(cls, value, varset: VarSet) -> "MPoly":
        if isinstance(value, MPoly):
            return value.lift(varset)
        return cls.const(value, varset)

    # ------------------------------------------------------------------
    # 基本属性
    # ------------------------------------------------------------------

    @property
    def element(self) -> PolyElement:
        return self._p

    @property
    def ring(self) -> PolyRing:
        return self._p.ring

    @property
    def terms(self) -> dict[tuple[int, ...], Fraction]:
        return {exp: to_rat(c) for exp, c in self._p.items()}

    @property
    def is_zero(self) -> bool:
        return not self._p

    @property
    def is_constant(self) -> bool:
        return self._p.is_ground

    @property
    def constant_value(self) -> Fraction:
        if not self.is_constant:
            raise InputError(f"{self} is not constant")
        return to_rat(self._p.get(self.ring.zero_monom, QQ.zero))

    @property
    def total_degree(self) -> int:
        if self.is_zero:
            return -1
        return max(sum(exp) for exp in self._p.keys())

    def degree(self, name: str) -> int:
        if self.is_zero:
            return -1
        idx = self._index(name)
        return max(exp[idx] for exp in self._p.keys())

    def is_homogeneous(self) -> bool:
        return len({sum(exp) for exp in self._p.keys()}) <= 1

    def used_variables(self) -> VarSet:
        used = set()
        for exp in self._p.keys():
            used.update(name for name, e in zip(self.varset, exp) if e)
        return canonical_varset(used)

    def _index(self, name: str) -> int:
        try:
            return self.varset.index(name)
        except ValueError as exc:
            raise InputError(f"variable {name!r} not in {self.varset}") from exc

    # ------------------------------------------------------------------
    # 变量集转换
    # ------------------------------------------------------------------

    def lift(self, varset: VarSet) -> "MPoly":
        """嵌入到更大的 (或重新排序的) 变量集"""
        if varset == self.varset:
            return self
        positions = []
        for name in self.varset:
            if name in varset:
                positions.append(varset.index(name))
            else:
                positions.append(None)
        data = {}
        for exp, coeff in self._p.items():
            new_exp = [0] * len(varset)
            for e, pos, name in zip(exp, positions, self.varset):
                if e and pos is None:
                    raise InputError(f"cannot drop variable {name!r} from {self}")
                if pos is not None:
                    new_exp[pos] = e
            data[tuple(new_exp)] = coeff
        return MPoly(ring_for(varset).from_dict(data), varset)

    def _align(self, other) -> tuple["MPoly", "MPoly"]:
        if not isinstance(other, MPoly):
            return self, MPoly.const(other, self.varset)
        if other.varset == self.varset:
            return self, other
        joint = canonical_varset(self.varset + other.varset)
        return self.lift(joint), other.lift(joint)

    # ------------------------------------------------------------------
    # 算术
    # ------------------------------------------------------------------

    def __add__(self, other) -> "MPoly":
        a, b = self._align(other)
        return MPoly(a._p + b._p, a.varset)

    __radd__ = __add__

    def __sub__(self, other) -> "MPoly":
        a, b = self._align(other)
        return MPoly(a._p - b._p, a.varset)

    def __rsub__(self, other) -> "MPoly":
        a, b = self._align(other)
        return MPoly(b._p - a._p, a.varset)

    def __mul__(self, other) -> "MPoly":
        if not isinstance(other, MPoly):
            return self.scale(other)
        a, b = self._align(other)
        return MPoly(a._p * b._p, a.varset)

    __rmul__ = __mul__

    def __neg__(self) -> "MPoly":
        return MPoly(-self._p, self.varset)

    def __pow__(self, n: int) -> "MPoly":
        if n < 0:
            raise InputError("negative power of a polynomial")
        return MPoly(self._p ** n, self.varset)

    def scale(self, c) -> "MPoly":
        return MPoly(self._p * to_qq(c), self.varset)

    def __truediv__(self, c) -> "MPoly":
        r = to_rat(c)
        if r == 0:
            raise InputError("division by zero")
        return self.scale(1 / r)

    def __eq__(self, other) -> bool:
        if isinstance(other, MPoly):
            a, b = self._align(other)
            return a._p == b._p
        try:
            return self.is_constant and self.constant_value == to_rat(other)
        except InputError:
            return NotImplemented

    def __hash__(self) -> int:
        return hash(self._p.as_expr())

    def __bool__(self) -> bool:
        return not self.is_zero

    # ------------------------------------------------------------------
    # 代入与求值
    # ------------------------------------------------------------------

    def substitute(self, mapping: Mapping[str, object], target: VarSet) -> "MPoly":
        """变量替换：mapping 把本变量集中的变量映到 target 上的多项式"""
        images = []
        for name in self.varset:
            if name in mapping:
                images.append(MPoly.coerce(mapping[name], target)._p)
            elif name in target:
                images.append(MPoly.var(name, target)._p)
            else:
                images.append(None)
        ring = ring_for(target)
        result = ring.zero
        powers: dict[tuple[int, int], PolyElement] = {}
        for exp, coeff in self._p.items():
            term = ring.ground_new(coeff)
            for idx, e in enumerate(exp):
                if not e:
                    continue
                if images[idx] is None:
                    raise InputError(f"no image for variable {self.varset[idx]!r}")
                key = (idx, e)
                if key not in powers:
                    powers[key] = images[idx] ** e
                term = term * powers[key]
            result += term
        return MPoly(result, target)

    def evaluate(self, point: Union[Mapping[str, object], Sequence[object]]) -> Fraction:
        """在有理点处求值，所有变量都必须给出"""
        if isinstance(point, Mapping):
            values = [point[name] for name in self.varset]
        else:
            if len(point) != len(self.varset):
                raise InputError(f"point of length {len(point)} for {self.varset}")
            values = list(point)
        total = QQ.zero
        qs = [to_qq(v) for v in values]
        for exp, coeff in self._p.items():
            term = coeff
            for q, e in zip(qs, exp):
                if e:
                    term *= q ** e
            total += term
        return to_rat(total)

    def partial(self, assignment: Mapping[str, object]) -> "MPoly":
        """部分求值：把给定变量替换为有理数，结果仍在原变量集中"""
        return self.substitute({k: MPoly.const(v, self.varset) for k, v in assignment.items()}, self.varset)

    def diff(self, name: str) -> "MPoly":
        return MPoly(self._p.diff(self.ring.gens[self._index(name)]), self.varset)

    # ------------------------------------------------------------------
    # 除法、gcd、结式
    # ------------------------------------------------------------------

    def gcd(self, other: "MPoly") -> "MPoly":
        a, b = self._align(other)
        return MPoly(a._p.gcd(b._p), a.varset)

    def rem(self, other: "MPoly") -> "MPoly":
        a, b = self._align(other)
        if b.is_zero:
            raise InputError("division by the zero polynomial")
        return MPoly(a._p.rem(b._p), a.varset)

    def divmod(self, other: "MPoly") -> tuple["MPoly", "MPoly"]:
        a, b = self._align(other)
        if b.is_zero:
            raise InputError("division by the zero polynomial")
        q, r = a._p.div(b._p)
        return MPoly(q, a.varset), MPoly(r, a.varset)

    def exquo(self, other: "MPoly") -> "MPoly":
        q, r = self.divmod(other)
        if not r.is_zero:
            raise InputError(f"{other} does not divide {self}")
        return q

    def divides(self, other: "MPoly") -> bool:
        return other.rem(self).is_zero if not self.is_constant else not self.is_zero

    def _var_first(self, name: str) -> tuple[VarSet, PolyElement]:
        order = (name,) + tuple(n for n in self.varset if n != name)
        return order, self.lift(order)._p

    def _from_dropped(self, value, order: VarSet) -> "MPoly":
        # sympy 在消去首变量后返回 ring[1:] 中的元素或常数
        if isinstance(value, PolyElement):
            data = {(0,) + tuple(exp): c for exp, c in value.items()}
            return MPoly(ring_for(order).from_dict(data), order).lift(self.varset)
        return MPoly.const(to_rat(value), self.varset)

    def resultant(self, other: "MPoly", name: str) -> "MPoly":
        """关于变量 name 的结式"""
        a, b = self._align(other)
        order, pa = a._var_first(name)
        _, pb = b._var_first(name)
        if len(order) == 1:
            return MPoly.const(to_rat(pa.resultant(pb)), a.varset)
        return a._from_dropped(pa.resultant(pb), order)

    def discriminant(self, name: str) -> "MPoly":
        order, p = self._var_first(name)
        if len(order) == 1:
            return MPoly.const(to_rat(p.discriminant()), self.varset)
        return self._from_dropped(p.discriminant(), order)

    def subresultants(self, other: "MPoly", name: str) -> list["MPoly"]:
        """关于变量 name 的子结式 PRS"""
        a, b = self._align(other)
        order, pa = a._var_first(name)
        _, pb = b._var_first(name)
        ring = ring_for(order)
        seq = pa.subresultants(pb, ring.gens[0])
        return [MPoly(s, order).lift(a.varset) for s in seq]

    def coefficients_in(self, name: str) -> dict[int, "MPoly"]:
        """按变量 name 的次数展开，系数仍在原变量集中 (该变量次数为 0)"""
        idx = self._index(name)
        buckets: dict[int, dict] = {}
        for exp, coeff in self._p.items():
            reduced = exp[:idx] + (0,) + exp[idx + 1:]
            buckets.setdefault(exp[idx], {})[reduced] = coeff
        ring = self.ring
        return {d: MPoly(ring.from_dict(data), self.varset) for d, data in buckets.items()}

    # ------------------------------------------------------------------
    # 与 sympy Poly 的互转
    # ------------------------------------------------------------------

    def to_poly(self, name: str | None = None) -> Poly:
        """转成单变量 sympy Poly (其余变量不得出现)"""
        used = self.used_variables()
        if name is None:
            if len(used) > 1:
                raise InputError(f"{self} is not univariate")
            name = used[0] if used else self.varset[0]
        elif any(n != name for n in used):
            raise InputError(f"{self} is not univariate in {name!r}")
        idx = self._index(name)
        coeffs: dict[int, Fraction] = {}
        for exp, coeff in self._p.items():
            coeffs[exp[idx]] = to_rat(coeff)
        top = max(coeffs) if coeffs else 0
        dense = [to_sympy_rational(coeffs.get(d, 0)) for d in range(top, -1, -1)]
        return Poly(dense, Symbol(name), domain=QQ)

    @classmethod
    def from_poly(cls, poly: Poly, name: str, varset: VarSet) -> "MPoly":
        idx = varset.index(name)
        terms = {}
        for (d,), c in poly.terms():
            exp = [0] * len(varset)
            exp[idx] = d
            terms[tuple(exp)] = to_rat(c)
        return cls.from_terms(terms, varset)

    # ------------------------------------------------------------------
    # 序列化
    # ------------------------------------------------------------------

    def to_json(self) -> dict[str, str]:
        items = sorted(self._p.items(), key=lambda kv: (-sum(kv[0]), tuple(-e for e in kv[0])))
        return {"(" + ",".join(str(e) for e in exp) + ")": rat_str(to_rat(c)) for exp, c in items}

    def __str__(self) -> str:
        return str(self._p.as_expr()) if self._p else "0"

    def __repr__(self) -> str:
        return f"MPoly({self}, {self.varset})"


def poly_arith(op: str, *operands, **kwargs):
    """统一的多项式运算入口：add / mul / scale / substitute / evaluate"""
    if not operands:
        raise InputError("poly_arith needs operands")
    head = operands[0]
    if op == "add":
        result = head
        for item in operands[1:]:
            result = result + item
        return result
    if op == "mul":
        result = head
        for item in operands[1:]:
            result = result * item
        return result
    if op == "scale":
        return head.scale(operands[1])
    if op == "substitute":
        mapping, target = operands[1], kwargs.get("target")
        if target is None:
            target = canonical_varset(
                name for image in mapping.values() if isinstance(image, MPoly) for name in image.varset
            ) or head.varset
        return head.substitute(mapping, target)
    if op == "evaluate":
        return head.evaluate(operands[1])
    raise InputError(f"unknown poly_arith op {op!r}")
