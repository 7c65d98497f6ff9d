"""
Conic Bundles - Polynomial Matrices
多项式矩阵：基于 sympy DomainMatrix 的无分式线性代数
"""

import logging
from fractions import Fraction
from typing import Optional, Sequence, Union

from sympy.polys.domains import QQ
from sympy.polys.matrices import DomainMatrix
from sympy.polys.matrices.exceptions import DMNonInvertibleMatrixError

from ..errors import InputError, SingularMatrixError
from .poly import MPoly, VarSet, canonical_varset, ring_for
from .rat import rat_str, to_qq, to_rat

logger = logging.getLogger(__name__)

Entry = Union[Fraction, MPoly]


class PolyMatrix:
    """QQ 或 QQ[varset] 上的矩阵；varset 为 None 时表示纯有理矩阵"""

    __slots__ = ("_dm", "varset")

    def __init__(self, dm: DomainMatrix, varset: Optional[VarSet]):
        self._dm = dm
        self.varset = varset

    # ------------------------------------------------------------------
    # 构造
    # ------------------------------------------------------------------

    @staticmethod
    def _domain(varset: Optional[VarSet]):
        return QQ if varset is None else ring_for(varset).to_domain()

    @staticmethod
    def _convert(value, varset: Optional[VarSet]):
        if varset is None:
            if isinstance(value, MPoly):
                return to_qq(value.constant_value)
            return to_qq(value)
        return MPoly.coerce(value, varset).element

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[object]], varset: Optional[VarSet] = None) -> "PolyMatrix":
        """由嵌套列表构造；未给出 varset 时从 MPoly 元素推断"""
        if not rows or not rows[0]:
            raise InputError("empty matrix")
        width = len(rows[0])
        if any(len(r) != width for r in rows):
            raise InputError("ragged matrix rows")
        if varset is None:
            names = [n for r in rows for e in r if isinstance(e, MPoly) for n in e.varset]
            varset = canonical_varset(names) if names else None
        data = [[cls._convert(e, varset) for e in r] for r in rows]
        return cls(DomainMatrix(data, (len(rows), width), cls._domain(varset)), varset)

    @classmethod
    def identity(cls, n: int, varset: Optional[VarSet] = None) -> "PolyMatrix":
        return cls(DomainMatrix.eye(n, cls._domain(varset)).to_dense(), varset)

    @classmethod
    def zeros(cls, rows: int, cols: Optional[int] = None, varset: Optional[VarSet] = None) -> "PolyMatrix":
        cols = rows if cols is None else cols
        return cls(DomainMatrix.zeros((rows, cols), cls._domain(varset)).to_dense(), varset)

    @classmethod
    def diag(cls, values: Sequence[object], varset: Optional[VarSet] = None) -> "PolyMatrix":
        n = len(values)
        zero = 0 if varset is None else MPoly.zero(varset)
        rows = [[values[i] if i == j else zero for j in range(n)] for i in range(n)]
        return cls.from_rows(rows, varset)

    @classmethod
    def block(cls, blocks: Sequence[Sequence["PolyMatrix"]]) -> "PolyMatrix":
        """分块拼接 [[A, B], [C, D]]"""
        names = [n for row in blocks for b in row if b.varset for n in b.varset]
        varset = canonical_varset(names) if names else None
        band = []
        for row in blocks:
            lifted = [b.lift(varset)._dm for b in row]
            band.append(lifted[0].hstack(*lifted[1:]) if len(lifted) > 1 else lifted[0])
        dm = band[0].vstack(*band[1:]) if len(band) > 1 else band[0]
        return cls(dm.to_dense(), varset)

    # ------------------------------------------------------------------
    # 访问
    # ------------------------------------------------------------------

    @property
    def shape(self) -> tuple[int, int]:
        return self._dm.shape

    @property
    def domain_matrix(self) -> DomainMatrix:
        return self._dm

    def _wrap(self, element) -> Entry:
        if self.varset is None:
            return to_rat(element)
        return MPoly(element, self.varset)

    def __getitem__(self, key: tuple[int, int]) -> Entry:
        i, j = key
        return self._wrap(self._dm.rep.getitem(i, j))

    def rows(self) -> list[list[Entry]]:
        return [[self._wrap(e) for e in row] for row in self._dm.to_list()]

    def lift(self, varset: Optional[VarSet]) -> "PolyMatrix":
        if varset == self.varset:
            return self
        if varset is None:
            raise InputError("cannot drop variables from a polynomial matrix")
        return PolyMatrix.from_rows(self.rows(), varset)

    def _aligned(self, other: "PolyMatrix") -> tuple["PolyMatrix", "PolyMatrix"]:
        if self.varset == other.varset:
            return self, other
        names = (self.varset or ()) + (other.varset or ())
        joint = canonical_varset(names)
        return self.lift(joint), other.lift(joint)

    # ------------------------------------------------------------------
    # 运算
    # ------------------------------------------------------------------

    def __add__(self, other: "PolyMatrix") -> "PolyMatrix":
        a, b = self._aligned(other)
        return PolyMatrix(a._dm + b._dm, a.varset)

    def __sub__(self, other: "PolyMatrix") -> "PolyMatrix":
        a, b = self._aligned(other)
        return PolyMatrix(a._dm - b._dm, a.varset)

    def __neg__(self) -> "PolyMatrix":
        return PolyMatrix(-self._dm, self.varset)

    def __matmul__(self, other: "PolyMatrix") -> "PolyMatrix":
        a, b = self._aligned(other)
        if a.shape[1] != b.shape[0]:
            raise InputError(f"shape mismatch {a.shape} @ {b.shape}")
        return PolyMatrix(a._dm.matmul(b._dm), a.varset)

    def scale(self, c) -> "PolyMatrix":
        """乘以有理数或多项式标量"""
        if isinstance(c, MPoly):
            names = (self.varset or ()) + c.varset
            varset = canonical_varset(names)
            lifted = self.lift(varset)
            return PolyMatrix(lifted._dm.mul(c.lift(varset).element), varset)
        return PolyMatrix(self._dm.mul(self._convert(c, self.varset)), self.varset)

    @property
    def T(self) -> "PolyMatrix":
        return PolyMatrix(self._dm.transpose(), self.varset)

    def submatrix(self, rows: Sequence[int], cols: Sequence[int]) -> "PolyMatrix":
        return PolyMatrix(self._dm.extract(list(rows), list(cols)), self.varset)

    def map_entries(self, fn, varset: Optional[VarSet] = None) -> "PolyMatrix":
        target = self.varset if varset is None else varset
        return PolyMatrix.from_rows([[fn(e) for e in row] for row in self.rows()], target)

    def substitute(self, mapping, target: VarSet) -> "PolyMatrix":
        """逐元素代入"""
        if self.varset is None:
            return self.lift(target)
        return self.map_entries(lambda e: e.substitute(mapping, target), target)

    def evaluate(self, point) -> "PolyMatrix":
        if self.varset is None:
            return self
        return PolyMatrix.from_rows([[e.evaluate(point) for e in row] for row in self.rows()])

    # ------------------------------------------------------------------
    # 行列式与逆
    # ------------------------------------------------------------------

    def det(self) -> Entry:
        """Bareiss 式无分式消元 (DomainMatrix 在多项式环上走精确除法)"""
        m, n = self.shape
        if m != n:
            raise InputError(f"determinant of a non-square {m}x{n} matrix")
        return self._wrap(self._dm.det())

    def adjugate(self) -> "PolyMatrix":
        m, n = self.shape
        if m != n:
            raise InputError(f"adjugate of a non-square {m}x{n} matrix")
        if n == 1:
            return PolyMatrix.identity(1, self.varset)
        adj, _ = self._dm.adj_det()
        return PolyMatrix(adj.to_dense(), self.varset)

    def inverse(self) -> "PolyMatrix":
        """有理矩阵求逆；奇异时抛出秩亏损异常"""
        if self.varset is not None:
            raise InputError("inverse is only defined for rational matrices")
        m, n = self.shape
        if m != n:
            raise InputError(f"inverse of a non-square {m}x{n} matrix")
        try:
            return PolyMatrix(self._dm.inv().to_dense(), None)
        except (DMNonInvertibleMatrixError, ZeroDivisionError) as exc:
            raise SingularMatrixError("matrix is singular", {"rank": self.rank()}) from exc

    def rank(self) -> int:
        if self.varset is not None:
            raise InputError("rank is only computed for rational matrices")
        return self._dm.rank()

    # ------------------------------------------------------------------
    # 谓词与序列化
    # ------------------------------------------------------------------

    def is_symmetric(self) -> bool:
        m, n = self.shape
        return m == n and self._dm.to_list() == self._dm.transpose().to_list()

    def is_zero(self) -> bool:
        return all((e == 0) for row in self.rows() for e in row)

    def __eq__(self, other) -> bool:
        if not isinstance(other, PolyMatrix):
            return NotImplemented
        a, b = self._aligned(other)
        return a.shape == b.shape and a._dm.to_list() == b._dm.to_list()

    __hash__ = None

    def to_json(self) -> list[list[object]]:
        if self.varset is None:
            return [[rat_str(e) for e in row] for row in self.rows()]
        return [[e.to_json() for e in row] for row in self.rows()]

    def __repr__(self) -> str:
        return f"PolyMatrix({[[str(e) for e in row] for row in self.rows()]}, varset={self.varset})"


def det(m: PolyMatrix) -> Entry:
    return m.det()


def adjugate_inverse(m: PolyMatrix) -> PolyMatrix:
    """有理矩阵的精确逆；奇异时提示调用方转入 Case 2"""
    inv = m.inverse()
    logger.debug("inverted %sx%s rational matrix", *m.shape)
    return inv
