"""
Conic Bundles - Sweep Decomposition
竖直扫描：随机有理坐标下 Δ(R) 的柱形分解
"""

import logging
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Hashable, Optional

from ..errors import GenericityError
from ..exact_core import MPoly, PolyMatrix, UVW, binary_is_separable
from ..quadform import CoordChange
from .sturm import IsolatingInterval, count_real_roots, is_squarefree, refine, sample_between, sturm_isolate

logger = logging.getLogger(__name__)

_UV = ("u", "v")


class DisjointSet:
    """并查集"""

    def __init__(self):
        self._parent: dict[Hashable, Hashable] = {}

    def add(self, item: Hashable) -> None:
        self._parent.setdefault(item, item)

    def find(self, item: Hashable) -> Hashable:
        self.add(item)
        root = item
        while self._parent[root] != root:
            root = self._parent[root]
        while self._parent[item] != root:
            self._parent[item], item = root, self._parent[item]
        return root

    def union(self, a: Hashable, b: Hashable) -> None:
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self._parent[rb] = ra


@dataclass
class Slab:
    """两相邻临界值之间的竖条"""
    index: int
    x: Fraction
    fiber: MPoly
    roots: list[IsolatingInterval]
    sector_samples: list[Fraction]

    @property
    def n(self) -> int:
        return len(self.roots)


@dataclass
class Fold:
    """临界值处的折点：富侧第 pair、pair+1 个根合并"""
    boundary: int
    bracket: IsolatingInterval
    rich_left: bool
    pair: int
    level: int


@dataclass
class Sweep:
    chart: PolyMatrix
    F: MPoly
    f: MPoly
    critical: list[IsolatingInterval]
    slabs: list[Slab]
    folds: list[Fold]
    seed: int
    attempt: int
    roots: DisjointSet = field(default_factory=DisjointSet)
    sectors: DisjointSet = field(default_factory=DisjointSet)
    lifted: DisjointSet = field(default_factory=DisjointSet)

    def to_original(self, x: Fraction, y: Fraction) -> list[Fraction]:
        return CoordChange(self.chart).pull_point([x, y, 1])


# ============================================================
# 随机坐标与一般性检查
# ============================================================

def _random_chart(rng: random.Random) -> PolyMatrix:
    while True:
        g = PolyMatrix.from_rows([[rng.randint(-3, 3) for _ in range(3)] for _ in range(3)])
        if g.det() != 0:
            return g


def _check_generic(F: MPoly) -> None:
    if F.evaluate((0, 1, 0)) == 0:
        raise GenericityError("vertical direction lies on the curve")
    at_infinity = F.partial({"w": 0})
    if at_infinity.is_zero or not binary_is_separable(at_infinity.lift(_UV)):
        raise GenericityError("line at infinity is not transversal")


def _subresultant_1(f: MPoly) -> MPoly:
    for s in f.subresultants(f.diff("v"), "v"):
        if s.degree("v") == 1:
            return s
    raise GenericityError("no degree-1 subresultant")


# ============================================================
# 折点认证
# ============================================================

def _fold_estimate(S1: MPoly, x: Fraction) -> Optional[Fraction]:
    """由一阶子结式 s11(x) v + s10(x) 估计重根位置"""
    coeffs = S1.coefficients_in("v")
    s11 = coeffs[1].partial({"u": x}).constant_value
    s10 = coeffs[0].partial({"u": x}).constant_value if 0 in coeffs else Fraction(0)
    if s11 == 0:
        return None
    return -s10 / s11


def _line_clear(f: MPoly, y: Fraction, lo: Fraction, hi: Fraction) -> bool:
    """水平线 v = y 在 u ∈ [lo, hi] 上不与曲线相交"""
    g = f.partial({"v": y})
    if g.is_zero:
        return False
    return count_real_roots(g, lo, hi) == 0


def _certify_fold(f: MPoly, D: MPoly, S1: MPoly, boundary: int, crit: IsolatingInterval,
                  n_left: int, n_right: int, fold_levels: int) -> Fold:
    if abs(n_left - n_right) != 2:
        raise GenericityError(f"root count jumps from {n_left} to {n_right} at one critical value")
    rich_left = n_left > n_right
    for level in range(2, fold_levels + 1):
        bracket = refine(D, crit, Fraction(1, 8 ** level))
        lo, hi = bracket
        x_rich, x_poor = (lo, hi) if rich_left else (hi, lo)
        y_star = _fold_estimate(S1, x_rich)
        if y_star is None:
            continue
        radius = Fraction(1, 2 ** level)
        window = (y_star - radius, y_star + radius)
        fib_rich = f.partial({"u": x_rich})
        fib_poor = f.partial({"u": x_poor})
        if count_real_roots(fib_rich, *window) != 2 or count_real_roots(fib_poor, *window) != 0:
            continue
        if not (_line_clear(f, window[0], lo, hi) and _line_clear(f, window[1], lo, hi)):
            continue
        pair = count_real_roots(fib_rich, None, window[0])
        logger.debug("fold %d certified at level %d (pair %d)", boundary, level, pair)
        return Fold(boundary, bracket, rich_left, pair, level)
    raise GenericityError(f"fold {boundary} not certified within {fold_levels} levels")


# ============================================================
# 扫描
# ============================================================

def _sector_samples(roots: list[IsolatingInterval]) -> list[Fraction]:
    if not roots:
        return [Fraction(0)]
    bounds = [None] + roots + [None]
    return [sample_between(bounds[j], bounds[j + 1]) for j in range(len(roots) + 1)]


def _make_slab(f: MPoly, index: int, x: Fraction) -> Slab:
    fiber = f.partial({"u": x})
    roots = sturm_isolate(fiber)
    return Slab(index, x, fiber, roots, _sector_samples(roots))


def build_sweep(delta: MPoly, seed: int, attempt: int = 0, fold_levels: int = 48) -> Sweep:
    """一次随机坐标下的扫描；坐标不够一般时抛出 GenericityError"""
    rng = random.Random(seed * 1000003 + attempt)
    chart = _random_chart(rng)
    F = delta.substitute(CoordChange(chart).substitution(), UVW)
    _check_generic(F)
    f = F.partial({"w": 1})
    D = f.discriminant("v")
    if D.is_zero or not is_squarefree(D):
        raise GenericityError("discriminant in the fiber variable is not squarefree")
    critical = sturm_isolate(D)
    bounds: list[Optional[IsolatingInterval]] = [None] + critical + [None]
    slabs = [_make_slab(f, i, sample_between(bounds[i], bounds[i + 1])) for i in range(len(critical) + 1)]
    if slabs[0].n != slabs[-1].n:
        raise GenericityError("root counts at the two ends of the sweep differ")

    folds = []
    if critical:
        S1 = _subresultant_1(f)
        for i, crit in enumerate(critical):
            folds.append(_certify_fold(f, D, S1, i, crit, slabs[i].n, slabs[i + 1].n, fold_levels))

    sweep = Sweep(chart, F, f, critical, slabs, folds, seed, attempt)
    _connect(sweep)
    logger.info("sweep: %d critical value(s), attempt %d", len(critical), attempt)
    return sweep


# ============================================================
# 连通
# ============================================================

def _join_sector(sweep: Sweep, a: tuple[int, int], b: tuple[int, int], flip: bool) -> None:
    sweep.sectors.union(a, b)
    for sheet in (0, 1):
        other = 1 - sheet if flip else sheet
        sweep.lifted.union(a + (sheet,), b + (other,))


def _connect(sweep: Sweep) -> None:
    slabs = sweep.slabs
    for slab in slabs:
        for j in range(slab.n):
            sweep.roots.add((slab.index, j))
        for j in range(slab.n + 1):
            sweep.sectors.add((slab.index, j))
            for sheet in (0, 1):
                sweep.lifted.add((slab.index, j, sheet))
        # 经过 V = [0:1:0]：顶部扇区与底部扇区相连，定向翻转
        _join_sector(sweep, (slab.index, slab.n), (slab.index, 0), flip=True)

    for fold in sweep.folds:
        left, right = slabs[fold.boundary], slabs[fold.boundary + 1]
        rich, poor = (left, right) if fold.rich_left else (right, left)
        k = fold.pair
        for j in range(rich.n):
            if j < k:
                sweep.roots.union((rich.index, j), (poor.index, j))
            elif j > k + 1:
                sweep.roots.union((rich.index, j), (poor.index, j - 2))
        sweep.roots.union((rich.index, k), (rich.index, k + 1))
        for j in range(rich.n + 1):
            if j <= k:
                _join_sector(sweep, (rich.index, j), (poor.index, j), flip=False)
            elif j >= k + 2:
                _join_sector(sweep, (rich.index, j), (poor.index, j - 2), flip=False)

    # 经过无穷远直线：顺序反转，定向翻转
    first, last = slabs[0], slabs[-1]
    n = first.n
    for j in range(n):
        sweep.roots.union((last.index, j), (first.index, n - 1 - j))
    for j in range(n + 1):
        _join_sector(sweep, (last.index, j), (first.index, n - j), flip=True)
