"""
Conic Bundles - Test Helpers
共享夹具：实例加载、任务配置、随机实例与数值预言
"""

import random
from functools import lru_cache
from pathlib import Path

import numpy as np
import pytest

from conic_bundles.config import JobConfig, Settings
from conic_bundles.covers import CoverSpec, build_cover
from conic_bundles.errors import InputError
from conic_bundles.exact_core import UVW, PolyMatrix
from conic_bundles.instances import load_instance
from conic_bundles.models import CaseTag
from conic_bundles.quadform import CoordChange, TernaryForm

FIXTURES = Path(__file__).parent / "fixtures"

CORPUS = ["empty_curve", "four_ovals", "one_oval", "two_nested", "two_non_nested"]

CASES = [CaseTag.RANK3.value, CaseTag.RANK2.value]


# ============================================
# 实例与配置
# ============================================

@pytest.fixture
def fixtures_dir() -> Path:
    return FIXTURES


@pytest.fixture
def load_fixture():
    def _load(name: str):
        path = FIXTURES / f"{name}.json"
        if not path.exists():
            path = FIXTURES / "rejected" / f"{name}.json"
        return load_instance(path)
    return _load


@pytest.fixture
def cover_of(load_fixture):
    def _cover(name: str, seed: int = 7):
        q1, q2, q3 = load_fixture(name).forms()
        return build_cover(q1, q2, q3, seed=seed)
    return _cover


@pytest.fixture
def job() -> JobConfig:
    """小采样数的确定性任务配置"""
    return JobConfig.from_settings(Settings(_env_file=None), seed=7, samples=8)


# ============================================
# 随机实例 (按种子确定)
# ============================================

def random_unimodular(rng: random.Random, steps: int = 4) -> PolyMatrix:
    """初等矩阵之积，行列式为 ±1"""
    g = PolyMatrix.identity(3)
    for _ in range(steps):
        i, j = rng.sample(range(3), 2)
        rows = [[int(r == c) for c in range(3)] for r in range(3)]
        rows[i][j] = rng.choice([-2, -1, 1, 2])
        g = g @ PolyMatrix.from_rows(rows)
    if rng.random() < 0.5:
        g = g @ PolyMatrix.diag([1, -1, 1])
    return g


def random_symmetric(rng: random.Random, bound: int = 3) -> TernaryForm:
    return TernaryForm.from_entries(*(rng.randint(-bound, bound) for _ in range(6)))


def random_triple(rng: random.Random, case: str) -> tuple[TernaryForm, TernaryForm, TernaryForm]:
    """Case 1：gᵀ diag(d1, d2, -d1·d2·s²) g；Case 2：第三个对角元为 0"""
    d1, d2 = (rng.choice([-3, -2, -1, 1, 2, 3]) for _ in range(2))
    s = rng.randint(1, 2)
    d3 = -d1 * d2 * s * s if case == CaseTag.RANK3.value else 0
    q1 = TernaryForm.diagonal(d1, d2, d3).compose(random_unimodular(rng))
    return q1, random_symmetric(rng), random_symmetric(rng)


@lru_cache(maxsize=None)
def random_cover(case: str, index: int) -> CoverSpec:
    """第 index 个随机可容许实例 (光滑且可分)"""
    rng = random.Random(1_000_003 * (CASES.index(case) + 1) + index)
    while True:
        try:
            spec = build_cover(*random_triple(rng, case), seed=index)
        except InputError:
            continue
        if spec.admissible:
            return spec


# ============================================
# 数值预言 (numpy，与精确实现互相独立)
# ============================================

# 坐标置换：(x 所在坐标, y 所在坐标, 取 1 的坐标)
_PERMUTATIONS = [(0, 1, 2), (0, 2, 1), (2, 1, 0)]


def _permutation_matrix(perm) -> PolyMatrix:
    rows = [[0] * 3 for _ in range(3)]
    for new, old in enumerate(perm):
        rows[old][new] = 1
    return PolyMatrix.from_rows(rows)


def _misses_line_at_infinity(delta) -> bool:
    at_infinity = np.zeros(5)
    for (a, b, c), coeff in delta.terms.items():
        if c == 0:
            at_infinity[4 - a] += float(coeff)
    if at_infinity[0] == 0:
        return False
    roots = np.roots(at_infinity)
    return bool(np.all(np.abs(roots.imag) > 1e-6))


def _affine_chart(delta):
    """找一个 w = 0 与实曲线不相交的坐标系，返回拉回后的 Δ"""
    rng = random.Random(0)
    changes = [_permutation_matrix(p) for p in _PERMUTATIONS]
    changes += [random_unimodular(rng) for _ in range(200)]
    for g in changes:
        pulled = delta.substitute(CoordChange(g).substitution(), UVW)
        if _misses_line_at_infinity(pulled):
            return pulled
    raise AssertionError("no affine chart misses the real curve")


def _evaluate(terms, X, Y):
    out = np.zeros_like(X)
    for (a, b, _), c in terms:
        out += c * X ** a * Y ** b
    return out


def _components(mask: np.ndarray, diagonal: bool) -> int:
    """逐行游程并查集数连通分支"""
    parent: dict[tuple[int, int], tuple[int, int]] = {}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    slack = 1 if diagonal else 0
    previous: list[tuple[int, int, tuple[int, int]]] = []
    for i, row in enumerate(mask):
        padded = np.concatenate(([False], row, [False])).astype(np.int8)
        edges = np.flatnonzero(np.diff(padded))
        current = []
        for start, end in zip(edges[::2], edges[1::2]):
            label = (i, int(start))
            parent[label] = label
            for p_start, p_end, p_label in previous:
                if start < p_end + slack and p_start < end + slack:
                    parent[find(p_label)] = find(label)
            current.append((int(start), int(end), label))
        previous = current
    return len({find(x) for x in parent})


def grid_oval_count(delta, resolution: int = 700) -> int:
    terms = [(e, float(c)) for e, c in _affine_chart(delta).terms.items()]
    radius = 2.0
    for _ in range(12):
        edge = np.linspace(-radius, radius, 4 * resolution)
        border = np.concatenate([
            _evaluate(terms, edge, np.full_like(edge, radius)),
            _evaluate(terms, edge, np.full_like(edge, -radius)),
            _evaluate(terms, np.full_like(edge, radius), edge),
            _evaluate(terms, np.full_like(edge, -radius), edge),
        ])
        if np.all(border > 0) or np.all(border < 0):
            break
        radius *= 2
    axis = np.linspace(-radius, radius, resolution)
    X, Y = np.meshgrid(axis, axis)
    values = _evaluate(terms, X, Y)
    regions = _components(values > 0, diagonal=True) + _components(values < 0, diagonal=False)
    return regions - 1


def _squares_mod(modulus: int) -> set[int]:
    return {(z * z) % modulus for z in range(modulus)}


@lru_cache(maxsize=None)
def hilbert_by_search(a: int, b: int, p: int) -> int:
    """无平方因子的 a, b：z² = a x² + b y² 在 Z/p^k 上有本原解"""
    k = 5 if p == 2 else 2
    modulus = p ** k
    squares = np.zeros(modulus, dtype=bool)
    squares[list(_squares_mod(modulus))] = True
    x = np.arange(modulus).reshape(-1, 1)
    y = np.arange(modulus).reshape(1, -1)
    rhs = (a * x * x + b * y * y) % modulus
    primitive = (x % p != 0) | (y % p != 0)
    return 1 if np.any(squares[rhs] & primitive) else -1


def grid_root_count(coeffs, lo: float, hi: float, points: int = 200001) -> int:
    xs = np.linspace(lo, hi, points)
    values = np.polyval(coeffs, xs)
    signs = np.sign(values)
    return int(np.count_nonzero(signs[1:] * signs[:-1] < 0))


@pytest.fixture
def oval_oracle():
    return grid_oval_count


@pytest.fixture
def hilbert_oracle():
    return hilbert_by_search


@pytest.fixture
def root_oracle():
    return grid_root_count
