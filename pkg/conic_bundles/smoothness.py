"""
Conic Bundles - Quartic Smoothness Certificate
平面四次曲线光滑性证书 (结式链 + 见证点)
"""

import logging
import random
from typing import Optional

from .errors import InputError
from .exact_core import MPoly, PolyMatrix, UVW, rat_str
from .models import SingularWitness, SmoothnessCertificate, SmoothVerdict

logger = logging.getLogger(__name__)

_T = ("T",)
_TW = ("T", "w")


def partials(delta: MPoly) -> tuple[MPoly, MPoly, MPoly]:
    return tuple(delta.diff(name) for name in UVW)


def _random_change(rng: random.Random) -> PolyMatrix:
    while True:
        g = PolyMatrix.from_rows([[rng.randint(-3, 3) for _ in range(3)] for _ in range(3)])
        if g.det() != 0:
            return g


def _pull(poly: MPoly, g: PolyMatrix) -> MPoly:
    """多项式在 x ↦ g·x 下的拉回"""
    gens = MPoly.gens(UVW)
    mapping = {
        name: sum((gens[j] * g[i, j] for j in range(3)), MPoly.zero(UVW))
        for i, name in enumerate(UVW)
    }
    return poly.substitute(mapping, UVW)


# ============================================================
# Q[T]/h 上的 w-多项式
# ============================================================

class _QuotientField:
    """K = Q[T]/(h)，元素用 T 的多项式 (mod h) 表示"""

    def __init__(self, h: MPoly):
        self.h = h

    def reduce(self, a: MPoly) -> MPoly:
        return a.rem(self.h)

    def inverse(self, a: MPoly) -> MPoly:
        s, _, g = a.element.gcdex(self.h.element)
        g_poly = MPoly(g, _T)
        if not g_poly.is_constant or g_poly.is_zero:
            raise InputError("element is not invertible modulo the minimal polynomial")
        return self.reduce(MPoly(s, _T) / g_poly.constant_value)

    def gcd(self, f: list[MPoly], g: list[MPoly]) -> list[MPoly]:
        """K[w] 中的首一 gcd，系数按 w 的升幂排列"""
        f, g = self._trim(f), self._trim(g)
        while g:
            f, g = g, self._rem(f, g)
        if not f:
            return []
        inv = self.inverse(f[-1])
        return [self.reduce(c * inv) for c in f]

    def _trim(self, coeffs: list[MPoly]) -> list[MPoly]:
        out = [self.reduce(c) for c in coeffs]
        while out and out[-1].is_zero:
            out.pop()
        return out

    def _rem(self, f: list[MPoly], g: list[MPoly]) -> list[MPoly]:
        f = list(f)
        inv = self.inverse(g[-1])
        while len(f) >= len(g) and f:
            factor = self.reduce(f[-1] * inv)
            shift = len(f) - len(g)
            for i, c in enumerate(g):
                f[i + shift] = self.reduce(f[i + shift] - factor * c)
            f = self._trim(f)
        return f


def _w_coefficients(poly: MPoly) -> list[MPoly]:
    """把 (T, w) 上的多项式按 w 展开为 T 的多项式系数"""
    buckets = poly.coefficients_in("w")
    top = max(buckets) if buckets else -1
    coeffs = []
    for d in range(top + 1):
        c = buckets.get(d)
        coeffs.append(MPoly.zero(_T) if c is None else c.substitute({"T": MPoly.var("T", _T)}, _T))
    return coeffs


# ============================================================
# 见证点
# ============================================================

def _verify_point(delta: MPoly, point: list[MPoly], h: MPoly) -> bool:
    mapping = dict(zip(UVW, point))
    checks = [delta] + list(partials(delta))
    return all(f.substitute(mapping, _T).rem(h).is_zero for f in checks)


def _witness(delta: MPoly, point: list[MPoly], h: MPoly) -> SingularWitness:
    reduced = [c.rem(h) for c in point]
    return SingularWitness(
        minimal_polynomial=h.to_json(),
        point=[c.to_json() for c in reduced],
        degree=h.total_degree,
        verified=_verify_point(delta, reduced, h),
    )


def _witness_on_common_factor(delta: MPoly, common: MPoly, rng: random.Random, tries: int) -> Optional[SingularWitness]:
    """偏导数有公因子时，在随机直线上取公因子的一个不可约点"""
    t = MPoly.var("T", _T)
    for _ in range(tries):
        p0 = [rng.randint(-5, 5) for _ in range(3)]
        p1 = [rng.randint(-5, 5) for _ in range(3)]
        point = [t * p1[i] + p0[i] for i in range(3)]
        restricted = common.substitute(dict(zip(UVW, point)), _T)
        if restricted.is_constant:
            continue
        _, factors = restricted.element.factor_list()
        factors = sorted((MPoly(f, _T) for f, _ in factors), key=lambda f: f.total_degree)
        for h in factors:
            if h.is_constant:
                continue
            witness = _witness(delta, point, h)
            if witness.verified:
                return witness
    return None


# ============================================================
# 主流程
# ============================================================

def certify_quartic(delta: MPoly, seed: int, max_retries: int = 8) -> SmoothnessCertificate:
    """证明 Δ 光滑，或给出经过验证的奇点见证"""
    delta = delta.lift(UVW)
    if delta.is_zero:
        raise InputError("quartic is identically zero")
    if not delta.is_homogeneous() or delta.total_degree != 4:
        raise InputError(f"{delta} is not a plane quartic")
    rng = random.Random(seed)
    g1, g2, g3 = partials(delta)

    # 偏导数有非常数公因子：必为奇异
    common = g1.gcd(g2).gcd(g3)
    if not common.is_constant:
        witness = _witness_on_common_factor(delta, common, rng, max_retries * 4)
        logger.info("partials share a factor of degree %d", common.total_degree)
        return SmoothnessCertificate(
            verdict=SmoothVerdict.SINGULAR if witness else SmoothVerdict.INCONCLUSIVE,
            method="common_factor",
            seed=seed,
            attempts=1,
            witness=witness,
            notes=["partials share a nonconstant factor"],
        )

    last_change = None
    for attempt in range(1, max_retries + 1):
        change = _random_change(rng)
        last_change = change
        h1, h2, h3 = (_pull(f, change) for f in (g1, g2, g3))
        if h1.evaluate((0, 0, 1)) == 0:
            logger.debug("attempt %d: vertex on first partial, retry", attempt)
            continue
        c, c2 = rng.randint(1, 97), rng.randint(-97, -1)
        r1 = h1.resultant(h2 + h3 * c, "w")
        r2 = h1.resultant(h2 + h3 * c2, "w")
        if r1.is_zero or r2.is_zero:
            logger.debug("attempt %d: degenerate resultant, retry", attempt)
            continue
        common_uv = r1.gcd(r2)
        if common_uv.is_constant:
            return _smooth(seed, attempt, change)
        if common_uv.evaluate((1, 0, 0)) == 0:
            logger.debug("attempt %d: candidate at v = 0, retry", attempt)
            continue

        outcome = _inspect_candidates(delta, change, (h1, h2, h3), common_uv)
        if outcome == "smooth":
            return _smooth(seed, attempt, change)
        if isinstance(outcome, SingularWitness):
            return SmoothnessCertificate(
                verdict=SmoothVerdict.SINGULAR,
                seed=seed,
                attempts=attempt,
                random_change=_change_json(change),
                witness=outcome,
            )
        logger.warning("attempt %d: ambiguous fiber over a candidate, retry", attempt)

    return SmoothnessCertificate(
        verdict=SmoothVerdict.INCONCLUSIVE,
        seed=seed,
        attempts=max_retries,
        random_change=_change_json(last_change) if last_change else None,
        notes=["retry budget exhausted"],
    )


def _inspect_candidates(delta: MPoly, change: PolyMatrix, hs, common_uv: MPoly):
    """逐个不可约因子检查 K[w] 中三个偏导数的 gcd"""
    t = MPoly.var("T", _TW)
    w = MPoly.var("w", _TW)
    chart = {"u": t, "v": MPoly.const(1, _TW), "w": w}
    in_chart = [_w_coefficients(h.substitute(chart, _TW)) for h in hs]
    candidate = common_uv.substitute({"u": MPoly.var("T", _T), "v": MPoly.const(1, _T), "w": MPoly.const(0, _T)}, _T)
    _, factors = candidate.element.factor_list()
    for element, _ in factors:
        h = MPoly(element, _T)
        if h.is_constant:
            continue
        field = _QuotientField(h)
        g = field.gcd(in_chart[0], in_chart[1])
        g = field.gcd(g, in_chart[2]) if g else g
        degree = len(g) - 1
        if degree <= 0:
            continue
        if degree > 1:
            return "ambiguous"
        # w = -g0 / g1 (g 已首一)
        w_root = field.reduce(-g[0])
        tt = MPoly.var("T", _T)
        local = [tt, MPoly.const(1, _T), w_root]
        original = [
            sum((local[j] * change[i, j] for j in range(3)), MPoly.zero(_T))
            for i in range(3)
        ]
        return _witness(delta, original, h)
    return "smooth"


def _smooth(seed: int, attempts: int, change: PolyMatrix) -> SmoothnessCertificate:
    logger.info("quartic certified smooth after %d attempt(s)", attempts)
    return SmoothnessCertificate(
        verdict=SmoothVerdict.SMOOTH,
        seed=seed,
        attempts=attempts,
        random_change=_change_json(change),
    )


def _change_json(change: PolyMatrix) -> list[list[str]]:
    return [[rat_str(e) for e in row] for row in change.rows()]
