"""
Conic Bundles - Signature Profile
P¹(R) 上 M(t) 的符号差分布与 π1 截面判据
"""

import logging
from fractions import Fraction

from ..covers import CoverSpec, pencil_matrix
from ..errors import InputError, VerificationFailure
from ..exact_core import MPoly, rat_str
from ..models import SignatureInterval, SignatureProfile, WeierstrassRoot
from ..quadform import signature
from .sturm import IsolatingInterval, sample_between, squarefree_part, sturm_isolate

logger = logging.getLogger(__name__)

NEGATIVE_DEFINITE = (0, 0, 3)


def _chart_at_infinity_root(W: MPoly) -> IsolatingInterval:
    """[1:0] 处的根在 t0=1 图上的隔离区间 (坐标 S = t1/t0)"""
    local = squarefree_part(W.partial({"t0": 1}))
    for interval in sturm_isolate(local):
        if interval.lo < 0 < interval.hi:
            return interval
    raise InputError("W vanishes at [1:0] but no isolating interval contains S = 0")


def _signature_at(spec: CoverSpec, t0: Fraction, t1: Fraction) -> tuple[int, int, int]:
    return signature(pencil_matrix(*spec.forms, t=(t0, t1)))


def signature_profile(spec: CoverSpec) -> SignatureProfile:
    """W 的实根把 P¹(R) 分成若干段，每段取有理样本计算 M(t) 的符号差"""
    W = spec.W
    finite = sturm_isolate(squarefree_part(W.partial({"t1": 1})))
    root_at_infinity = W.evaluate((1, 0)) == 0

    roots = [WeierstrassRoot(chart="t1=1", interval=r.to_model()) for r in finite]
    if root_at_infinity:
        roots.append(WeierstrassRoot(chart="t0=1", interval=_chart_at_infinity_root(W).to_model()))

    samples: list[tuple[Fraction, Fraction, bool]] = []
    for left, right in zip(finite, finite[1:]):
        samples.append((sample_between(left, right), Fraction(1), False))
    if root_at_infinity:
        # [1:0] 是根：两端无界段分开
        if finite:
            samples.insert(0, (sample_between(None, finite[0]), Fraction(1), False))
            samples.append((sample_between(finite[-1], None), Fraction(1), False))
        else:
            samples.append((Fraction(0), Fraction(1), False))
    else:
        # 经过 [1:0] 的环绕段
        samples.append((Fraction(1), Fraction(0), True))

    intervals = []
    for t0, t1, wraps in samples:
        sig = _signature_at(spec, t0, t1)
        if sig[1] != 0:
            raise VerificationFailure("signature_profile_nondegenerate", residual={"sample": [rat_str(t0), rat_str(t1)]})
        intervals.append(SignatureInterval(sample=[rat_str(t0), rat_str(t1)], signature=sig, wraps_infinity=wraps))
    logger.info("signature profile: %d real Weierstrass root(s), %d interval(s)", len(roots), len(intervals))
    return SignatureProfile(roots=roots, intervals=intervals)


def pi1_section_exists(profile: SignatureProfile) -> bool:
    """没有任何一段使 q_t 负定"""
    return all(tuple(iv.signature) != NEGATIVE_DEFINITE for iv in profile.intervals)
