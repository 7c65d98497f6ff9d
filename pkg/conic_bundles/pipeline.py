"""
Conic Bundles - Analysis Pipeline
端到端分析流程：覆盖证书 → PGL2 → 二次曲面束 → 子式 → Brauer 差 → 实判定
"""

import logging
import time
from contextlib import contextmanager
from enum import Enum
from math import gcd
from typing import Iterable, Optional, Sequence

from sympy.polys.domains import ZZ

from .brauer import class_of, compare_by_specialization, constant_class_along_line, quadric_class, tame_residue
from .config import JobConfig, Settings, get_settings
from .covers import CoverSpec, apply_pgl2, build_cover, transform_sextic
from .errors import ConicBundleError, InadmissibleError, TopologyError, VerificationFailure
from .exact_core import MPoly, UVW, rat_str, rational_sqrt, to_rat
from .instances import InstanceDocument
from .models import AnalysisReport, Pgl2Substitution, RealAnalysis, SmoothVerdict, VerificationReport
from .quadform import TernaryForm, rank_disc
from .quadric_builder import QuadricPencil, build_pencil, fiber_form, generic_fiber_symbol, verify_minors, verify_pencil
from .real_topology import (
    quartic_topology,
    rationality_verdict,
    region_report,
    render_svg,
    signature_profile,
)

logger = logging.getLogger(__name__)


class Stage(str, Enum):
    """流程阶段"""
    COVER = "cover"
    PENCIL = "pencil"
    MINORS = "minors"
    SYMBOLS = "symbols"
    REAL = "real"


ALL_STAGES = frozenset(Stage)

ASSUMPTIONS = [
    "the IJT obstruction is assumed to vanish; it is not decided here",
    "a rational point of Gamma is taken to lie above [1:0] after the recorded PGL2 move",
]


# ============================================================
# PGL2 搜索
# ============================================================

def _points_by_height(bound: int) -> Iterable[tuple[int, int]]:
    yield 1, 0
    yield 0, 1
    for h in range(1, bound + 1):
        for t0 in range(1, h + 1):
            for t1 in range(-h, h + 1):
                if max(t0, abs(t1)) != h or t1 == 0 or gcd(t0, abs(t1)) != 1:
                    continue
                yield t0, t1


def _unimodular(t0: int, t1: int) -> tuple[int, int, int, int]:
    """第一列为 (t0, t1) 的整数代换，[0:1] 时取纯交换"""
    if (t0, t1) == (1, 0):
        return 1, 0, 0, 1
    if (t0, t1) == (0, 1):
        return 0, 1, 1, 0
    s, t, _ = ZZ.gcdex(ZZ(t0), ZZ(t1))
    # t0·s + t1·t = 1 ⇒ α δ − β γ = 1 取 δ = s, β = −t
    return t0, -int(t), t1, int(s)


def pgl2_search(spec: CoverSpec, height_bound: int) -> Optional[Pgl2Substitution]:
    """寻找 −W(t0,t1) 为有理平方的 [t0:t1]，返回把它移到 [1:0] 的代换；找不到返回 None"""
    for t0, t1 in _points_by_height(height_bound):
        value = -spec.W.evaluate((t0, t1))
        if rational_sqrt(value) is None:
            continue
        alpha, beta, gamma, delta = _unimodular(t0, t1)
        logger.info("PGL2 search: [%d:%d] has square discriminant", t0, t1)
        return Pgl2Substitution(
            alpha=str(alpha), beta=str(beta), gamma=str(gamma), delta=str(delta),
            point=[str(t0), str(t1)], source="search",
        )
    logger.warning("PGL2 search found no point up to height %d", height_bound)
    return None


def _needs_move(q1: TernaryForm) -> bool:
    info = rank_disc(q1)
    return info.rank < 2 or (info.rank == 3 and not info.disc_is_square)


def verify_pgl2(original: CoverSpec, moved: CoverSpec, sub: Sequence[object]) -> VerificationReport:
    """Δ' = (αδ−βγ)²Δ 与 W' = W∘代换"""
    alpha, beta, gamma, delta = (to_rat(c) for c in sub)
    det = alpha * delta - beta * gamma
    report = VerificationReport()
    d_res = moved.delta - original.delta.scale(det * det)
    report.record("delta_scaling", d_res.is_zero, residual=d_res.to_json())
    w_res = moved.W - transform_sextic(original.W, sub)
    report.record("sextic_transform", w_res.is_zero, residual=w_res.to_json())
    return report


# ============================================================
# 流程
# ============================================================

def _require(report: VerificationReport, stage: str) -> None:
    failed = report.first_failure()
    if failed is not None:
        raise VerificationFailure(failed, residual=report.checks[failed].residual, details={"stage": stage})


class AnalysisPipeline:
    """
    二次曲线丛分析流程
    每个阶段把结果写入同一份 AnalysisReport
    """

    def __init__(self, settings: Optional[Settings] = None):
        self.settings = settings or get_settings()

    def job(self, **overrides) -> JobConfig:
        return JobConfig.from_settings(self.settings, **overrides)

    # 入口 ------------------------------------------------------------

    def analyze(
        self,
        instance: InstanceDocument,
        job: Optional[JobConfig] = None,
        stages: Iterable[Stage] = ALL_STAGES,
    ) -> AnalysisReport:
        """执行给定阶段；任何失败都以异常抛出"""
        job = job or self.job()
        report = self._new_report(instance, job)
        self._execute(report, instance, job, frozenset(stages))
        return report

    def run(
        self,
        instance: InstanceDocument,
        job: Optional[JobConfig] = None,
        stages: Iterable[Stage] = ALL_STAGES,
    ) -> AnalysisReport:
        """同 analyze，但把失败写进报告的 error 与 exit_code"""
        job = job or self.job()
        report = self._new_report(instance, job)
        try:
            self._execute(report, instance, job, frozenset(stages))
        except ConicBundleError as exc:
            logger.warning("%s failed: %s", instance.name, exc.message)
            report.exit_code = exc.exit_code
            report.error = exc.to_json()
        return report

    def _new_report(self, instance: InstanceDocument, job: JobConfig) -> AnalysisReport:
        return AnalysisReport(
            name=instance.name or "instance",
            job=job.model_dump(mode="json"),
            input=instance.echo(),
            certificates={},
            assumptions=list(ASSUMPTIONS),
            timings={} if job.timings else None,
        )

    @contextmanager
    def _timed(self, report: AnalysisReport, stage: str):
        start = time.perf_counter()
        try:
            yield
        finally:
            if report.timings is not None:
                report.timings[stage] = round(time.perf_counter() - start, 4)

    # 阶段 ------------------------------------------------------------

    def _execute(self, report: AnalysisReport, instance: InstanceDocument, job: JobConfig, stages: frozenset) -> None:
        q1, q2, q3 = instance.forms()
        with self._timed(report, Stage.COVER.value):
            original = build_cover(q1, q2, q3, seed=job.seed, max_retries=job.max_retries)
        report.certificates = {
            "smoothness": original.smooth.model_dump(mode="json"),
            "separability": original.separable,
        }
        if original.smooth.verdict == SmoothVerdict.SINGULAR:
            raise InadmissibleError("smoothness", "Delta is singular", {"witness": report.certificates["smoothness"]["witness"]})
        if not original.separable:
            raise InadmissibleError("separability", "the sextic W is not separable")

        z_stages = stages & {Stage.PENCIL, Stage.MINORS, Stage.SYMBOLS}
        if z_stages:
            if original.smooth.verdict != SmoothVerdict.SMOOTH:
                raise InadmissibleError("smoothness", "smoothness could not be certified within the retry budget")
            spec = self._move(report, instance, job, original)
            with self._timed(report, Stage.PENCIL.value):
                pencil = self._pencil(report, spec)
            if Stage.MINORS in stages:
                with self._timed(report, Stage.MINORS.value):
                    self._minors(report, pencil, spec)
            if Stage.SYMBOLS in stages:
                with self._timed(report, Stage.SYMBOLS.value):
                    self._symbols(report, pencil, spec, instance, job)

        if Stage.REAL in stages and job.real_analysis:
            with self._timed(report, Stage.REAL.value):
                report.real = self.real(original, job)

    def _move(self, report: AnalysisReport, instance: InstanceDocument, job: JobConfig, spec: CoverSpec) -> CoverSpec:
        if instance.pgl2 is not None:
            sub = [rat_str(to_rat(c)) for c in instance.pgl2]
            record = Pgl2Substitution(alpha=sub[0], beta=sub[1], gamma=sub[2], delta=sub[3], point=[sub[0], sub[2]])
        elif job.search_pgl2 and _needs_move(spec.q1):
            record = pgl2_search(spec, job.height_bound)
            if record is None:
                return spec
        else:
            return spec
        sub = [record.alpha, record.beta, record.gamma, record.delta]
        n1, n2, n3 = apply_pgl2(*spec.forms, sub)
        moved = build_cover(n1, n2, n3, seed=spec.seed, max_retries=spec.max_retries, certificate=spec.smooth)
        check = verify_pgl2(spec, moved, sub)
        report.pgl2 = record
        report.verification["pgl2"] = check
        _require(check, "pgl2")
        return moved

    def _pencil(self, report: AnalysisReport, spec: CoverSpec) -> QuadricPencil:
        pencil = build_pencil(spec)
        report.pencil = pencil.to_json()
        check = verify_pencil(pencil, spec)
        at_infinity = quadric_class(pencil.forms[0])
        expected = class_of(pencil.a, pencil.b)
        check.record(
            "fiber_at_infinity_class",
            at_infinity == expected,
            residual={"fiber": at_infinity.to_json(), "expected": expected.to_json()},
        )
        report.verification["pencil"] = check
        _require(check, "pencil")
        return pencil

    def _minors(self, report: AnalysisReport, pencil: QuadricPencil, spec: CoverSpec) -> None:
        check = verify_minors(fiber_form(pencil), pencil, spec)
        report.verification["minors"] = check
        _require(check, "minors")

    def _symbols(self, report: AnalysisReport, pencil: QuadricPencil, spec: CoverSpec, instance: InstanceDocument, job: JobConfig) -> None:
        symbols = generic_fiber_symbol(pencil, spec)
        report.symbols = symbols.to_json()
        delta = pencil.delta

        simplified = compare_by_specialization(symbols.raw, symbols.simplified, spec, job.samples, job.seed, job.sample_height)
        report.comparisons["raw_vs_simplified"] = simplified
        if not simplified.consistent or simplified.constant_diff:
            raise VerificationFailure("raw_symbol_simplifies", residual=simplified.model_dump(mode="json"))

        diff = compare_by_specialization(symbols.raw, symbols.y_symbol, spec, job.samples, job.seed, job.sample_height)
        report.comparisons["z_vs_y"] = diff
        expected = class_of(pencil.a, pencil.b).to_json()
        if not diff.consistent:
            raise VerificationFailure("constant_difference", residual=diff.model_dump(mode="json"))
        if diff.constant_diff != expected:
            raise VerificationFailure("constant_difference_is_class_ab", residual={"found": diff.constant_diff, "expected": expected})
        report.constant_diff = diff.constant_diff

        q1 = pencil.forms[0].poly
        along_delta = tame_residue(symbols.y_symbol, delta).to_report(expected=q1)
        report.residues.append(along_delta)
        if not along_delta.matches_expected:
            raise VerificationFailure("residue_along_delta", residual=along_delta.representative)
        for line in MPoly.gens(UVW):
            report.residues.append(tame_residue(symbols.y_symbol, line).to_report())

        line = instance.line_form()
        if line is not None:
            # 直线按原坐标给出，符号在规范化坐标中
            line = line.substitute(pencil.change.substitution(), UVW)
            report.line_constancy = constant_class_along_line(
                symbols.y_symbol, line, job.samples, job.seed, delta=delta, height=job.sample_height
            )
        logger.info("constant difference %s", diff.constant_diff)

    def real(self, spec: CoverSpec, job: JobConfig) -> RealAnalysis:
        """实拓扑、像区域与有理性判定；另取种子重算拓扑作不变性检查"""
        profile = signature_profile(spec)
        topo = quartic_topology(spec, seed=job.seed, max_retries=job.max_retries, fold_levels=job.fold_levels)
        region = region_report(spec, topo)
        if not region.boundary_law_holds:
            raise VerificationFailure("boundary_law", residual=region.violations)
        if region.one_sign_violations:
            raise VerificationFailure("one_sign_crossing", residual={"violations": region.one_sign_violations})
        if not region.connectivity_law_holds:
            raise VerificationFailure("connectivity_law", residual={
                "image_components": region.image_components,
                "complement_components": region.complement_components,
                "uncovered_ovals": region.uncovered_ovals,
            })
        verdict = rationality_verdict(spec, profile, topo, region)

        second_seed = job.seed + 1
        again = quartic_topology(spec, seed=second_seed, max_retries=job.max_retries, fold_levels=job.fold_levels)
        if (again.oval_count, again.configuration) != (topo.oval_count, topo.configuration):
            raise TopologyError(
                "topology differs between two sweep directions",
                {"first": topo.configuration.value, "second": again.configuration.value},
            )
        svg = render_svg(spec, topo) if job.emit_svg else None
        return RealAnalysis(profile=profile, topology=topo, region=region, verdict=verdict, invariance_seed=second_seed, svg=svg)


# ============================================================
# 全局实例
# ============================================================

_pipeline_instance: Optional[AnalysisPipeline] = None


def get_pipeline() -> AnalysisPipeline:
    """获取全局流程实例"""
    global _pipeline_instance
    if _pipeline_instance is None:
        _pipeline_instance = AnalysisPipeline()
    return _pipeline_instance
