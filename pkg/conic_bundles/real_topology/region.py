"""
Conic Bundles - Image Region
π(Y(R)) 的胞腔标签、弧标签与边界律
"""

import logging
from fractions import Fraction

from ..covers import CoverSpec
from ..errors import VerificationFailure
from ..exact_core import MPoly, PolyMatrix, UVW, to_rat
from ..models import CellLabel, OvalLabel, RealCurveTopology, RegionReport
from ..quadform import CoordChange, signature
from .sturm import IsolatingInterval, count_real_roots, sign_at_root, squarefree_part
from .sweep import DisjointSet

logger = logging.getLogger(__name__)


def _chart(topo: RealCurveTopology) -> PolyMatrix:
    return PolyMatrix.from_rows([[to_rat(e) for e in row] for row in topo.chart])


def cell_in_image(spec: CoverSpec, point) -> bool:
    """Q1 ≥ 0 或 Δ > 0"""
    return spec.q1(point) >= 0 or spec.delta.evaluate(point) > 0


def fiber_form_signature(spec: CoverSpec, point) -> tuple[int, int, int]:
    """z² = t0²Q1 + 2t0t1Q2 + t1²Q3 的三元形式 [[Q1,Q2,0],[Q2,Q3,0],[0,0,-1]]"""
    a, b, c = spec.q1(point), spec.q2(point), spec.q3(point)
    return signature([[a, b, 0], [b, c, 0], [0, 0, -1]])


def _differ_by_one_sign(s1: tuple[int, int, int], s2: tuple[int, int, int]) -> bool:
    return s1[1] == 0 and s2[1] == 0 and abs(s1[0] - s2[0]) == 1


def _oval_labels(spec: CoverSpec, topo: RealCurveTopology, f: MPoly, chart: PolyMatrix) -> dict[int, bool]:
    q1c = spec.q1.compose(chart).poly.partial({"w": 1})
    q3c = spec.q3.compose(chart).poly.partial({"w": 1})
    signs: dict[int, set[int]] = {o.id: set() for o in topo.ovals}
    fallback: dict[int, tuple[MPoly, IsolatingInterval, Fraction]] = {}
    for slab in topo.slabs:
        x = to_rat(slab.x)
        fiber = f.partial({"u": x})
        q1_line = q1c.partial({"u": x})
        for j, model in enumerate(slab.roots):
            interval = IsolatingInterval(to_rat(model.lo), to_rat(model.hi))
            o = slab.arc_ovals[j]
            signs[o].add(sign_at_root(fiber, interval, q1_line))
            fallback.setdefault(o, (fiber, interval, x))

    covered = {}
    for o, seen in signs.items():
        nonzero = seen - {0}
        if len(nonzero) > 1:
            raise VerificationFailure("arc_label_constant", residual={"oval": o, "signs": sorted(seen)})
        if nonzero:
            covered[o] = nonzero.pop() > 0
            continue
        # Q1 = Q2 = 0 上：Q3 ≥ 0 时覆盖
        fiber, interval, x = fallback[o]
        covered[o] = sign_at_root(fiber, interval, q3c.partial({"u": x})) >= 0
    return covered


def _touch_candidates(spec: CoverSpec, f: MPoly, chart: PolyMatrix) -> int:
    q1c = spec.q1.compose(chart).poly.partial({"w": 1})
    res = f.resultant(q1c, "v")
    if res.is_zero:
        return 0
    return count_real_roots(squarefree_part(res))


def region_report(spec: CoverSpec, topo: RealCurveTopology) -> RegionReport:
    """胞腔按样本点符号标注，弧按 ϖ(Δ̃(R)) 标注，并核对边界律"""
    chart = _chart(topo)
    f = spec.delta.substitute(CoordChange(chart).substitution(), UVW).partial({"w": 1})

    labels = {cell.id: cell_in_image(spec, [to_rat(c) for c in cell.sample]) for cell in topo.cells}
    covered = _oval_labels(spec, topo, f, chart)

    violations = []
    for oval in topo.ovals:
        sides_differ = labels[oval.inner_cell] != labels[oval.outer_cell]
        if sides_differ == covered[oval.id]:
            state = "covered" if covered[oval.id] else "uncovered"
            violations.append(f"oval {oval.id} is {state} but its sides {'differ' if sides_differ else 'agree'}")

    # 跨过一段弧，纤维形式的符号差恰好改变一个符号
    checks, bad = 0, 0
    pull = CoordChange(chart)
    for slab in topo.slabs:
        x = to_rat(slab.x)
        sigs = [fiber_form_signature(spec, pull.pull_point([x, to_rat(y), 1])) for y in slab.sector_samples]
        for j in range(len(slab.roots)):
            checks += 1
            if not _differ_by_one_sign(sigs[j], sigs[j + 1]):
                bad += 1

    image = DisjointSet()
    for cell_id, inside in labels.items():
        if inside:
            image.add(cell_id)
    for oval in topo.ovals:
        if labels[oval.inner_cell] and labels[oval.outer_cell]:
            image.union(oval.inner_cell, oval.outer_cell)
    image_components = len({image.find(c) for c, inside in labels.items() if inside})
    complement_components = sum(1 for inside in labels.values() if not inside)
    uncovered = sum(1 for v in covered.values() if not v)
    both_connected = image_components == 1 and complement_components == 1

    outside = next(cell.id for cell in topo.cells if cell.outside)
    report = RegionReport(
        cells=[CellLabel(cell=c, in_image=labels[c]) for c in sorted(labels)],
        ovals=[OvalLabel(oval=o, covered=covered[o]) for o in sorted(covered)],
        boundary_law_holds=not violations,
        violations=violations,
        one_sign_checks=checks,
        one_sign_violations=bad,
        uncovered_ovals=uncovered,
        image_components=image_components,
        complement_components=complement_components,
        connectivity_law_holds=both_connected == (uncovered == 1),
        touch_candidates=_touch_candidates(spec, f, chart),
        outside_in_image=labels[outside],
    )
    logger.info("region: %d/%d cell(s) in image, %d uncovered oval(s)", sum(labels.values()), len(labels), uncovered)
    return report


def outside_contained(report: RegionReport, topo: RealCurveTopology) -> bool:
    """π(Y(R)) 是否包含 Δ(R) 的外部"""
    outside = next(cell.id for cell in topo.cells if cell.outside)
    return next(label.in_image for label in report.cells if label.cell == outside)
