"""
Conic Bundles - Real Quartic Topology
卵形线、嵌套与补集胞腔
"""

import logging
from collections import deque
from fractions import Fraction

from ..covers import CoverSpec
from ..errors import GenericityError, TopologyError
from ..exact_core import rat_str
from ..models import CellInfo, Configuration, OvalInfo, RealCurveTopology, SlabInfo
from .sweep import Sweep, build_sweep

logger = logging.getLogger(__name__)


def _sign(x: Fraction) -> int:
    return (x > 0) - (x < 0)


def _number(components: dict, keys) -> dict:
    """按首次出现的顺序给并查集分量编号"""
    ids: dict = {}
    out = {}
    for key in keys:
        root = components(key)
        if root not in ids:
            ids[root] = len(ids)
        out[key] = ids[root]
    return out


def _classify(ovals: list[OvalInfo]) -> Configuration:
    count = len(ovals)
    nested = any(o.parent is not None for o in ovals)
    if count == 0:
        return Configuration.EMPTY
    if count == 1:
        return Configuration.ONE_OVAL
    if count == 2:
        return Configuration.TWO_NESTED if nested else Configuration.TWO_NON_NESTED
    if nested or count > 4:
        raise TopologyError(f"{count} ovals with nesting={nested} is impossible for a smooth quartic")
    return Configuration.THREE_OVALS if count == 3 else Configuration.FOUR_OVALS


def topology_from_sweep(sweep: Sweep) -> RealCurveTopology:
    slabs = sweep.slabs
    sector_keys = [(s.index, j) for s in slabs for j in range(s.n + 1)]
    root_keys = [(s.index, j) for s in slabs for j in range(s.n)]
    cell_of = _number(sweep.sectors.find, sector_keys)
    oval_of = _number(sweep.roots.find, root_keys)
    n_cells = len(set(cell_of.values()))
    n_ovals = len(set(oval_of.values()))

    # 每条卵形线恰好分开两个胞腔
    sides: dict[int, tuple[int, int]] = {}
    arcs = {o: 0 for o in range(n_ovals)}
    for s, j in root_keys:
        pair = tuple(sorted((cell_of[(s, j)], cell_of[(s, j + 1)])))
        o = oval_of[(s, j)]
        arcs[o] += 1
        if pair[0] == pair[1] or sides.setdefault(o, pair) != pair:
            raise TopologyError(f"oval {o} does not separate two cells", {"slab": s, "root": j})
    if n_cells != n_ovals + 1:
        raise TopologyError(f"{n_cells} cells for {n_ovals} ovals: adjacency is not a tree")

    orientable = {}
    for key in sector_keys:
        c = cell_of[key]
        lifted_apart = sweep.lifted.find(key + (0,)) != sweep.lifted.find(key + (1,))
        orientable.setdefault(c, lifted_apart)
    outside = [c for c, ok in orientable.items() if not ok]
    if len(outside) != 1:
        raise TopologyError(f"expected one non-orientable cell, found {len(outside)}")
    root = outside[0]

    cell_ovals: dict[int, list[int]] = {c: [] for c in range(n_cells)}
    for o, (a, b) in sides.items():
        cell_ovals[a].append(o)
        cell_ovals[b].append(o)
    depth = {root: 0}
    parent_of_cell = {root: None}
    outer, inner = {}, {}
    queue = deque([root])
    while queue:
        c = queue.popleft()
        for o in cell_ovals[c]:
            if o in outer:
                continue
            a, b = sides[o]
            other = b if a == c else a
            if other in depth:
                raise TopologyError("cell-oval adjacency has a cycle")
            outer[o], inner[o] = c, other
            depth[other] = depth[c] + 1
            parent_of_cell[other] = o
            queue.append(other)
    if len(depth) != n_cells:
        raise TopologyError("cell-oval adjacency is disconnected")

    ovals = [
        OvalInfo(
            id=o,
            parent=parent_of_cell[outer[o]],
            depth=depth[outer[o]],
            arcs=arcs[o],
            inner_cell=inner[o],
            outer_cell=outer[o],
        )
        for o in range(n_ovals)
    ]

    first_sector = {}
    for key in sector_keys:
        first_sector.setdefault(cell_of[key], key)
    cells = []
    for c in range(n_cells):
        s, j = first_sector[c]
        x, y = slabs[s].x, slabs[s].sector_samples[j]
        cells.append(CellInfo(
            id=c,
            depth=depth[c],
            orientable=orientable[c],
            outside=c == root,
            sample=[rat_str(v) for v in sweep.to_original(x, y)],
            delta_sign=_sign(sweep.f.evaluate((x, y, 1))),
        ))

    slab_infos = [
        SlabInfo(
            index=s.index,
            x=rat_str(s.x),
            roots=[r.to_model() for r in s.roots],
            sector_samples=[rat_str(y) for y in s.sector_samples],
            sector_cells=[cell_of[(s.index, j)] for j in range(s.n + 1)],
            arc_ovals=[oval_of[(s.index, j)] for j in range(s.n)],
        )
        for s in slabs
    ]
    configuration = _classify(ovals)
    logger.info("real quartic: %d oval(s), configuration %s", n_ovals, configuration.value)
    return RealCurveTopology(
        oval_count=n_ovals,
        configuration=configuration,
        ovals=ovals,
        cells=cells,
        slabs=slab_infos,
        chart=[[rat_str(e) for e in row] for row in sweep.chart.rows()],
        critical_values=len(sweep.critical),
        seed=sweep.seed,
        attempts=sweep.attempt + 1,
    )


def quartic_topology(spec: CoverSpec, seed: int = 0, max_retries: int = 8, fold_levels: int = 48) -> RealCurveTopology:
    """在随机一般坐标下扫描 Δ(R)；坐标退化时换种子重试"""
    for attempt in range(max_retries):
        try:
            sweep = build_sweep(spec.delta, seed, attempt, fold_levels)
        except GenericityError as exc:
            logger.warning("sweep attempt %d rejected: %s", attempt, exc.message)
            continue
        return topology_from_sweep(sweep)
    raise TopologyError(f"no generic sweep direction within {max_retries} attempts", {"seed": seed})
