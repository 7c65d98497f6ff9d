"""
Conic Bundles - Static Rendering
Δ(R)、覆盖弧与像区域的 SVG 静态图
"""

import io
import logging

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from ..covers import CoverSpec  # noqa: E402
from ..exact_core import MPoly, to_rat  # noqa: E402
from ..models import RealCurveTopology  # noqa: E402

logger = logging.getLogger(__name__)

# clip-path id 的固定盐值
SVG_HASH_SALT = "conic-bundles"


def grid_values(poly: MPoly, U: np.ndarray, V: np.ndarray) -> np.ndarray:
    """在 w = 1 图上对网格求值 (浮点，仅用于绘图与测试预言)"""
    out = np.zeros_like(U, dtype=float)
    for (a, b, c), coeff in poly.terms.items():
        out += float(coeff) * U ** a * V ** b
    return out


def _window(topo: RealCurveTopology) -> float:
    radius = 2.0
    for cell in topo.cells:
        u, v, w = (to_rat(c) for c in cell.sample)
        if w != 0:
            radius = max(radius, 1.5 * float(abs(u / w)), 1.5 * float(abs(v / w)))
    return radius


def render_svg(spec: CoverSpec, topo: RealCurveTopology, resolution: int = 400) -> str:
    """覆盖弧黑色，未覆盖弧红色，像区域着色"""
    radius = _window(topo)
    axis = np.linspace(-radius, radius, resolution)
    U, V = np.meshgrid(axis, axis)
    delta = grid_values(spec.delta, U, V)
    q1 = grid_values(spec.q1.poly, U, V)
    image = ((q1 >= 0) | (delta > 0)).astype(float)

    fig, ax = plt.subplots(figsize=(6, 6))
    ax.contourf(U, V, image, levels=[0.5, 1.5], colors=["#cfe3f5"])
    ax.contour(U, V, np.ma.masked_where(q1 < 0, delta), levels=[0.0], colors="black", linewidths=1.2)
    ax.contour(U, V, np.ma.masked_where(q1 >= 0, delta), levels=[0.0], colors="red", linewidths=1.2)
    ax.set_aspect("equal")
    ax.set_xlim(-radius, radius)
    ax.set_ylim(-radius, radius)
    ax.set_title(f"{topo.configuration.value}, {topo.oval_count} oval(s)")

    buf = io.StringIO()
    with plt.rc_context({"svg.hashsalt": SVG_HASH_SALT}):
        fig.savefig(buf, format="svg", metadata={"Date": None})
    plt.close(fig)
    logger.debug("rendered %dx%d grid on [-%.2f, %.2f]", resolution, resolution, radius, radius)
    return buf.getvalue()
