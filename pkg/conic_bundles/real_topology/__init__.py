"""
Conic Bundles - Real Topology
实代数判定：根隔离、符号差分布、曲线拓扑、像区域与有理性判定
"""

from .sturm import IsolatingInterval, count_real_roots, sturm_isolate, sign_at_root, sample_between
from .profile import signature_profile, pi1_section_exists
from .topology import quartic_topology
from .region import region_report, outside_contained
from .verdict import rationality_verdict
from .render import render_svg

__all__ = [
    "IsolatingInterval", "count_real_roots", "sturm_isolate", "sign_at_root", "sample_between",
    "signature_profile", "pi1_section_exists",
    "quartic_topology",
    "region_report", "outside_contained",
    "rationality_verdict",
    "render_svg",
]
