"""
Conic Bundles - Real Rationality Verdict
实有理性判定：截面判据与构型
"""

import logging

from ..covers import CoverSpec, gamma_real_nonempty
from ..errors import VerificationFailure
from ..models import (
    Configuration,
    RationalityVerdict,
    RealCurveTopology,
    RegionReport,
    SignatureProfile,
    SmoothVerdict,
    Verdict,
)
from .profile import pi1_section_exists

logger = logging.getLogger(__name__)

_CONNECTED_EQUIVALENT = {Configuration.TWO_NESTED, Configuration.THREE_OVALS, Configuration.FOUR_OVALS}
_OBSTRUCTION_EQUIVALENT = {Configuration.TWO_NESTED, Configuration.FOUR_OVALS}


def _notes(configuration: Configuration, gamma_real: bool) -> list[str]:
    notes = []
    if configuration in _CONNECTED_EQUIVALENT:
        notes.append("for this configuration rationality is equivalent to Y(R) being connected")
    if configuration in _OBSTRUCTION_EQUIVALENT:
        notes.append("for this configuration rationality is equivalent to the vanishing of the IJT obstruction")
    if not gamma_real:
        notes.append("Gamma(R) is empty: Gamma has index 2 and the constant class may be nontrivial even when Y is rational")
    return notes


def rationality_verdict(
    spec: CoverSpec,
    profile: SignatureProfile,
    topo: RealCurveTopology,
    report: RegionReport,
) -> RationalityVerdict:
    """单卵形线以外：有理 ⟺ π1 有截面"""
    section = pi1_section_exists(profile)
    configuration = topo.configuration
    gamma_real = gamma_real_nonempty(spec)

    if configuration == Configuration.FOUR_OVALS and not section:
        raise VerificationFailure("four_ovals_imply_section", residual={"intervals": len(profile.intervals)})

    if spec.smooth.verdict == SmoothVerdict.INCONCLUSIVE:
        verdict = Verdict.UNDETERMINED_EMPTY_HYPOTHESIS
    elif configuration == Configuration.ONE_OVAL:
        verdict = Verdict.UNDETERMINED_SINGLE_OVAL
    else:
        verdict = Verdict.RATIONAL if section else Verdict.IRRATIONAL

    evidence = [
        f"section_exists={str(section).lower()}",
        f"configuration={configuration.value}",
        f"gamma_real={str(gamma_real).lower()}",
        f"outside_in_image={str(report.outside_in_image).lower()}",
        f"boundary_law_holds={str(report.boundary_law_holds).lower()}",
    ]
    logger.info("verdict %s (configuration %s, section %s)", verdict.value, configuration.value, section)
    return RationalityVerdict(
        verdict=verdict,
        configuration=configuration,
        gamma_real=gamma_real,
        section_exists=section,
        rational_by_section=section,
        evidence=evidence,
        notes=_notes(configuration, gamma_real),
    )
