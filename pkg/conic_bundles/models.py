"""
Conic Bundles - Data Models
报告与证书的数据模型定义
"""

from enum import Enum
from typing import Any, Iterable, Optional

from pydantic import BaseModel, ConfigDict, Field


class CaseTag(str, Enum):
    """Q1 的秩决定的构造分支"""
    RANK3 = "rank3"     # Case 1
    RANK2 = "rank2"     # Case 2


class SmoothVerdict(str, Enum):
    """光滑性证书结论"""
    SMOOTH = "smooth"
    SINGULAR = "singular"
    INCONCLUSIVE = "inconclusive_retry"


class Configuration(str, Enum):
    """实四次曲线的卵形线构型"""
    EMPTY = "empty"
    ONE_OVAL = "one_oval"
    TWO_NESTED = "two_nested"
    TWO_NON_NESTED = "two_non_nested"
    THREE_OVALS = "three_ovals"
    FOUR_OVALS = "four_ovals"


class Verdict(str, Enum):
    """实有理性判定"""
    RATIONAL = "rational"
    IRRATIONAL = "irrational"
    UNDETERMINED_SINGLE_OVAL = "undetermined_single_oval"
    UNDETERMINED_EMPTY_HYPOTHESIS = "undetermined_empty_hypothesis"


# ============================================================
# 光滑性证书
# ============================================================

class SingularWitness(BaseModel):
    """奇点见证：h(T) 的根给出的代数点"""
    minimal_polynomial: dict[str, str] = Field(..., description="T 的不可约多项式系数表")
    point: list[dict[str, str]] = Field(..., description="原坐标下的 (u,v,w)，为 T 的多项式 mod h")
    degree: int = Field(..., ge=1, description="见证点的次数")
    verified: bool = Field(..., description="Δ 与偏导数在点上模 h 为零")


class SmoothnessCertificate(BaseModel):
    """平面四次曲线光滑性证书"""
    verdict: SmoothVerdict
    method: str = Field("resultant_chain", description="证明方法")
    seed: int
    attempts: int = Field(..., ge=0)
    random_change: Optional[list[list[str]]] = Field(None, description="最后一次尝试的随机坐标变换")
    witness: Optional[SingularWitness] = None
    notes: list[str] = Field(default_factory=list)


# ============================================================
# 验证报告
# ============================================================

class CheckResult(BaseModel):
    """单项恒等式检查"""
    passed: bool
    residual: Optional[Any] = Field(None, description="失败时的精确残差")
    detail: Optional[str] = None


class VerificationReport(BaseModel):
    """命名检查 → 通过 / 残差"""
    checks: dict[str, CheckResult] = Field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks.values())

    def record(self, name: str, passed: bool, residual: Any = None, detail: Optional[str] = None) -> None:
        self.checks[name] = CheckResult(passed=passed, residual=None if passed else residual, detail=detail)

    def first_failure(self) -> Optional[str]:
        return next((name for name, c in self.checks.items() if not c.passed), None)


class Pgl2Substitution(BaseModel):
    """幺模代换 (t0,t1) ↦ (α s0 + β s1, γ s0 + δ s1)"""
    alpha: str
    beta: str
    gamma: str
    delta: str
    point: list[str] = Field(..., description="被移到 [1:0] 的点 [t0:t1]")
    source: str = Field("document", description="document | search")


# ============================================================
# Brauer 群
# ============================================================

def _place_key(label: str) -> tuple[int, int]:
    return (1, 0) if label == "inf" else (0, int(label))


class BrauerClass2(BaseModel):
    """Br(Q)[2] 中的类：由偶数个分歧位表示"""
    model_config = ConfigDict(frozen=True)

    ramified: tuple[str, ...] = ()

    @classmethod
    def from_places(cls, labels: Iterable[str]) -> "BrauerClass2":
        return cls(ramified=tuple(sorted(set(labels), key=_place_key)))

    def __add__(self, other: "BrauerClass2") -> "BrauerClass2":
        return BrauerClass2.from_places(set(self.ramified) ^ set(other.ramified))

    @property
    def is_trivial(self) -> bool:
        return not self.ramified

    def to_json(self) -> list[str]:
        return list(self.ramified)


class SpecializationSample(BaseModel):
    """一次特化的记录"""
    point: list[str]
    first: list[str]
    second: list[str]
    difference: list[str]


class ComparisonResult(BaseModel):
    """两个函数域符号的特化比较"""
    consistent: bool
    constant_diff: Optional[list[str]] = None
    samples: int = 0
    witnesses: list[SpecializationSample] = Field(default_factory=list)
    refutation: Optional[list[SpecializationSample]] = None


class LineConstancy(BaseModel):
    """直线上特化类的常值性"""
    line: list[str]
    consistent: bool
    cls: Optional[list[str]] = None
    samples: int = 0
    refutation: Optional[list[SpecializationSample]] = None


class ResidueReport(BaseModel):
    """沿除子的驯顺剩余"""
    divisor: dict[str, str]
    representative: dict[str, str]
    trivial: bool
    expected: Optional[dict[str, str]] = None
    matches_expected: Optional[bool] = None


# ============================================================
# 实拓扑
# ============================================================

class IntervalModel(BaseModel):
    lo: str
    hi: str


class WeierstrassRoot(BaseModel):
    """W 的实根：chart 为 t1=1 (坐标 T=t0/t1) 或 t0=1 (坐标 S=t1/t0)"""
    chart: str
    interval: IntervalModel


class SignatureInterval(BaseModel):
    """P¹(R) 上相邻实根之间的一段及其符号差"""
    sample: list[str] = Field(..., description="[t0:t1] 有理样本")
    signature: tuple[int, int, int]
    wraps_infinity: bool = False


class SignatureProfile(BaseModel):
    roots: list[WeierstrassRoot] = Field(default_factory=list)
    intervals: list[SignatureInterval] = Field(default_factory=list)


class SlabInfo(BaseModel):
    """扫描中的竖条：样本 x、纤维实根、扇区样本与所属胞腔"""
    index: int
    x: str
    roots: list[IntervalModel]
    sector_samples: list[str]
    sector_cells: list[int]
    arc_ovals: list[int]


class OvalInfo(BaseModel):
    id: int
    parent: Optional[int] = None
    depth: int
    arcs: int
    inner_cell: int
    outer_cell: int


class CellInfo(BaseModel):
    id: int
    depth: int
    orientable: bool
    outside: bool
    sample: list[str] = Field(..., description="原坐标下的样本点")
    delta_sign: int


class RealCurveTopology(BaseModel):
    """Δ(R) 的拓扑：卵形线、嵌套与补集胞腔"""
    oval_count: int
    configuration: Configuration
    ovals: list[OvalInfo] = Field(default_factory=list)
    cells: list[CellInfo] = Field(default_factory=list)
    slabs: list[SlabInfo] = Field(default_factory=list)
    chart: list[list[str]] = Field(..., description="扫描坐标到原坐标的矩阵")
    critical_values: int
    seed: int
    attempts: int


class CellLabel(BaseModel):
    cell: int
    in_image: bool


class OvalLabel(BaseModel):
    oval: int
    covered: bool


class RegionReport(BaseModel):
    """π(Y(R)) 的胞腔与弧标签"""
    cells: list[CellLabel] = Field(default_factory=list)
    ovals: list[OvalLabel] = Field(default_factory=list)
    boundary_law_holds: bool
    violations: list[str] = Field(default_factory=list)
    one_sign_checks: int = 0
    one_sign_violations: int = 0
    uncovered_ovals: int = 0
    image_components: int = 0
    complement_components: int = 0
    connectivity_law_holds: bool = True
    touch_candidates: int = 0
    outside_in_image: bool


class RationalityVerdict(BaseModel):
    verdict: Verdict
    configuration: Configuration
    gamma_real: bool
    section_exists: bool
    rational_by_section: bool
    evidence: list[str] = Field(default_factory=list)
    notes: list[str] = Field(default_factory=list)


class RealAnalysis(BaseModel):
    profile: SignatureProfile
    topology: RealCurveTopology
    region: RegionReport
    verdict: RationalityVerdict
    invariance_seed: Optional[int] = None
    svg: Optional[str] = None


# ============================================================
# 总报告
# ============================================================

class AnalysisReport(BaseModel):
    """一次完整分析的结构化报告"""
    schema_version: str = Field("1", alias="schema")
    name: str
    job: dict[str, Any]
    input: dict[str, Any]
    certificates: dict[str, Any]
    pgl2: Optional[Pgl2Substitution] = None
    pencil: Optional[dict[str, Any]] = None
    verification: dict[str, VerificationReport] = Field(default_factory=dict)
    symbols: dict[str, Any] = Field(default_factory=dict)
    constant_diff: Optional[list[str]] = None
    comparisons: dict[str, ComparisonResult] = Field(default_factory=dict)
    residues: list[ResidueReport] = Field(default_factory=list)
    line_constancy: Optional[LineConstancy] = None
    real: Optional[RealAnalysis] = None
    assumptions: list[str] = Field(default_factory=list)
    timings: Optional[dict[str, float]] = None
    exit_code: int = Field(0, description="0 通过，1 验证失败，2 输入不合法")
    error: Optional[dict[str, Any]] = None

    model_config = ConfigDict(populate_by_name=True)
