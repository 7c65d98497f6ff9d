"""
Conic Bundles - Error Hierarchy
异常体系与退出码
"""

from typing import Any, Optional


class ConicBundleError(Exception):
    """所有领域异常的基类，携带 CLI 退出码"""

    exit_code: int = 1
    kind: str = "error"

    def __init__(self, message: str, details: Optional[dict[str, Any]] = None):
        super().__init__(message)
        self.message = message
        self.details = details or {}

    def to_json(self) -> dict:
        return {"kind": self.kind, "message": self.message, "details": self.details}


# ============================================================
# 输入与假设 (exit 2)
# ============================================================

class InputError(ConicBundleError):
    """输入格式错误、变量集不匹配、零多项式等"""

    exit_code = 2
    kind = "input_error"


class SingularMatrixError(InputError):
    """矩阵秩亏损：调用方应转入 Case 2"""

    kind = "rank_deficient"


class InadmissibleError(ConicBundleError):
    """光滑性或可分性证书失败"""

    exit_code = 2
    kind = "inadmissible"

    def __init__(self, certificate: str, message: str, details: Optional[dict[str, Any]] = None):
        super().__init__(message, {"certificate": certificate, **(details or {})})
        self.certificate = certificate


class DispatchError(ConicBundleError):
    """Case 1 / Case 2 分派假设不成立"""

    exit_code = 2
    kind = "dispatch_error"


# ============================================================
# 验证失败 (exit 1)
# ============================================================

class VerificationFailure(ConicBundleError):
    """精确恒等式不成立，附带残差多项式"""

    exit_code = 1
    kind = "verification_failure"

    def __init__(self, check: str, residual: Any = None, details: Optional[dict[str, Any]] = None):
        super().__init__(f"identity check failed: {check}", {"check": check, "residual": residual, **(details or {})})
        self.check = check
        self.residual = residual


class SamplingError(ConicBundleError):
    """在重试预算内找不到合法的特化点"""

    exit_code = 1
    kind = "sampling_error"


class TopologyError(ConicBundleError):
    """实拓扑一致性检查失败"""

    exit_code = 1
    kind = "topology_error"


class GenericityError(ConicBundleError):
    """随机坐标不够一般，内部重试信号"""

    kind = "genericity"
