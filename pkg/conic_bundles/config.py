"""
Conic Bundles - Configuration Management
配置管理模块
"""

from functools import lru_cache

from pydantic import BaseModel, Field
from pydantic_settings import BaseSettings


class Settings(BaseSettings):
    """Application settings loaded from environment variables (prefix CONIC_)"""

    # Randomness
    seed: int = 20240601

    # Brauer specialization
    samples: int = 25
    sample_height: int = 7

    # PGL2 search
    height_bound: int = 6
    search_pgl2: bool = False

    # Retry budgets
    max_retries: int = 8
    fold_levels: int = 48

    # Real analysis
    real_analysis: bool = True
    emit_svg: bool = False

    # Output
    output_dir: str = "reports"
    log_level: str = "WARNING"
    jobs: int = 1

    class Config:
        env_prefix = "CONIC_"
        env_file = ".env"
        env_file_encoding = "utf-8"


@lru_cache()
def get_settings() -> Settings:
    """Get cached settings instance"""
    return Settings()


class JobConfig(BaseModel):
    """单次任务配置，回显到每份报告中"""

    seed: int = Field(..., description="主随机种子")
    samples: int = Field(..., ge=1, description="Brauer 特化采样数")
    sample_height: int = Field(..., ge=1, description="采样点坐标高度上界")
    height_bound: int = Field(..., ge=1, description="PGL2 搜索高度上界")
    search_pgl2: bool = Field(False, description="是否自动搜索 PGL2 变换")
    max_retries: int = Field(..., ge=1, description="随机坐标重试次数")
    fold_levels: int = Field(..., ge=4, description="折点认证的最大细化层数")
    real_analysis: bool = Field(True, description="是否执行实拓扑分析")
    emit_svg: bool = Field(False, description="是否输出 SVG")
    timings: bool = Field(False, description="是否记录耗时")

    @classmethod
    def from_settings(cls, settings: Settings, **overrides) -> "JobConfig":
        """由环境配置加命令行覆盖构造"""
        values = {
            "seed": settings.seed,
            "samples": settings.samples,
            "sample_height": settings.sample_height,
            "height_bound": settings.height_bound,
            "search_pgl2": settings.search_pgl2,
            "max_retries": settings.max_retries,
            "fold_levels": settings.fold_levels,
            "real_analysis": settings.real_analysis,
            "emit_svg": settings.emit_svg,
        }
        values.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**values)
