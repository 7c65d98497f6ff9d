"""
Conic Bundles - Commands
命令集：check / build-z / verify-z / brauer-diff / real / analyze / batch
"""

import json
import logging
from abc import ABC, abstractmethod
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path
from typing import Any, Optional, Type

import pandas as pd
from pydantic import BaseModel, Field

from .config import JobConfig
from .instances import load_corpus, load_instance
from .models import AnalysisReport
from .pipeline import ALL_STAGES, Stage, get_pipeline

logger = logging.getLogger(__name__)

SUMMARY_COLUMNS = ["instance", "exit_code", "checks_passed", "case", "constant_diff", "configuration", "verdict"]


def dump_json(payload: Any) -> str:
    """排序键、缩进 2 的确定性 JSON"""
    return json.dumps(payload, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def report_document(report: AnalysisReport) -> dict[str, Any]:
    return report.model_dump(mode="json", by_alias=True)


# ============================================
# Command Input Schemas
# ============================================

class InstanceInput(BaseModel):
    """单实例命令输入"""
    input: str = Field(description="实例文件路径")
    out: Optional[str] = Field(default=None, description="报告输出文件")


class BatchInput(BaseModel):
    """批处理输入"""
    input: str = Field(description="实例目录")
    out: Optional[str] = Field(default=None, description="报告输出目录")
    jobs: int = Field(default=1, ge=1, description="并行进程数")


class CommandResult(BaseModel):
    """命令结果：退出码与要写出的文档"""
    exit_code: int
    document: dict[str, Any]
    summary: list[str] = Field(default_factory=list, description="每个实例一行的摘要")


# ============================================
# Commands
# ============================================

class BaseCommand(ABC):
    """所有命令的基类"""

    args_schema: Type[BaseModel] = InstanceInput

    @property
    @abstractmethod
    def name(self) -> str:
        """命令名"""

    @property
    @abstractmethod
    def description(self) -> str:
        """命令描述"""

    @abstractmethod
    def execute(self, args: BaseModel, job: JobConfig) -> CommandResult:
        """执行命令"""

    def parse(self, values: dict[str, Any]) -> BaseModel:
        return self.args_schema.model_validate(values)


def summary_row(report: AnalysisReport) -> dict[str, Any]:
    checks_passed = report.exit_code == 0 and all(v.passed for v in report.verification.values())
    real = report.real
    return {
        "instance": report.name,
        "exit_code": report.exit_code,
        "checks_passed": checks_passed,
        "case": (report.pencil or {}).get("case", ""),
        "constant_diff": ",".join(report.constant_diff) if report.constant_diff is not None else "",
        "configuration": real.topology.configuration.value if real else "",
        "verdict": real.verdict.verdict.value if real else "",
    }


def summary_line(report: AnalysisReport) -> str:
    row = summary_row(report)
    parts = [f"{k}={row[k]}" for k in SUMMARY_COLUMNS[1:] if row[k] != ""]
    return f"{row['instance']}: " + " ".join(parts)


class InstanceCommand(BaseCommand):
    """对单个实例执行若干流程阶段"""

    stages: frozenset = ALL_STAGES
    overrides: dict[str, Any] = {}

    def execute(self, args: InstanceInput, job: JobConfig) -> CommandResult:
        instance = load_instance(args.input)
        if self.overrides:
            job = job.model_copy(update=self.overrides)
        report = get_pipeline().run(instance, job, self.stages)
        return CommandResult(exit_code=report.exit_code, document=report_document(report), summary=[summary_line(report)])


class CheckCommand(InstanceCommand):
    name = "check"
    description = "光滑性与可分性证书"
    stages = frozenset({Stage.COVER})


class BuildZCommand(InstanceCommand):
    name = "build-z"
    description = "构造二次曲面束并验证判别式恒等式"
    stages = frozenset({Stage.COVER, Stage.PENCIL})


class VerifyZCommand(InstanceCommand):
    name = "verify-z"
    description = "构造二次曲面束并验证全部子式恒等式"
    stages = frozenset({Stage.COVER, Stage.PENCIL, Stage.MINORS})


class BrauerDiffCommand(InstanceCommand):
    name = "brauer-diff"
    description = "比较两个一般纤维的 Brauer 类"
    stages = frozenset({Stage.COVER, Stage.PENCIL, Stage.SYMBOLS})


class RealCommand(InstanceCommand):
    name = "real"
    description = "实拓扑、像区域与有理性判定"
    stages = frozenset({Stage.COVER, Stage.REAL})
    overrides = {"real_analysis": True}


class AnalyzeCommand(InstanceCommand):
    name = "analyze"
    description = "完整分析"


def _batch_worker(task: tuple[str, dict]) -> dict:
    path, job_payload = task
    job = JobConfig(**job_payload)
    report = get_pipeline().run(load_instance(path), job, ALL_STAGES)
    return report_document(report)


class BatchCommand(BaseCommand):
    name = "batch"
    description = "对目录中的全部实例执行完整分析并汇总"
    args_schema = BatchInput

    def execute(self, args: BatchInput, job: JobConfig) -> CommandResult:
        corpus = load_corpus(args.input)
        out_dir = Path(args.out or get_pipeline().settings.output_dir)
        out_dir.mkdir(parents=True, exist_ok=True)
        tasks = [(str(path), job.model_dump()) for path, _ in corpus]
        if args.jobs > 1 and len(tasks) > 1:
            with ProcessPoolExecutor(max_workers=args.jobs) as pool:
                documents = list(pool.map(_batch_worker, tasks))
        else:
            documents = [_batch_worker(task) for task in tasks]

        documents.sort(key=lambda d: d["name"])
        for doc in documents:
            (out_dir / f"{doc['name']}.json").write_text(dump_json(doc), encoding="utf-8")
        reports = [AnalysisReport.model_validate(doc) for doc in documents]

        table = pd.DataFrame([summary_row(r) for r in reports], columns=SUMMARY_COLUMNS)
        table = table.sort_values("instance", kind="stable").reset_index(drop=True)
        table.to_csv(out_dir / "summary.csv", index=False)
        records = json.loads(table.to_json(orient="records"))
        (out_dir / "summary.json").write_text(dump_json(records), encoding="utf-8")
        logger.info("batch: %d instance(s) written to %s", len(reports), out_dir)

        exit_code = max((r.exit_code for r in reports), default=0)
        return CommandResult(
            exit_code=exit_code,
            document={"schema": "1", "directory": str(out_dir), "summary": records},
            summary=[summary_line(r) for r in reports],
        )


# ============================================
# Command Registry
# ============================================

def get_all_commands() -> dict[str, BaseCommand]:
    """获取所有命令"""
    commands = [
        CheckCommand(),
        BuildZCommand(),
        VerifyZCommand(),
        BrauerDiffCommand(),
        RealCommand(),
        AnalyzeCommand(),
        BatchCommand(),
    ]
    return {c.name: c for c in commands}
