"""
Conic Bundles - Command Line
命令行入口：参数解析、命令分派、报告输出
"""

import argparse
import logging
import sys
from pathlib import Path
from typing import Optional, Sequence

from pydantic import ValidationError

from .commands import CommandResult, dump_json, get_all_commands
from .config import JobConfig, get_settings
from .errors import ConicBundleError

logger = logging.getLogger(__name__)


def _common_flags() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=None, help="主随机种子")
    common.add_argument("--out", default=None, help="报告输出文件 (batch 为目录)")
    common.add_argument("--json", dest="json_output", action="store_true", help="把报告写到标准输出")
    common.add_argument("--samples", type=int, default=None, help="Brauer 特化采样数")
    common.add_argument("--height", type=int, default=None, help="PGL2 搜索高度上界")
    common.add_argument("--search-pgl2", dest="search_pgl2", action="store_true", default=None, help="自动搜索 PGL2 代换")
    common.add_argument("--no-real", dest="real_analysis", action="store_false", default=None, help="跳过实拓扑分析")
    common.add_argument("--svg", dest="emit_svg", action="store_true", default=None, help="在报告中附带 SVG")
    common.add_argument("--timings", action="store_true", help="记录各阶段耗时")
    common.add_argument("--log-level", default=None, help="日志级别")
    return common


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="conic-bundles", description="二次曲线丛的 Brauer 类与实有理性判定")
    common = _common_flags()
    sub = parser.add_subparsers(dest="command", required=True, metavar="command")
    for command in get_all_commands().values():
        p = sub.add_parser(command.name, parents=[common], help=command.description)
        p.add_argument("input", help="实例文件 (batch 为目录)")
        if command.name == "batch":
            p.add_argument("--jobs", type=int, default=None, help="并行进程数")
    return parser


def configure_logging(level: str) -> None:
    logging.basicConfig(
        level=getattr(logging, level.upper(), logging.WARNING),
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
        force=True,
    )


def _status(result: CommandResult) -> None:
    icon = {0: "✅", 1: "⚠️"}.get(result.exit_code, "❌")
    for line in result.summary:
        print(f"{icon} {line}", file=sys.stderr)


def _emit(result: CommandResult, args: argparse.Namespace) -> None:
    text = dump_json(result.document)
    if args.out and args.command != "batch":
        Path(args.out).write_text(text, encoding="utf-8")
    if args.json_output:
        sys.stdout.write(text)
    else:
        for line in result.summary:
            print(line)


def run(argv: Optional[Sequence[str]] = None) -> int:
    """执行一条命令并返回退出码：0 通过，1 验证失败，2 输入不合法"""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code in (0, None) else 2

    settings = get_settings()
    configure_logging(args.log_level or settings.log_level)
    command = get_all_commands()[args.command]

    try:
        job = JobConfig.from_settings(
            settings,
            seed=args.seed,
            samples=args.samples,
            height_bound=args.height,
            search_pgl2=args.search_pgl2,
            real_analysis=args.real_analysis,
            emit_svg=args.emit_svg,
            timings=args.timings,
        )
        values = {"input": args.input, "out": args.out}
        if args.command == "batch":
            values["jobs"] = args.jobs or settings.jobs
        result = command.execute(command.parse(values), job)
    except ConicBundleError as exc:
        print(f"❌ {args.command}: {exc.message}", file=sys.stderr)
        error_doc = {"schema": "1", "command": args.command, "exit_code": exc.exit_code, "error": exc.to_json()}
        if args.json_output:
            sys.stdout.write(dump_json(error_doc))
        return exc.exit_code
    except ValidationError as exc:
        print(f"❌ {args.command}: invalid option: {exc.errors()[0]['msg']}", file=sys.stderr)
        return 2

    _status(result)
    _emit(result, args)
    return result.exit_code


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
