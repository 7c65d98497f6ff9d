"""
Conic Bundles - Instance Documents
实例文档：三个对称矩阵、可选的 PGL2 代换与直线
"""

import json
import logging
from pathlib import Path
from typing import Any, Optional, Union

from pydantic import BaseModel, Field, ValidationError

from .errors import InputError
from .exact_core import MPoly, UVW, rat_str, to_rat
from .quadform import TernaryForm

logger = logging.getLogger(__name__)

Entry = Union[int, str]


class FormEntries(BaseModel):
    """对称矩阵的上三角元素"""
    m11: Entry
    m12: Entry
    m13: Entry
    m22: Entry
    m23: Entry
    m33: Entry

    def to_form(self) -> TernaryForm:
        return TernaryForm.from_json(self.model_dump())


class InstanceDocument(BaseModel):
    """一个实例：(Q1, Q2, Q3) 及可选附加数据"""
    name: Optional[str] = Field(None, description="实例名，缺省取文件名")
    q1: FormEntries
    q2: FormEntries
    q3: FormEntries
    pgl2: Optional[list[Entry]] = Field(None, min_length=4, max_length=4, description="[α, β, γ, δ]")
    line: Optional[list[Entry]] = Field(None, min_length=3, max_length=3, description="直线 a u + b v + c w 的系数")
    expect: dict[str, Any] = Field(default_factory=dict, description="测试用的期望值")

    def forms(self) -> tuple[TernaryForm, TernaryForm, TernaryForm]:
        return self.q1.to_form(), self.q2.to_form(), self.q3.to_form()

    def line_form(self) -> Optional[MPoly]:
        if self.line is None:
            return None
        u, v, w = MPoly.gens(UVW)
        a, b, c = (to_rat(x) for x in self.line)
        form = u * a + v * b + w * c
        if form.is_zero:
            raise InputError("the fixture line has all coefficients zero")
        return form

    def echo(self) -> dict[str, Any]:
        """报告中的输入回显 (规范化为 p/q 字符串)"""
        q1, q2, q3 = self.forms()
        payload: dict[str, Any] = {"q1": q1.to_json(), "q2": q2.to_json(), "q3": q3.to_json()}
        if self.pgl2 is not None:
            payload["pgl2"] = [rat_str(to_rat(c)) for c in self.pgl2]
        if self.line is not None:
            payload["line"] = [rat_str(to_rat(c)) for c in self.line]
        return payload


def parse_instance(payload: dict, default_name: str = "instance") -> InstanceDocument:
    try:
        doc = InstanceDocument.model_validate(payload)
    except ValidationError as exc:
        raise InputError(f"invalid instance document: {exc.errors()[0]['msg']}", {"errors": len(exc.errors())}) from exc
    if doc.name is None:
        doc.name = default_name
    doc.forms()
    return doc


def load_instance(path: Union[str, Path]) -> InstanceDocument:
    path = Path(path)
    try:
        payload = json.loads(path.read_text(encoding="utf-8"))
    except FileNotFoundError as exc:
        raise InputError(f"instance file not found: {path}") from exc
    except json.JSONDecodeError as exc:
        raise InputError(f"{path.name} is not valid JSON: {exc.msg}") from exc
    if not isinstance(payload, dict):
        raise InputError(f"{path.name} must hold a JSON object")
    return parse_instance(payload, default_name=path.stem)


def load_corpus(directory: Union[str, Path]) -> list[tuple[Path, InstanceDocument]]:
    """目录下的全部 *.json 实例，按实例名排序"""
    directory = Path(directory)
    if not directory.is_dir():
        raise InputError(f"corpus directory not found: {directory}")
    docs = [(path, load_instance(path)) for path in sorted(directory.glob("*.json"))]
    if not docs:
        raise InputError(f"no *.json instances in {directory}")
    logger.info("loaded %d instance(s) from %s", len(docs), directory)
    return sorted(docs, key=lambda item: item[1].name)
