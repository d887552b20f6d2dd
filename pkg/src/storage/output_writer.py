# src/storage/output_writer.py
"""
结果写出器，负责把运行报告、曲线与二维图写入输出前缀对应的文件。
文件名由前缀与数据名确定，同一输入重复运行得到逐字节相同的文件。
"""
import os
from typing import List

import numpy as np

from src.common import config
from src.common.data_models import OutputImage, OutputTable, RunReport
from src.common.errors import OutputError
from src.common.logger import logger


class OutputWriter:
    """按输出前缀写出 CSV / PGM / 报告文件"""

    def __init__(self, prefix: str):
        self.prefix = prefix

    def get_save_path(self, name: str, ext: str) -> str:
        """{前缀}_{数据名}.{扩展名}"""
        return f"{self.prefix}_{name}{ext}"

    def ensure_directory(self):
        directory = os.path.dirname(os.path.abspath(self.prefix))
        try:
            os.makedirs(directory, exist_ok=True)
        except OSError as e:
            raise OutputError(f"无法创建输出目录 {directory}: {e}") from e

    def write_csv(self, name: str, table: OutputTable) -> str:
        """全精度 CSV，首行为列名；空表只写列名。"""
        path = self.get_save_path(name, ".csv")
        rows = np.asarray(table.rows, dtype=float).reshape(-1, len(table.columns))
        fmt = f"%.{config.CSV_SIGNIFICANT_DIGITS}g"
        try:
            np.savetxt(path, rows, fmt=fmt, delimiter=",", header=",".join(table.columns), comments="")
        except OSError as e:
            raise OutputError(f"写入 {path} 失败: {e}") from e
        return path

    def write_pgm(self, name: str, image: OutputImage) -> List[str]:
        """
        16 位 ASCII PGM (P2)，数值线性缩放到 [0, PGM_MAXVAL]；缩放范围写入同名 .txt 附注文件。
        """
        path = self.get_save_path(name, ".pgm")
        sidecar = path + ".txt"
        values = np.asarray(image.values, dtype=float)
        if values.ndim != 2 or values.size == 0:
            raise OutputError(f"二维图 {name} 的形状无效: {values.shape}")
        lo, hi = float(np.min(values)), float(np.max(values))
        if hi > lo:
            scaled = np.rint((values - lo) / (hi - lo) * config.PGM_MAXVAL).astype(np.int64)
        else:
            scaled = np.zeros(values.shape, dtype=np.int64)

        height, width = scaled.shape
        body = "\n".join(" ".join(str(v) for v in row) for row in scaled)
        notes = [f"min = {lo!r}", f"max = {hi!r}", f"maxval = {config.PGM_MAXVAL}"]
        notes += [f"{axis} = {span[0]!r} .. {span[1]!r}" for axis, span in sorted(image.axes.items())]
        try:
            with open(path, "w", encoding="ascii", newline="\n") as f:
                f.write(f"P2\n{width} {height}\n{config.PGM_MAXVAL}\n{body}\n")
            with open(sidecar, "w", encoding="utf-8", newline="\n") as f:
                f.write("\n".join(notes) + "\n")
        except OSError as e:
            raise OutputError(f"写入 {path} 失败: {e}") from e
        return [path, sidecar]

    def write_report(self, report: RunReport) -> str:
        """文本报告，不含运行耗时。"""
        path = self.get_save_path("report", ".txt")
        lines = [
            f"scenario = {report.scenario}",
            f"engine = {report.engine}",
            f"version = {report.version}",
            f"seed = {report.seed}",
            "",
            "[quantities]",
        ]
        lines += [f"{key} = {float(value)!r}" for key, value in sorted(report.quantities.items())]
        lines += ["", "[checks]"]
        lines += [f"{key} = {'pass' if ok else 'FAIL'}" for key, ok in sorted(report.checks.items())]
        lines += ["", "[outputs]"]
        lines += [os.path.basename(p) for p in report.outputs]
        if report.notes:
            lines += ["", "[notes]"] + list(report.notes)
        try:
            with open(path, "w", encoding="utf-8", newline="\n") as f:
                f.write("\n".join(lines) + "\n")
        except OSError as e:
            raise OutputError(f"写入 {path} 失败: {e}") from e
        return path


def emit_outputs(report: RunReport, prefix: str) -> List[str]:
    """
    写出报告携带的全部曲线、二维图与报告本身，返回文件路径列表。

    Raises:
        OutputError: 任一文件写入失败。
    """
    writer = OutputWriter(prefix)
    writer.ensure_directory()
    paths: List[str] = []
    for name, table in sorted(report.tables.items()):
        paths.append(writer.write_csv(name, table))
    for name, image in sorted(report.images.items()):
        paths.extend(writer.write_pgm(name, image))
    report.outputs = list(paths)
    paths.append(writer.write_report(report))
    logger.info(f"已写出 {len(paths)} 个结果文件，前缀 {prefix}")
    return paths
