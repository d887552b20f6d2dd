# src/ui/presenter.py
from typing import Dict, List

from rich.console import Console
from rich.panel import Panel
from rich.table import Table
from rich.text import Text

from src.common.data_models import PhotonTriad, RunReport
from src.physics.kinematics import omega_to_wavelength


class Presenter:
    """
    负责将运行报告、场景列表等对象渲染为终端富文本输出的专职类。
    """
    def __init__(self, console: Console = None):
        self.console = console or Console()

    def display_run_report(self, report: RunReport, paths: List[str]):
        """渲染一次场景运行的物理量、检验结果与输出文件。"""
        self.console.print()
        header = Text.from_markup(
            f"[bold]场景:[/bold] {report.scenario}   [bold]引擎:[/bold] {report.engine}   "
            f"[bold]种子:[/bold] {report.seed}   [bold]版本:[/bold] {report.version}")
        self.console.print(Panel(header, title="[bold yellow]运行信息[/bold yellow]", border_style="yellow"))
        self.console.print(self._render_quantities(report.quantities))
        if report.checks:
            self.console.print(self._render_checks(report.checks))
        if report.notes:
            notes = "\n".join(f"  • {n}" for n in report.notes)
            self.console.print(Panel(notes, title="备注", border_style="dim"))
        files = "\n".join(f"  {p}" for p in paths) or "  [dim]无[/dim]"
        self.console.print(Panel(files, title="输出文件", border_style="blue"))
        self.console.print(f"[dim]耗时 {report.wall_time:.2f} 秒[/dim]")

    def _render_quantities(self, quantities: Dict[str, float]) -> Table:
        table = Table(title="物理量", show_header=True, header_style="bold magenta")
        table.add_column("名称", style="cyan")
        table.add_column("数值", justify="right")
        for key, value in sorted(quantities.items()):
            table.add_row(key, f"{value:.6g}")
        return table

    def _render_checks(self, checks: Dict[str, bool]) -> Table:
        table = Table(title="检验", show_header=True, header_style="bold magenta")
        table.add_column("检验项", style="cyan")
        table.add_column("结果", justify="center")
        for key, ok in sorted(checks.items()):
            table.add_row(key, "[green]通过[/green]" if ok else "[bold red]失败[/bold red]")
        return table

    def display_scenario_list(self, descriptions: Dict[str, str]):
        """使用 rich 表格列出内置场景"""
        table = Table(title="内置场景", show_header=True, header_style="bold magenta")
        table.add_column("名称", style="cyan")
        table.add_column("说明")
        for name, text in descriptions.items():
            table.add_row(name, text)
        self.console.print(table)

    def display_scenario_text(self, name: str, text: str):
        self.console.print(Panel(text.strip(), title=f"[bold green]{name}[/bold green]", border_style="green"))

    def display_triad(self, triad: PhotonTriad):
        """打印光子三元组的波长与角频率。"""
        table = Table(title="光子三元组", show_header=True, header_style="bold magenta")
        table.add_column("光束", style="cyan")
        table.add_column("真空波长 (nm)", justify="right")
        table.add_column("角频率 (rad/s)", justify="right")
        for label, omega in (("泵浦", triad.omega_p), ("信号", triad.omega_s), ("闲频", triad.omega_i)):
            wavelength_nm = omega_to_wavelength(omega) * 1e9
            table.add_row(label, f"{wavelength_nm:.4f}", f"{omega:.6e}")
        self.console.print(table)
