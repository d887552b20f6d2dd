# main.py
import argparse
import sys
import time

from src.common import config, parallel
from src.common.errors import QMirrorError
from src.common.logger import logger, set_level
from src.common.scenarios import CANNED_SCENARIOS, describe_scenarios
from src.common.utils import format_exception_detail
from src.physics.kinematics import build_triad
from src.pipeline import scenario_runner
from src.processing.units import parse_quantity
from src.ui.presenter import Presenter


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qmirror", description="量子镜鬼成像与差频产生模拟器")

    common_group = parser.add_argument_group('通用选项')
    common_group.add_argument('--threads', type=int, default=None, help='引擎并行线程数 (等同 QMIRROR_THREADS)')
    common_group.add_argument('--quiet', action='store_true', help='只输出警告与错误，不显示进度条与汇总')

    sub = parser.add_subparsers(dest='command', metavar='COMMAND')

    reproduce = sub.add_parser('reproduce', help='运行内置场景')
    reproduce.add_argument('name', choices=list(CANNED_SCENARIOS), help='内置场景名')
    reproduce.add_argument('--out', metavar='PREFIX', help='输出文件前缀')
    reproduce.add_argument('--seed', type=int, help='覆盖场景中的随机种子')

    run = sub.add_parser('run', help='运行场景文件')
    run.add_argument('scenario', metavar='SCENARIO_FILE', help='场景文档路径')
    run.add_argument('--out', metavar='PREFIX', help='输出文件前缀')
    run.add_argument('--seed', type=int, help='覆盖场景中的随机种子')

    dfg_parser = sub.add_parser('dfg', help='差频产生工具')
    dfg_sub = dfg_parser.add_subparsers(dest='dfg_command', metavar='DFG_COMMAND')
    scan = dfg_sub.add_parser('scan-xi', help='扫描聚焦参数 ξ 并寻找最佳聚焦')
    scan.add_argument('--mu', type=float, required=True, help='μ = k_s/k_p')
    scan.add_argument('--xi-min', type=float, default=config.XI_SCAN_MIN, help='ξ 下限')
    scan.add_argument('--xi-max', type=float, default=config.XI_SCAN_MAX, help='ξ 上限')
    scan.add_argument('--points', type=int, default=config.XI_COARSE_POINTS, help='粗扫描点数')
    scan.add_argument('--optimize-dk', action='store_true', help='对每个 ξ 取最优 Δk')
    scan.add_argument('--out', metavar='PREFIX', help='输出文件前缀')

    kin = sub.add_parser('kinematics', help='计算三光子组')
    kin.add_argument('--pump', required=True, help="泵浦波长，如 '812 nm'")
    kin.add_argument('--signal', required=True, help="信号波长，如 '1064 nm'")

    sub.add_parser('list', help='列出内置场景')
    show = sub.add_parser('show', help='打印内置场景文档')
    show.add_argument('name', choices=list(CANNED_SCENARIOS), help='内置场景名')
    return parser


def dispatch(args, presenter: Presenter):
    if args.command == 'reproduce':
        report, paths = scenario_runner.reproduce(args.name, args.out, args.seed)
    elif args.command == 'run':
        report, paths = scenario_runner.run_file(args.scenario, args.out, args.seed)
    elif args.command == 'dfg':
        report, paths = scenario_runner.scan_xi(args.mu, args.xi_min, args.xi_max, args.points,
                                                args.optimize_dk, args.out)
    elif args.command == 'kinematics':
        triad = build_triad(parse_quantity(args.pump, 'length'), parse_quantity(args.signal, 'length'))
        presenter.display_triad(triad)
        return
    elif args.command == 'list':
        presenter.display_scenario_list(describe_scenarios())
        return
    elif args.command == 'show':
        presenter.display_scenario_text(args.name, CANNED_SCENARIOS[args.name])
        return
    else:
        return

    if not args.quiet:
        presenter.display_run_report(report, paths)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command is None or (args.command == 'dfg' and args.dfg_command is None):
        parser.print_help()
        return 2

    if args.threads is not None:
        if args.threads < 1:
            parser.error('--threads 必须为正整数')
        config.MAX_WORKERS = args.threads
    if args.quiet:
        set_level('WARNING')
        parallel.SHOW_PROGRESS = False

    start_time = time.time()
    logger.debug("系统启动...")
    try:
        dispatch(args, Presenter())
    except QMirrorError as e:
        logger.error(f"运行失败: {format_exception_detail(e)}")
        return e.exit_code
    except Exception as e:
        logger.critical(f"未预期的错误: {format_exception_detail(e)}", exc_info=True)
        return 3

    elapsed = time.time() - start_time
    logger.info(f"操作完成，总耗时: {elapsed:.2f} 秒")
    return 0


if __name__ == "__main__":
    sys.exit(main())
