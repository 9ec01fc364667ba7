#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
算术幂级数工具
命令行入口：解析参数、加载配置、初始化日志，并把异常转换为退出码
"""
import argparse
import sys
from typing import List, Optional, TextIO

from src.controllers.cli_controller import CliController
from src.utils.cache_manager import CorruptCacheError, UnsupportedVersionError
from src.utils.config_manager import ConfigError, config_manager
from src.utils.logger import ArithSeriesError, LoggerManager, get_logger

logger = get_logger('main')

APP_NAME = "arith-series"
APP_VERSION = "1.0.0"

EXIT_OK = 0
EXIT_USER_ERROR = 1
EXIT_INTERNAL_ERROR = 2


class UsageError(Exception):
    """命令行参数错误"""


class _Parser(argparse.ArgumentParser):
    """参数错误抛出异常而不是直接退出，由 run 统一给出退出码"""

    def error(self, message):
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog=APP_NAME, description=f"{APP_NAME} v{APP_VERSION}: 有限字母表系数幂级数的计算工具")
    parser.add_argument('--config', metavar='PATH', help='配置文件路径（JSON）')
    parser.add_argument('--debug', action='store_true', help='启用调试日志')
    sub = parser.add_subparsers(dest='command', metavar='COMMAND', parser_class=_Parser)
    sub.required = True

    p = sub.add_parser('sieve', help='生成系数前缀并写入缓存')
    p.add_argument('--func', required=True, choices=['liouville', 'moebius', 'cm', 'literal'])
    p.add_argument('--assignment', metavar='FILE', help='素数赋值文件（default: +1|-1，每行 p: +1|-1）')
    p.add_argument('--values', help='literal 序列的系数，逗号分隔，如 "1,-1,0"')
    p.add_argument('--n', type=int, help='前缀长度 N')
    p.add_argument('--cache', metavar='PATH', help='缓存文件路径')

    p = sub.add_parser('classify', help='有理 / 非周期二分判定')
    p.add_argument('--cache', required=True, metavar='PATH')
    p.add_argument('--mmax', type=int, required=True, help='前周期上界 M_max')
    p.add_argument('--kmax', type=int, required=True, help='周期上界 k_max')
    p.add_argument('--hankel', type=int, metavar='ORDER', help='同时输出 1..ORDER 阶 Hankel 行列式')

    p = sub.add_parser('refute', help='构造反驳周期声明的见证')
    p.add_argument('--func', default='cm', choices=['cm', 'liouville', 'moebius'])
    p.add_argument('--assignment', metavar='FILE')
    p.add_argument('--preperiod', type=int, required=True, help='声明的前周期 M')
    p.add_argument('--period', type=int, required=True, help='声明的周期 k')

    p = sub.add_parser('annihilate', help='搜索低复杂度零化关系')
    p.add_argument('--cache', required=True, metavar='PATH')
    p.add_argument('--trunc', type=int, required=True, help='截断 T')
    p.add_argument('--order', type=int, required=True, help='阶数上界 n_max')
    p.add_argument('--deg', type=int, required=True, help='系数次数上界 d_max')

    p = sub.add_parser('rootbound', help='Cauchy 根界与认证根计数')
    p.add_argument('--poly', required=True,
                   help='整系数多项式，低次在前逗号分隔："c0,c1,...,cn"，如 "-1,0,1" 表示 z^2-1')
    p.add_argument('--count-at', metavar='RADIUS', help='统计 |z| < RADIUS 内的根数（有理数 P/Q）')

    p = sub.add_parser('zerorun', help='μ 连续零段证书')
    p.add_argument('--length', type=int, required=True, help='段长 L')
    p.add_argument('--verify', action='store_true', help='用试除法复核证书')
    p.add_argument('--minimal', action='store_true', help='筛法搜索最小零段（仅报告）')
    p.add_argument('--limit', type=int, help='--minimal 的搜索上限')

    p = sub.add_parser('eval', help='部分和、数字展开与扇形探测')
    p.add_argument('--cache', required=True, metavar='PATH')
    p.add_argument('--n', type=int, help='项数 N（缺省为整个前缀）')
    p.add_argument('--z', metavar='P/Q', help='有理求值点')
    p.add_argument('--digits', action='store_true', help='输出 z = 1/B 处的数字展开')
    p.add_argument('--base', type=int, default=2, help='数字展开的进位制 B')
    p.add_argument('--sector', metavar='LO,HI', help='扇形角度范围（弧度）')
    p.add_argument('--radii', metavar='R1,R2,...', help='采样半径，均在 (0, 1) 内')
    p.add_argument('--samples', type=int, help='每个半径的角度采样数')
    p.add_argument('--precision', type=int, help='工作精度（比特）')
    return parser


# 取值可能以负号开头的选项，如 --poly -1,0,1
_SIGNED_LIST_OPTIONS = ('--poly', '--values', '--sector', '--z', '--count-at')


def _attach_signed_values(argv: List[str]) -> List[str]:
    """把 `--poly -1,0,1` 改写为 `--poly=-1,0,1`，避免 argparse 把取值当作选项"""
    out: List[str] = []
    i = 0
    while i < len(argv):
        token = argv[i]
        if token in _SIGNED_LIST_OPTIONS and i + 1 < len(argv) and argv[i + 1].startswith('-'):
            out.append(f"{token}={argv[i + 1]}")
            i += 2
            continue
        out.append(token)
        i += 1
    return out


def _configure(args):
    # 错误流只留给一行诊断，控制台日志仅在 --debug 时输出
    console_level = 'debug' if args.debug else 'critical'
    LoggerManager.init_logging({'log_level': 'warning', 'console_level': console_level})
    if args.config:
        config_manager.load_config(args.config, force_reload=True)
    LoggerManager.init_logging({
        'log_level': 'debug' if args.debug else config_manager.get('logging.level', 'WARNING'),
        'log_to_file': config_manager.get('logging.log_to_file', False),
        'log_directory': config_manager.get('logging.directory'),
        'console_level': console_level,
    })


def run(argv: Optional[List[str]] = None, out: Optional[TextIO] = None, err: Optional[TextIO] = None) -> int:
    """
    执行一条命令

    Returns:
        int: 0 成功；1 用户错误；2 内部错误或缓存损坏
    """
    err = err or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(_attach_signed_values(sys.argv[1:] if argv is None else list(argv)))
    except UsageError as e:
        err.write(f"error: {e}\n")
        return EXIT_USER_ERROR
    except SystemExit as e:
        # --help / --version
        return e.code if isinstance(e.code, int) else EXIT_OK

    controller = CliController(out)
    handlers = {
        'sieve': controller.sieve,
        'classify': controller.classify,
        'refute': controller.refute,
        'annihilate': controller.annihilate,
        'rootbound': controller.rootbound,
        'zerorun': controller.zerorun,
        'eval': controller.evaluate,
    }
    try:
        _configure(args)
        return handlers[args.command](args)
    except CorruptCacheError as e:
        err.write(f"error: corrupt cache: {e}\n")
        return EXIT_INTERNAL_ERROR
    except UnsupportedVersionError as e:
        err.write(f"error: unsupported cache version: {e}\n")
        return EXIT_USER_ERROR
    except (ArithSeriesError, ConfigError) as e:
        err.write(f"error: {e}\n")
        return EXIT_USER_ERROR
    except OSError as e:
        err.write(f"error: {e}\n")
        return EXIT_USER_ERROR
    except Exception as e:
        logger.exception(f"未预期的异常: {e}")
        err.write(f"internal error: {type(e).__name__}: {e}\n")
        return EXIT_INTERNAL_ERROR


def main():
    sys.exit(run(sys.argv[1:]))


if __name__ == '__main__':
    main()
