#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
算术幂级数工具
源码目录下的启动脚本，等价于安装后的 arith-series 命令
"""

import os
import sys

# 添加项目根目录到Python路径
sys.path.append(os.path.dirname(os.path.abspath(__file__)))

from src.main import run


if __name__ == '__main__':
    sys.exit(run(sys.argv[1:]))
