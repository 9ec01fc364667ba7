"""
系统配置管理模块
负责管理筛法、认证精度、级数求值等计算参数，提供配置的读取、更新、缓存和验证功能
"""
import copy
import json
import math
import os
import threading
from typing import Any, Dict

from src.utils.logger import LoggerManager


# 自定义异常
class ConfigError(Exception):
    """配置错误异常类"""
    pass


def get_logger(name: str):
    """获取日志记录器"""
    return LoggerManager.get_logger(name)


# 错误处理装饰器
def handle_errors(error_types=None):
    """
    错误处理装饰器，捕获和记录异常

    Args:
        error_types: 要记录的异常类型列表，其他异常直接抛出
    """
    def decorator(func):
        def wrapper(*args, **kwargs):
            logger = get_logger('config_manager')
            try:
                return func(*args, **kwargs)
            except Exception as e:
                if error_types and not any(isinstance(e, error_type) for error_type in error_types):
                    raise
                logger.error(f"{func.__name__} 执行失败: {str(e)}")
                raise
        return wrapper
    return decorator


# 默认配置文件路径
DEFAULT_CONFIG_DIR = os.path.join(
    os.path.dirname(os.path.dirname(os.path.abspath(__file__))),
    'config'
)
DEFAULT_CONFIG_FILE = os.path.join(DEFAULT_CONFIG_DIR, 'config.json')

# 默认配置项
DEFAULT_CONFIG = {
    'logging': {
        'level': 'WARNING',
        'log_to_file': False,
        'directory': './logs'
    },
    'sieve': {
        'segment_threshold': 2 ** 26,
        'segment_size': 2 ** 20,
        'workers': 1
    },
    'periodicity': {
        'workers': 1
    },
    'root_bounds': {
        'initial_precision': 64,
        'max_precision': 1024
    },
    'series_eval': {
        'working_precision': 128,
        'sector_theta_lo': -math.pi / 8,
        'sector_theta_hi': math.pi / 8,
        'samples_per_arc': 16
    },
    'annihilator': {
        'verify_factor': 2
    }
}

# 配置验证规则
CONFIG_VALIDATION_RULES = {
    'logging': {
        'level': {'type': str, 'required': True, 'allowed': ['DEBUG', 'INFO', 'WARNING', 'ERROR', 'CRITICAL']},
        'log_to_file': {'type': bool, 'required': True},
        'directory': {'type': str, 'required': True}
    },
    'sieve': {
        'segment_threshold': {'type': int, 'required': True, 'min': 1},
        'segment_size': {'type': int, 'required': True, 'min': 1024},
        'workers': {'type': int, 'required': True, 'min': 1, 'max': 64}
    },
    'periodicity': {
        'workers': {'type': int, 'required': True, 'min': 1, 'max': 64}
    },
    'root_bounds': {
        'initial_precision': {'type': int, 'required': True, 'min': 16},
        'max_precision': {'type': int, 'required': True, 'min': 16, 'max': 65536}
    },
    'series_eval': {
        'working_precision': {'type': int, 'required': True, 'min': 16},
        'sector_theta_lo': {'type': (int, float), 'required': True},
        'sector_theta_hi': {'type': (int, float), 'required': True},
        'samples_per_arc': {'type': int, 'required': True, 'min': 1}
    },
    'annihilator': {
        'verify_factor': {'type': int, 'required': True, 'min': 1}
    }
}


def _merge_dicts(base: Dict, override: Dict) -> Dict:
    """递归合并字典，override 优先"""
    result = copy.deepcopy(base)
    for key, value in override.items():
        if key in result and isinstance(result[key], dict) and isinstance(value, dict):
            result[key] = _merge_dicts(result[key], value)
        else:
            result[key] = value
    return result


class ConfigManager:
    """
    配置管理器类
    提供配置的读取、更新、缓存和验证功能
    """
    _instance = None
    _lock = threading.RLock()

    def __new__(cls):
        """单例模式实现"""
        with cls._lock:
            if cls._instance is None:
                cls._instance = super(ConfigManager, cls).__new__(cls)
                cls._instance._initialize()
        return cls._instance

    def _initialize(self):
        """初始化配置管理器"""
        self.logger = get_logger('config_manager')
        self.config_file = DEFAULT_CONFIG_FILE
        self._config = {}
        self._config_loaded = False
        self._last_modified = 0

    @handle_errors(error_types=[ConfigError])
    def load_config(self, config_file: str = None, force_reload: bool = False) -> Dict[str, Any]:
        """
        加载配置

        配置文件不存在时只使用默认配置，不会自动写盘。

        Args:
            config_file: 配置文件路径，如果为None则使用默认路径
            force_reload: 是否强制重新加载配置

        Returns:
            Dict: 合并默认值后的配置字典

        Raises:
            ConfigError: 加载配置失败时抛出
        """
        with self._lock:
            if config_file is not None:
                new_path = os.path.abspath(config_file)
                if new_path != self.config_file:
                    self.config_file = new_path
                    force_reload = True

            if not os.path.exists(self.config_file):
                if config_file is not None:
                    raise ConfigError(f"配置文件不存在: {self.config_file}")
                if not self._config_loaded:
                    self._config = copy.deepcopy(DEFAULT_CONFIG)
                    self._config_loaded = True
                    self.logger.debug("未找到配置文件，使用默认配置")
                return copy.deepcopy(self._config)

            reload_file = force_reload or not self._config_loaded
            if not reload_file:
                reload_file = os.path.getmtime(self.config_file) > self._last_modified

            if reload_file:
                try:
                    with open(self.config_file, 'r', encoding='utf-8') as f:
                        file_config = json.load(f)
                except json.JSONDecodeError as e:
                    self.logger.error(f"配置文件格式错误: {str(e)}")
                    raise ConfigError(f"配置文件格式错误: {str(e)}")
                except OSError as e:
                    raise ConfigError(f"读取配置文件失败: {str(e)}")

                merged = _merge_dicts(DEFAULT_CONFIG, file_config)
                self._validate_config(merged)

                self._config = merged
                self._config_loaded = True
                self._last_modified = os.path.getmtime(self.config_file)
                self.logger.info(f"配置文件已成功加载: {self.config_file}")

            return copy.deepcopy(self._config)

    def _validate_config(self, config: Dict[str, Any]) -> bool:
        """
        验证配置的有效性

        Raises:
            ConfigError: 配置无效时抛出
        """
        try:
            self._validate_recursive(config, CONFIG_VALIDATION_RULES)
        except ValueError as e:
            raise ConfigError(f"配置验证失败: {str(e)}")
        lo = config['series_eval']['sector_theta_lo']
        hi = config['series_eval']['sector_theta_hi']
        if not lo < hi:
            raise ConfigError("配置验证失败: series_eval.sector_theta_lo 必须小于 sector_theta_hi")
        if config['root_bounds']['initial_precision'] > config['root_bounds']['max_precision']:
            raise ConfigError("配置验证失败: root_bounds.initial_precision 不能大于 max_precision")
        return True

    def _validate_recursive(self, config: Dict[str, Any], rules: Dict[str, Any], path: str = ''):
        """
        递归验证配置项

        Args:
            config: 配置字典
            rules: 验证规则
            path: 当前路径
        """
        for key, rule in rules.items():
            full_path = f"{path}.{key}" if path else key

            if key not in config:
                if isinstance(rule, dict) and rule.get('required', True):
                    raise ValueError(f"缺少必需的配置项: {full_path}")
                continue

            config_value = config[key]

            # 嵌套配置节
            if 'type' not in rule:
                if not isinstance(config_value, dict):
                    raise ValueError(f"配置项 {full_path} 应为对象")
                self._validate_recursive(config_value, rule, full_path)
                continue

            expected_type = rule['type']
            # bool 是 int 的子类，需要单独排除
            if isinstance(config_value, bool) and expected_type is not bool:
                raise ValueError(f"配置项 {full_path} 类型错误，实际 bool")
            if not isinstance(config_value, expected_type):
                if isinstance(expected_type, tuple):
                    expected_names = ', '.join(t.__name__ for t in expected_type)
                else:
                    expected_names = expected_type.__name__
                raise ValueError(f"配置项 {full_path} 类型错误，期望 {expected_names}，实际 {type(config_value).__name__}")

            if 'min' in rule and config_value < rule['min']:
                raise ValueError(f"配置项 {full_path} 值太小，最小允许值为 {rule['min']}")
            if 'max' in rule and config_value > rule['max']:
                raise ValueError(f"配置项 {full_path} 值太大，最大允许值为 {rule['max']}")
            if 'allowed' in rule and config_value not in rule['allowed']:
                allowed_values = ', '.join(str(v) for v in rule['allowed'])
                raise ValueError(f"配置项 {full_path} 值不在允许范围内，允许值为: {allowed_values}")

    @handle_errors(error_types=[ConfigError])
    def get(self, key: str, default: Any = None) -> Any:
        """
        获取配置项的值

        Args:
            key: 配置项键（支持点号分隔的嵌套路径，如 'sieve.segment_threshold'）
            default: 默认值，如果配置项不存在则返回

        Returns:
            Any: 配置项的值或默认值
        """
        if not self._config_loaded:
            self.load_config()

        value = self._config
        try:
            for k in key.split('.'):
                value = value[k]
            return value
        except (KeyError, TypeError):
            return default

    @handle_errors(error_types=[ConfigError])
    def set(self, key: str, value: Any, save: bool = False) -> bool:
        """
        设置配置项的值

        Args:
            key: 配置项键（支持点号分隔的嵌套路径）
            value: 配置值
            save: 是否立即写回配置文件

        Returns:
            bool: 设置是否成功

        Raises:
            ConfigError: 新值未通过验证时抛出
        """
        with self._lock:
            if not self._config_loaded:
                self.load_config()

            candidate = copy.deepcopy(self._config)
            keys = key.split('.')
            node = candidate
            for k in keys[:-1]:
                if k not in node or not isinstance(node[k], dict):
                    node[k] = {}
                node = node[k]
            node[keys[-1]] = value

            self._validate_config(candidate)
            self._config = candidate
            self.logger.info(f"配置项 {key} 已更新: {value}")

            if save:
                self.save_config()
            return True

    @handle_errors(error_types=[ConfigError])
    def save_config(self) -> bool:
        """
        保存配置到文件

        Raises:
            ConfigError: 保存配置失败时抛出
        """
        with self._lock:
            try:
                self._validate_config(self._config)
                os.makedirs(os.path.dirname(self.config_file), exist_ok=True)
                with open(self.config_file, 'w', encoding='utf-8') as f:
                    json.dump(self._config, f, ensure_ascii=False, indent=2)
                self._last_modified = os.path.getmtime(self.config_file)
                self.logger.info(f"配置已成功保存到: {self.config_file}")
                return True
            except OSError as e:
                self.logger.error(f"保存配置文件失败: {str(e)}")
                raise ConfigError(f"保存配置文件失败: {str(e)}")

    def reset_to_defaults(self) -> bool:
        """
        重置内存中的配置为默认值（不写盘）
        """
        with self._lock:
            self._config = copy.deepcopy(DEFAULT_CONFIG)
            self._config_loaded = True
            self.config_file = DEFAULT_CONFIG_FILE
            self.logger.info("配置已重置为默认值")
            return True

    def get_all(self) -> Dict[str, Any]:
        """
        获取所有配置项
        """
        if not self._config_loaded:
            self.load_config()
        return copy.deepcopy(self._config)


# 创建全局配置管理器实例
config_manager = ConfigManager()


# 便捷函数
def get_config(key: str = None, default: Any = None) -> Any:
    """
    获取配置项的便捷函数

    Args:
        key: 配置项键，如果为None则返回所有配置
        default: 默认值
    """
    if key is None:
        return config_manager.get_all()
    return config_manager.get(key, default)


def set_config(key: str, value: Any, save: bool = False) -> bool:
    """
    设置配置项的便捷函数
    """
    return config_manager.set(key, value, save)


def load_config(config_file: str = None) -> Dict[str, Any]:
    """
    加载配置的便捷函数
    """
    return config_manager.load_config(config_file)


def reset_config() -> bool:
    """
    重置配置为默认值的便捷函数
    """
    return config_manager.reset_to_defaults()
