import logging
import os
from typing import Any, Dict

import psutil
import yaml
from dotenv import load_dotenv

load_dotenv()

logger = logging.getLogger(__name__)

DEFAULT_CONFIG_PATH = os.path.join(os.path.dirname(os.path.dirname(os.path.dirname(os.path.abspath(__file__)))),
                                   "config.yaml")


class Config:
    def __init__(self, config_path: str = None):
        self.config_data = {}
        self.load_config(config_path or os.getenv('GRSK_CONFIG', DEFAULT_CONFIG_PATH))

    def load_config(self, path: str) -> None:
        """Load configuration from YAML file"""
        if os.path.exists(path):
            with open(path, 'r', encoding='utf-8') as file:
                self.config_data = yaml.safe_load(file) or {}
            self.config_path = path
        else:
            raise FileNotFoundError(f"Configuration file not found: {path}")

    def get_numerics_config(self) -> Dict[str, Any]:
        """Return float tolerances and oracle guards"""
        return self.config_data.get('numerics', {})

    def get_quadrature_config(self) -> Dict[str, Any]:
        """Return default quadrature settings"""
        return self.config_data.get('quadrature', {})

    def get_monte_carlo_config(self) -> Dict[str, Any]:
        """Return Monte Carlo settings"""
        return self.config_data.get('monte_carlo', {})

    def get_verification_config(self) -> Dict[str, Any]:
        """Return verification suite defaults"""
        return self.config_data.get('verification', {})

    def get_api_config(self) -> Dict[str, Any]:
        """Return API configuration"""
        return self.config_data.get('api', {})

    def get_processing_config(self) -> Dict[str, Any]:
        """Return processing configuration, with environment overrides applied"""
        processing = dict(self.config_data.get('processing', {}))
        if os.getenv('GRSK_THREADS'):
            processing['threads'] = int(os.getenv('GRSK_THREADS'))
        if os.getenv('GRSK_LOG_LEVEL'):
            processing['log_level'] = os.getenv('GRSK_LOG_LEVEL')
        return processing

    def get_threads(self) -> int:
        threads = self.get_processing_config().get('threads') or psutil.cpu_count(logical=True) or 1
        return max(1, int(threads))

    def validate_processing(self) -> bool:
        """Thread count sanity check"""
        threads = self.get_threads()
        cpu_count = psutil.cpu_count(logical=True) or 1

        if threads > cpu_count:
            logger.warning(f"Requested {threads} threads but only {cpu_count} logical CPUs are available")
            return False

        return True


# Global config instance
config = Config()
