import os
from typing import Any, Dict, Optional

import yaml
from dotenv import load_dotenv

from errors import ConfigError

load_dotenv()

CONFIG_PATH = os.path.join(os.path.dirname(__file__), '../config.yaml')
ENV_PREFIX = "SKEWCERT_"

DEFAULTS: Dict[str, Dict[str, Any]] = {
    'search': {
        'seed': 20200613,
        'budget': 10000,
        'workers': 4,
        'max_ball_points': 20000,
        'local_search_rounds': 200,
        'max_window': 64,
    },
    'probe': {
        'max_radius': 8,
        'max_materialized_configs': 1 << 20,
    },
    'matching': {
        'bruteforce_limit': 22,
    },
    'store': {
        'enabled': False,
        'path': None,
        'skip_duplicates': True,
    },
    'logging': {
        'level': 'INFO',
        'format': '%(asctime)s - %(name)s - %(levelname)s - %(message)s',
        'file': None,
        'max_bytes': 1_000_000,
        'backup_count': 5,
    },
}

# environment variable -> (section, key, type)
ENV_OVERRIDES = {
    'SEED': ('search', 'seed', int),
    'BUDGET': ('search', 'budget', int),
    'WORKERS': ('search', 'workers', int),
    'LOG_LEVEL': ('logging', 'level', str),
    'STORE_PATH': ('store', 'path', str),
}


def _load_config(path: Optional[str] = None) -> Dict[str, Dict[str, Any]]:
    """Load configuration from YAML file, filled in with defaults and .env overrides."""
    path = path or CONFIG_PATH
    try:
        with open(path, 'r') as f:
            loaded = yaml.safe_load(f) or {}
    except (OSError, yaml.YAMLError) as e:
        raise ConfigError(f"Failed to load config file {path}: {e}") from e
    if not isinstance(loaded, dict):
        raise ConfigError(f"Config file {path} must hold a mapping")

    merged = {}
    for section, values in DEFAULTS.items():
        given = loaded.get(section) or {}
        if not isinstance(given, dict):
            raise ConfigError(f"Section '{section}' in {path} must be a mapping")
        merged[section] = {**values, **given}

    for name, (section, key, kind) in ENV_OVERRIDES.items():
        raw = os.getenv(ENV_PREFIX + name)
        if raw is None or raw == '':
            continue
        try:
            merged[section][key] = kind(raw)
        except ValueError as e:
            raise ConfigError(f"{ENV_PREFIX}{name}={raw!r} is not a valid {kind.__name__}") from e
    if os.getenv(ENV_PREFIX + 'STORE_PATH'):
        merged['store']['enabled'] = True
    return merged


config = _load_config()


def reload(path: Optional[str] = None) -> Dict[str, Dict[str, Any]]:
    """Re-read the configuration (the CLI's --config flag)."""
    global config
    config = _load_config(path)
    return config


class SearchSettings:
    """Search parameters: config.yaml, then SKEWCERT_* variables, then explicit flags."""

    def __init__(self, seed: Optional[int] = None, budget: Optional[int] = None,
                 workers: Optional[int] = None, source: Optional[Dict[str, Any]] = None):
        source = source if source is not None else config
        search = source['search']
        self.seed = seed if seed is not None else search['seed']
        self.budget = budget if budget is not None else search['budget']
        self.workers = workers if workers is not None else search['workers']
        self.max_ball_points = search['max_ball_points']
        self.local_search_rounds = search['local_search_rounds']
        self.max_window = search['max_window']
        self.max_materialized = source['probe']['max_materialized_configs']
        self.probe_radius = source['probe']['max_radius']
        self.bruteforce_limit = source['matching']['bruteforce_limit']

    def is_valid(self) -> bool:
        """Check every limit is a usable positive integer."""
        counts = (self.budget, self.workers, self.max_ball_points, self.max_window,
                  self.max_materialized, self.probe_radius, self.bruteforce_limit)
        return (isinstance(self.seed, int)
                and all(isinstance(v, int) and not isinstance(v, bool) and v > 0 for v in counts)
                and isinstance(self.local_search_rounds, int) and self.local_search_rounds >= 0)

    def __repr__(self):
        return f"SearchSettings(seed={self.seed}, budget={self.budget}, workers={self.workers})"
