import copy
import os
from pathlib import Path

import yaml
from dotenv import load_dotenv

load_dotenv()  # Load .env file

ROOT = Path(__file__).resolve().parent.parent
DEFAULT_CONFIG = ROOT / "config" / "config.yaml"

DEFAULTS = {
    "general": {"log_level": "INFO", "n_jobs": 1},
    "khovanov": {"crossing_limit": 14},
    "hmr": {"default_trunc_margin": 2},
    "audit": {"max_crossings": 10, "random_models": 100, "seed": 2024},
    "paths": {
        "corpus": "corpus/diagrams.json",
        "models": "corpus/models",
        "report_dir": "data/reports",
    },
}


def load_config(path=None):
    path = Path(path) if path is not None else DEFAULT_CONFIG
    with open(path, "r") as f:
        return yaml.safe_load(f) or {}


def get_env_overrides():
    return {
        "log_level": os.getenv("KHOFLOW_LOG_LEVEL"),
        "n_jobs": os.getenv("KHOFLOW_N_JOBS"),
        "corpus": os.getenv("KHOFLOW_CORPUS"),
    }


def get_settings(path=None):
    """Config file merged over the defaults, then environment overrides."""
    settings = copy.deepcopy(DEFAULTS)
    loaded = load_config(path) if path is not None or DEFAULT_CONFIG.exists() else {}
    for section, values in loaded.items():
        if isinstance(values, dict):
            settings.setdefault(section, {}).update(values)
        else:
            settings[section] = values

    env = get_env_overrides()
    if env["log_level"]:
        settings["general"]["log_level"] = env["log_level"]
    if env["n_jobs"]:
        settings["general"]["n_jobs"] = int(env["n_jobs"])
    if env["corpus"]:
        settings["paths"]["corpus"] = env["corpus"]
    return settings


def resolve_path(relative):
    """Paths in the config are relative to the repository root."""
    p = Path(relative)
    return p if p.is_absolute() else ROOT / p
