import json
import math
import os
from fractions import Fraction
from pathlib import Path
from typing import Any, Dict, Optional

import yaml
from dotenv import load_dotenv
from pydantic import BaseModel, Field, validator

from lattice.fock import Params, WlogError

TOOL_VERSION = "2026-10-17-rank3-v1"

MODULE_SELECTORS = ("V", "MV", "VL", "M", "fields", "all")

DEFAULTS = {
    "WLOG_CACHE_DIR": ".cache/matrices",
    "WLOG_JOBS": "1",
    "WLOG_LOG_LEVEL": "INFO",
    "WLOG_OUT": "reports/out/report.json",
}

load_dotenv()


class ConfigError(WlogError):
    pass


def setting(name: str) -> Optional[str]:
    """Environment value (after .env), falling back to the built-in default."""
    val = os.getenv(name)
    if val:
        return val
    return DEFAULTS.get(name)


class RunConfig(BaseModel):
    p: int = 3
    pprime: int = 2
    max_weight: str = "6"
    module: str = "all"
    cache_dir: Optional[str] = Field(default_factory=lambda: setting("WLOG_CACHE_DIR"))
    out: str = Field(default_factory=lambda: setting("WLOG_OUT"))
    jobs: int = Field(default_factory=lambda: int(setting("WLOG_JOBS")))
    field_window: int = 5
    stretch: bool = False
    stretch_weight: Optional[int] = None
    timings: bool = False

    @validator("pprime")
    def validate_params(cls, v, values):
        p = values.get("p")
        if p is None:
            return v
        if p < 2 or v < 2:
            raise ValueError(f"p and p' must be >= 2, got ({p}, {v})")
        if math.gcd(p, v) != 1:
            raise ValueError(f"p and p' must be relatively prime, got ({p}, {v})")
        return v

    @validator("max_weight", pre=True)
    def validate_max_weight(cls, v):
        try:
            w = Fraction(str(v))
        except (ValueError, ZeroDivisionError):
            raise ValueError(f"max_weight must be a rational number, got {v!r}")
        if w < 0:
            raise ValueError("max_weight must be >= 0")
        return str(w)

    @validator("module")
    def validate_module(cls, v):
        if v not in MODULE_SELECTORS:
            raise ValueError(f"module must be one of {MODULE_SELECTORS}")
        return v

    @validator("jobs")
    def validate_jobs(cls, v):
        if v < 1:
            raise ValueError("jobs must be >= 1")
        return v

    @validator("field_window")
    def validate_field_window(cls, v):
        if v < 0:
            raise ValueError("field_window must be >= 0")
        return v

    class Config:
        extra = "forbid"

    @property
    def params(self) -> Params:
        return Params(self.p, self.pprime)

    @property
    def weight_limit(self) -> Fraction:
        return Fraction(self.max_weight)

    @property
    def window_weight(self) -> Fraction:
        return min(Fraction(self.field_window), self.weight_limit)

    @property
    def stretch_target(self) -> int:
        """(2p-1)(2p′-1) unless overridden."""
        if self.stretch_weight is not None:
            return self.stretch_weight
        return (2 * self.p - 1) * (2 * self.pprime - 1)

    def echo(self) -> Dict[str, Any]:
        """The fields that determine the report content."""
        return {
            "p": self.p,
            "pprime": self.pprime,
            "max_weight": self.max_weight,
            "module": self.module,
            "field_window": str(self.window_weight),
            "stretch": self.stretch,
        }


def load_config_file(path: str) -> Dict[str, Any]:
    file_path = Path(path)
    try:
        with open(file_path, "r", encoding="utf-8") as f:
            if file_path.suffix in (".yaml", ".yml"):
                data = yaml.safe_load(f)
            else:
                data = json.load(f)
    except Exception as e:
        raise ConfigError(f"Cannot read config file {path}: {e}")
    if not isinstance(data, dict):
        raise ConfigError(f"Config file {path} must hold a mapping")
    return data


def build_config(overrides: Dict[str, Any], config_file: Optional[str] = None) -> RunConfig:
    """File values first, then every override that is not None."""
    data: Dict[str, Any] = load_config_file(config_file) if config_file else {}
    data.update({k: v for k, v in overrides.items() if v is not None})
    try:
        cfg = RunConfig(**data)
        cfg.params  # defaults skip the field validators
    except Exception as e:
        raise ConfigError(f"Run configuration rejected: {e}")
    return cfg
