import json
import logging
from pathlib import Path
from typing import Dict, List, Optional

import yaml
from pydantic import BaseModel, Field, validator

from config.settings import MODULE_SELECTORS, ConfigError

logger = logging.getLogger(__name__)

DEFAULT_MANIFEST = Path(__file__).resolve().parent.parent / "config" / "suites.manifest.json"


class SuiteSpec(BaseModel):
    id: str = Field(..., min_length=1)
    modules: List[str] = Field(..., description="Module selectors that run this suite")
    anchor: str = ""
    enabled: bool = True
    stretch: bool = False
    informational: bool = False

    @validator("modules")
    def validate_modules(cls, v):
        if not v:
            raise ValueError("a suite needs at least one module selector")
        unknown = [m for m in v if m not in MODULE_SELECTORS]
        if unknown:
            raise ValueError(f"unknown module selectors {unknown}")
        return v

    class Config:
        extra = "forbid"


class SuiteManifest(BaseModel):
    suites: List[SuiteSpec]

    @validator("suites")
    def validate_unique(cls, v):
        seen = set()
        for spec in v:
            if spec.id in seen:
                raise ValueError(f"duplicate suite id '{spec.id}'")
            seen.add(spec.id)
        return v

    class Config:
        extra = "forbid"


class SuiteRegistry:
    def __init__(self, manifest_path: Optional[str] = None):
        self.manifest_path = Path(manifest_path) if manifest_path else DEFAULT_MANIFEST
        self._suites: Dict[str, SuiteSpec] = {}
        self._order: List[str] = []
        self._load()

    def _load(self):
        path = self.manifest_path
        try:
            with open(path, "r", encoding="utf-8") as f:
                if path.suffix in (".yaml", ".yml"):
                    data = yaml.safe_load(f)
                else:
                    data = json.load(f)
            manifest = SuiteManifest(**data)
        except Exception as e:
            logger.error(f"Failed to load suite manifest {path}: {e}")
            raise ConfigError(f"Invalid suite manifest {path}: {e}")
        for spec in manifest.suites:
            self._suites[spec.id] = spec
            self._order.append(spec.id)
        logger.debug(f"Loaded {len(self._order)} suites from {path}")

    def get(self, suite_id: str) -> Optional[SuiteSpec]:
        return self._suites.get(suite_id)

    def ids(self) -> List[str]:
        return list(self._order)

    def select(self, module: str, stretch: bool = False) -> List[SuiteSpec]:
        """Enabled suites for a module selector, in manifest order."""
        out = []
        for suite_id in self._order:
            spec = self._suites[suite_id]
            if not spec.enabled or module not in spec.modules:
                continue
            if spec.stretch and not stretch:
                continue
            out.append(spec)
        return out
