'''Preset registry: named job lists for the standard scans at desk scale.'''

from __future__ import annotations

from pathlib import Path
from typing import Any, ClassVar

from pydantic import BaseModel, Field

from .config import ExperimentConfig, apply_overrides
from ..config.paths import DecoherePaths
from ..utils import get_logger, load_json

logger = get_logger(__name__)


_DEFAULT_PRESET_FILE = Path(__file__).resolve().parent.parent / 'config' / 'presets.json'


class Preset(BaseModel):
    name: str
    description: str = ''
    jobs: list[dict[str, Any]] = Field(min_length=1)


class PresetRegistry:
    '''Registry for experiment presets.

    Usage:
        PresetRegistry.register(Preset(name="mine", jobs=[...]))
        jobs = PresetRegistry.expand("mine", {"N": 8})
    '''

    _registry: ClassVar[dict[str, Preset]] = {}

    @classmethod
    def register(cls, preset: Preset) -> None:
        cls._registry[preset.name] = preset

    @classmethod
    def get(cls, name: str) -> Preset:
        '''Raises KeyError naming the registered presets.'''
        if name not in cls._registry:
            available = ', '.join(cls._registry.keys())
            raise KeyError(f"Preset '{name}' not found. Available: {available}")
        return cls._registry[name]

    @classmethod
    def list_presets(cls) -> list[str]:
        return list(cls._registry.keys())

    @classmethod
    def load(cls, path: str | Path | None = None) -> None:
        '''Register every preset of a presets.json file.'''
        data = load_json(str(path or _DEFAULT_PRESET_FILE))
        for name, body in data.items():
            cls.register(Preset(name=name, **body))

    @classmethod
    def load_user(cls) -> Path | None:
        '''Register the user catalog under the decohere root, if there is one; its names win.'''
        path = DecoherePaths.load().user_presets()
        if path is not None:
            cls.load(path)
            logger.info(f'Loaded user presets from {path}')
        return path

    @classmethod
    def expand(
        cls,
        name: str,
        overrides: dict[str, Any] | None = None,
        defaults: dict[str, Any] | None = None,
    ) -> list[ExperimentConfig]:
        '''Job configs of a preset with ``overrides`` (flag-style) applied.

        ``defaults`` fills run-level fields such as storage_root and workers.
        '''
        preset = cls.get(name)
        jobs = []
        for job in preset.jobs:
            config = ExperimentConfig.model_validate({'experiment_name': name, **(defaults or {}), **job})
            jobs.append(apply_overrides(config, overrides or {}))
        return jobs


PresetRegistry.load()
PresetRegistry.load_user()
