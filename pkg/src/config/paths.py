'''Where decohere writes runs and logs and where it looks for user presets.

``paths.json`` holds the root and locations relative to it. The root can be
moved without editing the file through the ``DECOHERE_HOME`` environment
variable.
'''

from __future__ import annotations

import json
import os
from pathlib import Path
from typing import ClassVar

from pydantic import BaseModel, ConfigDict, Field, field_validator


_DEFAULT_CONFIG_FILE = Path(__file__).resolve().parent / 'paths.json'
HOME_ENV = 'DECOHERE_HOME'


class DecoherePaths(BaseModel):
    '''Resolved locations; relative entries of paths.json hang off ``root``.'''

    model_config = ConfigDict(frozen=True)

    root: Path = Field(description='Base directory of everything decohere writes')
    runs: Path = Field(description='Parent of per-experiment output directories')
    logs: Path = Field(description='Default log file')
    presets: Path = Field(description='Optional user preset catalog, same layout as the bundled presets.json')

    _cache: ClassVar[dict[tuple[Path, str | None], 'DecoherePaths']] = {}

    @field_validator('root', 'runs', 'logs', 'presets', mode='before')
    @classmethod
    def _expand_user(cls, value: str | Path) -> Path:
        return Path(os.path.expanduser(str(value)))

    @classmethod
    def load(cls, path: str | Path | None = None) -> 'DecoherePaths':
        '''Read ``src/config/paths.json`` (or an override), honouring DECOHERE_HOME.'''
        config_path = (Path(path) if path else _DEFAULT_CONFIG_FILE).resolve()
        home = os.environ.get(HOME_ENV) or None
        key = (config_path, home)
        if key in cls._cache:
            return cls._cache[key]

        if not config_path.is_file():
            raise FileNotFoundError(f'Paths config not found: {config_path}')
        with config_path.open('r', encoding='utf-8') as f:
            data = json.load(f)

        root = Path(os.path.expanduser(home or data.get('root', '~/.decohere')))
        entries = {'runs': 'runs', 'logs': 'logs/decohere.log', 'presets': 'presets.json'}
        entries.update({k: v for k, v in data.items() if k in entries})
        instance = cls(root=root, **{k: root / os.path.expanduser(v) for k, v in entries.items()})
        cls._cache[key] = instance
        return instance

    def user_presets(self) -> Path | None:
        return self.presets if self.presets.is_file() else None
