'''Scan orchestration: configs, presets, run outputs.'''

from .config import ExperimentConfig, GridSpec, apply_overrides, sector_dim
from .presets import Preset, PresetRegistry
from .experiment import ExperimentTracker, package_versions
from .orchestrator import PointResult, ScanOrchestrator, run_preset, run_scan

__all__ = [
    'ExperimentConfig',
    'GridSpec',
    'apply_overrides',
    'sector_dim',
    'Preset',
    'PresetRegistry',
    'ExperimentTracker',
    'package_versions',
    'PointResult',
    'ScanOrchestrator',
    'run_preset',
    'run_scan',
]
