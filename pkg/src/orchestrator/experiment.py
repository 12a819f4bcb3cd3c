'''ExperimentTracker: output files, index and manifest of one run.

Storage layout:
    {output}/
    ├── manifest.json
    ├── index.json
    ├── traces/
    │   └── {point}.csv
    ├── curves/
    │   └── {job}.csv
    ├── maps/
    │   └── {job}.csv
    ├── circuits/
    │   └── {point}.txt
    ├── shots/
    │   └── {point}.json
    └── report.md

Every file is written with sorted keys and round-trip number formatting, so
the same configuration reproduces the same bytes. The manifest's wall time
is the one exception.
'''

from __future__ import annotations

import math
import platform
from importlib import metadata
from pathlib import Path
from typing import Any, Sequence

from ..circuit import Circuit
from ..dynamics import CoherenceTrace
from ..spectral import SusceptibilityMap
from ..utils import get_logger, write_csv, write_json

logger = get_logger(__name__)

_PACKAGES = ('decohere', 'numpy', 'scipy', 'pydantic', 'tqdm')


def package_versions() -> dict[str, str]:
    versions = {'python': platform.python_version()}
    for name in _PACKAGES:
        try:
            versions[name] = metadata.version(name)
        except metadata.PackageNotFoundError:
            versions[name] = 'unknown'
    return versions


class ExperimentTracker:
    '''Writes run outputs and keeps the per-point index.'''

    def __init__(self, output: str | Path) -> None:
        self._root = Path(output).expanduser()
        self._root.mkdir(parents=True, exist_ok=True)
        self._manifest_path = self._root / 'manifest.json'
        self._index_path = self._root / 'index.json'
        self._report_path = self._root / 'report.md'
        self._entries: list[dict[str, Any]] = []
        self._job_files: list[str] = []

    @property
    def root(self) -> Path:
        return self._root

    @property
    def failures(self) -> int:
        return sum(1 for e in self._entries if e['status'] == 'failed')

    def _relative(self, path: Path) -> str:
        return path.relative_to(self._root).as_posix()

    # -----------------------------------------------------------------------
    # Output files
    # -----------------------------------------------------------------------

    def write_trace(self, label: str, trace: CoherenceTrace) -> str:
        return self._relative(trace.to_csv(self._root / 'traces' / f'{label}.csv'))

    def write_curves(self, job: str, labels: Sequence[str], traces: Sequence[CoherenceTrace]) -> str | None:
        '''Wide CSV: t, then C(t) of each trace. Traces must share one time grid.'''
        if not traces:
            return None
        times = traces[0].times
        for trace in traces[1:]:
            if trace.times.shape != times.shape or not (trace.times == times).all():
                raise ValueError(f"Traces of job '{job}' do not share a time grid")
        rows = [(float(t), *(float(tr.coherence[k]) for tr in traces)) for k, t in enumerate(times)]
        return self._relative(write_csv(self._root / 'curves' / f'{job}.csv', ('t', *labels), rows))

    def write_map(self, label: str, chi_map: SusceptibilityMap) -> str:
        return self._relative(chi_map.to_csv(self._root / 'maps' / f'{label}.csv'))

    def write_circuit(self, label: str, circuit: Circuit) -> str:
        return self._relative(circuit.write_text(self._root / 'circuits' / f'{label}.txt'))

    def write_shots(self, label: str, stats: list[dict[str, Any]]) -> str:
        return self._relative(write_json(self._root / 'shots' / f'{label}.json', stats))

    # -----------------------------------------------------------------------
    # Index, manifest, report
    # -----------------------------------------------------------------------

    def record(
        self,
        job: str,
        label: str,
        params: dict[str, Any],
        files: list[str],
        summary: dict[str, Any] | None = None,
        error: BaseException | None = None,
    ) -> None:
        entry: dict[str, Any] = {
            'job': job,
            'point': label,
            'params': params,
            'files': files,
            'status': 'failed' if error is not None else 'ok',
            'summary': summary or {},
        }
        if error is not None:
            entry['error_type'] = type(error).__name__
            entry['error'] = str(error)
        self._entries.append(entry)

    def add_file(self, path: str) -> None:
        '''Register a file that belongs to a job rather than a single point.'''
        self._job_files.append(path)

    def all_files(self) -> list[str]:
        return sorted([f for e in self._entries for f in e['files']] + self._job_files)

    def save_index(self) -> Path:
        files = self.all_files()
        return write_json(self._index_path, {'files': files, 'points': self._entries})

    def save_manifest(self, manifest: dict[str, Any], wall_time: float) -> Path:
        return write_json(self._manifest_path, {**manifest, 'versions': package_versions(), 'wall_time_s': wall_time})

    def get_entries(self) -> list[dict[str, Any]]:
        return list(self._entries)

    def summary_report(self, title: str) -> str:
        '''Markdown table of each point's final coherence (or minimum chi); writes report.md.'''
        rows = []
        for e in self._entries:
            s = e['summary']
            if 'C_final' in s:
                value = f'C(t_max) = {_fmt(s["C_final"])}'
            elif 'chi_min' in s:
                value = f'min chi = {_fmt(s["chi_min"])}'
            else:
                value = e.get('error_type', '')
            rows.append(f'| {e["job"]} | {e["point"]} | {e["status"]} | {value} |')
        table = '\n'.join(rows)

        report = (
            f'# Decoherence Run Report: {title}\n\n'
            f'## Summary\n'
            f'- **Points**: {len(self._entries)}\n'
            f'- **Failures**: {self.failures}\n'
            f'- **Files**: {len(self.all_files())}\n\n'
            f'## Points\n\n'
            f'| Job | Point | Status | Result |\n'
            f'|-----|-------|--------|--------|\n'
            f'{table}\n'
        )
        with open(self._report_path, 'w', encoding='utf-8') as f:
            f.write(report)
        return report


def _fmt(value: float) -> str:
    return 'nan' if value is None or (isinstance(value, float) and math.isnan(value)) else f'{value:.6f}'
