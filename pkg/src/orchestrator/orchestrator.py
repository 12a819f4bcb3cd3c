'''ScanOrchestrator: evaluate scan points concurrently and write their outputs.'''

from __future__ import annotations

import asyncio
import math
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

from tqdm import tqdm

from .config import ExperimentConfig, apply_overrides
from .experiment import ExperimentTracker
from .presets import PresetRegistry
from ..circuit import Circuit, branch_fields, coherence_from_circuit, synthesize_ug, trotter_step
from ..config.numerics import NumericsConfig
from ..dynamics import CoherenceTrace, spec_coherence_trace
from ..models import ModelKind, ModelSpec
from ..spectral import SusceptibilityMap, ground_state_ising2_closed_form, susceptibility_map
from ..utils import get_logger

logger = get_logger(__name__)


@dataclass
class PointResult:
    '''Everything computed for one scan point; ``error`` is set when it failed.'''

    label: str
    spec: ModelSpec
    traces: dict[str, CoherenceTrace] = field(default_factory=dict)
    chi_map: SusceptibilityMap | None = None
    circuit: Circuit | None = None
    error: BaseException | None = None


def _finite(value: float) -> float | None:
    return None if math.isnan(value) else float(value)


class ScanOrchestrator:
    '''Runs the jobs of a preset or a single explicit config.

    Points of a job run in worker threads, at most ``workers`` at a time.
    Results are written afterwards in point order by this object alone, so
    outputs do not depend on scheduling. A failing point is logged and
    recorded in the index; the remaining points still run.

    Usage:
        orch = ScanOrchestrator(jobs, output='runs/fig1b1', title='fig1b1')
        summary = await orch.run()
    '''

    def __init__(
        self,
        jobs: list[ExperimentConfig],
        output: str | Path | None = None,
        title: str | None = None,
        numerics: NumericsConfig | None = None,
        progress: bool = True,
    ) -> None:
        if not jobs:
            raise ValueError('No jobs to run')
        self.jobs = jobs
        self.title = title or jobs[0].experiment_name
        self.numerics = numerics or NumericsConfig.load()
        self.progress = progress
        root = Path(output) if output is not None else Path(jobs[0].storage_root) / jobs[0].experiment_name
        self.tracker = ExperimentTracker(root)

    # -----------------------------------------------------------------------
    # Public entry point
    # -----------------------------------------------------------------------

    async def run(self) -> dict[str, Any]:
        start = time.perf_counter()
        logger.info(f"Run '{self.title}': {len(self.jobs)} job(s) -> {self.tracker.root}")
        for job in self.jobs:
            self._warn_scale(job)
            results = await self._run_job(job)
            self._write_job(job, results)

        self.tracker.save_index()
        self.tracker.save_manifest(self._manifest(), time.perf_counter() - start)
        report = self.tracker.summary_report(self.title)
        failures = self.tracker.failures
        if failures:
            logger.warning(f'{failures} point(s) failed; see {self.tracker.root / "index.json"}')
        logger.info(f"Run '{self.title}' finished in {time.perf_counter() - start:.1f}s")
        return {
            'output': self.tracker.root,
            'points': len(self.tracker.get_entries()),
            'failures': failures,
            'report': report,
        }

    # -----------------------------------------------------------------------
    # Evaluation
    # -----------------------------------------------------------------------

    async def _run_job(self, job: ExperimentConfig) -> list[PointResult]:
        if job.task == 'map':
            spec = job.resolved_spec()
            points = [(f'{job.name or spec.kind.value}_map', spec)]
        else:
            points = job.points()
        semaphore = asyncio.Semaphore(job.workers)

        with tqdm(total=len(points), desc=job.name or job.task, disable=not self.progress) as bar:
            async def eval_one(label: str, spec: ModelSpec) -> PointResult:
                async with semaphore:
                    result = await asyncio.to_thread(self._evaluate, job, label, spec)
                bar.update(1)
                return result

            results: list[PointResult] = await asyncio.gather(*[eval_one(label, spec) for label, spec in points])
        return results

    def _evaluate(self, job: ExperimentConfig, label: str, spec: ModelSpec) -> PointResult:
        result = PointResult(label=label, spec=spec)
        try:
            if job.task == 'trace':
                result.traces[''] = spec_coherence_trace(spec, job.times(), job.method, numerics=self.numerics)
            elif job.task == 'map':
                grid = job.grid
                result.chi_map = susceptibility_map(spec, grid.hx, grid.hy, numerics=self.numerics)
            else:
                self._evaluate_circuit(job, spec, result)
        except Exception as e:
            logger.error(f'Point {label} failed: {type(e).__name__}: {e}')
            result.error = e
        return result

    def _evaluate_circuit(self, job: ExperimentConfig, spec: ModelSpec, result: PointResult) -> None:
        '''Exact-amplitude circuit trace, dense reference on its grid, shot trace and the first-step circuit.'''
        protocol = job.circuit.model_copy(update={'shots': 0})
        exact = coherence_from_circuit(spec, job.t_max, protocol=protocol, numerics=self.numerics)
        schedule = exact.metadata['schedule']
        result.traces['circuit'] = exact
        result.traces['dense'] = spec_coherence_trace(spec, exact.times, job.method, numerics=self.numerics)
        if job.shots:
            shot_protocol = job.circuit.model_copy(update={'shots': job.shots, 'seed': job.seed})
            result.traces['shots'] = coherence_from_circuit(
                spec, schedule=schedule, protocol=shot_protocol, numerics=self.numerics
            )

        a_x, a_y = branch_fields(spec)
        prepare = synthesize_ug(ground_state_ising2_closed_form(spec.J, *spec.h))
        first = trotter_step(spec.J, a_x, a_y, schedule[0], protocol.order, protocol.ancilla_mode)
        circuit = prepare.with_ancilla().extend(first).extend(prepare.inverse().with_ancilla())
        result.circuit = circuit.model_copy(update={'label': 'first_step'})

    def _warn_scale(self, job: ExperimentConfig) -> None:
        if job.model is None:
            return
        spec = job.resolved_spec()
        cap = (
            self.numerics.recommended_fermi_sites
            if spec.kind is ModelKind.FERMI
            else self.numerics.recommended_spin_sites
        )
        if spec.n_sites > cap:
            logger.warning(
                f'{spec.kind.value} N={spec.n_sites} exceeds the desk-scale size {cap}; '
                'expect long run times and large memory use'
            )

    # -----------------------------------------------------------------------
    # Writing
    # -----------------------------------------------------------------------

    def _write_job(self, job: ExperimentConfig, results: list[PointResult]) -> None:
        job_name = job.name or job.experiment_name
        curve_labels: list[str] = []
        curve_traces: list[CoherenceTrace] = []

        for result in results:
            params = result.spec.model_dump(mode='json')
            if result.error is not None:
                self.tracker.record(job_name, result.label, params, [], error=result.error)
                continue

            files: list[str] = []
            summary: dict[str, Any] = {}
            if result.chi_map is not None:
                files.append(self.tracker.write_map(result.label, result.chi_map))
                defined = [r[2] for r in result.chi_map.to_rows() if not math.isnan(r[2])]
                summary['chi_min'] = min(defined) if defined else None
            for suffix in sorted(result.traces):
                trace = result.traces[suffix]
                name = f'{result.label}_{suffix}' if suffix else result.label
                files.append(self.tracker.write_trace(name, trace))
                key = f'C_final_{suffix}' if suffix else 'C_final'
                summary[key] = _finite(trace.final)
                for flag in ('near_defective', 'broken_phase'):
                    if flag in trace.metadata:
                        summary[flag] = bool(trace.metadata[flag])
                if 'shot_stats' in trace.metadata:
                    files.append(self.tracker.write_shots(result.label, trace.metadata['shot_stats']))
            if 'C_final' not in summary and 'C_final_circuit' in summary:
                summary['C_final'] = summary['C_final_circuit']
            if result.circuit is not None:
                files.append(self.tracker.write_circuit(result.label, result.circuit))
            self.tracker.record(job_name, result.label, params, files, summary=summary)

            if job.task == 'trace':
                curve_labels.append(result.label)
                curve_traces.append(result.traces[''])

        curves = self.tracker.write_curves(job_name, curve_labels, curve_traces)
        if curves is not None:
            self.tracker.add_file(curves)

    def _manifest(self) -> dict[str, Any]:
        return {
            'title': self.title,
            'seed': self.jobs[0].seed,
            'jobs': [job.model_dump(mode='json') for job in self.jobs],
            'numerics': self.numerics.model_dump(mode='json'),
        }


# ---------------------------------------------------------------------------
# Entry points
# ---------------------------------------------------------------------------

async def run_preset(
    name: str,
    overrides: dict[str, Any] | None = None,
    output: str | Path | None = None,
    workers: int = 1,
    progress: bool = True,
) -> dict[str, Any]:
    '''Expand a preset, apply flag overrides and run all of its jobs.

    Raises:
        KeyError: unknown preset.
        ValueError: overrides that fail validation.
    '''
    jobs = PresetRegistry.expand(name, overrides, defaults={'workers': workers})
    return await ScanOrchestrator(jobs, output, title=name, progress=progress).run()


async def run_scan(
    config: ExperimentConfig,
    overrides: dict[str, Any] | None = None,
    output: str | Path | None = None,
    progress: bool = True,
) -> dict[str, Any]:
    '''Run one explicit config, or the preset it names.'''
    if config.preset is not None:
        return await run_preset(config.preset, overrides, output, config.workers, progress)
    job = apply_overrides(config, overrides or {})
    return await ScanOrchestrator([job], output, title=job.experiment_name, progress=progress).run()
