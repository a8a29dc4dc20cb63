"""Artifact files: band charts, trajectories, check reports and run metadata."""

import csv
import dataclasses
import json
import logging
import os
import tempfile
from contextlib import contextmanager
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Dict, Iterable, List, Optional, Sequence

import numpy as np

from . import __version__
from .config import get_output_dir
from .mathieu import CHART_HEADER
from .models import CheckResult, RunConfig, Trajectory


logger = logging.getLogger(__name__)

REAL_FORMAT = '%.17g'


def format_real(value: float) -> str:
    """Render a real with 17 significant digits."""
    return REAL_FORMAT % float(value)


def _jsonable(value: Any) -> Any:
    if isinstance(value, complex):
        return {'re': value.real, 'im': value.imag}
    if isinstance(value, (np.floating, np.integer)):
        return value.item()
    if isinstance(value, np.complexfloating):
        return _jsonable(complex(value))
    if isinstance(value, Path):
        return str(value)
    if isinstance(value, dict):
        return {k: _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    return value


class ArtifactWriter:
    """Writes data files and their metadata sidecars under one output directory."""

    def __init__(self, output_dir: Optional[Path] = None):
        """
        Initialize the writer.

        Args:
            output_dir: Base directory for relative paths. If None, uses
                THETA_QUANT_OUTPUT_DIR (default: current directory).
        """
        if output_dir is None:
            output_dir = get_output_dir()
        self.output_dir = Path(output_dir)
        self.output_dir.mkdir(parents=True, exist_ok=True)

    def resolve(self, path: Path) -> Path:
        path = Path(path)
        return path if path.is_absolute() else self.output_dir / path

    @contextmanager
    def _open(self, path: Path):
        """Write to a temporary file and move it into place on success."""
        target = self.resolve(path)
        target.parent.mkdir(parents=True, exist_ok=True)
        fd, tmp_name = tempfile.mkstemp(dir=target.parent, prefix=f".{target.name}.", suffix=".tmp")
        try:
            with os.fdopen(fd, 'w', encoding='utf-8', newline='') as handle:
                yield handle
            os.replace(tmp_name, target)
        except Exception:
            os.unlink(tmp_name)
            raise

    def _write_json(self, path: Path, payload: Any) -> Path:
        with self._open(path) as handle:
            json.dump(_jsonable(payload), handle, indent=2, sort_keys=True)
            handle.write('\n')
        return self.resolve(path)

    def write_band_chart(self, rows: Sequence[Dict], path: Path, fmt: str = 'csv') -> Path:
        """
        Write band-chart rows.

        CSV header: A,gap_index,E_low,E_high,converged. The JSON file holds
        the same rows as a list of objects.
        """
        if fmt == 'json':
            written = self._write_json(path, {'columns': list(CHART_HEADER), 'rows': list(rows)})
        else:
            with self._open(path) as handle:
                writer = csv.writer(handle, lineterminator='\n')
                writer.writerow(CHART_HEADER)
                for row in rows:
                    writer.writerow([
                        format_real(row['A']),
                        row['gap_index'],
                        format_real(row['E_low']),
                        format_real(row['E_high']),
                        'true' if row['converged'] else 'false',
                    ])
            written = self.resolve(path)
        logger.info(f"Wrote {len(rows)} band-chart rows to {written}")
        return written

    def write_trajectory(self, trajectory: Trajectory, path: Path, fmt: str = 'csv') -> Path:
        """
        Write a trajectory with real and imaginary parts in separate columns.

        Columns: t_re, t_im, then <label>_re, <label>_im per coordinate.
        """
        states = np.asarray(trajectory.states, dtype=complex)
        labels = list(trajectory.labels) or [f"s{j}" for j in range(states.shape[1])]
        if fmt == 'json':
            payload = {
                'labels': labels,
                'times': [complex(t) for t in trajectory.times],
                'states': [[complex(v) for v in row] for row in states],
                'accepted_steps': trajectory.accepted_steps,
                'rejected_steps': trajectory.rejected_steps,
                'tolerance': trajectory.tolerance,
            }
            written = self._write_json(path, payload)
        else:
            header = ['t_re', 't_im'] + [f"{name}_{part}" for name in labels for part in ('re', 'im')]
            with self._open(path) as handle:
                writer = csv.writer(handle, lineterminator='\n')
                writer.writerow(header)
                for t, row in zip(trajectory.times, states):
                    t = complex(t)
                    cells = [format_real(t.real), format_real(t.imag)]
                    for value in row:
                        cells += [format_real(value.real), format_real(value.imag)]
                    writer.writerow(cells)
            written = self.resolve(path)
        logger.info(f"Wrote {len(trajectory)} trajectory samples to {written}")
        return written

    def write_report(self, results: Iterable[CheckResult], path: Path) -> Path:
        """Write a check report as JSON."""
        entries = [dataclasses.asdict(r) for r in results]
        return self._write_json(path, {
            'passed': all(e['passed'] for e in entries),
            'checks': entries,
        })

    def write_metadata(self, data_path: Path, config: RunConfig, wall_time: float,
                       extra: Optional[Dict[str, Any]] = None) -> Path:
        """
        Write the <name>.meta.json sidecar next to a data file.

        Timestamps live only here so data files stay byte-identical across runs.
        """
        data_path = self.resolve(data_path)
        sidecar = data_path.with_name(data_path.name + '.meta.json')
        payload = {
            'version': __version__,
            'command': config.command,
            'config': {k: v for k, v in dataclasses.asdict(config).items() if k != 'command'},
            'created_at': datetime.now(timezone.utc).isoformat(),
            'wall_time_seconds': wall_time,
            'data_file': data_path.name,
        }
        if extra:
            payload.update(extra)
        return self._write_json(sidecar, payload)


def read_band_chart(path: Path) -> List[Dict]:
    """Read a band-chart CSV back into typed rows."""
    with open(path, encoding='utf-8', newline='') as handle:
        reader = csv.DictReader(handle)
        return [
            {
                'A': float(row['A']),
                'gap_index': int(row['gap_index']),
                'E_low': float(row['E_low']),
                'E_high': float(row['E_high']),
                'converged': row['converged'] == 'true',
            }
            for row in reader
        ]
