import os
import csv
import json
from pathlib import Path
from typing import Any, Iterable, Sequence

import numpy as np

from .logger import get_logger


logger = get_logger(__name__)


def load_json(file_path: str) -> list[dict] | dict:
    '''
    Load a JSON or JSONL file and return its content.
    '''

    if not os.path.exists(file_path):
        raise FileNotFoundError(f'File not found: {file_path}')
    data = []
    with open(file_path, 'r', encoding='utf-8') as f:
        if file_path.endswith('.jsonl'):
            for line in f:
                data.append(json.loads(line))
        elif file_path.endswith('.json'):
            data = json.load(f)
        else:
            raise ValueError(f'Unsupported file format: {file_path}')
    return data


def format_number(value: Any) -> str:
    '''Render a CSV cell with round-trip precision; equal inputs give equal text.'''
    if isinstance(value, (bool, np.bool_)):
        return 'true' if value else 'false'
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return str(value)


def write_csv(path: str | Path, header: Sequence[str], rows: Iterable[Sequence[Any]]) -> Path:
    '''Write a CSV file with a header row, creating parent directories.'''
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, 'w', encoding='utf-8', newline='') as f:
        writer = csv.writer(f, lineterminator='\n')
        writer.writerow(header)
        for row in rows:
            writer.writerow([format_number(v) for v in row])
    logger.debug(f'Wrote {path}')
    return path


def read_csv(path: str | Path) -> tuple[list[str], list[list[str]]]:
    '''Read a CSV file back as (header, rows of strings).'''
    with open(path, 'r', encoding='utf-8', newline='') as f:
        reader = csv.reader(f)
        header = next(reader)
        return header, [row for row in reader]


def write_json(path: str | Path, data: Any) -> Path:
    '''Write JSON with sorted keys and stable indentation.'''
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, 'w', encoding='utf-8') as f:
        json.dump(data, f, indent=2, sort_keys=True)
        f.write('\n')
    logger.debug(f'Wrote {path}')
    return path
