import csv
import json
import logging
from dataclasses import asdict, dataclass, fields
from typing import IO, Any, Callable, Dict, Iterable, List, Optional

from barycentric_treecode.exceptions import ExperimentError

logger = logging.getLogger('barycentric_treecode')

CSV_FIELDS = [
    'example',
    'kernel',
    'N',
    'theta',
    'n',
    'N0',
    'eps',
    'seed',
    'threads',
    'E',
    't_tree_s',
    't_moments_s',
    't_treecode_s',
    't_direct_s',
    'speedup',
    'kernel_evals',
    'moment_scalars',
    'sampled',
]


def _optional_int(value: Any) -> Optional[int]:
    if value is None or value == '':
        return None
    return int(value)


def _boolean(value: Any) -> bool:
    if isinstance(value, bool):
        return value
    if str(value).lower() in ('true', '1'):
        return True
    if str(value).lower() in ('false', '0'):
        return False
    raise ValueError(f'`{value}` is not a boolean')


@dataclass
class RunReport:
    """
    One treecode run: its parameters, error, phase timings and interaction counts.

    The CSV columns are `CSV_FIELDS`; JSON additionally carries the traversal time and the
    approximation and direct-sum counts.
    """

    example: int
    kernel: str
    N: int
    theta: float
    n: int
    N0: int
    eps: float
    seed: Optional[int]
    threads: int
    E: float
    t_tree_s: float
    t_moments_s: float
    t_treecode_s: float
    t_direct_s: float
    speedup: float
    kernel_evals: int
    moment_scalars: int
    sampled: bool
    t_traversal_s: float = 0.0
    approximations: int = 0
    direct_sums: int = 0

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)

    def to_row(self) -> Dict[str, Any]:
        data = self.to_dict()
        return {name: '' if data[name] is None else data[name] for name in CSV_FIELDS}

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'RunReport':
        """
        Builds a report from a parsed JSON object or CSV row, converting every value to its field type.

        :raises: barycentric_treecode.exceptions.ExperimentError
        """
        converters: Dict[str, Callable[[Any], Any]] = {'kernel': str, 'seed': _optional_int, 'sampled': _boolean}
        for field in fields(cls):
            converters.setdefault(field.name, {int: int, float: float}.get(field.type, str))
        missing = [name for name in CSV_FIELDS if name not in data]
        if missing:
            raise ExperimentError(f'Report is missing the field(s): {", ".join(missing)}.')
        try:
            values = {name: converters[name](value) for name, value in data.items() if name in converters}
        except (TypeError, ValueError) as e:
            raise ExperimentError(f'Could not parse report {data}. Error: {e}')
        return cls(**values)

    @classmethod
    def from_json(cls, text: str) -> 'RunReport':
        return cls.from_dict(json.loads(text))


def write_csv(reports: Iterable[RunReport], stream: IO[str], header: bool = True) -> None:
    writer = csv.DictWriter(stream, fieldnames=CSV_FIELDS, lineterminator='\n')
    if header:
        writer.writeheader()
    for report in reports:
        writer.writerow(report.to_row())


def read_csv(stream: IO[str]) -> List[RunReport]:
    return [RunReport.from_dict(row) for row in csv.DictReader(stream)]


def write_json(reports: Iterable[RunReport], stream: IO[str]) -> None:
    json.dump([report.to_dict() for report in reports], stream, indent=2)
    stream.write('\n')


def read_json(stream: IO[str]) -> List[RunReport]:
    loaded = json.load(stream)
    if isinstance(loaded, dict):
        loaded = [loaded]
    return [RunReport.from_dict(item) for item in loaded]
