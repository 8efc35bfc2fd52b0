import json
from typing import BinaryIO, Dict, Iterable, List, Optional, Union

from marshmallow import ValidationError

from capcorr import const
from capcorr import exceptions
from capcorr import utilities
from capcorr.services.base import schemas


class BenchmarkMeta(schemas.SchemaToObject):
    def __init__(self, json_data: Union[Dict, str]):
        """Per-benchmark metadata: which way is "better" and whether the benchmark measures capability or safety

        Args:
            json_data: A dictionary (or JSON string) with the keys id, direction, role and (optionally) unit
        """
        self.id = None
        self.direction = None
        self.role = None
        self.unit = ''
        try:
            super().__init__(json_data, schemas.BenchmarkMetaSchema())
        except ValidationError as e:
            raise exceptions.ReadMetadataError(schemas.format_validation_error(e))

    @classmethod
    def create(cls, benchmark_id: str, direction: str, role: str, unit: Optional[str] = '') -> 'BenchmarkMeta':
        return cls(dict(id=benchmark_id, direction=direction, role=role, unit=unit))

    @property
    def lower_is_better(self) -> bool:
        return self.direction == const.LOWER_BETTER

    @property
    def is_capability(self) -> bool:
        return self.role == const.CAPABILITY_ROLE

    def to_dict(self) -> Dict:
        return dict(id=self.id, direction=self.direction, role=self.role, unit=self.unit)

    def __repr__(self):
        return f'BenchmarkMeta({self.id!r}, {self.direction!r}, {self.role!r})'


def parse_benchmark_meta(entries: List[Dict], source: Optional[str] = '<meta>') -> List[BenchmarkMeta]:
    """Build metadata objects from a decoded JSON array
    Args:
        entries: A list of dictionaries matching `BenchmarkMetaSchema`
        source: A description of the input used in error messages
    Returns:
        A list of `BenchmarkMeta`, in input order
    """
    if not isinstance(entries, list):
        raise exceptions.ReadMetadataError(f'{source}: expected a JSON array of benchmark entries')
    meta = []
    seen = set()
    for i, entry in enumerate(entries):
        if not isinstance(entry, dict):
            raise exceptions.ReadMetadataError(f'{source}: entry {i} is not an object')
        try:
            item = BenchmarkMeta(entry)
        except exceptions.ReadMetadataError as e:
            raise exceptions.ReadMetadataError(f'{source}: entry {i}; {e}')
        if item.id in seen:
            raise exceptions.ReadMetadataError(f'{source}: duplicate benchmark id {item.id!r}')
        seen.add(item.id)
        meta.append(item)
    return meta


def load_benchmark_meta(source: BinaryIO, name: Optional[str] = '<meta>') -> List[BenchmarkMeta]:
    """Load benchmark metadata from a JSON array of {"id","direction","role","unit"} objects
    Args:
        source: A binary stream containing UTF-8 JSON
        name: A description of the input used in error messages
    Returns:
        A list of `BenchmarkMeta`
    """
    try:
        entries = json.loads(source.read().decode('utf-8'))
    except (ValueError, UnicodeDecodeError) as e:
        raise exceptions.ReadMetadataError(f'{name} is not valid UTF-8 JSON; {e}')
    return parse_benchmark_meta(entries, source=name)


def load_benchmark_meta_file(path: str) -> List[BenchmarkMeta]:
    """Load benchmark metadata from a file
    Args:
        path: The path to the JSON metadata file
    Returns:
        A list of `BenchmarkMeta`
    """
    try:
        f = utilities.open_input_file(path, 'rb')
    except exceptions.InputError as e:
        raise exceptions.ReadMetadataError(str(e))
    with f:
        return load_benchmark_meta(f, name=path)


def validate_meta(benchmarks: Iterable[str], meta: List[BenchmarkMeta]) -> Dict[str, BenchmarkMeta]:
    """Check metadata against a matrix's benchmarks; every benchmark needs an entry and every entry a benchmark
    Args:
        benchmarks: The benchmark identifiers of a score matrix
        meta: The benchmark metadata
    Returns:
        A dictionary mapping benchmark id to its metadata
    """
    benchmarks = list(benchmarks)
    meta_map = {item.id: item for item in meta}
    missing = [b for b in benchmarks if b not in meta_map]
    if missing:
        raise exceptions.ReadMetadataError(f'no metadata for benchmark(s): {", ".join(missing)}')
    unknown = [m for m in meta_map if m not in set(benchmarks)]
    if unknown:
        raise exceptions.ReadMetadataError(f'metadata names benchmark(s) absent from the score table: '
                                           f'{", ".join(unknown)}')
    return meta_map
