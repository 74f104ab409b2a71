"""Machine-readable verification outcomes and their canonical JSON form."""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from typing import Any, TextIO

from django.conf import settings
from django.db import models

from .exceptions import GraphFormatError, StructuralError


class Verdict(models.TextChoices):
    PASS = 'pass', 'Pass'
    FAIL = 'fail', 'Fail'
    FOUND = 'found', 'Found'
    EXHAUSTED_NONE = 'exhausted_none', 'Exhausted, none exists'
    BUDGET_EXCEEDED = 'budget_exceeded', 'Budget exceeded'


class Mode(models.TextChoices):
    EXHAUSTIVE = 'exhaustive', 'Exhaustive'
    SAMPLED = 'sampled', 'Sampled'
    BUDGETED = 'budgeted', 'Budgeted'


# Verdicts that carry a witness payload
WITNESS_VERDICTS = {Verdict.FOUND, Verdict.FAIL}


def jsonable(value: Any) -> Any:
    """Normalise tuples, sets and numpy scalars into plain JSON values; floats are rejected."""
    if isinstance(value, bool) or value is None or isinstance(value, str):
        return value
    if isinstance(value, int):
        return int(value)
    if hasattr(value, 'item') and not isinstance(value, (list, tuple, dict)):
        return jsonable(value.item())
    if isinstance(value, float):
        raise GraphFormatError(f'floating point value {value!r} in certificate payload')
    if isinstance(value, dict):
        return {str(k): jsonable(v) for k, v in value.items()}
    if isinstance(value, (set, frozenset)):
        return sorted(jsonable(v) for v in value)
    if isinstance(value, (list, tuple)):
        return [jsonable(v) for v in value]
    raise GraphFormatError(f'cannot serialise {type(value).__name__} in certificate payload')


@dataclass
class Certificate:
    """Outcome of one verification run.

    A sampled run records its sample count and seed; a budgeted run records
    its node limit; an exhaustive run records neither.
    """

    claim: str
    params: dict
    verdict: Verdict
    mode: Mode = Mode.EXHAUSTIVE
    witness: Any = None
    stats: dict = field(default_factory=dict)
    notes: list = field(default_factory=list)
    seed: int | None = None
    samples: int | None = None
    node_limit: int | None = None

    def __post_init__(self):
        self.verdict = Verdict(self.verdict)
        self.mode = Mode(self.mode)
        if (self.seed is not None) != (self.mode == Mode.SAMPLED):
            raise StructuralError('a seed is recorded exactly for sampled runs')
        if self.mode == Mode.SAMPLED and self.samples is None:
            raise StructuralError('sampled runs record their sample count')
        if self.mode == Mode.BUDGETED and self.node_limit is None:
            raise StructuralError('budgeted runs record their node limit')
        if self.witness is not None and self.verdict not in WITNESS_VERDICTS:
            raise StructuralError(f'verdict {self.verdict.value} carries no witness')
        self.params = jsonable(self.params)
        self.witness = jsonable(self.witness)
        self.stats = jsonable(self.stats)
        self.notes = [str(n) for n in self.notes]

    @property
    def passed(self) -> bool:
        return self.verdict in (Verdict.PASS, Verdict.FOUND, Verdict.EXHAUSTED_NONE)

    def mode_record(self) -> dict:
        record = {'kind': self.mode.value}
        if self.mode == Mode.SAMPLED:
            record.update(count=self.samples, seed=self.seed)
        elif self.mode == Mode.BUDGETED:
            record['node_limit'] = self.node_limit
        return record

    def to_dict(self) -> dict:
        return {
            'schema': settings.LAB_CERTIFICATE_SCHEMA_VERSION,
            'claim': self.claim,
            'params': self.params,
            'mode': self.mode_record(),
            'verdict': self.verdict.value,
            'witness': self.witness,
            'stats': self.stats,
            'notes': self.notes,
        }

    @classmethod
    def from_dict(cls, data: dict) -> Certificate:
        try:
            schema = data['schema']
            if schema != settings.LAB_CERTIFICATE_SCHEMA_VERSION:
                raise GraphFormatError(f'unsupported certificate schema {schema}')
            mode = data['mode']
            return cls(
                claim=data['claim'],
                params=data['params'],
                verdict=data['verdict'],
                mode=mode['kind'],
                witness=data.get('witness'),
                stats=data.get('stats', {}),
                notes=data.get('notes', []),
                seed=mode.get('seed'),
                samples=mode.get('count'),
                node_limit=mode.get('node_limit'),
            )
        except (KeyError, TypeError, ValueError) as exc:
            if isinstance(exc, GraphFormatError):
                raise
            raise GraphFormatError(f'malformed certificate: {exc}') from exc

    def canonical_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2, ensure_ascii=True) + '\n'

    def digest(self) -> str:
        return hashlib.sha256(self.canonical_json().encode('ascii')).hexdigest()


def emit_certificate(cert: Certificate, stream: TextIO) -> None:
    """Write the canonical JSON form (sorted keys, integers only)."""
    stream.write(cert.canonical_json())


def parse_certificate(text: str) -> Certificate:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise GraphFormatError(f'certificate is not JSON: {exc}') from exc
    if not isinstance(data, dict):
        raise GraphFormatError('certificate must be a JSON object')
    return Certificate.from_dict(data)
