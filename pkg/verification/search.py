"""Budgets and outcomes shared by the branch-and-prune searches."""

from __future__ import annotations

import logging
import time
from collections.abc import Callable
from dataclasses import dataclass, field
from typing import Any

from django.conf import settings

from .certificates import Certificate, Mode, Verdict
from .exceptions import ParameterError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class SearchBudget:
    node_limit: int
    wall_clock_hint: float | None = None  # seconds

    def __post_init__(self):
        if self.node_limit < 0:
            raise ParameterError(f'node_limit must be >= 0, got {self.node_limit}')

    @classmethod
    def default(cls) -> SearchBudget:
        return cls(settings.LAB_DEFAULT_NODE_LIMIT)


class BudgetSpent(Exception):
    """Raised inside a search when its node budget runs out."""


class NodeCounter:
    """Counts search-tree nodes against a budget."""

    def __init__(self, budget: SearchBudget):
        self.budget = budget
        self.nodes = 0
        self._deadline = (time.monotonic() + budget.wall_clock_hint
                          if budget.wall_clock_hint is not None else None)

    def tick(self, count: int = 1) -> None:
        self.nodes += count
        if self.nodes > self.budget.node_limit:
            raise BudgetSpent
        if self._deadline is not None and self.nodes % 1024 == 0 and time.monotonic() > self._deadline:
            raise BudgetSpent


@dataclass
class SearchOutcome:
    status: Verdict
    witness: Any = None
    nodes: int = 0
    detail: dict = field(default_factory=dict)

    @property
    def found(self) -> bool:
        return self.status == Verdict.FOUND

    @property
    def exhausted(self) -> bool:
        return self.status == Verdict.EXHAUSTED_NONE

    @property
    def budget_exceeded(self) -> bool:
        return self.status == Verdict.BUDGET_EXCEEDED

    def to_certificate(self, claim: str, params: dict, budget: SearchBudget,
                       witness_payload: Any = None, notes=()) -> Certificate:
        return Certificate(
            claim=claim,
            params=params,
            verdict=self.status,
            mode=Mode.BUDGETED,
            node_limit=budget.node_limit,
            witness=witness_payload if self.found else None,
            stats={'nodes': self.nodes, **self.detail},
            notes=list(notes),
        )


def run_search(name: str, budget: SearchBudget,
               body: Callable[[NodeCounter], tuple[Verdict, Any, dict]]) -> SearchOutcome:
    """Run body under a node counter and turn budget exhaustion into an outcome."""
    counter = NodeCounter(budget)
    logger.info('%s: searching with node limit %d', name, budget.node_limit)
    try:
        status, witness, detail = body(counter)
    except BudgetSpent:
        logger.warning('%s: budget of %d nodes exhausted', name, budget.node_limit)
        return SearchOutcome(Verdict.BUDGET_EXCEEDED, None, counter.nodes, {})
    logger.info('%s: %s after %d nodes', name, status.value, counter.nodes)
    return SearchOutcome(status, witness, counter.nodes, detail)
