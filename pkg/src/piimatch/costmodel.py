"""Simulated-parallel step accounting for the n^2-processor cost model.

The modeled hardware gives row/column broadcasts and find-minimum
operations in ceil(log2 n) time; purely local work costs one step. The
ledger records what the engine *would* spend per iteration on that
hardware. It is observational only and never influences control flow.

Charges made before the first engine iteration (initialization) are kept
under a separate phase index so per-iteration bounds stay meaningful.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple

LOG_KINDS = ("row-find-min", "col-find-min", "row-broadcast", "col-broadcast")
KINDS = LOG_KINDS + ("constant-op",)

# Budget of logarithmic primitives the engine may spend per iteration.
PRIMITIVES_PER_ITERATION = 8

INIT_PHASE = -1


def log_step_cost(n: int) -> int:
    """Steps for one logarithmic primitive: ceil(log2 n), but 1 when n = 1."""
    if n <= 1:
        return 1
    return math.ceil(math.log2(n))


class Charge(NamedTuple):
    iteration: int
    kind: str
    times: int


@dataclass
class CostLedger:
    """Append-only record of simulated step charges for one run."""

    n: int
    charges: list[Charge] = field(default_factory=list)

    def step_cost(self, kind: str) -> int:
        if kind == "constant-op":
            return 1
        if kind in LOG_KINDS:
            return log_step_cost(self.n)
        raise ValueError(f"unknown primitive kind {kind!r}, expected one of {KINDS}")

    def charge(self, iteration: int, kind: str, times: int = 1) -> None:
        if times < 1:
            raise ValueError(f"times must be >= 1, got {times}")
        self.step_cost(kind)  # validates kind
        self.charges.append(Charge(iteration, kind, times))

    def charge_init(self, kind: str, times: int = 1) -> None:
        self.charge(INIT_PHASE, kind, times)

    def iteration_cost(self, iteration: int) -> int:
        """Total steps charged to one iteration; 0 if nothing was recorded."""
        return sum(c.times * self.step_cost(c.kind) for c in self.charges if c.iteration == iteration)

    def iteration_costs(self) -> dict[int, int]:
        """Steps per engine iteration (init phase excluded)."""
        out: dict[int, int] = {}
        for c in self.charges:
            if c.iteration == INIT_PHASE:
                continue
            out[c.iteration] = out.get(c.iteration, 0) + c.times * self.step_cost(c.kind)
        return out

    def run_cost(self) -> int:
        """Steps spent by engine iterations, excluding initialization."""
        return sum(
            c.times * self.step_cost(c.kind) for c in self.charges if c.iteration != INIT_PHASE
        )

    def init_cost(self) -> int:
        return sum(
            c.times * self.step_cost(c.kind) for c in self.charges if c.iteration == INIT_PHASE
        )

    def total_cost(self) -> int:
        return sum(c.times * self.step_cost(c.kind) for c in self.charges)

    def iteration_bound(self) -> int:
        """Declared per-iteration ceiling: 8 logarithmic primitives."""
        return PRIMITIVES_PER_ITERATION * (0 if self.n <= 1 else math.ceil(math.log2(self.n)))

    def max_iteration_cost(self) -> int:
        costs = self.iteration_costs()
        return max(costs.values()) if costs else 0

    def within_budget(self) -> bool:
        """True iff every iteration fits the 8 * ceil(log2 n) ceiling."""
        return self.max_iteration_cost() <= self.iteration_bound()
