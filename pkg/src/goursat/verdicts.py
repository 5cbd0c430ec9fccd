"""Verdict and budget types shared by the checking modules."""

from __future__ import annotations

from dataclasses import dataclass, field

HOLDS = "holds"
FAILS = "fails"
INCONCLUSIVE = "inconclusive"


@dataclass(frozen=True)
class Verdict:
    """Outcome of a check.

    A failing verdict always carries a witness that can be replayed
    against the inputs; a holding verdict may carry a budget note when
    the success is only exhaustive within the configured enumeration
    budget.
    """

    status: str
    witness: dict | None = None
    budget_note: str | None = None

    def __post_init__(self):
        if self.status not in (HOLDS, FAILS, INCONCLUSIVE):
            raise ValueError(f"bad verdict status {self.status!r}")
        if self.status == FAILS and self.witness is None:
            raise ValueError("failing verdicts must carry a witness")

    @property
    def holds(self) -> bool:
        return self.status == HOLDS


def holds(budget_note: str | None = None) -> Verdict:
    return Verdict(HOLDS, None, budget_note)


def fails(witness: dict, budget_note: str | None = None) -> Verdict:
    return Verdict(FAILS, witness, budget_note)


def inconclusive(note: str) -> Verdict:
    return Verdict(INCONCLUSIVE, None, note)


@dataclass(frozen=True)
class Budget:
    """Enumeration budgets for the relation and clone searches."""

    seed_pairs: int = 2
    max_congruences: int = 10000
    max_relations: int = 4096
    cap: int = 10**6
    app_budget: int = 2 * 10**7
