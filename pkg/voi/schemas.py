"""
Domain types for discrete value-of-information analysis
Immutable pydantic models shared by every service
"""

from typing import Dict, List, Optional, Tuple, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field


class FrozenModel(BaseModel):
    model_config = ConfigDict(frozen=True)


# ============================================
# Model: problems and measurements
# ============================================

class ProbVector(FrozenModel):
    """Normalized distribution over a finite, labeled set."""

    labels: Tuple[str, ...]
    probabilities: Tuple[float, ...]

    @property
    def entries(self) -> List[Tuple[str, float]]:
        return list(zip(self.labels, self.probabilities))

    def as_array(self) -> np.ndarray:
        return np.asarray(self.probabilities, dtype=np.float64)

    def probability_of(self, label: str) -> float:
        return self.probabilities[self.labels.index(label)]


class DecisionProblem(FrozenModel):
    """Prior over states, action labels and the value table V(a,s), rows by action."""

    name: str = "problem"
    states: ProbVector
    actions: Tuple[str, ...]
    values: Tuple[Tuple[float, ...], ...]

    @property
    def state_labels(self) -> Tuple[str, ...]:
        return self.states.labels

    def prior(self) -> np.ndarray:
        return self.states.as_array()

    def value_matrix(self) -> np.ndarray:
        return np.asarray(self.values, dtype=np.float64)


class BinomialTrial(FrozenModel):
    """Generator record for a measurement built by binomial_trial."""

    n: int
    survival: Tuple[float, ...]


class MeasurementModel(FrozenModel):
    """One proposed design d: outcome labels and p(x|s), rows by state."""

    name: str
    outcomes: Tuple[str, ...]
    likelihood: Tuple[Tuple[float, ...], ...]
    trial: Optional[BinomialTrial] = None

    def likelihood_matrix(self) -> np.ndarray:
        return np.asarray(self.likelihood, dtype=np.float64)


class Violation(FrozenModel):
    path: Tuple[Union[str, int], ...] = ()
    message: str

    def __str__(self) -> str:
        return f"{format_path(self.path)}: {self.message}" if self.path else self.message


class ValidationResult(FrozenModel):
    valid: bool
    violations: Tuple[Violation, ...] = ()

    @classmethod
    def from_violations(cls, violations: List[Violation]) -> "ValidationResult":
        return cls(valid=not violations, violations=tuple(violations))


def format_path(path: Tuple[Union[str, int], ...]) -> str:
    """('states', 1, 'prior') -> 'states[1].prior'"""
    text = ""
    for part in path:
        if isinstance(part, int):
            text += f"[{part}]"
        else:
            text += f".{part}" if text else str(part)
    return text


# ============================================
# Bayes: predictive and posterior
# ============================================

class PosteriorTable(FrozenModel):
    measurement: str
    outcomes: Tuple[str, ...]
    predictive: Tuple[float, ...]
    # None where p(x) = 0
    posteriors: Tuple[Optional[ProbVector], ...]
    zero_outcomes: Tuple[str, ...] = ()


# ============================================
# VoI: per-outcome rows and reports
# ============================================

class OutcomeRow(FrozenModel):
    outcome: str
    probability: float
    delta_ev: float
    vsi: float
    posterior_action: str
    action_changed: bool
    # PEV_x(a) in action order
    posterior_values: Tuple[float, ...] = ()


class RiskEntry(FrozenModel):
    delta: float
    probability: float


class VoiReport(FrozenModel):
    problem: str
    measurement: str
    actions: Tuple[str, ...]
    ev_per_action: Dict[str, float]
    optimal_action: str
    ev_uncertainty: float
    ev_certainty: float
    evpi: float
    ev_less_uncertainty: float
    evsi: float
    sigma_vsi: float
    rvsi: Tuple[RiskEntry, ...] = ()
    rows: Tuple[OutcomeRow, ...] = ()
    zero_outcomes: Tuple[str, ...] = ()

    def rvsi_at(self, delta: float) -> float:
        for entry in self.rvsi:
            if entry.delta == delta:
                return entry.probability
        raise KeyError(f"rVSI was not computed for delta={delta}")


# ============================================
# Design: comparison of measurement designs
# ============================================

class DesignEntry(FrozenModel):
    name: str
    expected_utility: float
    ev_less_uncertainty: float
    sigma_vsi: float
    rvsi: Tuple[RiskEntry, ...] = ()
    report: VoiReport

    def rvsi_at(self, delta: float) -> float:
        return self.report.rvsi_at(delta)


class DesignComparison(FrozenModel):
    entries: Tuple[DesignEntry, ...]
    best_design: str
    deltas: Tuple[float, ...] = Field(default=(0.0,))

    @property
    def designs(self) -> List[str]:
        return [entry.name for entry in self.entries]

    def entry(self, name: str) -> DesignEntry:
        for entry in self.entries:
            if entry.name == name:
                return entry
        raise KeyError(name)

    def ranked(self, by: str = "evsi", delta: float = 0.0) -> List[DesignEntry]:
        """
        Entries ordered by one column; ties keep input order.

        by: 'evsi' (descending), 'sigma_vsi' (ascending) or 'rvsi' at `delta` (ascending)
        """
        if by == "evsi":
            key = lambda e: -e.expected_utility
        elif by == "sigma_vsi":
            key = lambda e: e.sigma_vsi
        elif by == "rvsi":
            key = lambda e: e.rvsi_at(delta)
        else:
            raise ValueError(f"Unknown ranking column: {by}")
        return sorted(self.entries, key=key)
