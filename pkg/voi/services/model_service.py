"""
Model Service - decision problems and measurement models
Validation plus construction of the standard likelihoods
"""

import logging
import math
from typing import List, Optional, Sequence

import numpy as np
from scipy.stats import binom

from schemas import (
    BinomialTrial,
    DecisionProblem,
    MeasurementModel,
    ValidationResult,
    Violation,
)

logger = logging.getLogger(__name__)

# Hand-entered probabilities are quoted to a few decimals
INPUT_TOLERANCE = 1e-9
# Largest n whose coefficients are taken as exact integers
DIRECT_BINOMIAL_LIMIT = 60


class ModelService:
    """
    Validates problems and measurements and builds identity/binomial likelihoods.

    Validation never raises: every violated invariant is reported, not just the first.
    """

    def __init__(self, tolerance: float = INPUT_TOLERANCE):
        self.tolerance = tolerance

    def validate_problem(self, problem: DecisionProblem) -> ValidationResult:
        """
        Check the prior, labels and value-table shape of a decision problem.

        Returns:
            ValidationResult listing every violation found
        """
        violations: List[Violation] = []

        labels = problem.states.labels
        probabilities = problem.states.probabilities

        if not labels:
            violations.append(Violation(path=("states",), message="at least one state is required"))
        if len(labels) != len(probabilities):
            violations.append(Violation(
                path=("states",),
                message=f"{len(labels)} labels but {len(probabilities)} prior probabilities"
            ))

        violations.extend(self._check_labels(labels, ("states",), "state", field="label"))
        violations.extend(self._check_distribution(probabilities, ("states",), "prior", field="prior"))

        if not problem.actions:
            violations.append(Violation(path=("actions",), message="at least one action is required"))
        violations.extend(self._check_labels(problem.actions, ("actions",), "action"))

        # Value table: one row per action, one column per state
        if len(problem.values) != len(problem.actions):
            violations.append(Violation(
                path=("values",),
                message=f"expected {len(problem.actions)} rows (one per action), got {len(problem.values)}"
            ))
        for i, row in enumerate(problem.values):
            if len(row) != len(labels):
                violations.append(Violation(
                    path=("values", i),
                    message=f"expected {len(labels)} entries (one per state), got {len(row)}"
                ))
            for j, value in enumerate(row):
                if not math.isfinite(value):
                    violations.append(Violation(path=("values", i, j), message=f"value {value} is not finite"))

        result = ValidationResult.from_violations(violations)
        logger.debug("Problem %s: %d violation(s)", problem.name, len(result.violations))
        return result

    def validate_measurement(
        self,
        problem: DecisionProblem,
        measurement: MeasurementModel
    ) -> ValidationResult:
        """
        Check a measurement's outcome labels, likelihood rows and agreement with `problem`.

        Returns:
            ValidationResult listing every violation found
        """
        violations: List[Violation] = []

        if not measurement.name.strip():
            violations.append(Violation(path=("name",), message="measurement name must be non-empty"))

        if not measurement.outcomes:
            violations.append(Violation(path=("outcomes",), message="at least one outcome is required"))
        violations.extend(self._check_labels(measurement.outcomes, ("outcomes",), "outcome"))

        state_count = len(problem.states.labels)
        if len(measurement.likelihood) != state_count:
            violations.append(Violation(
                path=("likelihood",),
                message=f"expected {state_count} rows (one per state), got {len(measurement.likelihood)}"
            ))

        for i, row in enumerate(measurement.likelihood):
            if len(row) != len(measurement.outcomes):
                violations.append(Violation(
                    path=("likelihood", i),
                    message=f"expected {len(measurement.outcomes)} entries (one per outcome), got {len(row)}"
                ))
            violations.extend(self._check_distribution(row, ("likelihood", i), "likelihood row"))

        result = ValidationResult.from_violations(violations)
        logger.debug("Measurement %s: %d violation(s)", measurement.name, len(result.violations))
        return result

    def perfect_measurement(self, problem: DecisionProblem) -> MeasurementModel:
        """Outcomes mirror the states; p(x_i|s_j) = 1 iff i = j."""
        size = len(problem.states.labels)
        identity = np.eye(size)
        return MeasurementModel(
            name="perfect information",
            outcomes=problem.states.labels,
            likelihood=tuple(tuple(float(v) for v in row) for row in identity),
        )

    def binomial_trial(
        self,
        name: str,
        n: int,
        survival: Sequence[float]
    ) -> MeasurementModel:
        """
        Likelihood of x successes out of n independent trials, per state.

        Entry (s, x) = C(n, x) p_s^x (1 - p_s)^(n - x), outcomes labeled '0'..'n'.

        Raises:
            ValueError: If n < 1 or a survival probability lies outside [0, 1]
        """
        if isinstance(n, bool) or int(n) != n or n < 1:
            raise ValueError(f"binomial trial '{name}' needs n >= 1, got {n}")
        n = int(n)

        for i, p in enumerate(survival):
            if not (0.0 <= p <= 1.0):
                raise ValueError(f"binomial trial '{name}': survival[{i}] = {p} is outside [0, 1]")

        rows = tuple(tuple(self._binomial_row(n, float(p))) for p in survival)

        return MeasurementModel(
            name=name,
            outcomes=tuple(str(x) for x in range(n + 1)),
            likelihood=rows,
            trial=BinomialTrial(n=n, survival=tuple(float(p) for p in survival)),
        )

    def _binomial_row(self, n: int, p: float) -> List[float]:
        if n <= DIRECT_BINOMIAL_LIMIT:
            return [math.comb(n, x) * p ** x * (1.0 - p) ** (n - x) for x in range(n + 1)]
        # scipy evaluates the pmf in log space
        return [float(v) for v in binom.pmf(np.arange(n + 1), n, p)]

    def _check_labels(
        self,
        labels: Sequence[str],
        path: tuple,
        kind: str,
        field: Optional[str] = None
    ) -> List[Violation]:
        violations = []
        seen = set()
        for i, label in enumerate(labels):
            where = _entry_path(path, i, field)
            if not label.strip():
                violations.append(Violation(path=where, message=f"{kind} label must be non-empty"))
            elif label in seen:
                violations.append(Violation(path=where, message=f"duplicate {kind} label '{label}'"))
            seen.add(label)
        return violations

    def _check_distribution(
        self,
        probabilities: Sequence[float],
        path: tuple,
        kind: str,
        field: Optional[str] = None
    ) -> List[Violation]:
        violations = []
        for i, p in enumerate(probabilities):
            if not math.isfinite(p) or p < 0.0 or p > 1.0:
                violations.append(Violation(
                    path=_entry_path(path, i, field),
                    message=f"{kind} entry {p} is outside [0, 1]"
                ))

        finite = [p for p in probabilities if math.isfinite(p)]
        if probabilities and len(finite) == len(probabilities):
            total = math.fsum(finite)
            if abs(total - 1.0) > self.tolerance:
                violations.append(Violation(path=path, message=f"{kind} sums to {total:.12g}, not 1"))
        return violations


def _entry_path(path: tuple, index: int, field: Optional[str]) -> tuple:
    # State entries are objects in the file; outcome and likelihood entries are bare values
    return path + (index,) if field is None else path + (index, field)


def create_model_service(tolerance: float = INPUT_TOLERANCE) -> ModelService:
    """Factory function to create service instance."""
    return ModelService(tolerance)
