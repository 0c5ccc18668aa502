"""
Bayes Service - predictive and posterior tables
Discrete Bayes' theorem over every outcome of one measurement
"""

import logging
from typing import Dict, List, Optional

import numpy as np

from errors import InvalidInputError
from schemas import DecisionProblem, MeasurementModel, PosteriorTable, ProbVector

logger = logging.getLogger(__name__)

UP = "up"
DOWN = "down"
SAME = "same"


class BayesService:
    """Pure functions over immutable inputs; safe to call from any thread."""

    def posterior_table(
        self,
        problem: DecisionProblem,
        measurement: MeasurementModel
    ) -> PosteriorTable:
        """
        p(x_j) = sum_k p(x_j|s_k) p(s_k) and p(s_i|x_j) = p(x_j|s_i) p(s_i) / p(x_j).

        Outcomes with p(x_j) = 0 carry no posterior and are listed in zero_outcomes.

        Raises:
            InvalidInputError: If the likelihood shape does not match the problem
        """
        prior = problem.prior()
        try:
            likelihood = measurement.likelihood_matrix()
        except ValueError:
            raise InvalidInputError(f"Measurement '{measurement.name}': likelihood rows have unequal lengths")

        expected = (len(prior), len(measurement.outcomes))
        if likelihood.shape != expected:
            raise InvalidInputError(
                f"Measurement '{measurement.name}': likelihood shape {likelihood.shape} "
                f"does not match (states, outcomes) = {expected}"
            )

        joint = likelihood * prior[:, np.newaxis]
        predictive = joint.sum(axis=0)

        posteriors: List[Optional[ProbVector]] = []
        zero_outcomes = []
        for j, outcome in enumerate(measurement.outcomes):
            if predictive[j] > 0.0:
                column = joint[:, j] / predictive[j]
                posteriors.append(ProbVector(
                    labels=problem.states.labels,
                    probabilities=tuple(float(v) for v in column),
                ))
            else:
                posteriors.append(None)
                zero_outcomes.append(outcome)

        if zero_outcomes:
            logger.info("⚠️ %s: outcomes with zero predictive probability skipped: %s",
                        measurement.name, ", ".join(zero_outcomes))

        return PosteriorTable(
            measurement=measurement.name,
            outcomes=measurement.outcomes,
            predictive=tuple(float(v) for v in predictive),
            posteriors=tuple(posteriors),
            zero_outcomes=tuple(zero_outcomes),
        )

    def belief_shifts(
        self,
        problem: DecisionProblem,
        table: PosteriorTable
    ) -> Dict[str, Dict[str, str]]:
        """
        Direction of each posterior p(s|x) relative to the prior p(s).

        Returns:
            {outcome: {state: 'up' | 'down' | 'same'}}, zero-predictive outcomes omitted
        """
        shifts = {}
        for outcome, posterior in zip(table.outcomes, table.posteriors):
            if posterior is None:
                continue
            shifts[outcome] = {
                label: self._direction(after, before)
                for label, after, before in zip(
                    problem.states.labels, posterior.probabilities, problem.states.probabilities
                )
            }
        return shifts

    def _direction(self, after: float, before: float) -> str:
        if after > before:
            return UP
        if after < before:
            return DOWN
        return SAME


def create_bayes_service() -> BayesService:
    """Factory function to create service instance."""
    return BayesService()
