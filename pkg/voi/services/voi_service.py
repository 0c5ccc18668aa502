"""
VoI Service - traditional and outcome-aware value-of-information metrics
EV, EVPI, EVSI plus ΔEV_x, VSI_x, σVSI and rVSI_δ for one measurement
"""

import logging
import math
from typing import Dict, Optional, Sequence, Tuple

import numpy as np

from errors import ArithmeticFault, InvalidInputError
from schemas import (
    DecisionProblem,
    MeasurementModel,
    OutcomeRow,
    RiskEntry,
    VoiReport,
)
from services.bayes_service import BayesService
from services.model_service import ModelService

logger = logging.getLogger(__name__)

# VSI_x in [-CLAMP_TOLERANCE, 0) is rounding noise
CLAMP_TOLERANCE = 1e-9
# Below -FAULT_TOLERANCE something is wrong with the arithmetic
FAULT_TOLERANCE = 1e-6
# Inclusive rVSI threshold: VSI_x <= delta + RISK_TOLERANCE
RISK_TOLERANCE = 1e-9


class VoiService:
    """
    Computes every metric for one decision problem and one measurement model.

    Argmax ties always go to the earliest action in input order.
    """

    def __init__(
        self,
        bayes: BayesService,
        models: ModelService,
        default_deltas: Sequence[float] = (0.0,)
    ):
        self.bayes = bayes
        self.models = models
        self.default_deltas = tuple(default_deltas)

    def expected_values(self, problem: DecisionProblem) -> Dict[str, float]:
        """EV(a) = sum_s V(a,s) p(s), in action order."""
        ev = self._value_matrix(problem) @ problem.prior()
        return {action: float(value) for action, value in zip(problem.actions, ev)}

    def ev_uncertainty(self, problem: DecisionProblem) -> Tuple[float, str]:
        """Best prior expected value and the action a* attaining it."""
        ev = self._value_matrix(problem) @ problem.prior()
        best = int(np.argmax(ev))
        return float(ev[best]), problem.actions[best]

    def ev_certainty(self, problem: DecisionProblem) -> float:
        """sum_s p(s) max_a V(a,s)"""
        return float(problem.prior() @ self._value_matrix(problem).max(axis=0))

    def evpi(self, problem: DecisionProblem) -> float:
        """EV_certainty - EV_uncertainty"""
        ev_unc, _ = self.ev_uncertainty(problem)
        return self.ev_certainty(problem) - ev_unc

    def analyze(
        self,
        problem: DecisionProblem,
        measurement: MeasurementModel,
        deltas: Optional[Sequence[float]] = None
    ) -> VoiReport:
        """
        Full report for one measurement.

        Per outcome x with p(x) > 0:
            PEV_x(a) = sum_s V(a,s) p(s|x)
            ΔEV_x   = max_a PEV_x(a) - EV_uncertainty   (may be negative)
            VSI_x   = max_a PEV_x(a) - PEV_x(a*)        (>= 0)
        Aggregates:
            EV_less_uncertainty = sum_x p(x) max_a PEV_x(a)
            EVSI    = EV_less_uncertainty - EV_uncertainty
            σVSI    = sqrt(sum_x p(x) (VSI_x - EVSI)^2)
            rVSI_δ  = sum of p(x) over outcomes with VSI_x <= δ

        Raises:
            InvalidInputError: On a negative δ or mismatched dimensions
            ArithmeticFault: If some VSI_x is below -1e-6
        """
        deltas = self._resolve_deltas(deltas)

        values = self._value_matrix(problem)
        ev = values @ problem.prior()
        star = int(np.argmax(ev))
        ev_unc = float(ev[star])
        ev_cert = self.ev_certainty(problem)

        table = self.bayes.posterior_table(problem, measurement)

        rows = []
        best_values = []
        for outcome, p_x, posterior in zip(table.outcomes, table.predictive, table.posteriors):
            if posterior is None:
                continue
            pev = values @ posterior.as_array()
            best = int(np.argmax(pev))
            best_value = float(pev[best])
            best_values.append(best_value)
            rows.append(OutcomeRow(
                outcome=outcome,
                probability=p_x,
                delta_ev=best_value - ev_unc,
                vsi=self.clamp_vsi(best_value - float(pev[star]), outcome),
                posterior_action=problem.actions[best],
                action_changed=best != star,
                posterior_values=tuple(float(v) for v in pev),
            ))

        probabilities = np.array([row.probability for row in rows])
        best_values = np.array(best_values)
        vsi = np.array([row.vsi for row in rows])

        ev_less = float(probabilities @ best_values) if rows else ev_unc
        evsi = ev_less - ev_unc
        sigma = math.sqrt(float(probabilities @ (vsi - evsi) ** 2)) if rows else 0.0

        rvsi = tuple(
            RiskEntry(delta=delta, probability=self._risk(probabilities, vsi, delta))
            for delta in deltas
        )

        logger.debug("%s / %s: EVSI=%.6g σVSI=%.6g over %d outcome(s)",
                     problem.name, measurement.name, evsi, sigma, len(rows))

        return VoiReport(
            problem=problem.name,
            measurement=measurement.name,
            actions=problem.actions,
            ev_per_action={a: float(v) for a, v in zip(problem.actions, ev)},
            optimal_action=problem.actions[star],
            ev_uncertainty=ev_unc,
            ev_certainty=ev_cert,
            evpi=ev_cert - ev_unc,
            ev_less_uncertainty=ev_less,
            evsi=evsi,
            sigma_vsi=sigma,
            rvsi=rvsi,
            rows=tuple(rows),
            zero_outcomes=table.zero_outcomes,
        )

    def perfect_info_report(
        self,
        problem: DecisionProblem,
        deltas: Optional[Sequence[float]] = None
    ) -> VoiReport:
        """analyze() with the state substituted for the outcome; its EVSI is the EVPI."""
        return self.analyze(problem, self.models.perfect_measurement(problem), deltas)

    def clamp_vsi(self, value: float, outcome: str = "?") -> float:
        """
        Snap rounding noise below zero to 0.

        Raises:
            ArithmeticFault: If value < -1e-6
        """
        if value >= 0.0:
            return value
        if value >= -CLAMP_TOLERANCE:
            return 0.0
        if value < -FAULT_TOLERANCE:
            raise ArithmeticFault(
                f"VSI for outcome '{outcome}' is {value:.3e}; it cannot be negative"
            )
        logger.warning("VSI for outcome %s is %.3e, clamped to 0", outcome, value)
        return 0.0

    def _risk(self, probabilities: np.ndarray, vsi: np.ndarray, delta: float) -> float:
        if probabilities.size == 0:
            return 0.0
        return float(probabilities[vsi <= delta + RISK_TOLERANCE].sum())

    def _resolve_deltas(self, deltas: Optional[Sequence[float]]) -> Tuple[float, ...]:
        if deltas is None or len(deltas) == 0:
            return self.default_deltas
        for delta in deltas:
            if not delta >= 0:
                raise InvalidInputError(f"rVSI threshold must be >= 0, got {delta}")
        return tuple(float(d) for d in deltas)

    def _value_matrix(self, problem: DecisionProblem) -> np.ndarray:
        try:
            values = problem.value_matrix()
        except ValueError:
            raise InvalidInputError(f"Problem '{problem.name}': value rows have unequal lengths")

        expected = (len(problem.actions), len(problem.states.labels))
        if values.shape != expected:
            raise InvalidInputError(
                f"Problem '{problem.name}': value table shape {values.shape} "
                f"does not match (actions, states) = {expected}"
            )
        return values


def create_voi_service(
    bayes: BayesService,
    models: ModelService,
    default_deltas: Sequence[float] = (0.0,)
) -> VoiService:
    """Factory function to create service instance."""
    return VoiService(bayes, models, default_deltas)
