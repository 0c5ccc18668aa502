"""
Design Service - ranking competing measurement designs
Expected utility u(d) = E_x[VSI_x] = EVSI, with d* = argmax u(d)
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from typing import List, Optional, Sequence

from errors import InvalidInputError
from schemas import (
    DecisionProblem,
    DesignComparison,
    DesignEntry,
    MeasurementModel,
    VoiReport,
)
from services.voi_service import VoiService

logger = logging.getLogger(__name__)


class DesignService:
    """
    Evaluates every proposed design with VoiService.analyze.

    Designs are independent, so they may be evaluated on a thread pool;
    results are always assembled in input order.
    """

    def __init__(self, voi: VoiService, max_workers: int = 1):
        self.voi = voi
        self.max_workers = max_workers

    def design_utility(self, problem: DecisionProblem, measurement: MeasurementModel) -> float:
        """u(d) with u(d,x) = VSI_x, which is the design's EVSI."""
        return self.voi.analyze(problem, measurement).evsi

    def compare_designs(
        self,
        problem: DecisionProblem,
        designs: Sequence[MeasurementModel],
        deltas: Optional[Sequence[float]] = None
    ) -> DesignComparison:
        """
        Evaluate all designs and mark the EVSI argmax (earliest wins ties) as best.

        Raises:
            InvalidInputError: If no designs are given
        """
        if not designs:
            raise InvalidInputError("At least one measurement design is required for a comparison")

        reports = self._evaluate(problem, list(designs), deltas)

        entries = tuple(
            DesignEntry(
                name=report.measurement,
                expected_utility=report.evsi,
                ev_less_uncertainty=report.ev_less_uncertainty,
                sigma_vsi=report.sigma_vsi,
                rvsi=report.rvsi,
                report=report,
            )
            for report in reports
        )

        best = 0
        for i, entry in enumerate(entries):
            if entry.expected_utility > entries[best].expected_utility:
                best = i

        logger.debug("Best of %d design(s): %s (u=%.6g)",
                     len(entries), entries[best].name, entries[best].expected_utility)

        return DesignComparison(
            entries=entries,
            best_design=entries[best].name,
            deltas=tuple(r.delta for r in reports[0].rvsi),
        )

    def _evaluate(
        self,
        problem: DecisionProblem,
        designs: List[MeasurementModel],
        deltas: Optional[Sequence[float]]
    ) -> List[VoiReport]:
        if self.max_workers <= 1 or len(designs) == 1:
            return [self.voi.analyze(problem, d, deltas) for d in designs]

        # map() yields in submission order regardless of completion order
        with ThreadPoolExecutor(max_workers=self.max_workers) as pool:
            return list(pool.map(lambda d: self.voi.analyze(problem, d, deltas), designs))


def create_design_service(voi: VoiService, max_workers: int = 1) -> DesignService:
    """Factory function to create service instance."""
    return DesignService(voi, max_workers)
