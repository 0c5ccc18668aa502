"""
Report Service - human-readable tables and CSV exports
Tables round half-to-even for reading; CSV keeps full float precision
"""

import csv
import io
from decimal import ROUND_HALF_EVEN, Decimal
from typing import Dict, List, Optional, Sequence, Tuple

from schemas import DecisionProblem, DesignComparison, DesignEntry, PosteriorTable, VoiReport
from services.bayes_service import DOWN, UP

ARROWS = {UP: " ↑", DOWN: " ↓"}

METRIC_INTERPRETATIONS: Tuple[Tuple[str, str], ...] = (
    ("ΔEV_x", "Given an observed outcome x, how much it changed belief in the system's expected value."),
    ("VSI_x", "How much the updated expected value improves by choosing a better action rather than the original one."),
    ("σVSI", "The uncertainty in the measurement's value before knowing x."),
    ("rVSI_δ", "The probability that the measurement has low value (at most δ) for decision-making; "
               "of particular relevance to risk-averse decision-makers."),
)

ANALYZE_CSV_HEADER = ("outcome", "p_x", "delta_ev", "vsi", "posterior_action", "action_changed")


def round_half_even(value: float, decimals: int = 4) -> str:
    """0.03415 -> '0.0342'; never renders '-0.0000'."""
    quantum = Decimal(1).scaleb(-decimals)
    rounded = Decimal(repr(float(value))).quantize(quantum, rounding=ROUND_HALF_EVEN)
    if rounded.is_zero():
        rounded = abs(rounded)
    return f"{rounded:f}"


def format_percent(probability: float) -> str:
    """0.063 -> '6.3%'"""
    return round_half_even(probability * 100.0, 1) + "%"


def format_delta(delta: float) -> str:
    """Threshold label: 0 -> '0', 0.05 -> '0.05'"""
    return f"{delta:g}"


def full_precision(value: float) -> str:
    # Shortest text that reads back as the same float
    return repr(float(value))


class ReportService:
    """Renders VoiReports, comparisons and sweeps. Stateless apart from the table precision."""

    def __init__(self, decimals: int = 4):
        self.decimals = decimals

    def _num(self, value: float) -> str:
        return round_half_even(value, self.decimals)

    # ----------------------------------------
    # analyze
    # ----------------------------------------

    def analyze_table(
        self,
        report: VoiReport,
        posteriors: Optional[PosteriorTable] = None,
        shifts: Optional[Dict[str, Dict[str, str]]] = None,
        explain: bool = False
    ) -> str:
        lines = [f"Problem: {report.problem}", f"Measurement: {report.measurement}", ""]

        for action, ev in report.ev_per_action.items():
            lines.append(f"EV({action}) = {self._num(ev)}")
        lines.append(f"a* = {report.optimal_action}")
        lines.append(f"EV_uncertainty = {self._num(report.ev_uncertainty)}")
        lines.append(f"EV_certainty = {self._num(report.ev_certainty)}")
        lines.append(f"EVPI = {self._num(report.evpi)}")
        lines.append(f"EV_less_uncertainty = {self._num(report.ev_less_uncertainty)}")
        lines.append(f"EVSI = {self._num(report.evsi)} ± {self._num(report.sigma_vsi)}")
        for entry in report.rvsi:
            lines.append(
                f"rVSI_{format_delta(entry.delta)} = {self._num(entry.probability)} "
                f"({format_percent(entry.probability)})"
            )

        lines.append("")
        lines.append("Outcomes:")
        for row in report.rows:
            if row.action_changed:
                narration = f"{row.posterior_action} instead"
            else:
                narration = f"still {report.optimal_action}"
            lines.append(
                f"x={row.outcome}: ΔEV={self._num(row.delta_ev)}, VSI={self._num(row.vsi)}, "
                f"p={self._num(row.probability)}, {narration}"
            )
        if report.zero_outcomes:
            lines.append(f"Outcomes with p(x) = 0 (skipped): {', '.join(report.zero_outcomes)}")

        if posteriors is not None:
            lines.append("")
            lines.extend(self._posterior_lines(posteriors, shifts or {}))

        if explain:
            lines.append("")
            lines.append("What the metrics mean:")
            for metric, meaning in METRIC_INTERPRETATIONS:
                lines.append(f"  {metric}: {meaning}")

        return "\n".join(lines) + "\n"

    def _posterior_lines(self, table: PosteriorTable, shifts: Dict[str, Dict[str, str]]) -> List[str]:
        lines = ["Posteriors p(s|x) (↑/↓ against the prior):"]
        for outcome, p_x, posterior in zip(table.outcomes, table.predictive, table.posteriors):
            if posterior is None:
                continue
            marks = shifts.get(outcome, {})
            cells = [
                f"{label}={self._num(p)}{ARROWS.get(marks.get(label, ''), '')}"
                for label, p in posterior.entries
            ]
            lines.append(f"x={outcome} (p={self._num(p_x)}): " + ", ".join(cells))
        return lines

    def analyze_csv(self, report: VoiReport) -> str:
        """One line per outcome with p(x) > 0, the data behind a p(x)/VSI_x bar chart."""
        rows = [
            (
                row.outcome,
                full_precision(row.probability),
                full_precision(row.delta_ev),
                full_precision(row.vsi),
                row.posterior_action,
                "true" if row.action_changed else "false",
            )
            for row in report.rows
        ]
        return self._csv(ANALYZE_CSV_HEADER, rows)

    # ----------------------------------------
    # compare
    # ----------------------------------------

    def comparison_table(
        self,
        problem: DecisionProblem,
        comparison: DesignComparison,
        order: Optional[Sequence[DesignEntry]] = None
    ) -> str:
        """One line per design, in `order` if given (e.g. DesignComparison.ranked())."""
        ev_uncertainty = comparison.entries[0].report.ev_uncertainty
        lines = [
            f"Design comparison for '{problem.name}' (EV_uncertainty = {self._num(ev_uncertainty)})",
            "",
        ]
        for entry in order if order is not None else comparison.entries:
            risks = ", ".join(
                f"rVSI_{format_delta(r.delta)} = {format_percent(r.probability)}" for r in entry.rvsi
            )
            line = (
                f"{entry.name}: EVSI = {self._num(entry.expected_utility)} ± {self._num(entry.sigma_vsi)}, "
                f"{risks}, EV_less_uncertainty = {self._num(entry.ev_less_uncertainty)}"
            )
            if entry.name == comparison.best_design:
                line += "  <- best"
            lines.append(line)
        return "\n".join(lines) + "\n"

    def comparison_csv(self, comparison: DesignComparison) -> str:
        header = ("design", "ev_less_uncertainty", "evsi", "sigma_vsi") + tuple(
            f"rvsi_{format_delta(d)}" for d in comparison.deltas
        ) + ("best",)
        rows = [
            (
                entry.name,
                full_precision(entry.ev_less_uncertainty),
                full_precision(entry.expected_utility),
                full_precision(entry.sigma_vsi),
                *(full_precision(r.probability) for r in entry.rvsi),
                "true" if entry.name == comparison.best_design else "false",
            )
            for entry in comparison.entries
        ]
        return self._csv(header, rows)

    # ----------------------------------------
    # sweep
    # ----------------------------------------

    def sweep_csv(self, report: VoiReport) -> str:
        rows = [(full_precision(r.delta), full_precision(r.probability)) for r in report.rvsi]
        return self._csv(("delta", "rvsi"), rows)

    def _csv(self, header: Sequence[str], rows: Sequence[Sequence[str]]) -> str:
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)
        return buffer.getvalue()


def create_report_service(decimals: int = 4) -> ReportService:
    """Factory function to create service instance."""
    return ReportService(decimals)
