"""
Problem File Service - reading and writing decision-problem documents
Strict JSON documents in, DecisionProblem + MeasurementModels out (and back)
"""

import json
import logging
from pathlib import Path
from typing import Annotated, List, NamedTuple, Optional, Sequence, Tuple, Union

from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from errors import InvalidInputError, ProblemFileError, UsageError
from schemas import (
    DecisionProblem,
    MeasurementModel,
    ProbVector,
    Violation,
    format_path,
)
from services.model_service import ModelService

logger = logging.getLogger(__name__)

Probability = Annotated[float, Field(ge=0.0, le=1.0)]
Threshold = Annotated[float, Field(ge=0.0)]
FieldPath = Tuple[Union[str, int], ...]


# ============================================
# Document models (on-disk shape)
# ============================================

class DocumentModel(BaseModel):
    model_config = ConfigDict(extra="forbid", strict=True)


class StateDocument(DocumentModel):
    label: str
    prior: float


class BinomialDocument(DocumentModel):
    n: int = Field(ge=1)
    survival: List[Probability]


class MeasurementDocument(DocumentModel):
    name: str
    outcomes: Optional[List[str]] = None
    likelihood: Optional[List[List[float]]] = None
    binomial: Optional[BinomialDocument] = None

    @model_validator(mode="after")
    def check_form(self) -> "MeasurementDocument":
        explicit = self.outcomes is not None or self.likelihood is not None
        if explicit and self.binomial is not None:
            raise ValueError("give either outcomes + likelihood or binomial, not both")
        if not explicit and self.binomial is None:
            raise ValueError("give either outcomes + likelihood or binomial")
        if explicit and (self.outcomes is None or self.likelihood is None):
            raise ValueError("explicit measurements need both outcomes and likelihood")
        return self


class ProblemDocument(DocumentModel):
    name: str = "problem"
    states: List[StateDocument] = Field(min_length=1)
    actions: List[str] = Field(min_length=1)
    values: List[List[float]]
    measurements: List[MeasurementDocument] = Field(default_factory=list)
    deltas: Optional[List[Threshold]] = None


class ParsedProblem(NamedTuple):
    problem: DecisionProblem
    measurements: Tuple[MeasurementModel, ...]
    deltas: Optional[Tuple[float, ...]]


# ============================================
# Service
# ============================================

class ProblemFileService:
    """
    Parses problem documents into domain types and renders them back.

    Syntax and schema failures raise ProblemFileError; documents that parse
    but break a model invariant raise InvalidInputError. Both name the field
    path and the line it sits on.
    """

    def __init__(self, models: ModelService):
        self.models = models

    def read_problem_file(self, path: Union[str, Path]) -> ParsedProblem:
        """
        Raises:
            UsageError: If the file cannot be read
        """
        try:
            document = Path(path).read_text(encoding="utf-8")
        except OSError as e:
            raise UsageError(f"Cannot read problem file {path}: {e.strerror or e}")
        except UnicodeDecodeError as e:
            raise ProblemFileError(f"{path}: not UTF-8 text ({e.reason})")

        logger.debug("Read %d bytes from %s", len(document), path)
        return self.parse_problem_file(document)

    def parse_problem_file(self, document: str) -> ParsedProblem:
        """
        Build the problem, its measurements (in file order) and optional deltas.

        Binomial measurements are expanded through ModelService.binomial_trial.
        """
        data = self._load_json(document)

        try:
            parsed = ProblemDocument.model_validate(data)
        except ValidationError as e:
            lines = []
            for error in e.errors():
                loc = tuple(error["loc"])
                lines.append(self._describe(document, loc, error["msg"]))
            raise ProblemFileError("Problem file does not match the schema:\n  " + "\n  ".join(lines))

        problem = DecisionProblem(
            name=parsed.name,
            states=ProbVector(
                labels=tuple(s.label for s in parsed.states),
                probabilities=tuple(float(s.prior) for s in parsed.states),
            ),
            actions=tuple(parsed.actions),
            values=tuple(tuple(float(v) for v in row) for row in parsed.values),
        )

        measurements = []
        for i, m in enumerate(parsed.measurements):
            if m.binomial is not None:
                try:
                    measurements.append(self.models.binomial_trial(m.name, m.binomial.n, m.binomial.survival))
                except ValueError as e:
                    raise ProblemFileError(self._describe(document, ("measurements", i, "binomial"), str(e)))
            else:
                measurements.append(MeasurementModel(
                    name=m.name,
                    outcomes=tuple(m.outcomes),
                    likelihood=tuple(tuple(float(v) for v in row) for row in m.likelihood),
                ))

        violations = self._collect_violations(problem, measurements)
        if violations:
            lines = [self._describe(document, v.path, v.message) for v in violations]
            raise InvalidInputError("Problem file failed validation:\n  " + "\n  ".join(lines))

        logger.info("📄 Loaded problem '%s': %d state(s), %d action(s), %d measurement(s)",
                    problem.name, len(problem.state_labels), len(problem.actions), len(measurements))

        return ParsedProblem(
            problem=problem,
            measurements=tuple(measurements),
            deltas=tuple(float(d) for d in parsed.deltas) if parsed.deltas is not None else None,
        )

    def render_problem_file(
        self,
        problem: DecisionProblem,
        measurements: Sequence[MeasurementModel] = (),
        deltas: Optional[Sequence[float]] = None
    ) -> str:
        """Canonical document; binomial measurements stay in generative form."""
        document = ProblemDocument(
            name=problem.name,
            states=[StateDocument(label=label, prior=p) for label, p in problem.states.entries],
            actions=list(problem.actions),
            values=[list(row) for row in problem.values],
            measurements=[self._measurement_document(m) for m in measurements],
            deltas=list(deltas) if deltas is not None else None,
        )
        return document.model_dump_json(indent=2, exclude_none=True) + "\n"

    def _measurement_document(self, measurement: MeasurementModel) -> MeasurementDocument:
        if measurement.trial is not None:
            return MeasurementDocument(
                name=measurement.name,
                binomial=BinomialDocument(n=measurement.trial.n, survival=list(measurement.trial.survival)),
            )
        return MeasurementDocument(
            name=measurement.name,
            outcomes=list(measurement.outcomes),
            likelihood=[list(row) for row in measurement.likelihood],
        )

    def _collect_violations(
        self,
        problem: DecisionProblem,
        measurements: List[MeasurementModel]
    ) -> List[Violation]:
        violations = list(self.models.validate_problem(problem).violations)

        seen = set()
        for i, m in enumerate(measurements):
            for v in self.models.validate_measurement(problem, m).violations:
                path = v.path
                # Generated likelihoods only exist in the file as binomial parameters
                if m.trial is not None and path[:1] == ("likelihood",):
                    path = ("binomial", "survival") + path[1:2]
                violations.append(Violation(path=("measurements", i) + path, message=v.message))
            if m.name in seen:
                violations.append(Violation(
                    path=("measurements", i, "name"),
                    message=f"duplicate measurement name '{m.name}'"
                ))
            seen.add(m.name)
        return violations

    def _load_json(self, document: str):
        def reject_constant(name: str):
            raise ValueError(f"{name} is not a valid number")

        try:
            return json.loads(document, parse_constant=reject_constant)
        except json.JSONDecodeError as e:
            raise ProblemFileError(f"Problem file is not valid JSON: line {e.lineno}, column {e.colno}: {e.msg}")
        except ValueError as e:
            raise ProblemFileError(f"Problem file is not valid JSON: {e}")

    def _describe(self, document: str, path: FieldPath, message: str) -> str:
        line = locate_line(document, path)
        where = format_path(path) or "<document>"
        return f"{where} (line {line}): {message}" if line else f"{where}: {message}"


# ============================================
# Line lookup for a field path
# ============================================

def locate_line(document: str, path: FieldPath) -> Optional[int]:
    """
    1-based line of the value at `path` in a JSON document.

    Falls back to the deepest container that exists; None if the walk runs off the text.
    """
    try:
        offset = _find(document, 0, tuple(path))
    except (IndexError, ValueError):
        return None
    return document.count("\n", 0, offset) + 1


def _find(text: str, i: int, path: FieldPath) -> int:
    i = _skip_ws(text, i)
    if not path:
        return i

    head, rest = path[0], path[1:]
    if text[i] == "{" and isinstance(head, str):
        start = i
        i = _skip_ws(text, i + 1)
        while text[i] != "}":
            end = _skip_string(text, i)
            key = json.loads(text[i:end])
            i = _skip_ws(text, end)
            if text[i] != ":":
                raise ValueError("expected ':'")
            value = _skip_ws(text, i + 1)
            if key == head:
                return _find(text, value, rest)
            i = _skip_ws(text, _skip_value(text, value))
            if text[i] == ",":
                i = _skip_ws(text, i + 1)
        return start
    if text[i] == "[" and isinstance(head, int):
        start = i
        i = _skip_ws(text, i + 1)
        index = 0
        while text[i] != "]":
            if index == head:
                return _find(text, i, rest)
            i = _skip_ws(text, _skip_value(text, i))
            if text[i] == ",":
                i = _skip_ws(text, i + 1)
            index += 1
        return start
    return i


def _skip_ws(text: str, i: int) -> int:
    while text[i] in " \t\r\n":
        i += 1
    return i


def _skip_string(text: str, i: int) -> int:
    if text[i] != '"':
        raise ValueError("expected string")
    i += 1
    while text[i] != '"':
        i += 2 if text[i] == "\\" else 1
    return i + 1


def _skip_value(text: str, i: int) -> int:
    if text[i] == '"':
        return _skip_string(text, i)
    if text[i] in "{[":
        depth = 0
        while True:
            ch = text[i]
            if ch == '"':
                i = _skip_string(text, i)
                continue
            if ch in "{[":
                depth += 1
            elif ch in "}]":
                depth -= 1
                if depth == 0:
                    return i + 1
            i += 1
    while i < len(text) and text[i] not in ",]} \t\r\n":
        i += 1
    return i


def create_problem_file_service(models: ModelService) -> ProblemFileService:
    """Factory function to create service instance."""
    return ProblemFileService(models)
