"""Error types shared across the engine.

Every expected failure carries a stable machine-readable code (the class
attribute ``code``) plus a human-oriented detail string. The CLI prints
failures as ``error: <Code>: <detail>`` and exits 1; the HTTP layer maps
``http_status`` onto the response and ships ``{code, detail}`` as JSON.
"""


class EngineError(Exception):
    """Base class for all expected failures raised by engine modules."""

    code = "EngineError"
    http_status = 400

    def __init__(self, detail: str = ""):
        super().__init__(detail)
        self.detail = detail

    def __str__(self) -> str:
        return f"{self.code}: {self.detail}" if self.detail else self.code


# ---- parse and validation failures (HTTP 400) ----

class MalformedXml(EngineError):
    code = "MalformedXml"


class BadInput(EngineError):
    """Malformed JSON or CSV payloads and structurally broken uploads."""

    code = "BadInput"


class UnknownElement(EngineError):
    """A MathML element outside the supported subset."""

    code = "UnknownElement"


class UndeclaredVariable(EngineError):
    code = "UndeclaredVariable"


class DuplicateEquationId(EngineError):
    code = "DuplicateEquationId"


class InvalidStructure(EngineError):
    """A descriptor whose validity report lists violations."""

    code = "InvalidStructure"


class NoPerfectMatching(EngineError):
    code = "NoPerfectMatching"


class RoleConflict(EngineError):
    code = "RoleConflict"


class EmptyFdSet(EngineError):
    code = "EmptyFdSet"


class KeyViolation(EngineError):
    code = "KeyViolation"


class UnknownSymbol(EngineError):
    code = "UnknownSymbol"


class UnknownAttribute(EngineError):
    code = "UnknownAttribute"


class NonPositiveWeight(EngineError):
    code = "NonPositiveWeight"


class UnfactorizedTrial(EngineError):
    code = "UnfactorizedTrial"


class UnknownAssignment(EngineError):
    code = "UnknownAssignment"


class NonPositiveSigma(EngineError):
    code = "NonPositiveSigma"


class EmptyObservationSet(EngineError):
    code = "EmptyObservationSet"


class MissingPrediction(EngineError):
    code = "MissingPrediction"


class NonFiniteState(EngineError):
    code = "NonFiniteState"


# ---- unknown entities (HTTP 404) ----

class NotFoundError(EngineError):
    http_status = 404


class UnknownPhenomenon(NotFoundError):
    code = "UnknownPhenomenon"


class UnknownHypothesis(NotFoundError):
    code = "UnknownHypothesis"


class UnknownRelation(NotFoundError):
    code = "UnknownRelation"


class ProjectNotFound(NotFoundError):
    code = "ProjectNotFound"


# ---- pipeline ordering conflicts (HTTP 409) ----

class ConflictError(EngineError):
    http_status = 409


class DuplicateRelation(ConflictError):
    code = "DuplicateRelation"


class DuplicatePhenomenon(ConflictError):
    code = "DuplicatePhenomenon"


class DuplicateHypothesis(ConflictError):
    code = "DuplicateHypothesis"


class DuplicateTarget(ConflictError):
    code = "DuplicateTarget"


class ProjectExists(ConflictError):
    code = "ProjectExists"


class StageViolation(ConflictError):
    code = "StageViolation"


class NoTrials(ConflictError):
    code = "NoTrials"


class NotUIntroduced(ConflictError):
    code = "NotUIntroduced"
